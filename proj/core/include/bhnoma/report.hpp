/*
   Copyright 2026 The bhnoma Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bhnoma {

inline constexpr const char* kReportFormatVersion = "1";
inline constexpr const char* kToolVersion = BHNOMA_VERSION_STRING;

/// Serialised outcome of one scheduling run.
struct RunReport {
    std::string format_version = kReportFormatVersion;
    std::string tool_version = kToolVersion;
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;
    std::string scheduler;
    std::string reuse;
    std::vector<double> demand;    // bit/s per user
    std::vector<double> capacity;  // bit/s per user
    double objective = 0.0;
    std::vector<double> trace;
    std::vector<std::vector<int>> schedule;  // active beams per slot
    bool feasible = true;
    std::vector<int> min_rate_failures;
    int passes = 0;
    int power_solves = 0;
    int power_not_converged = 0;
    double wall_clock_seconds = 0.0;
};

/// Sum of squared gaps recomputed from the stored vectors.
double recomputed_objective(const RunReport& report);

/// JSON text; numbers are printed with round-trip precision so two runs with
/// the same inputs serialise identically apart from wall_clock_seconds.
std::string report_to_json(const RunReport& report, bool include_wall_clock = true);
/// Throws ParseError on malformed or incomplete documents.
RunReport report_from_json(std::string_view text);

}  // namespace bhnoma

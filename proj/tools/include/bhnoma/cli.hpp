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
#include <iosfwd>
#include <string>
#include <vector>

namespace bhnoma::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,
    kExitInfeasible = 2,
};

/// Entry point behind the `bhnoma` executable. `args` excludes the program
/// name. Results go to `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Seed used when --seed is absent: BHNOMA_SEED if set and numeric, else 1.
std::uint64_t default_seed();

/// Parses "lo:hi:step" into the inclusive grid lo, lo+step, ... <= hi.
/// Returns an empty vector for malformed or empty ranges.
std::vector<double> parse_range(const std::string& text);

/// Checks a file written by any subcommand against its schema. Returns an
/// empty string when valid, else a description of the first problem.
std::string check_output_file(const std::string& path);

}  // namespace bhnoma::cli

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


#include "bhnoma/report.hpp"

#include <json.hpp>

#include "bhnoma/errors.hpp"

namespace bhnoma {

using nlohmann::json;

double recomputed_objective(const RunReport& report) {
    if (report.demand.size() != report.capacity.size()) {
        throw LengthMismatch("report demand and capacity vectors differ in length");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < report.demand.size(); ++i) {
        const double gap = report.capacity[i] - report.demand[i];
        sum += gap * gap;
    }
    return sum;
}

std::string report_to_json(const RunReport& r, bool include_wall_clock) {
    json users = json::array();
    for (std::size_t i = 0; i < r.demand.size(); ++i) {
        users.push_back({{"user", i}, {"demand", r.demand[i]}, {"capacity", r.capacity.at(i)}});
    }
    json j = {
        {"format_version", r.format_version},
        {"tool_version", r.tool_version},
        {"scenario_hash", r.scenario_hash},
        {"seed", r.seed},
        {"scheduler", r.scheduler},
        {"reuse", r.reuse},
        {"objective", r.objective},
        {"trace", r.trace},
        {"schedule", r.schedule},
        {"feasible", r.feasible},
        {"min_rate_failures", r.min_rate_failures},
        {"passes", r.passes},
        {"power_solves", r.power_solves},
        {"power_not_converged", r.power_not_converged},
        {"users", users},
    };
    if (include_wall_clock) j["wall_clock_seconds"] = r.wall_clock_seconds;
    return j.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        RunReport r;
        r.format_version = j.at("format_version").get<std::string>();
        r.tool_version = j.at("tool_version").get<std::string>();
        r.scenario_hash = j.at("scenario_hash").get<std::uint64_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.scheduler = j.at("scheduler").get<std::string>();
        r.reuse = j.at("reuse").get<std::string>();
        r.objective = j.at("objective").get<double>();
        r.trace = j.at("trace").get<std::vector<double>>();
        r.schedule = j.at("schedule").get<std::vector<std::vector<int>>>();
        r.feasible = j.at("feasible").get<bool>();
        r.min_rate_failures = j.at("min_rate_failures").get<std::vector<int>>();
        r.passes = j.at("passes").get<int>();
        r.power_solves = j.at("power_solves").get<int>();
        r.power_not_converged = j.at("power_not_converged").get<int>();
        for (const auto& u : j.at("users")) {
            r.demand.push_back(u.at("demand").get<double>());
            r.capacity.push_back(u.at("capacity").get<double>());
        }
        if (j.contains("wall_clock_seconds")) {
            r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed run report: ") + e.what());
    }
}

}  // namespace bhnoma

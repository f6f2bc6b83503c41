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


#include "bhnoma/baselines.hpp"

#include <chrono>

#include "bhnoma/errors.hpp"

namespace bhnoma {

std::string to_string(SchedulerKind kind) {
    switch (kind) {
        case SchedulerKind::UNoma: return "unoma";
        case SchedulerKind::Oma: return "oma";
        case SchedulerKind::MaxSinr: return "maxsinr";
        case SchedulerKind::Periodic: return "periodic";
    }
    return "unoma";
}

SchedulerKind parse_scheduler_kind(std::string_view text) {
    if (text == "unoma") return SchedulerKind::UNoma;
    if (text == "oma") return SchedulerKind::Oma;
    if (text == "maxsinr") return SchedulerKind::MaxSinr;
    if (text == "periodic") return SchedulerKind::Periodic;
    throw ParseError("unknown scheduler '" + std::string(text) + "'");
}

SchedulerOptions scheduler_options(SchedulerKind kind) {
    SchedulerOptions o;
    switch (kind) {
        case SchedulerKind::UNoma: break;
        case SchedulerKind::Oma: o.service = ServiceMode::Orthogonal; break;
        case SchedulerKind::MaxSinr:
            o.selection = BeamSelection::MaxSinr;
            o.preallocate = false;
            break;
        case SchedulerKind::Periodic:
            o.selection = BeamSelection::Periodic;
            o.preallocate = false;
            break;
    }
    return o;
}

WindowResult oma_bh(const ScenarioConfig& cfg, const std::vector<UserTerminal>& users,
                    const std::vector<ChannelState>& channels) {
    return allocate_timeslots(cfg, users, channels, scheduler_options(SchedulerKind::Oma));
}

WindowResult max_sinr_bh(const ScenarioConfig& cfg, const std::vector<UserTerminal>& users,
                         const std::vector<ChannelState>& channels) {
    return allocate_timeslots(cfg, users, channels, scheduler_options(SchedulerKind::MaxSinr));
}

WindowResult periodic_bh(const ScenarioConfig& cfg, const std::vector<UserTerminal>& users,
                         const std::vector<ChannelState>& channels) {
    return allocate_timeslots(cfg, users, channels, scheduler_options(SchedulerKind::Periodic));
}

std::vector<int> apply_reuse_mode(const ResourcePlan& plan, ReuseMode mode) {
    std::vector<int> colors(static_cast<std::size_t>(plan.beam_count));
    for (int b = 0; b < plan.beam_count; ++b) colors[b] = beam_color(mode, b);
    return colors;
}

RunReport run_scheduler(const ScenarioConfig& cfg, SchedulerKind kind, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const auto users = generate_users(cfg, seed);
    const auto channels = draw_window(cfg, users, seed);
    const WindowResult r = allocate_timeslots(cfg, users, channels, scheduler_options(kind));

    RunReport rep;
    rep.scenario_hash = scenario_hash(cfg);
    rep.seed = seed;
    rep.scheduler = to_string(kind);
    rep.reuse = to_string(cfg.reuse_mode);
    for (const auto& u : users) rep.demand.push_back(u.demand);
    rep.capacity = r.capacity;
    rep.objective = r.objective;
    rep.trace = r.trace;
    rep.schedule = r.plan.schedule();
    rep.feasible = r.feasible;
    rep.min_rate_failures = r.min_rate_failures;
    rep.passes = r.passes;
    rep.power_solves = r.power_solves;
    rep.power_not_converged = r.power_not_converged;
    rep.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

RunReport run_joint_optimization(const ScenarioConfig& cfg, std::uint64_t seed) {
    return run_scheduler(cfg, SchedulerKind::UNoma, seed);
}

}  // namespace bhnoma

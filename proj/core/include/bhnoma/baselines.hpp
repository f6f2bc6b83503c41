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

#include "bhnoma/optimizer.hpp"
#include "bhnoma/report.hpp"

namespace bhnoma {

enum class SchedulerKind { UNoma, Oma, MaxSinr, Periodic };

std::string to_string(SchedulerKind kind);
/// Accepts "unoma", "oma", "maxsinr", "periodic".
SchedulerKind parse_scheduler_kind(std::string_view text);
SchedulerOptions scheduler_options(SchedulerKind kind);

/// Orthogonal service: the residual-demand slot schedule, each served user
/// alone on its carriers at full power.
WindowResult oma_bh(const ScenarioConfig& cfg, const std::vector<UserTerminal>& users,
                    const std::vector<ChannelState>& channels);
/// Per slot, the B0 beams holding the highest single-user SINR.
WindowResult max_sinr_bh(const ScenarioConfig& cfg, const std::vector<UserTerminal>& users,
                         const std::vector<ChannelState>& channels);
/// Round-robin illumination of consecutive index blocks of B0 beams.
WindowResult periodic_bh(const ScenarioConfig& cfg, const std::vector<UserTerminal>& users,
                         const std::vector<ChannelState>& channels);

/// Colour tag (polarisation / sub-band) of every beam in `plan` under `mode`.
std::vector<int> apply_reuse_mode(const ResourcePlan& plan, ReuseMode mode);

/// Users, channels and schedule for `seed`, packaged as a report.
RunReport run_scheduler(const ScenarioConfig& cfg, SchedulerKind kind, std::uint64_t seed);
/// run_scheduler with the U-NOMA scheduler.
RunReport run_joint_optimization(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace bhnoma

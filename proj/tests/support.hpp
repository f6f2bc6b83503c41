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
#include <vector>

#include "bhnoma/channel.hpp"
#include "bhnoma/scenario.hpp"

namespace bhnoma::testing {

/// Small but complete downlink used across tests.
inline ScenarioConfig small_config(int beams = 4, int users = 4, int slots = 4, int active = 2) {
    ScenarioConfig cfg;
    cfg.beam_count = beams;
    cfg.users_per_beam = users;
    cfg.window_slots = slots;
    cfg.max_active_beams = active;
    cfg.total_subcarriers = 2;
    cfg.subcarriers_per_beam = 2;
    cfg.max_carriers_per_user = 2;
    cfg.optimizer_n1 = 10;
    cfg.optimizer_n2 = 30;
    cfg.optimizer_n3 = 10;
    return cfg;
}

struct Instance {
    ScenarioConfig cfg;
    std::vector<UserTerminal> users;
    std::vector<ChannelState> channels;
};

inline Instance make_instance(const ScenarioConfig& cfg, std::uint64_t seed) {
    Instance in{cfg, generate_users(cfg, seed), {}};
    in.channels = draw_window(cfg, in.users, seed);
    return in;
}

}  // namespace bhnoma::testing

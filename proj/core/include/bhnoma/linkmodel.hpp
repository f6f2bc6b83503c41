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
#include <vector>

#include "bhnoma/channel.hpp"
#include "bhnoma/scenario.hpp"

namespace bhnoma {

/// A transmission unit inside one beam and slot: either a NOMA pair
/// (strong user n, weak user m, shared carrier set, split a_n / 1 - a_n) or a
/// single user served orthogonally at full power (weak == -1).
struct ServiceUnit {
    int strong = -1;
    int weak = -1;
    std::uint32_t carriers = 0;  // bit k set = subcarrier k of the beam
    double a_n = 0.5;

    bool paired() const { return weak >= 0; }
    double a_m() const { return 1.0 - a_n; }
    bool serves(int user) const { return user == strong || (paired() && user == weak); }
};

struct BeamAllocation {
    int beam = 0;
    std::vector<ServiceUnit> units;
};

/// Everything transmitted during one slot. A beam is active (delta_bt = 1)
/// exactly when it has an entry here.
struct SlotPlan {
    std::vector<BeamAllocation> beams;

    const BeamAllocation* find(int beam) const;
    bool active(int beam) const { return find(beam) != nullptr; }
};

struct ResourcePlan {
    int beam_count = 0;
    std::vector<SlotPlan> slots;

    bool active(int beam, int slot) const { return slots.at(slot).active(beam); }
    /// Active beam indices per slot, ascending.
    std::vector<std::vector<int>> schedule() const;
    std::vector<int> slots_per_beam() const;
};

// Frequency-reuse colouring. Two beams interfere only when they share a colour.
int beam_color(ReuseMode mode, int beam);
bool co_channel(ReuseMode mode, int beam_a, int beam_b);
/// Bandwidth W available to each beam; the four-colour scheme halves it.
double effective_bandwidth(const ScenarioConfig& cfg);

struct InterferenceBudget {
    double intra = 0.0;        // W, same-beam units sharing the user's carriers
    double inter = 0.0;        // W, co-channel active beams
    double estimation = 0.0;   // W, omega* Ps chi^2
    double noise = 0.0;        // W, sigma^2

    double zeta() const { return intra + inter + estimation + noise; }
};

/// Interference seen by `user` of `beam` in the slot described by `slot`.
/// Per-carrier terms are averaged over the user's carrier set.
/// Throws InactiveBeam when the beam is dark or does not serve the user.
InterferenceBudget interference(const ScenarioConfig& cfg, const SlotPlan& slot,
                                const ChannelState& channel, int beam, int user);

// SINR expressions. `gain_*` is Ps * ||diag(h) g||^2 for the relevant user
// over the shared carrier set.
double sinr_cross(double gain_n, double a_n, double a_m, double zeta_n);
double sinr_n(double gain_n, double a_n, double zeta_n);
double sinr_m(double gain_m, double a_n, double a_m, double zeta_m);

/// Rate of one carrier at SINR gamma: (W/N) log2(1 + gamma).
double carrier_rate(const ScenarioConfig& cfg, double sinr);
/// Sum over the carriers in `mask` of carrier_rate.
double rate_per_slot(const ScenarioConfig& cfg, std::uint32_t mask, double sinr);

struct SlotEvaluation {
    std::vector<double> sinr;  // per user, 0 when unserved
    std::vector<double> rate;  // bit/s per user
};

SlotEvaluation evaluate_slot(const ScenarioConfig& cfg, const SlotPlan& slot,
                             const ChannelState& channel);

/// Window capacity per user: sum of slot rates.
std::vector<double> total_capacity(const ScenarioConfig& cfg, const ResourcePlan& plan,
                                   const std::vector<ChannelState>& channels);

/// All violations of the slot-budget, carrier-count, pair-overlap and
/// power-split constraints. Empty when the plan is admissible.
std::vector<std::string> plan_violations(const ScenarioConfig& cfg, const ResourcePlan& plan,
                                         const std::vector<UserTerminal>& users);
/// Throws ValidationError with the first violation.
void validate_plan(const ScenarioConfig& cfg, const ResourcePlan& plan,
                   const std::vector<UserTerminal>& users);

/// Users whose capacity falls below min(R_min, D).
std::vector<int> min_rate_violations(const ScenarioConfig& cfg,
                                     const std::vector<UserTerminal>& users,
                                     const std::vector<double>& capacity);

}  // namespace bhnoma

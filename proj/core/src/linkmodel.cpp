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


#include "bhnoma/linkmodel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "bhnoma/errors.hpp"

namespace bhnoma {

const BeamAllocation* SlotPlan::find(int beam) const {
    for (const auto& b : beams) {
        if (b.beam == beam) return &b;
    }
    return nullptr;
}

std::vector<std::vector<int>> ResourcePlan::schedule() const {
    std::vector<std::vector<int>> out;
    out.reserve(slots.size());
    for (const auto& s : slots) {
        std::vector<int> active;
        for (const auto& b : s.beams) active.push_back(b.beam);
        std::sort(active.begin(), active.end());
        out.push_back(std::move(active));
    }
    return out;
}

std::vector<int> ResourcePlan::slots_per_beam() const {
    std::vector<int> count(static_cast<std::size_t>(beam_count), 0);
    for (const auto& s : slots) {
        for (const auto& b : s.beams) ++count.at(b.beam);
    }
    return count;
}

int beam_color(ReuseMode mode, int beam) {
    switch (mode) {
        case ReuseMode::OneColor: return 0;
        case ReuseMode::TwoColor: return beam % 2;
        case ReuseMode::FourColor: return beam % 4;
    }
    return 0;
}

bool co_channel(ReuseMode mode, int beam_a, int beam_b) {
    return beam_color(mode, beam_a) == beam_color(mode, beam_b);
}

double effective_bandwidth(const ScenarioConfig& cfg) {
    return cfg.reuse_mode == ReuseMode::FourColor ? cfg.bandwidth_per_carrier / 2.0
                                                  : cfg.bandwidth_per_carrier;
}

namespace {

const ServiceUnit* unit_of(const BeamAllocation& alloc, int user) {
    for (const auto& u : alloc.units) {
        if (u.serves(user)) return &u;
    }
    return nullptr;
}

}  // namespace

InterferenceBudget interference(const ScenarioConfig& cfg, const SlotPlan& slot,
                                const ChannelState& channel, int beam, int user) {
    const BeamAllocation* own = slot.find(beam);
    if (own == nullptr) {
        throw InactiveBeam("beam " + std::to_string(beam) + " is not illuminated in this slot");
    }
    const ServiceUnit* mine = unit_of(*own, user);
    if (mine == nullptr) {
        throw InactiveBeam("user " + std::to_string(user) + " is not served by beam " +
                           std::to_string(beam) + " in this slot");
    }

    const double ps = cfg.tx_power;
    const double chi2 = channel.path_factor[user] * channel.path_factor[user];
    InterferenceBudget budget;
    budget.estimation = cfg.channel_error_variance * ps * chi2;
    budget.noise = cfg.noise_power;

    const int used = std::popcount(mine->carriers);
    if (used == 0) return budget;

    for (int k = 0; k < channel.carriers; ++k) {
        const std::uint32_t bit = 1u << k;
        if ((mine->carriers & bit) == 0) continue;
        for (const auto& other : own->units) {
            if (&other == mine || (other.carriers & bit) == 0) continue;
            budget.intra += ps * channel.estimated_gain(user, k);
        }
        for (const auto& alloc : slot.beams) {
            if (alloc.beam == beam || !co_channel(cfg.reuse_mode, beam, alloc.beam)) continue;
            int radiating = 0;
            for (const auto& other : alloc.units) {
                if (other.carriers & bit) ++radiating;
            }
            if (radiating == 0) continue;
            budget.inter += radiating * ps * cfg.interbeam_attenuation * chi2 *
                            channel.interbeam_gain(user, alloc.beam, k);
        }
    }
    budget.intra /= used;
    budget.inter /= used;
    return budget;
}

double sinr_cross(double gain_n, double a_n, double a_m, double zeta_n) {
    return gain_n * a_m / (gain_n * a_n + zeta_n);
}

double sinr_n(double gain_n, double a_n, double zeta_n) { return gain_n * a_n / zeta_n; }

double sinr_m(double gain_m, double a_n, double a_m, double zeta_m) {
    return gain_m * a_m / (gain_m * a_n + zeta_m);
}

double carrier_rate(const ScenarioConfig& cfg, double sinr) {
    return effective_bandwidth(cfg) / cfg.total_subcarriers * std::log2(1.0 + sinr);
}

double rate_per_slot(const ScenarioConfig& cfg, std::uint32_t mask, double sinr) {
    return std::popcount(mask) * carrier_rate(cfg, sinr);
}

SlotEvaluation evaluate_slot(const ScenarioConfig& cfg, const SlotPlan& slot,
                             const ChannelState& channel) {
    SlotEvaluation ev;
    ev.sinr.assign(static_cast<std::size_t>(channel.user_count), 0.0);
    ev.rate.assign(ev.sinr.size(), 0.0);
    const double ps = cfg.tx_power;
    for (const auto& alloc : slot.beams) {
        for (const auto& unit : alloc.units) {
            const double gain_n = ps * channel.estimated_norm(unit.strong, unit.carriers);
            const double zeta_n = interference(cfg, slot, channel, alloc.beam, unit.strong).zeta();
            if (!unit.paired()) {
                ev.sinr[unit.strong] = gain_n / zeta_n;
            } else {
                const double gain_m = ps * channel.estimated_norm(unit.weak, unit.carriers);
                const double zeta_m = interference(cfg, slot, channel, alloc.beam, unit.weak).zeta();
                ev.sinr[unit.strong] = sinr_n(gain_n, unit.a_n, zeta_n);
                ev.sinr[unit.weak] = sinr_m(gain_m, unit.a_n, unit.a_m(), zeta_m);
                ev.rate[unit.weak] = rate_per_slot(cfg, unit.carriers, ev.sinr[unit.weak]);
            }
            ev.rate[unit.strong] = rate_per_slot(cfg, unit.carriers, ev.sinr[unit.strong]);
        }
    }
    return ev;
}

std::vector<double> total_capacity(const ScenarioConfig& cfg, const ResourcePlan& plan,
                                   const std::vector<ChannelState>& channels) {
    if (channels.size() < plan.slots.size()) {
        throw LengthMismatch("fewer channel realisations than plan slots");
    }
    std::vector<double> cap;
    for (std::size_t t = 0; t < plan.slots.size(); ++t) {
        const auto ev = evaluate_slot(cfg, plan.slots[t], channels[t]);
        if (cap.empty()) cap.assign(ev.rate.size(), 0.0);
        for (std::size_t u = 0; u < cap.size(); ++u) cap[u] += ev.rate[u];
    }
    if (cap.empty() && !channels.empty()) {
        cap.assign(static_cast<std::size_t>(channels.front().user_count), 0.0);
    }
    return cap;
}

std::vector<std::string> plan_violations(const ScenarioConfig& cfg, const ResourcePlan& plan,
                                         const std::vector<UserTerminal>& users) {
    std::vector<std::string> out;
    const auto where = [](std::size_t t, int b) {
        return "slot " + std::to_string(t) + " beam " + std::to_string(b) + ": ";
    };
    if (static_cast<int>(plan.slots.size()) > cfg.window_slots) {
        out.push_back("plan has more slots than the window");
    }
    const std::uint32_t carrier_space =
        cfg.subcarriers_per_beam >= 32 ? 0xFFFFFFFFu : ((1u << cfg.subcarriers_per_beam) - 1u);
    for (std::size_t t = 0; t < plan.slots.size(); ++t) {
        const auto& slot = plan.slots[t];
        if (static_cast<int>(slot.beams.size()) > cfg.max_active_beams) {
            out.push_back("slot " + std::to_string(t) + ": more than B0 active beams");
        }
        std::set<int> seen_beams;
        std::set<int> seen_users;
        for (const auto& alloc : slot.beams) {
            if (alloc.beam < 0 || alloc.beam >= cfg.beam_count) {
                out.push_back(where(t, alloc.beam) + "beam index out of range");
                continue;
            }
            if (!seen_beams.insert(alloc.beam).second) {
                out.push_back(where(t, alloc.beam) + "beam listed twice");
            }
            for (const auto& unit : alloc.units) {
                for (int u : {unit.strong, unit.weak}) {
                    if (u < 0 && u == unit.weak) continue;
                    if (u < 0 || u >= static_cast<int>(users.size())) {
                        out.push_back(where(t, alloc.beam) + "unknown user");
                        continue;
                    }
                    if (users[u].beam_id != alloc.beam) {
                        out.push_back(where(t, alloc.beam) + "user " + std::to_string(u) +
                                      " belongs to another beam");
                    }
                    if (!seen_users.insert(u).second) {
                        out.push_back(where(t, alloc.beam) + "user " + std::to_string(u) +
                                      " served twice");
                    }
                }
                const int q = std::popcount(unit.carriers);
                if ((unit.carriers & ~carrier_space) != 0) {
                    out.push_back(where(t, alloc.beam) + "carrier outside the beam's K");
                }
                if (q < 1) {
                    out.push_back(where(t, alloc.beam) +
                                  (unit.paired() ? "pair shares no carrier" : "unit without carriers"));
                }
                if (q > cfg.max_carriers_per_user) {
                    out.push_back(where(t, alloc.beam) + "more than Q carriers per user");
                }
                if (unit.paired()) {
                    if (!(unit.a_n > 0.0 && unit.a_n <= unit.a_m())) {
                        out.push_back(where(t, alloc.beam) + "power split violates 0 < a_n <= a_m");
                    }
                }
            }
        }
    }
    return out;
}

void validate_plan(const ScenarioConfig& cfg, const ResourcePlan& plan,
                   const std::vector<UserTerminal>& users) {
    const auto v = plan_violations(cfg, plan, users);
    if (!v.empty()) throw ValidationError("resource plan violates constraints: " + v.front());
}

std::vector<int> min_rate_violations(const ScenarioConfig& cfg,
                                     const std::vector<UserTerminal>& users,
                                     const std::vector<double>& capacity) {
    if (capacity.size() != users.size()) throw LengthMismatch("capacity and user lists differ");
    std::vector<int> out;
    for (std::size_t u = 0; u < users.size(); ++u) {
        const double target = std::min(cfg.min_rate, users[u].demand);
        if (capacity[u] < target * (1.0 - 1e-9)) out.push_back(static_cast<int>(u));
    }
    return out;
}

}  // namespace bhnoma

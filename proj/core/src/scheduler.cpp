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


#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "bhnoma/errors.hpp"
#include "bhnoma/optimizer.hpp"

namespace bhnoma {

std::vector<std::vector<int>> preallocation(const ScenarioConfig& cfg) {
    std::vector<std::vector<int>> slots(static_cast<std::size_t>(cfg.window_slots));
    for (int b = 0; b < cfg.beam_count; ++b) {
        const int t = b / cfg.max_active_beams;
        if (t < cfg.window_slots) slots[t].push_back(b);
    }
    return slots;
}

namespace {

double normalised_gain(const ChannelState& ch, int user, int k) {
    return std::norm(ch.fading[static_cast<std::size_t>(user) * ch.carriers + k] +
                     ch.error[static_cast<std::size_t>(user) * ch.carriers + k]);
}

class WindowEngine {
public:
    WindowEngine(const ScenarioConfig& cfg, const std::vector<UserTerminal>& users,
                 const std::vector<ChannelState>& channels, const SchedulerOptions& options)
        : cfg_(cfg), users_(users), channels_(channels), options_(options) {
        if (static_cast<int>(channels.size()) < cfg.window_slots) {
            throw LengthMismatch("need one channel realisation per window slot");
        }
        beam_users_.resize(static_cast<std::size_t>(cfg.beam_count));
        for (const auto& u : users) beam_users_.at(u.beam_id).push_back(u.user_id);
        for (const auto& u : users) demand_.push_back(u.demand);
        power_.max_iterations = cfg.optimizer_n2;
    }

    WindowResult run() {
        WindowResult best;
        best.objective = std::numeric_limits<double>::infinity();
        std::vector<double> cap = isolated_capacity();
        std::vector<std::vector<int>> previous;
        const bool adaptive = options_.selection == BeamSelection::ResidualNeed;
        const int passes = adaptive ? cfg_.optimizer_n3 : 1;
        int stalled = 0;

        for (int pass = 0; pass < passes; ++pass) {
            WindowResult r = run_pass(cap);
            last_plan_ = r.plan;
            refine_powers(r);
            r.objective = objective(r.capacity, demand_);
            const auto sched = r.plan.schedule();
            if (r.objective < best.objective) {
                auto trace = std::move(best.trace);
                const int solves = best.power_solves;
                const int misses = best.power_not_converged;
                best = std::move(r);
                best.trace = std::move(trace);
                best.power_solves += solves;
                best.power_not_converged += misses;
                stalled = 0;
            } else {
                ++stalled;
                best.power_solves += r.power_solves;
                best.power_not_converged += r.power_not_converged;
            }
            best.trace.push_back(best.objective);
            best.passes = pass + 1;
            if (sched == previous) break;
            if (options_.stall_passes > 0 && stalled >= options_.stall_passes) break;
            previous = sched;
            update_capacity_estimate(last_plan_, cap);
        }
        if (adaptive) {
            polish(best);
            if (best.objective < best.trace.back()) best.trace.push_back(best.objective);
        }
        repair_min_rate(best);
        best.objective = objective(best.capacity, demand_);
        if (!best.trace.empty() && best.objective < best.trace.back()) {
            best.trace.push_back(best.objective);
        }
        return best;
    }

private:
    struct PairSlot {
        int slot;
        int beam_index;
        int unit_index;
        PairLink link;
    };

    BeamAllocation build_beam(const ChannelState& ch, int beam, const std::vector<double>& y,
                              ServiceMode mode) const {
        const auto& members = beam_users_[beam];
        std::vector<ServiceUnit> units;
        if (mode == ServiceMode::Noma) {
            const BeamPairing pairing = order_and_pair(ch, members);
            for (const auto& p : pairing.pairs) {
                const bool want_n = y[p.n] > 0.0;
                const bool want_m = y[p.m] > 0.0;
                ServiceUnit u;
                if (want_n && want_m) {
                    u.strong = p.n;
                    u.weak = p.m;
                } else if (want_n || want_m) {
                    u.strong = want_n ? p.n : p.m;
                } else {
                    continue;
                }
                units.push_back(u);
            }
        } else {
            for (int u : most_wanting(beam, y, cfg_.subcarriers_per_beam)) {
                ServiceUnit unit;
                unit.strong = u;
                units.push_back(unit);
            }
        }
        return with_carriers(ch, beam, std::move(units));
    }

    /// Users of `beam` with positive residual demand, largest first, at most
    /// `limit` of them.
    std::vector<int> most_wanting(int beam, const std::vector<double>& y, int limit) const {
        std::vector<int> wanting;
        for (int u : beam_users_[beam]) {
            if (y[u] > 0.0) wanting.push_back(u);
        }
        std::stable_sort(wanting.begin(), wanting.end(),
                         [&](int a, int b) { return y[a] > y[b]; });
        if (static_cast<int>(wanting.size()) > limit) wanting.resize(static_cast<std::size_t>(limit));
        return wanting;
    }

    /// Serves only the users with the largest residual demand: `units` units,
    /// paired among themselves when `paired`, so each can take up to Q carriers.
    BeamAllocation build_focused(const ChannelState& ch, int beam, const std::vector<double>& y,
                                 int units, bool paired) const {
        std::vector<int> chosen = most_wanting(beam, y, paired ? 2 * units : units);
        std::vector<ServiceUnit> out;
        int leftover = -1;
        if (paired && chosen.size() % 2 == 1) {
            leftover = chosen.back();
            chosen.pop_back();
        }
        if (paired && !chosen.empty()) {
            for (const auto& p : order_and_pair(ch, chosen).pairs) {
                ServiceUnit u;
                u.strong = p.n;
                u.weak = p.m;
                out.push_back(u);
            }
        } else if (!paired) {
            for (int u : chosen) {
                ServiceUnit unit;
                unit.strong = u;
                out.push_back(unit);
            }
        }
        if (leftover >= 0) {
            ServiceUnit single;
            single.strong = leftover;
            out.push_back(single);
        }
        return with_carriers(ch, beam, std::move(out));
    }

    /// Users with residual demand paired by another rule than the default:
    /// neighbours in gain order (`nested` false) or outermost with innermost.
    BeamAllocation build_regrouped(const ChannelState& ch, int beam, const std::vector<double>& y,
                                   bool nested) const {
        std::vector<int> chosen = most_wanting(beam, y, 2 * cfg_.subcarriers_per_beam);
        std::vector<ServiceUnit> out;
        if (chosen.size() % 2 == 1) {
            ServiceUnit single;
            single.strong = chosen.back();
            out.push_back(single);
            chosen.pop_back();
        }
        if (chosen.empty()) return with_carriers(ch, beam, std::move(out));
        const std::vector<int> order = order_and_pair(ch, chosen).order;
        const std::size_t n = order.size();
        for (std::size_t i = 0; i < n / 2; ++i) {
            ServiceUnit u;
            u.strong = nested ? order[i] : order[2 * i];
            u.weak = nested ? order[n - 1 - i] : order[2 * i + 1];
            out.push_back(u);
        }
        return with_carriers(ch, beam, std::move(out));
    }

    BeamAllocation with_carriers(const ChannelState& ch, int beam,
                                 std::vector<ServiceUnit> units) const {
        std::vector<std::vector<double>> gains(units.size(),
                                               std::vector<double>(ch.carriers, 0.0));
        for (std::size_t p = 0; p < units.size(); ++p) {
            for (int k = 0; k < ch.carriers; ++k) {
                gains[p][k] = normalised_gain(ch, units[p].strong, k);
                if (units[p].paired()) gains[p][k] += normalised_gain(ch, units[p].weak, k);
            }
        }
        const auto masks = match_subcarriers(static_cast<int>(units.size()), ch.carriers,
                                             cfg_.max_carriers_per_user, gains);
        for (std::size_t p = 0; p < units.size(); ++p) {
            units[p].carriers = masks[p];
            // SIC order follows the gains on the carriers actually shared.
            if (units[p].paired() && ch.estimated_norm(units[p].weak, masks[p]) >
                                         ch.estimated_norm(units[p].strong, masks[p])) {
                std::swap(units[p].strong, units[p].weak);
            }
        }
        BeamAllocation alloc;
        alloc.beam = beam;
        alloc.units = std::move(units);
        return alloc;
    }

    PairLink link_for(const SlotPlan& slot, const ChannelState& ch, int beam,
                      const ServiceUnit& unit) const {
        PairLink link;
        link.gain_n = cfg_.tx_power * ch.estimated_norm(unit.strong, unit.carriers);
        link.gain_m = cfg_.tx_power * ch.estimated_norm(unit.weak, unit.carriers);
        link.zeta_n = interference(cfg_, slot, ch, beam, unit.strong).zeta();
        link.zeta_m = interference(cfg_, slot, ch, beam, unit.weak).zeta();
        link.rate_scale = std::popcount(unit.carriers) * effective_bandwidth(cfg_) /
                          cfg_.total_subcarriers;
        return link;
    }

    /// Solves the split of every pair in the listed beams of `slot` against
    /// the residual demand `y`, with the single-partner fallback.
    void solve_pairs(const ChannelState& ch, SlotPlan& slot, const std::vector<std::size_t>& beams,
                     const std::vector<double>& y, WindowResult& acc) const {
        std::vector<std::pair<std::size_t, std::size_t>> jobs;
        for (std::size_t bi : beams) {
            for (std::size_t ui = 0; ui < slot.beams[bi].units.size(); ++ui) {
                if (slot.beams[bi].units[ui].paired()) jobs.emplace_back(bi, ui);
            }
        }
        std::vector<PowerSolution> sols(jobs.size());
        std::vector<int> solo(jobs.size(), -1);
        const int njobs = static_cast<int>(jobs.size());
#pragma omp parallel for schedule(static)
        for (int j = 0; j < njobs; ++j) {
            const auto& alloc = slot.beams[jobs[j].first];
            const auto& unit = alloc.units[jobs[j].second];
            const PairLink link = link_for(slot, ch, alloc.beam, unit);
            const double yn = std::max(0.0, y[unit.strong]);
            const double ym = std::max(0.0, y[unit.weak]);
            sols[j] = optimize_power_pair(link, yn, ym, power_);
            // Serving one partner alone at full power leaves the carrier
            // occupancy, and hence everyone's interference, unchanged.
            const double alone_n = link.rate_scale * std::log2(1.0 + link.gain_n / link.zeta_n);
            const double alone_m = link.rate_scale * std::log2(1.0 + link.gain_m / link.zeta_m);
            const double gap_n = (alone_n - yn) * (alone_n - yn) + ym * ym;
            const double gap_m = (alone_m - ym) * (alone_m - ym) + yn * yn;
            if (std::min(gap_n, gap_m) < sols[j].gap) solo[j] = gap_n <= gap_m ? unit.strong : unit.weak;
        }
        for (int j = 0; j < njobs; ++j) {
            auto& unit = slot.beams[jobs[j].first].units[jobs[j].second];
            unit.a_n = sols[j].a_n;
            if (solo[j] >= 0) {
                unit.strong = solo[j];
                unit.weak = -1;
                unit.a_n = 0.5;
            }
            ++acc.power_solves;
            if (!sols[j].converged) ++acc.power_not_converged;
        }
    }

    double slot_gap(const SlotPlan& slot, const std::vector<double>& y,
                    const std::vector<double>& rates) const {
        double g = 0.0;
        for (const auto& alloc : slot.beams) {
            for (int u : beam_users_[alloc.beam]) {
                const double d = std::max(0.0, y[u]) - rates[u];
                g += d * d;
            }
        }
        return g;
    }

    /// Replaces beam `bi` of the slot by the orthogonal build or by a build
    /// focused on its most demanding users whenever that lowers the slot's
    /// squared gap. Orthogonal service is the a_n -> 0 corner of the pair
    /// model. Updates `rates` to the slot rates of the kept plan. Orthogonal
    /// service only tries the focused single-user builds.
    void improve_beam(int t, SlotPlan& slot, std::size_t bi, const std::vector<double>& y,
                      std::vector<double>& rates, WindowResult& acc) const {
        const ChannelState& ch = channels_[t];
        const int beam = slot.beams[bi].beam;
        const int K = cfg_.subcarriers_per_beam;
        const bool noma = options_.service == ServiceMode::Noma;
        std::vector<BeamAllocation> candidates;
        if (noma) candidates.push_back(build_beam(ch, beam, y, ServiceMode::Orthogonal));
        const int default_units = static_cast<int>(slot.beams[bi].units.size());
        for (int n = 1; noma && n < std::min(default_units, K); ++n) {
            candidates.push_back(build_focused(ch, beam, y, n, true));
        }
        for (int n = 1; n < K; ++n) candidates.push_back(build_focused(ch, beam, y, n, false));
        if (noma && beam_users_[beam].size() >= 4) {
            candidates.push_back(build_regrouped(ch, beam, y, false));
            candidates.push_back(build_regrouped(ch, beam, y, true));
        }

        double best = slot_gap(slot, y, rates);
        for (auto& cand : candidates) {
            if (cand.units.empty()) continue;
            std::swap(slot.beams[bi], cand);
            solve_pairs(ch, slot, {bi}, y, acc);
            auto trial = evaluate_slot(cfg_, slot, ch).rate;
            const double g = slot_gap(slot, y, trial);
            if (g < best) {
                best = g;
                rates = std::move(trial);
            } else {
                std::swap(slot.beams[bi], cand);
            }
        }
    }

    /// Lights `beams` in slot t, solves every pair's split against the
    /// residual demand and returns the slot rates.
    std::vector<double> serve_slot(int t, const std::vector<int>& beams,
                                   const std::vector<double>& y, SlotPlan& slot,
                                   WindowResult& acc) const {
        const ChannelState& ch = channels_[t];
        slot.beams.clear();
        for (int b : beams) slot.beams.push_back(build_beam(ch, b, y, options_.service));
        std::vector<std::size_t> all(slot.beams.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        solve_pairs(ch, slot, all, y, acc);
        std::vector<double> rates = evaluate_slot(cfg_, slot, ch).rate;
        for (std::size_t bi = 0; bi < slot.beams.size(); ++bi) improve_beam(t, slot, bi, y, rates, acc);
        return rates;
    }

    /// Adds `beam` to an already served slot and returns the new slot rates.
    std::vector<double> light_beam(int t, SlotPlan& slot, int beam, const std::vector<double>& y,
                                   WindowResult& acc) const {
        const ChannelState& ch = channels_[t];
        auto pos = std::find_if(slot.beams.begin(), slot.beams.end(),
                                [&](const BeamAllocation& a) { return a.beam > beam; });
        const auto bi = static_cast<std::size_t>(pos - slot.beams.begin());
        slot.beams.insert(pos, build_beam(ch, beam, y, options_.service));
        solve_pairs(ch, slot, {bi}, y, acc);
        std::vector<double> rates = evaluate_slot(cfg_, slot, ch).rate;
        improve_beam(t, slot, bi, y, rates, acc);
        return rates;
    }

    std::vector<int> select_beams(int t, const std::vector<double>& y,
                                  const std::vector<double>& cap, std::vector<char>& removed) const {
        const int B = cfg_.beam_count;
        const int B0 = cfg_.max_active_beams;
        std::vector<int> lit;
        switch (options_.selection) {
            case BeamSelection::Periodic: {
                const int groups = (B + B0 - 1) / B0;
                const int g = t % groups;
                for (int b = g * B0; b < std::min(B, (g + 1) * B0); ++b) lit.push_back(b);
                return lit;
            }
            case BeamSelection::MaxSinr: {
                const ChannelState& ch = channels_[t];
                std::vector<double> score(static_cast<std::size_t>(B), 0.0);
                for (int b = 0; b < B; ++b) {
                    for (int u : beam_users_[b]) {
                        const double chi2 = ch.path_factor[u] * ch.path_factor[u];
                        const double s = cfg_.tx_power * ch.effective_norm(u) /
                                         (cfg_.noise_power +
                                          cfg_.channel_error_variance * cfg_.tx_power * chi2);
                        score[b] = std::max(score[b], s);
                    }
                }
                std::vector<int> order(static_cast<std::size_t>(B));
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(),
                                 [&](int a, int b) { return score[a] > score[b]; });
                lit.assign(order.begin(), order.begin() + B0);
                std::sort(lit.begin(), lit.end());
                return lit;
            }
            case BeamSelection::ResidualNeed: break;
        }

        std::vector<double> need(static_cast<std::size_t>(B), 0.0);
        for (int b = 0; b < B; ++b) {
            double rem = 0.0;
            for (int u : beam_users_[b]) rem += std::max(0.0, y[u]);
            if (rem <= 0.0) removed[b] = 1;
            need[b] = removed[b] ? kRemovedBeam : rem / std::max(cap[b], 1e-300);
        }
        if (options_.preallocate && t < (B + B0 - 1) / B0) {
            for (int b = t * B0; b < std::min(B, (t + 1) * B0); ++b) lit.push_back(b);
        }
        std::vector<int> candidates;
        for (int b = 0; b < B; ++b) {
            if (removed[b] || std::find(lit.begin(), lit.end(), b) != lit.end()) continue;
            candidates.push_back(b);
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&](int a, int b) { return need[a] > need[b]; });
        for (int b : candidates) {
            if (static_cast<int>(lit.size()) >= B0) break;
            lit.push_back(b);
        }
        std::sort(lit.begin(), lit.end());
        return lit;
    }

    WindowResult run_pass(const std::vector<double>& cap) {
        WindowResult r;
        r.plan.beam_count = cfg_.beam_count;
        r.plan.slots.resize(static_cast<std::size_t>(cfg_.window_slots));
        std::vector<double> y = demand_;
        r.capacity.assign(demand_.size(), 0.0);
        std::vector<char> removed(static_cast<std::size_t>(cfg_.beam_count), 0);
        for (int t = 0; t < cfg_.window_slots; ++t) {
            const auto beams = select_beams(t, y, cap, removed);
            const auto rates = serve_slot(t, beams, y, r.plan.slots[t], r);
            for (std::size_t u = 0; u < y.size(); ++u) {
                y[u] -= rates[u];
                r.capacity[u] += rates[u];
            }
        }
        return r;
    }

    /// Per-slot beam capacity with the beam lit alone, every pair at an even
    /// split; seeds the need ranking of the first pass.
    std::vector<double> isolated_capacity() const {
        std::vector<double> cap(static_cast<std::size_t>(cfg_.beam_count), 0.0);
        const ChannelState& ch = channels_.front();
        for (int b = 0; b < cfg_.beam_count; ++b) {
            SlotPlan slot;
            slot.beams.push_back(build_beam(ch, b, demand_, options_.service));
            const auto rates = evaluate_slot(cfg_, slot, ch).rate;
            for (int u : beam_users_[b]) cap[b] += rates[u];
        }
        return cap;
    }

    void update_capacity_estimate(const ResourcePlan& plan, std::vector<double>& cap) const {
        std::vector<double> sum(cap.size(), 0.0);
        std::vector<int> lit(cap.size(), 0);
        for (int t = 0; t < static_cast<int>(plan.slots.size()); ++t) {
            const auto rates = evaluate_slot(cfg_, plan.slots[t], channels_[t]).rate;
            for (const auto& alloc : plan.slots[t].beams) {
                double s = 0.0;
                for (int u : beam_users_[alloc.beam]) s += rates[u];
                if (s > 0.0) {
                    sum[alloc.beam] += s;
                    ++lit[alloc.beam];
                }
            }
        }
        for (std::size_t b = 0; b < cap.size(); ++b) {
            if (lit[b] > 0) cap[b] = sum[b] / lit[b];
        }
    }

    /// Coordinate sweeps over (pair, slot): each split is re-solved against the
    /// demand left after the pair's other slots. Splits do not change the
    /// interference seen by anyone else, so each sweep is exact per pair.
    void refine_powers(WindowResult& r) const {
        std::vector<PairSlot> jobs;
        std::vector<std::vector<double>> slot_rate(r.plan.slots.size());
        for (int t = 0; t < static_cast<int>(r.plan.slots.size()); ++t) {
            const SlotPlan& slot = r.plan.slots[t];
            slot_rate[t] = evaluate_slot(cfg_, slot, channels_[t]).rate;
            for (std::size_t bi = 0; bi < slot.beams.size(); ++bi) {
                for (std::size_t ui = 0; ui < slot.beams[bi].units.size(); ++ui) {
                    const auto& unit = slot.beams[bi].units[ui];
                    if (!unit.paired()) continue;
                    jobs.push_back({t, static_cast<int>(bi), static_cast<int>(ui),
                                    link_for(slot, channels_[t], slot.beams[bi].beam, unit)});
                }
            }
        }
        if (jobs.empty()) return;
        double current = objective(r.capacity, demand_);
        for (int sweep = 0; sweep < cfg_.optimizer_n1; ++sweep) {
            for (const auto& job : jobs) {
                auto& unit = r.plan.slots[job.slot].beams[job.beam_index].units[job.unit_index];
                const double rn = rate_n(job.link, unit.a_n);
                const double rm = rate_m(job.link, unit.a_n);
                const double yn = demand_[unit.strong] - (r.capacity[unit.strong] - rn);
                const double ym = demand_[unit.weak] - (r.capacity[unit.weak] - rm);
                const double before = pair_gap(job.link, unit.a_n, yn, ym);
                const auto sol = optimize_power_pair(job.link, yn, ym, power_);
                if (sol.gap >= before) continue;
                unit.a_n = sol.a_n;
                r.capacity[unit.strong] += rate_n(job.link, sol.a_n) - rn;
                r.capacity[unit.weak] += rate_m(job.link, sol.a_n) - rm;
            }
            const double next = objective(r.capacity, demand_);
            const bool settled = current - next <= 1e-9 * std::max(1.0, current);
            current = next;
            if (settled) break;
        }
    }

    /// Local search over the finished window. Slots are re-served against the
    /// demand the rest of the window leaves, and lit beams are swapped,
    /// replaced, added or dropped. A change is kept only when the window
    /// objective drops. The search stops when a sweep finds nothing or after
    /// N1 (T + B) beam builds.
    void polish(WindowResult& r) {
        const int T = cfg_.window_slots;
        const int B = cfg_.beam_count;
        const int B0 = cfg_.max_active_beams;
        long long budget = static_cast<long long>(cfg_.optimizer_n1) * (T + B);
        std::vector<std::vector<double>> slot_rate(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) {
            slot_rate[t] = evaluate_slot(cfg_, r.plan.slots[t], channels_[t]).rate;
        }
        double current = objective(r.capacity, demand_);
        const auto residual = [&](const std::vector<double>& cap) {
            std::vector<double> y(demand_.size());
            for (std::size_t u = 0; u < y.size(); ++u) y[u] = demand_[u] - cap[u];
            return y;
        };
        const auto shift = [](std::vector<double>& cap, const std::vector<double>& from,
                              const std::vector<double>& to) {
            for (std::size_t u = 0; u < cap.size(); ++u) cap[u] += to[u] - from[u];
        };
        const auto lit = [&](int t) {
            std::vector<int> b;
            for (const auto& alloc : r.plan.slots[t].beams) b.push_back(alloc.beam);
            return b;
        };
        const auto contains = [](const std::vector<int>& set, int b) {
            return std::find(set.begin(), set.end(), b) != set.end();
        };
        const auto keep = [&](std::vector<double>& cap, const std::vector<int>& ts,
                              std::vector<SlotPlan>& plans, std::vector<std::vector<double>>& rates) {
            const double next = objective(cap, demand_);
            if (!(next < current * (1.0 - 1e-12))) return false;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                r.plan.slots[ts[i]] = std::move(plans[i]);
                slot_rate[ts[i]] = std::move(rates[i]);
            }
            r.capacity = std::move(cap);
            current = next;
            return true;
        };

        // Slots re-served with their current beams, in the given order, after
        // all of their contributions are withdrawn.
        const auto reserve = [&](const std::vector<int>& ts) {
            std::vector<double> cap = r.capacity;
            const std::vector<double> none(cap.size(), 0.0);
            for (int t : ts) shift(cap, slot_rate[t], none);
            std::vector<SlotPlan> plans(ts.size());
            std::vector<std::vector<double>> rates(ts.size());
            for (std::size_t i = 0; i < ts.size(); ++i) {
                rates[i] = serve_slot(ts[i], lit(ts[i]), residual(cap), plans[i], r);
                budget -= static_cast<long long>(plans[i].beams.size());
                shift(cap, none, rates[i]);
            }
            // A few rounds of re-serving each involved slot against the rest,
            // since greedy service in slot order can split a beam's demand badly.
            for (int round = 0; round < 2; ++round) {
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    const int t = ts[i];
                    std::vector<int> beams;
                    for (const auto& a : plans[i].beams) beams.push_back(a.beam);
                    if (beams.empty()) continue;
                    const double before = objective(cap, demand_);
                    std::vector<double> trial = cap;
                    shift(trial, rates[i], none);
                    SlotPlan plan;
                    auto next = serve_slot(t, beams, residual(trial), plan, r);
                    budget -= static_cast<long long>(beams.size());
                    shift(trial, none, next);
                    if (objective(trial, demand_) < before) {
                        cap = std::move(trial);
                        plans[i] = std::move(plan);
                        rates[i] = std::move(next);
                    }
                }
            }
            return keep(cap, ts, plans, rates);
        };
        const auto share_beam = [&](int t, int t2) {
            for (int b : lit(t)) {
                if (contains(lit(t2), b)) return true;
            }
            return false;
        };
        // Sequence of (slot, beam to drop or -1, beam to light or -1) edits.
        // The other slots lighting a touched beam are then re-served, since
        // their share of that beam's demand has changed.
        struct Edit {
            int slot;
            int drop;
            int add;
        };
        const auto apply = [&](const std::vector<Edit>& edits, std::vector<int> touched) {
            std::vector<double> cap = r.capacity;
            std::vector<int> ts;
            std::vector<SlotPlan> plans;
            std::vector<std::vector<double>> rates;
            const auto slot_index = [&](int t) {
                auto it = std::find(ts.begin(), ts.end(), t);
                if (it != ts.end()) return static_cast<std::size_t>(it - ts.begin());
                ts.push_back(t);
                plans.push_back(r.plan.slots[t]);
                rates.push_back(slot_rate[t]);
                return ts.size() - 1;
            };
            std::vector<int> edited;
            for (const auto& e : edits) {
                if (e.drop >= 0) touched.push_back(e.drop);
                if (e.add >= 0) touched.push_back(e.add);
                edited.push_back(e.slot);
            }
            // Other slots lighting a touched beam give up their contribution
            // first and are re-served last, against what the edits leave.
            const std::vector<double> none(cap.size(), 0.0);
            std::vector<int> others;
            for (int t = 0; t < T; ++t) {
                if (contains(edited, t)) continue;
                bool lights = false;
                for (const auto& a : r.plan.slots[t].beams) lights |= contains(touched, a.beam);
                if (!lights) continue;
                others.push_back(t);
                const std::size_t i = slot_index(t);
                shift(cap, rates[i], none);
                rates[i] = none;
            }
            for (const auto& e : edits) {
                const std::size_t i = slot_index(e.slot);
                SlotPlan& plan = plans[i];
                if (e.drop >= 0) {
                    plan.beams.erase(std::find_if(plan.beams.begin(), plan.beams.end(),
                                                  [&](const BeamAllocation& a) { return a.beam == e.drop; }));
                    auto next = evaluate_slot(cfg_, plan, channels_[e.slot]).rate;
                    shift(cap, rates[i], next);
                    rates[i] = std::move(next);
                }
                if (e.add >= 0) {
                    auto next = light_beam(e.slot, plan, e.add, residual(cap), r);
                    --budget;
                    shift(cap, rates[i], next);
                    rates[i] = std::move(next);
                }
            }
            for (int t : others) {
                const std::size_t i = slot_index(t);
                const std::vector<int> beams = lit(t);
                rates[i] = serve_slot(t, beams, residual(cap), plans[i], r);
                budget -= static_cast<long long>(beams.size());
                shift(cap, none, rates[i]);
            }
            // A few rounds of re-serving each involved slot against the rest,
            // since greedy service in slot order can split a beam's demand badly.
            for (int round = 0; round < 2; ++round) {
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    const int t = ts[i];
                    std::vector<int> beams;
                    for (const auto& a : plans[i].beams) beams.push_back(a.beam);
                    if (beams.empty()) continue;
                    const double before = objective(cap, demand_);
                    std::vector<double> trial = cap;
                    shift(trial, rates[i], none);
                    SlotPlan plan;
                    auto next = serve_slot(t, beams, residual(trial), plan, r);
                    budget -= static_cast<long long>(beams.size());
                    shift(trial, none, next);
                    if (objective(trial, demand_) < before) {
                        cap = std::move(trial);
                        plans[i] = std::move(plan);
                        rates[i] = std::move(next);
                    }
                }
            }
            // One member of a touched beam served alone in one slot, with the
            // beam's other slots re-served around it. Reaches splits where a
            // beam pairs in one slot and serves its weak user alone in another.
            for (int b : touched) {
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    auto at = std::find_if(plans[i].beams.begin(), plans[i].beams.end(),
                                           [&](const BeamAllocation& a) { return a.beam == b; });
                    if (at == plans[i].beams.end()) continue;
                    const std::size_t bi = static_cast<std::size_t>(at - plans[i].beams.begin());
                    std::vector<std::size_t> partners;
                    for (std::size_t j = 0; j < ts.size(); ++j) {
                        if (j != i && plans[j].find(b) != nullptr) partners.push_back(j);
                    }
                    if (partners.empty()) continue;
                    for (int u : beam_users_[b]) {
                        if (budget <= 0) break;
                        std::vector<double> trial = cap;
                        std::vector<SlotPlan> tp = plans;
                        std::vector<std::vector<double>> tr = rates;
                        ServiceUnit single;
                        single.strong = u;
                        tp[i].beams[bi] = with_carriers(channels_[ts[i]], b, {single});
                        auto next = evaluate_slot(cfg_, tp[i], channels_[ts[i]]).rate;
                        shift(trial, tr[i], next);
                        tr[i] = std::move(next);
                        for (std::size_t j : partners) {
                            std::vector<int> beams;
                            for (const auto& a : tp[j].beams) beams.push_back(a.beam);
                            shift(trial, tr[j], none);
                            tr[j] = serve_slot(ts[j], beams, residual(trial), tp[j], r);
                            budget -= static_cast<long long>(beams.size());
                            shift(trial, none, tr[j]);
                        }
                        if (objective(trial, demand_) < objective(cap, demand_)) {
                            cap = std::move(trial);
                            plans = std::move(tp);
                            rates = std::move(tr);
                        }
                    }
                }
            }
            return keep(cap, ts, plans, rates);
        };

        for (int sweep = 0; sweep < cfg_.optimizer_n1 && budget > 0; ++sweep) {
            bool improved = false;
            for (int t = 0; t < T && budget > 0; ++t) improved |= reserve({t});
            for (int t = 0; t < T && budget > 0; ++t) {
                for (int t2 = t + 1; t2 < T && budget > 0; ++t2) {
                    if (!share_beam(t, t2)) continue;
                    if (reserve({t, t2}) || reserve({t2, t})) improved = true;
                }
            }
            for (int b = 0; b < B && budget > 0; ++b) {
                int slots = 0;
                for (int t = 0; t < T; ++t) slots += contains(lit(t), b) ? 1 : 0;
                if (slots >= 2) improved |= apply({}, {b});
            }
            for (int t = 0; t < T && budget > 0; ++t) {
                for (int b = 0; b < B && budget > 0; ++b) {
                    const auto here = lit(t);
                    if (contains(here, b)) {
                        improved |= apply({{t, b, -1}}, {});
                    } else if (static_cast<int>(here.size()) < B0) {
                        improved |= apply({{t, -1, b}}, {});
                    }
                }
            }
            for (int t = 0; t < T && budget > 0; ++t) {
                for (int b : lit(t)) {
                    for (int b2 = 0; b2 < B && budget > 0; ++b2) {
                        if (!contains(lit(t), b) || contains(lit(t), b2)) continue;
                        improved |= apply({{t, b, -1}, {t, -1, b2}}, {});
                    }
                }
            }
            for (int t = 0; t < T && budget > 0; ++t) {
                for (int t2 = t + 1; t2 < T && budget > 0; ++t2) {
                    for (int b : lit(t)) {
                        if (budget <= 0 || !contains(lit(t), b) || contains(lit(t2), b)) continue;
                        for (int b2 : lit(t2)) {
                            if (budget <= 0 || contains(lit(t), b2)) continue;
                            if (apply({{t, b, -1}, {t2, b2, -1}, {t, -1, b2}, {t2, -1, b}}, {})) {
                                improved = true;
                                break;
                            }
                        }
                    }
                }
            }
            if (!improved) break;
        }
        r.objective = current;
    }

    /// Users below min(R_min, D) get their pair's power shifted towards them or,
    /// for orthogonal service, take over the carriers of a user with surplus.
    void repair_min_rate(WindowResult& r) const {
        r.min_rate_failures = min_rate_violations(cfg_, users_, r.capacity);
        if (r.min_rate_failures.empty()) return;
        const auto target = [&](int u) { return std::min(cfg_.min_rate, demand_[u]); };
        const auto recompute = [&](const ResourcePlan& plan) {
            return total_capacity(cfg_, plan, channels_);
        };
        // Keeps the current plan if u reaches its target without pushing any
        // previously satisfied user below the minimum rate.
        const auto accept = [&](int u) {
            const auto cap = recompute(r.plan);
            if (cap[u] < target(u) * (1.0 - 1e-9)) return false;
            for (int v : min_rate_violations(cfg_, users_, cap)) {
                if (std::find(r.min_rate_failures.begin(), r.min_rate_failures.end(), v) ==
                    r.min_rate_failures.end()) {
                    return false;
                }
            }
            r.capacity = cap;
            return true;
        };
        for (int u : r.min_rate_failures) {
            bool fixed = false;
            for (int t = 0; t < static_cast<int>(r.plan.slots.size()) && !fixed; ++t) {
                auto& slot = r.plan.slots[t];
                for (auto& alloc : slot.beams) {
                    if (alloc.beam != users_[u].beam_id) continue;
                    for (auto& unit : alloc.units) {
                        if (!unit.serves(u) && unit.paired()) continue;
                        const ServiceUnit saved = unit;
                        std::vector<ServiceUnit> tries;
                        if (unit.paired()) {
                            ServiceUnit c = unit;
                            c.a_n = (u == unit.strong) ? 0.5 : kMinPowerFraction;
                            tries.push_back(c);
                        } else if (unit.strong != u) {
                            if (options_.service == ServiceMode::Noma) {
                                // Superpose u onto the single user, with u on the
                                // smallest power share that works.
                                const double gu = channels_[t].estimated_norm(u, unit.carriers);
                                const double gv =
                                    channels_[t].estimated_norm(unit.strong, unit.carriers);
                                ServiceUnit c = unit;
                                if (gu >= gv) {
                                    c.weak = unit.strong;
                                    c.strong = u;
                                    for (double a : {0.01, 0.03, 0.1, 0.3, 0.5}) {
                                        c.a_n = a;
                                        tries.push_back(c);
                                    }
                                } else {
                                    c.weak = u;
                                    c.a_n = 0.5;
                                    tries.push_back(c);
                                }
                            }
                            ServiceUnit c = unit;
                            c.strong = u;
                            tries.push_back(c);
                        }
                        for (const ServiceUnit& c : tries) {
                            unit = c;
                            if (accept(u)) {
                                fixed = true;
                                break;
                            }
                        }
                        if (fixed) break;
                        unit = saved;
                    }
                    break;
                }
            }
        }
        r.min_rate_failures = min_rate_violations(cfg_, users_, r.capacity);
        r.feasible = r.min_rate_failures.empty();
    }

    const ScenarioConfig& cfg_;
    const std::vector<UserTerminal>& users_;
    const std::vector<ChannelState>& channels_;
    SchedulerOptions options_;
    PowerOptions power_;
    std::vector<std::vector<int>> beam_users_;
    std::vector<double> demand_;
    ResourcePlan last_plan_;
};

}  // namespace

WindowResult allocate_timeslots(const ScenarioConfig& cfg, const std::vector<UserTerminal>& users,
                                const std::vector<ChannelState>& channels,
                                const SchedulerOptions& options) {
    validate(cfg);
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (users[i].user_id != static_cast<int>(i)) {
            throw ValidationError("user list must be indexed by user_id");
        }
    }
    WindowEngine engine(cfg, users, channels, options);
    return engine.run();
}

}  // namespace bhnoma

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


#include "bhnoma/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "bhnoma/errors.hpp"

namespace bhnoma {

double objective(const std::vector<double>& rates, const std::vector<double>& demands) {
    if (rates.size() != demands.size()) {
        throw LengthMismatch("objective: " + std::to_string(rates.size()) + " rates vs " +
                             std::to_string(demands.size()) + " demands");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const double gap = rates[i] - demands[i];
        sum += gap * gap;
    }
    return sum;
}

std::vector<double> residual_demand(const std::vector<double>& demands,
                                    const std::vector<std::vector<double>>& history, int t) {
    std::vector<double> y = demands;
    const int upto = std::min<int>(t, static_cast<int>(history.size()));
    for (int tau = 0; tau < upto; ++tau) {
        if (history[tau].size() != y.size()) throw LengthMismatch("rate history row length");
        for (std::size_t u = 0; u < y.size(); ++u) y[u] -= history[tau][u];
    }
    return y;
}

double surrogate(double theta, double a_n, double a_m, const PairGains& g) {
    const double z = g.zeta;
    const double arg = 1.0 + g.h_nn * a_n * z + g.h_mm * a_m * z + g.h_nn * g.h_mn * a_n * a_n +
                       g.h_nn * g.h_mm * a_m * a_n - theta * (z * (z + g.h_mn * a_n + z));
    if (!(arg > 0.0)) {
        throw NonPositiveLogArgument("surrogate log argument is " + std::to_string(arg) +
                                     " for theta=" + std::to_string(theta) +
                                     ", a_n=" + std::to_string(a_n));
    }
    return std::log(arg);
}

double update_theta(double a_n, double a_m, const PairGains& g) {
    const double z = g.zeta;
    const double num =
        (g.h_mn * a_n + z) * g.h_nn * a_n + (a_m * z + g.h_nn * a_m * a_n) * g.h_mm;
    const double den = z * (z + g.h_mn * a_n + z);
    return num / den;
}

double rate_n(const PairLink& link, double a_n) {
    return link.rate_scale * std::log2(1.0 + sinr_n(link.gain_n, a_n, link.zeta_n));
}

double rate_m(const PairLink& link, double a_n) {
    return link.rate_scale * std::log2(1.0 + sinr_m(link.gain_m, a_n, 1.0 - a_n, link.zeta_m));
}

double pair_gap(const PairLink& link, double a_n, double y_n, double y_m) {
    const double dn = rate_n(link, a_n) - y_n;
    const double dm = rate_m(link, a_n) - y_m;
    return dn * dn + dm * dm;
}

namespace {

template <class F>
double minimise_on_interval(F&& f, double lo, double hi, double tol) {
    // Coarse scan to bracket the best basin, then golden-section refinement.
    constexpr int kScan = 64;
    int best = 0;
    double best_val = f(lo);
    for (int i = 1; i <= kScan; ++i) {
        const double x = lo + (hi - lo) * i / kScan;
        const double v = f(x);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double step = (hi - lo) / kScan;
    double a = std::max(lo, lo + (best - 1) * step);
    double b = std::min(hi, lo + (best + 1) * step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = (fc <= fd) ? c : d;
    const double vx = std::min(fc, fd);
    // The scan grid point can beat the refined interior point at a boundary.
    const double grid_x = lo + best * step;
    return best_val < vx ? grid_x : x;
}

}  // namespace

PowerSolution optimize_power_pair(const PairLink& link, double target_n, double target_m,
                                  const PowerOptions& options) {
    const double lo = kMinPowerFraction;
    const double hi = 0.5;
    PowerSolution sol;
    double a = 0.25;
    double gap = pair_gap(link, a, target_n, target_m);

    for (int it = 1; it <= options.max_iterations; ++it) {
        const double theta_n = sinr_n(link.gain_n, a, link.zeta_n);
        const double theta_m = sinr_m(link.gain_m, a, 1.0 - a, link.zeta_m);
        const double den_n = link.zeta_n;
        const double den_m = link.gain_m * a + link.zeta_m;

        const auto linearised = [&](double x) {
            const double arg_n =
                1.0 + theta_n + (link.gain_n * x - theta_n * link.zeta_n) / den_n;
            const double arg_m =
                1.0 + theta_m +
                (link.gain_m * (1.0 - x) - theta_m * (link.gain_m * x + link.zeta_m)) / den_m;
            const double ln = link.rate_scale * std::log2(std::max(arg_n, 1e-300));
            const double lm = link.rate_scale * std::log2(std::max(arg_m, 1e-300));
            return (ln - target_n) * (ln - target_n) + (lm - target_m) * (lm - target_m);
        };
        const auto in_log = [&](double s) { return linearised(std::exp(s)); };
        double next = std::exp(minimise_on_interval(in_log, std::log(lo), std::log(hi),
                                                    options.split_tolerance * 0.1));
        next = std::clamp(next, lo, hi);
        double next_gap = pair_gap(link, next, target_n, target_m);
        if (next_gap > gap) {
            double step = next - a;
            bool improved = false;
            for (int j = 0; j < 40 && !improved; ++j) {
                step *= 0.5;
                const double trial = a + step;
                const double trial_gap = pair_gap(link, trial, target_n, target_m);
                if (trial_gap <= gap) {
                    next = trial;
                    next_gap = trial_gap;
                    improved = true;
                }
            }
            if (!improved) {
                next = a;
                next_gap = gap;
            }
        }
        const double new_theta_n = sinr_n(link.gain_n, next, link.zeta_n);
        const double new_theta_m = sinr_m(link.gain_m, next, 1.0 - next, link.zeta_m);
        const double dtheta =
            std::max(std::abs(new_theta_n - theta_n) / std::max(1.0, theta_n),
                     std::abs(new_theta_m - theta_m) / std::max(1.0, theta_m));
        const double dsplit = std::abs(next - a) / a;
        a = next;
        gap = next_gap;
        sol.trace.push_back(gap);
        sol.iterations = it;
        if (dtheta < options.theta_tolerance || dsplit < options.split_tolerance) {
            sol.converged = true;
            break;
        }
    }
    // The linearised fixed point can stop short of the true minimiser; a
    // direct search on the exact gap settles the last digits.
    const auto exact = [&](double s) { return pair_gap(link, std::exp(s), target_n, target_m); };
    const double direct = std::clamp(
        std::exp(minimise_on_interval(exact, std::log(lo), std::log(hi),
                                      options.split_tolerance * 0.1)),
        lo, hi);
    const double direct_gap = pair_gap(link, direct, target_n, target_m);
    if (direct_gap < gap) {
        a = direct;
        gap = direct_gap;
        sol.trace.push_back(gap);
    }
    sol.a_n = a;
    sol.gap = gap;
    return sol;
}

std::vector<std::uint32_t> match_subcarriers(int pairs, int K, int Q,
                                             const std::vector<std::vector<double>>& carrier_gain) {
    if (K < 1 || K > 32 || Q < 1 || Q > K) {
        throw ValidationError("match_subcarriers requires 1 <= Q <= K <= 32");
    }
    std::vector<std::uint32_t> masks(static_cast<std::size_t>(std::max(pairs, 0)), 0u);
    if (pairs <= 0) return masks;
    const auto gain = [&](int p, int k) {
        if (carrier_gain.empty()) return 0.0;
        return carrier_gain.at(p).at(k);
    };
    // Highest gain first, lower carrier index on ties.
    const auto ranked_carriers = [&](int p) {
        std::vector<int> ks(static_cast<std::size_t>(K));
        std::iota(ks.begin(), ks.end(), 0);
        std::stable_sort(ks.begin(), ks.end(),
                         [&](int x, int y) { return gain(p, x) > gain(p, y); });
        return ks;
    };

    if (pairs <= K) {
        // Disjoint sets: no collisions, min(K, P Q) carriers in use.
        const int total = std::min(K, pairs * Q);
        std::uint32_t taken = 0;
        for (int p = 0; p < pairs; ++p) {
            int want = total / pairs + (p < total % pairs ? 1 : 0);
            for (int k : ranked_carriers(p)) {
                if (want == 0) break;
                if (taken & (1u << k)) continue;
                masks[p] |= 1u << k;
                taken |= 1u << k;
                --want;
            }
        }
        return masks;
    }
    // More pairs than carriers: one carrier each, loads as even as possible.
    std::vector<int> room(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) room[k] = pairs / K + (k < pairs % K ? 1 : 0);
    for (int p = 0; p < pairs; ++p) {
        for (int k : ranked_carriers(p)) {
            if (room[k] > 0) {
                masks[p] = 1u << k;
                --room[k];
                break;
            }
        }
    }
    return masks;
}

long long intra_beam_overlap(const std::vector<std::uint32_t>& unit_masks) {
    long long total = 0;
    for (std::size_t p = 0; p < unit_masks.size(); ++p) {
        for (std::size_t q = p + 1; q < unit_masks.size(); ++q) {
            // Two users on each side: four non-partner user pairs per shared carrier.
            total += 4LL * std::popcount(unit_masks[p] & unit_masks[q]);
        }
    }
    return total;
}

ExchangeResult exchange_partners(const std::vector<UserPair>& pairs,
                                 const std::vector<std::uint32_t>& user_masks) {
    ExchangeResult out;
    out.pairs = pairs;
    const auto mask = [&](int u) { return user_masks.at(static_cast<std::size_t>(u)); };
    const auto compatible = [&](int n, int m) { return (mask(n) & mask(m)) != 0; };

    for (std::size_t i = 0; i < out.pairs.size(); ++i) {
        auto& pi = out.pairs[i];
        if (compatible(pi.n, pi.m)) continue;
        for (std::size_t j = 0; j < out.pairs.size(); ++j) {
            if (j == i) continue;
            auto& pj = out.pairs[j];
            if (compatible(pi.n, pj.m) && compatible(pj.n, pi.m)) {
                std::swap(pi.m, pj.m);
                ++out.exchanges;
                break;
            }
        }
    }
    std::vector<UserPair> kept;
    for (const auto& p : out.pairs) {
        if (compatible(p.n, p.m)) {
            kept.push_back(p);
        } else {
            out.demoted.push_back(p.n);
            out.demoted.push_back(p.m);
        }
    }
    out.pairs = std::move(kept);
    return out;
}

std::vector<UserPair> exchange_partners_strict(const std::vector<UserPair>& pairs,
                                               const std::vector<std::uint32_t>& user_masks) {
    auto r = exchange_partners(pairs, user_masks);
    if (!r.demoted.empty()) {
        throw InfeasibleMatching("no carrier-sharing partner for user " +
                                 std::to_string(r.demoted.front()));
    }
    return r.pairs;
}

}  // namespace bhnoma

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


#include "bhnoma/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bhnoma/channel.hpp"
#include "bhnoma/errors.hpp"
#include "bhnoma/rng.hpp"

namespace bhnoma {

double OutageParams::omega1() const { return eps_m * omega / sic_margin(); }
double OutageParams::omega2() const { return eps_n * omega / a_n; }
double OutageParams::tau1() const { return eps_m / (rho * sic_margin()); }
double OutageParams::tau2() const { return eps_n / (rho * a_n); }
double OutageParams::lambda1() const { return std::max(tau1() + omega1(), tau2() + omega2()); }
double OutageParams::lambda2() const { return std::max(tau1(), tau2()); }

OutageParams specialise(OutageParams p, NomaVariant variant, CsiMode csi) {
    if (csi == CsiMode::Perfect) p.omega = 0.0;
    if (variant == NomaVariant::PowerDomain) p.K = 1;
    return p;
}

InterferenceWeightSet InterferenceWeightSet::interference_free() {
    InterferenceWeightSet w;
    w.weights.assign(kNeighbourBeams + 1, 0.0);
    w.weights[0] = 1.0;
    w.half_width.assign(kNeighbourBeams + 1, 0.0);
    return w;
}

InterferenceWeightSet p_avg_overlap(const ScenarioConfig& cfg, double kappa, int trials,
                                    std::uint64_t seed) {
    if (kappa < 0.0 || kappa > 1.0) throw ValidationError("0 <= kappa <= 1");
    if (trials < 1) throw ValidationError("p_avg_overlap needs at least one trial");
    const int neighbours = std::min(kNeighbourBeams, cfg.beam_count - 1);
    const int cap = std::min(neighbours, cfg.max_active_beams - 1);
    const double r = 1.0;
    const double spacing = std::sqrt(3.0) * r;
    const double reach = 2.0 * r;

    constexpr int kBlock = 4096;
    std::vector<long long> counts(kNeighbourBeams + 1, 0);
    const int blocks = (trials + kBlock - 1) / kBlock;
    for (int blk = 0; blk < blocks; ++blk) {
        CounterStream s(seed, StreamDomain::OverlapGeometry, static_cast<std::uint32_t>(blk));
        const int n = std::min(kBlock, trials - blk * kBlock);
        for (int i = 0; i < n; ++i) {
            const double rad = r * std::sqrt(s.uniform());
            const double ang = 2.0 * std::numbers::pi * s.uniform();
            const double x = rad * std::cos(ang);
            const double y = rad * std::sin(ang);
            int active = 0;
            for (int b = 0; b < neighbours; ++b) {
                const double phi = b * std::numbers::pi / 3.0;
                const double dx = x - spacing * std::cos(phi);
                const double dy = y - spacing * std::sin(phi);
                const bool co_active = s.uniform() < kappa;
                if (co_active && std::hypot(dx, dy) <= reach) ++active;
            }
            ++counts[std::min(active, std::max(cap, 0))];
        }
    }
    InterferenceWeightSet w;
    w.kappa = kappa;
    w.radius = cfg.beam_radius > 0 ? cfg.beam_radius : beam_layout(cfg).radius;
    w.trials = trials;
    for (long long c : counts) {
        const double p = static_cast<double>(c) / trials;
        w.weights.push_back(p);
        w.half_width.push_back(1.959963984540054 * std::sqrt(p * (1.0 - p) / trials));
    }
    return w;
}

double sinr_threshold(double rate, double bandwidth) {
    return std::exp2(rate / bandwidth) - 1.0;
}

double user_n_threshold(const OutageParams& p, int state) {
    const double load = 1.0 + state * p.inr;
    return std::max(p.tau1() * load + p.omega1(), p.tau2() * load + p.omega2()) / p.chi;
}

double user_m_threshold(const OutageParams& p, int state) {
    const double load = 1.0 + state * p.inr;
    return (p.tau_m() * load + p.omega1()) / p.chi;
}

namespace {

double printed_survival(int K, double x) {
    if (K == 1) return std::exp(-x);
    double term = 1.0;
    double sum = 0.0;
    for (int i = 1; i < K; ++i) {
        term *= x / i;
        sum += term;
    }
    return std::exp(-x) * sum;
}

template <class Threshold>
OutageValue mixture_outage(const OutageParams& p, const InterferenceWeightSet& w, bool raw,
                           Threshold threshold) {
    OutageValue out;
    if (!p.feasible()) {
        out.infeasible_split = true;
        out.probability = 1.0;
        return out;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < w.weights.size(); ++j) {
        if (w.weights[j] == 0.0) continue;
        const double x = threshold(static_cast<int>(j));
        sum += w.weights[j] * (raw ? printed_survival(p.K, x) : gamma_cdf(p.K, x));
    }
    out.probability = std::clamp(sum, 0.0, 1.0);
    return out;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

OutageValue outage_user_n(const OutageParams& params, NomaVariant variant, CsiMode csi,
                          const InterferenceWeightSet& weights, bool raw_theorem) {
    const OutageParams p = specialise(params, variant, csi);
    return mixture_outage(p, weights, raw_theorem,
                          [&](int j) { return user_n_threshold(p, j); });
}

OutageValue outage_user_m(const OutageParams& params, NomaVariant variant, CsiMode csi,
                          const InterferenceWeightSet& weights, bool raw_theorem) {
    const OutageParams p = specialise(params, variant, csi);
    return mixture_outage(p, weights, raw_theorem,
                          [&](int j) { return user_m_threshold(p, j); });
}

double asymptotic_outage(const OutageParams& params, PairUser user, NomaVariant variant,
                         CsiMode csi, const InterferenceWeightSet& weights, bool raw_theorem) {
    const OutageParams p = specialise(params, variant, csi);
    if (!p.feasible()) return 1.0;
    if (raw_theorem) {
        const double x = user == PairUser::N
                             ? (csi == CsiMode::Imperfect ? p.lambda1() : p.lambda2()) / p.chi
                             : (p.omega1() + p.tau_m()) / p.chi;
        if (variant == NomaVariant::PowerDomain && user == PairUser::N &&
            csi == CsiMode::Imperfect) {
            return std::abs(-(p.omega2() / p.chi + p.tau2() / p.chi));
        }
        return 1.0 - std::pow(x, p.K) / factorial(p.K);
    }
    if (csi == CsiMode::Imperfect) {
        const double floor_arg = user == PairUser::N ? std::max(p.omega1(), p.omega2()) / p.chi
                                                      : p.omega1() / p.chi;
        return gamma_cdf(p.K, floor_arg);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < weights.weights.size(); ++j) {
        const int state = static_cast<int>(j);
        const double x = user == PairUser::N ? user_n_threshold(p, state)
                                             : user_m_threshold(p, state);
        sum += weights.weights[j] * std::pow(x, p.K) / factorial(p.K);
    }
    return sum;
}

DiversityEstimate estimate_diversity_order(const std::vector<double>& rho_db,
                                           const std::vector<double>& outage) {
    if (rho_db.size() != outage.size()) throw LengthMismatch("SNR grid and outage curve differ");
    if (rho_db.empty()) throw DegenerateCurve("empty outage curve");
    const double top = *std::max_element(rho_db.begin(), rho_db.end());
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < rho_db.size(); ++i) {
        if (rho_db[i] < top - 10.0) continue;
        if (!(outage[i] > 0.0)) {
            throw DegenerateCurve("zero outage inside the fitted decade at " +
                                  std::to_string(rho_db[i]) + " dB");
        }
        xs.push_back(rho_db[i] / 10.0 * std::log(10.0));
        ys.push_back(-std::log(outage[i]));
    }
    const int n = static_cast<int>(xs.size());
    if (n < 5) throw DegenerateCurve("diversity fit needs at least five points in the top decade");
    double mx = 0.0;
    double my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    DiversityEstimate d;
    d.slope = sxy / sxx;
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = ys[i] - (my + d.slope * (xs[i] - mx));
        rss += e * e;
    }
    d.half_width = n > 2 ? 1.96 * std::sqrt(rss / (n - 2) / sxx) : 0.0;
    d.floor = d.slope < 0.1;
    d.points = n;
    return d;
}

double system_throughput(double p_n, double p_m, double r_n, double r_m) {
    return (1.0 - p_m) * r_m + (1.0 - p_n) * r_n;
}

}  // namespace bhnoma

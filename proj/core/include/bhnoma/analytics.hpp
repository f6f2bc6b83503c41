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

#include "bhnoma/scenario.hpp"

namespace bhnoma {

enum class NomaVariant { CodeDomain, PowerDomain };
enum class CsiMode { Imperfect, Perfect };
enum class PairUser { N, M };

/// Outage inputs for one NOMA pair at normalised SNR rho = Ps / sigma^2.
struct OutageParams {
    double rho = 1.0;
    double omega = 0.0;      // channel estimation error variance
    double a_n = 0.26;
    double a_m = 0.74;
    double eps_n = 1.0;
    double eps_m = 1.0;
    double chi = 1.0;        // path constant; 1 for normalised curves
    int K = 1;
    double inr = 10.0;       // interference-to-noise ratio of one co-active beam, linear

    /// a_m - eps_m a_n; SIC decoding of x_m is possible only when positive.
    double sic_margin() const { return a_m - eps_m * a_n; }
    bool feasible() const { return sic_margin() > 0.0 && a_n > 0.0; }
    double omega1() const;
    double omega2() const;
    double tau1() const;
    double tau2() const;
    double tau_m() const { return tau1(); }
    /// max(tau1 + Omega1, tau2 + Omega2).
    double lambda1() const;
    /// max(tau1, tau2).
    double lambda2() const;
};

/// The channel-estimation term is dropped (omega = 0) for perfect CSI, and
/// K is forced to 1 for the power-domain variant.
OutageParams specialise(OutageParams p, NomaVariant variant, CsiMode csi);

/// Distribution over interference states j = 0..6 (number of co-active
/// neighbouring beams reaching the evaluated user).
struct InterferenceWeightSet {
    std::vector<double> weights;     // sums to 1
    std::vector<double> half_width;  // 95% binomial half-widths
    double kappa = 0.0;
    double radius = 1.0;
    int trials = 0;

    static InterferenceWeightSet interference_free();
};

inline constexpr int kNeighbourBeams = 6;

/// Monte Carlo estimate of the interference-state weights: a user uniform in
/// the target beam disc, six hexagonal neighbours at sqrt(3) r whose
/// footprints reach up to 2 r, each co-active with probability kappa, at
/// most B0 - 1 co-active.
InterferenceWeightSet p_avg_overlap(const ScenarioConfig& cfg, double kappa, int trials,
                                    std::uint64_t seed);

/// 2^{R/W} - 1.
double sinr_threshold(double rate, double bandwidth = 1.0);

struct OutageValue {
    double probability = 1.0;
    bool infeasible_split = false;  // a_m - eps_m a_n <= 0
};

/// Gamma(K, 1) argument of user n in interference state j:
/// max(tau1 (1 + j inr) + Omega1, tau2 (1 + j inr) + Omega2) / chi.
double user_n_threshold(const OutageParams& p, int state);
/// (tau_m (1 + j inr) + Omega1) / chi.
double user_m_threshold(const OutageParams& p, int state);

/// sum_j w_j F_K(threshold_j), i.e. 1 - sum_j w_j Pr(Z > threshold_j).
/// `raw_theorem` evaluates the printed theorem forms instead:
/// sum_j w_j e^{-x} sum_{i=1}^{K-1} x^i / i! (e^{-x} for K = 1).
OutageValue outage_user_n(const OutageParams& p, NomaVariant variant, CsiMode csi,
                          const InterferenceWeightSet& weights, bool raw_theorem = false);
OutageValue outage_user_m(const OutageParams& p, NomaVariant variant, CsiMode csi,
                          const InterferenceWeightSet& weights, bool raw_theorem = false);

/// High-SNR approximation. Perfect CSI: sum_j w_j x_j^K / K!. Imperfect CSI:
/// the rho -> infinity floor F_K(Omega / chi). `raw_theorem` evaluates the
/// printed corollary forms (with the absolute value applied to the
/// power-domain user-n imperfect-CSI expression).
double asymptotic_outage(const OutageParams& p, PairUser user, NomaVariant variant, CsiMode csi,
                         const InterferenceWeightSet& weights, bool raw_theorem = false);

struct DiversityEstimate {
    double slope = 0.0;
    double half_width = 0.0;  // 95%
    bool floor = false;       // slope < 0.1: error floor, not a diversity order
    int points = 0;
};

/// Least-squares slope of -log P against log rho over the top decade of the
/// grid. Throws DegenerateCurve with fewer than five usable points or a
/// zero probability inside the fitted range.
DiversityEstimate estimate_diversity_order(const std::vector<double>& rho_db,
                                           const std::vector<double>& outage);

/// Delay-limited throughput (1 - P_m) R_m + (1 - P_n) R_n.
double system_throughput(double p_n, double p_m, double r_n, double r_m);

}  // namespace bhnoma

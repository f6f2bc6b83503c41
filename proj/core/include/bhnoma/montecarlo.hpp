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

#include "bhnoma/analytics.hpp"
#include "bhnoma/rng.hpp"

namespace bhnoma {

/// Outage counts of one simulation; probabilities are counts / trials.
struct TrialBatch {
    long long trials = 0;
    long long failures_n = 0;  // not (gamma_{n->m} > eps_m and gamma_n > eps_n)
    long long failures_m = 0;  // gamma_m <= eps_m
    std::uint64_t seed = 0;

    double p_n() const { return trials ? static_cast<double>(failures_n) / trials : 0.0; }
    double p_m() const { return trials ? static_cast<double>(failures_m) / trials : 0.0; }
    double half_width_n() const;
    double half_width_m() const;
};

inline constexpr int kTrialBlock = 8192;

/// Gamma(shape, 1) draw as a sum of `shape` unit exponentials.
double sample_gamma(CounterStream& stream, int shape);

/// Draws the interference state from `weights`, two Gamma(K, 1) gains as sums
/// of K unit exponentials, and evaluates the SINR events directly. Trials are
/// split into fixed blocks with their own substreams, so the counts do not
/// depend on thread count or scheduling.
TrialBatch simulate_outage(const OutageParams& params, NomaVariant variant, CsiMode csi,
                           const InterferenceWeightSet& weights, long long trials,
                           std::uint64_t seed);

struct ThroughputEstimate {
    TrialBatch batch;
    double throughput = 0.0;
};

/// Empirical outage plugged into (1 - P_m) R_m + (1 - P_n) R_n.
ThroughputEstimate simulate_throughput(const OutageParams& params, NomaVariant variant,
                                       CsiMode csi, const InterferenceWeightSet& weights,
                                       double r_n, double r_m, long long trials,
                                       std::uint64_t seed);

}  // namespace bhnoma

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


#include "bhnoma/montecarlo.hpp"

#include <cmath>
#include <vector>

#include "bhnoma/rng.hpp"

namespace bhnoma {
namespace {

double binomial_half_width(long long failures, long long trials) {
    if (trials == 0) return 0.0;
    const double p = static_cast<double>(failures) / trials;
    return 1.959963984540054 * std::sqrt(p * (1.0 - p) / trials);
}

}  // namespace

double TrialBatch::half_width_n() const { return binomial_half_width(failures_n, trials); }
double TrialBatch::half_width_m() const { return binomial_half_width(failures_m, trials); }

double sample_gamma(CounterStream& stream, int shape) {
    double z = 0.0;
    for (int k = 0; k < shape; ++k) z += stream.exponential();
    return z;
}

TrialBatch simulate_outage(const OutageParams& params, NomaVariant variant, CsiMode csi,
                           const InterferenceWeightSet& weights, long long trials,
                           std::uint64_t seed) {
    const OutageParams p = specialise(params, variant, csi);
    TrialBatch batch;
    batch.trials = trials;
    batch.seed = seed;
    if (trials <= 0) return batch;

    std::vector<double> cdf;
    double acc = 0.0;
    for (double w : weights.weights) cdf.push_back(acc += w);
    const int states = static_cast<int>(cdf.size());

    const double rho = p.rho;
    const double a_n = p.a_n;
    const double a_m = p.a_m;
    const long long blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    long long fail_n = 0;
    long long fail_m = 0;

#pragma omp parallel for schedule(static) reduction(+ : fail_n, fail_m)
    for (long long blk = 0; blk < blocks; ++blk) {
        CounterStream s(seed, StreamDomain::OutageTrials, static_cast<std::uint32_t>(blk),
                        static_cast<std::uint32_t>(blk >> 32));
        const long long n = std::min<long long>(kTrialBlock, trials - blk * kTrialBlock);
        for (long long i = 0; i < n; ++i) {
            const double u = s.uniform() * acc;
            int j = 0;
            while (j + 1 < states && u >= cdf[j]) ++j;
            const double z_n = sample_gamma(s, p.K);
            const double z_m = sample_gamma(s, p.K);
            // Everything normalised by sigma^2.
            const double zeta = 1.0 + j * p.inr + rho * p.omega;
            const double g_n = rho * p.chi * z_n;
            const double g_m = rho * p.chi * z_m;
            const double cross = g_n * a_m / (g_n * a_n + zeta);
            const double own = g_n * a_n / zeta;
            const double weak = g_m * a_m / (g_m * a_n + zeta);
            if (!(cross > p.eps_m && own > p.eps_n)) ++fail_n;
            if (!(weak > p.eps_m)) ++fail_m;
        }
    }
    batch.failures_n = fail_n;
    batch.failures_m = fail_m;
    return batch;
}

ThroughputEstimate simulate_throughput(const OutageParams& params, NomaVariant variant,
                                       CsiMode csi, const InterferenceWeightSet& weights,
                                       double r_n, double r_m, long long trials,
                                       std::uint64_t seed) {
    ThroughputEstimate est;
    est.batch = simulate_outage(params, variant, csi, weights, trials, seed);
    est.throughput = system_throughput(est.batch.p_n(), est.batch.p_m(), r_n, r_m);
    return est;
}

}  // namespace bhnoma

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


#include <doctest.h>

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bhnoma/analytics.hpp"
#include "bhnoma/montecarlo.hpp"

using namespace bhnoma;

namespace {

OutageParams operating_point(double rho_db, int K) {
    OutageParams p;
    p.rho = std::pow(10.0, rho_db / 10.0);
    p.omega = 0.1;
    p.eps_n = sinr_threshold(1.0);
    p.eps_m = sinr_threshold(1.5);
    p.K = K;
    return p;
}

InterferenceWeightSet two_states() {
    InterferenceWeightSet w;
    w.weights = {0.7, 0.3, 0, 0, 0, 0, 0};
    w.half_width.assign(7, 0.0);
    return w;
}

}  // namespace

TEST_CASE("simulation is reproducible and independent of thread count") {
    const auto p = operating_point(10.0, 4);
    const auto w = two_states();
    const long long trials = 3 * kTrialBlock + 123;
    const auto a = simulate_outage(p, NomaVariant::CodeDomain, CsiMode::Imperfect, w, trials, 9);
    const auto b = simulate_outage(p, NomaVariant::CodeDomain, CsiMode::Imperfect, w, trials, 9);
    CHECK(a.failures_n == b.failures_n);
    CHECK(a.failures_m == b.failures_m);
    CHECK(a.trials == trials);
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = simulate_outage(p, NomaVariant::CodeDomain, CsiMode::Imperfect, w, trials, 9);
    omp_set_num_threads(4);
    const auto four = simulate_outage(p, NomaVariant::CodeDomain, CsiMode::Imperfect, w, trials, 9);
    omp_set_num_threads(saved);
    CHECK(one.failures_n == four.failures_n);
    CHECK(one.failures_m == four.failures_m);
    CHECK(one.failures_n == a.failures_n);
#endif
    const auto c = simulate_outage(p, NomaVariant::CodeDomain, CsiMode::Imperfect, w, trials, 10);
    CHECK(c.failures_n != a.failures_n);
}

TEST_CASE("degenerate thresholds") {
    auto p = operating_point(10.0, 2);
    p.eps_n = 0.0;
    p.eps_m = 0.0;
    const auto w = two_states();
    const auto zero = simulate_outage(p, NomaVariant::CodeDomain, CsiMode::Perfect, w, 20000, 1);
    CHECK(zero.failures_n == 0);
    CHECK(zero.failures_m == 0);

    auto bad = operating_point(30.0, 2);
    bad.a_n = 0.45;
    bad.a_m = 0.55;
    const auto all = simulate_outage(bad, NomaVariant::CodeDomain, CsiMode::Perfect, w, 20000, 1);
    CHECK(all.failures_n == all.trials);
    CHECK(all.failures_m == all.trials);
}

TEST_CASE("single-carrier sweep agrees with the closed form") {
    const auto w = two_states();
    for (double db = 0.0; db <= 30.0; db += 5.0) {
        const auto p = operating_point(db, 1);
        for (auto csi : {CsiMode::Imperfect, CsiMode::Perfect}) {
            const auto mc = simulate_outage(p, NomaVariant::PowerDomain, csi, w, 400000, 4);
            const double an = outage_user_n(p, NomaVariant::PowerDomain, csi, w).probability;
            const double am = outage_user_m(p, NomaVariant::PowerDomain, csi, w).probability;
            CAPTURE(db);
            if (an > 0.05) CHECK(std::abs(mc.p_n() - an) < 0.05 * an);
            if (am > 0.05) CHECK(std::abs(mc.p_m() - am) < 0.05 * am);
            CHECK(std::abs(mc.p_n() - an) < 4.0 * mc.half_width_n() + 1e-3);
        }
    }
}

TEST_CASE("simulated throughput applies the throughput identity") {
    const auto p = operating_point(12.0, 4);
    const auto w = two_states();
    const auto t = simulate_throughput(p, NomaVariant::CodeDomain, CsiMode::Imperfect, w, 1.0, 1.5,
                                       50000, 2);
    CHECK(t.throughput == system_throughput(t.batch.p_n(), t.batch.p_m(), 1.0, 1.5));
    const auto same = simulate_outage(p, NomaVariant::CodeDomain, CsiMode::Imperfect, w, 50000, 2);
    CHECK(same.failures_n == t.batch.failures_n);
}

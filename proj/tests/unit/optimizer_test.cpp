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

#include <bit>
#include <cmath>
#include <functional>
#include <limits>

#include "bhnoma/errors.hpp"
#include "bhnoma/optimizer.hpp"
#include "bhnoma/rng.hpp"

using namespace bhnoma;

namespace {

struct MatchScore {
    int collisions = 0;
    int used = 0;
};

MatchScore score(const std::vector<std::uint32_t>& masks) {
    MatchScore s;
    std::uint32_t all = 0;
    for (std::size_t p = 0; p < masks.size(); ++p) {
        all |= masks[p];
        for (std::size_t q = p + 1; q < masks.size(); ++q) {
            s.collisions += std::popcount(masks[p] & masks[q]);
        }
    }
    s.used = std::popcount(all);
    return s;
}

// Exhaustive search over every assignment of a non-empty, at-most-Q carrier
// set to each pair; lexicographic optimum (fewest collisions, most carriers).
MatchScore exhaustive_match(int pairs, int K, int Q) {
    std::vector<std::uint32_t> options;
    for (std::uint32_t m = 1; m < (1u << K); ++m) {
        if (std::popcount(m) <= Q) options.push_back(m);
    }
    MatchScore best{std::numeric_limits<int>::max(), 0};
    std::vector<std::uint32_t> masks(pairs);
    std::function<void(int)> rec = [&](int p) {
        if (p == pairs) {
            const auto s = score(masks);
            if (s.collisions < best.collisions ||
                (s.collisions == best.collisions && s.used > best.used)) {
                best = s;
            }
            return;
        }
        for (auto m : options) {
            masks[p] = m;
            rec(p + 1);
        }
    };
    rec(0);
    return best;
}

PairLink random_link(CounterStream& s) {
    PairLink link;
    link.gain_n = std::pow(10.0, s.uniform(-0.5, 4.0));
    link.gain_m = link.gain_n * s.uniform(0.01, 1.0);
    link.zeta_n = s.uniform(0.5, 2.0);
    link.zeta_m = s.uniform(0.5, 2.0);
    link.rate_scale = 1e8 * (1 + static_cast<int>(s.uniform() * 2.0));
    return link;
}

}  // namespace

TEST_CASE("objective and residual demand") {
    CHECK(objective({3.0, 5.0}, {1.0, 5.0}) == 4.0);
    CHECK(objective({}, {}) == 0.0);
    CHECK_THROWS_AS(objective({1.0}, {1.0, 2.0}), LengthMismatch);

    const std::vector<double> d = {10.0, 4.0};
    CHECK(residual_demand(d, {}, 0) == d);
    const std::vector<std::vector<double>> history = {{3.0, 4.0}, {2.0, 1.0}, {100.0, 100.0}};
    CHECK(residual_demand(d, history, 1) == std::vector<double>{7.0, 0.0});
    CHECK(residual_demand(d, history, 2) == std::vector<double>{5.0, -1.0});
}

TEST_CASE("pair surrogate and ratio update") {
    const PairGains g{4.0, 1.5, 0.7, 0.9};
    const double an = 0.3, am = 0.7;
    const double num = (g.h_mn * an + g.zeta) * g.h_nn * an +
                       (am * g.zeta + g.h_nn * am * an) * g.h_mm;
    const double den = g.zeta * (2.0 * g.zeta + g.h_mn * an);
    CHECK(update_theta(an, am, g) == doctest::Approx(num / den));
    CHECK(surrogate(0.1, an, am, g) == doctest::Approx(std::log(1.0 + num - 0.1 * den)));
    CHECK(surrogate(update_theta(an, am, g), an, am, g) == doctest::Approx(0.0));
    CHECK_THROWS_AS(surrogate(1e6, an, am, g), NonPositiveLogArgument);
}

TEST_CASE("pair rates and gap") {
    PairLink link{10.0, 3.0, 1.0, 2.0, 5.0};
    CHECK(rate_n(link, 0.2) == doctest::Approx(5.0 * std::log2(1.0 + 2.0)));
    CHECK(rate_m(link, 0.2) == doctest::Approx(5.0 * std::log2(1.0 + 2.4 / 2.6)));
    const double gap = pair_gap(link, 0.2, 1.0, 2.0);
    CHECK(gap == doctest::Approx(std::pow(rate_n(link, 0.2) - 1.0, 2) +
                                 std::pow(rate_m(link, 0.2) - 2.0, 2)));
}

TEST_CASE("power split reaches the grid optimum") {
    CounterStream s(31, StreamDomain::Scenario);
    const int grid = 10000;
    for (int trial = 0; trial < 60; ++trial) {
        const PairLink link = random_link(s);
        const double yn = s.uniform(0.0, 1.5) * rate_n(link, 0.5);
        const double ym = s.uniform(0.0, 1.5) * rate_m(link, kMinPowerFraction);
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid; ++i) {
            const double a = kMinPowerFraction + (0.5 - kMinPowerFraction) * i / (grid - 1);
            best = std::min(best, pair_gap(link, a, yn, ym));
        }
        const PowerSolution sol = optimize_power_pair(link, yn, ym);
        CAPTURE(trial);
        CHECK(sol.a_n >= kMinPowerFraction);
        CHECK(sol.a_n <= 0.5);
        CHECK(sol.gap == doctest::Approx(pair_gap(link, sol.a_n, yn, ym)));
        const double slack = 1e-4 * std::max(best, 1e-6 * (yn * yn + ym * ym));
        CHECK(sol.gap <= best + slack);
        for (std::size_t i = 1; i < sol.trace.size(); ++i) {
            CHECK(sol.trace[i] <= sol.trace[i - 1] * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("power split recovers the split that produced its targets") {
    CounterStream s(32, StreamDomain::Scenario);
    for (int trial = 0; trial < 20; ++trial) {
        const PairLink link = random_link(s);
        const double yn = rate_n(link, 0.26);
        const double ym = rate_m(link, 0.26);
        const PowerSolution sol = optimize_power_pair(link, yn, ym);
        CHECK(sol.a_n == doctest::Approx(0.26).epsilon(1e-4));
        CHECK(sol.gap <= 1e-8 * (yn * yn + ym * ym));
        CHECK(sol.converged);
    }
}

TEST_CASE("carrier matching is optimal against exhaustive search") {
    for (auto [P, K, Q] : {std::tuple{4, 4, 2}, std::tuple{3, 4, 2}, std::tuple{2, 4, 2},
                           std::tuple{1, 4, 2}, std::tuple{5, 4, 2}, std::tuple{6, 4, 2},
                           std::tuple{3, 3, 1}, std::tuple{2, 3, 3}, std::tuple{4, 3, 2}}) {
        CAPTURE(P);
        CAPTURE(K);
        CAPTURE(Q);
        const auto masks = match_subcarriers(P, K, Q);
        REQUIRE(masks.size() == static_cast<std::size_t>(P));
        for (auto m : masks) {
            CHECK(m != 0u);
            CHECK(std::popcount(m) <= Q);
            CHECK(m < (1u << K));
        }
        const auto got = score(masks);
        const auto best = exhaustive_match(P, K, Q);
        CHECK(got.collisions == best.collisions);
        CHECK(got.used == best.used);
        CHECK(intra_beam_overlap(masks) == 4LL * got.collisions);
    }
    CHECK(match_subcarriers(0, 4, 2).empty());
    CHECK_THROWS_AS(match_subcarriers(2, 4, 5), ValidationError);
}

TEST_CASE("carrier matching prefers each pair's strongest carriers") {
    const std::vector<std::vector<double>> gain = {{0.1, 0.2, 5.0, 0.3}, {4.0, 0.1, 0.2, 3.0}};
    const auto masks = match_subcarriers(2, 4, 2, gain);
    // Pair 0 holds the strongest entry and chooses first: carriers 2 and 3.
    // Pair 1 then takes the two carriers left free.
    CHECK(masks[0] == 0b1100u);
    CHECK(masks[1] == 0b0011u);
}

TEST_CASE("partner exchange repairs pairs without a common carrier") {
    const std::vector<UserPair> pairs = {{0, 1}, {2, 3}};
    const std::vector<std::uint32_t> masks = {0b01, 0b10, 0b10, 0b01};
    const auto r = exchange_partners(pairs, masks);
    CHECK(r.exchanges == 1);
    CHECK(r.demoted.empty());
    REQUIRE(r.pairs.size() == 2u);
    CHECK(r.pairs[0].m == 3);
    CHECK(r.pairs[1].m == 1);

    const std::vector<std::uint32_t> hopeless = {0b0001, 0b0010, 0b0100, 0b1000};
    const auto d = exchange_partners(pairs, hopeless);
    CHECK(d.pairs.empty());
    CHECK(d.demoted.size() == 4u);
    CHECK_THROWS_AS(exchange_partners_strict(pairs, hopeless), InfeasibleMatching);
    CHECK(exchange_partners_strict(pairs, masks).size() == 2u);
}

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

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "bhnoma/montecarlo.hpp"
#include "bhnoma/rng.hpp"

using namespace bhnoma;

namespace {

// Kolmogorov-Smirnov statistic of `xs` against `cdf`.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    return d;
}

}  // namespace

TEST_CASE("philox4x32-10 known-answer vectors") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::block(C{0, 0, 0, 0}, {0, 0}) ==
          C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                            {0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                            {0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("substreams are pure functions of their coordinates") {
    CounterStream a(42, StreamDomain::Fading, 3, 7, 1);
    CounterStream b(42, StreamDomain::Fading, 3, 7, 1);
    CounterStream other_domain(42, StreamDomain::Demand, 3, 7, 1);
    CounterStream other_coord(42, StreamDomain::Fading, 3, 7, 2);
    int same_domain = 0;
    int same_coord = 0;
    for (int i = 0; i < 64; ++i) {
        const auto x = a.next_u32();
        CHECK(x == b.next_u32());
        same_domain += x == other_domain.next_u32();
        same_coord += x == other_coord.next_u32();
    }
    CHECK(same_domain < 2);
    CHECK(same_coord < 2);
}

TEST_CASE("uniform draws lie in the open unit interval and pass KS") {
    CounterStream s(7, StreamDomain::Scenario);
    std::vector<double> xs(100000);
    for (auto& x : xs) {
        x = s.uniform();
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
    }
    CHECK(ks_statistic(xs, [](double x) { return x; }) < 0.01);
}

TEST_CASE("normal and complex normal moments") {
    CounterStream s(11, StreamDomain::Fading);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.01);

    double power = 0.0;
    std::complex<double> mean = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto z = s.complex_normal(0.3);
        power += std::norm(z);
        mean += z;
    }
    CHECK(power / n == doctest::Approx(0.3).epsilon(0.01));
    CHECK(std::abs(mean / static_cast<double>(n)) < 0.01);
}

TEST_CASE("gamma sampler matches the regularised incomplete gamma function") {
    for (int shape : {1, 2, 4}) {
        CAPTURE(shape);
        CounterStream s(5, StreamDomain::OutageTrials, static_cast<std::uint32_t>(shape));
        std::vector<double> xs(100000);
        for (auto& x : xs) x = sample_gamma(s, shape);
        const double d = ks_statistic(xs, [&](double x) { return boost::math::gamma_p(shape, x); });
        CHECK(d < 0.01);
    }
}

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
#include <string>

#include "bhnoma/errors.hpp"
#include "bhnoma/linkmodel.hpp"
#include "bhnoma/rng.hpp"
#include "support.hpp"

using namespace bhnoma;

namespace {

// Beam b owns users 4b..4b+3. The plan mixes a NOMA pair, an orthogonal
// user and a user whose carriers collide with both.
SlotPlan mixed_slot(const std::vector<int>& beams, double a_n = 0.3) {
    SlotPlan slot;
    for (int b : beams) {
        BeamAllocation alloc;
        alloc.beam = b;
        alloc.units.push_back({4 * b, 4 * b + 1, 0b01, a_n});
        alloc.units.push_back({4 * b + 2, -1, 0b10, 0.5});
        if (b % 2 == 1) alloc.units.push_back({4 * b + 3, -1, 0b11, 0.5});
        slot.beams.push_back(alloc);
    }
    return slot;
}

// Direct transcription of the interference model: per carrier of the user,
// same-beam units on that carrier contribute Ps |h_bar|^2 each, co-channel
// lit beams contribute (units on that carrier) * Ps * attenuation * chi^2 *
// coupling; the per-carrier sums are averaged over the user's carriers.
double zeta_oracle(const ScenarioConfig& cfg, const SlotPlan& slot, const ChannelState& ch,
                   int beam, int user) {
    const BeamAllocation* own = slot.find(beam);
    const ServiceUnit* mine = nullptr;
    for (const auto& u : own->units) {
        if (u.serves(user)) mine = &u;
    }
    const double chi2 = ch.path_factor[user] * ch.path_factor[user];
    double total = 0.0;
    for (int k = 0; k < ch.carriers; ++k) {
        if (!(mine->carriers >> k & 1u)) continue;
        for (const auto& u : own->units) {
            if (&u != mine && (u.carriers >> k & 1u)) {
                total += cfg.tx_power * std::norm(ch.estimated_coefficient(user, k));
            }
        }
        for (const auto& other : slot.beams) {
            if (other.beam == beam) continue;
            const int period = cfg.reuse_mode == ReuseMode::OneColor   ? 1
                               : cfg.reuse_mode == ReuseMode::TwoColor ? 2
                                                                       : 4;
            if (other.beam % period != beam % period) continue;
            for (const auto& u : other.units) {
                if (u.carriers >> k & 1u) {
                    total += cfg.tx_power * cfg.interbeam_attenuation * chi2 *
                             ch.interbeam_gain(user, other.beam, k);
                }
            }
        }
    }
    total /= std::popcount(mine->carriers);
    return total + cfg.channel_error_variance * cfg.tx_power * chi2 + cfg.noise_power;
}

}  // namespace

TEST_CASE("reuse colouring") {
    for (int b = 0; b < 8; ++b) {
        CHECK(beam_color(ReuseMode::OneColor, b) == 0);
        CHECK(co_channel(ReuseMode::OneColor, b, (b + 1) % 8));
        CHECK_FALSE(co_channel(ReuseMode::TwoColor, b, b + 1));
        CHECK(co_channel(ReuseMode::TwoColor, b, b + 2));
        CHECK_FALSE(co_channel(ReuseMode::FourColor, b, b + 2));
        CHECK(co_channel(ReuseMode::FourColor, b, b + 4));
    }
    ScenarioConfig cfg;
    CHECK(effective_bandwidth(cfg) == cfg.bandwidth_per_carrier);
    cfg.reuse_mode = ReuseMode::FourColor;
    CHECK(effective_bandwidth(cfg) == cfg.bandwidth_per_carrier / 2.0);
}

TEST_CASE("SINR expressions") {
    CHECK(sinr_n(0.0, 0.3, 1.0) == 0.0);
    CHECK(sinr_m(0.0, 0.3, 0.7, 1.0) == 0.0);
    CHECK(sinr_cross(0.0, 0.3, 0.7, 1.0) == 0.0);
    const double g = 7.0, zeta = 0.5, an = 0.2, am = 0.8;
    CHECK(sinr_n(g, an, zeta) == doctest::Approx(g * an / zeta));
    CHECK(sinr_m(g, an, am, zeta) == doctest::Approx(g * am / (g * an + zeta)));
    CHECK(sinr_cross(g, an, am, zeta) == doctest::Approx(g * am / (g * an + zeta)));
    // Without noise the weak user's SINR saturates at a_m / a_n.
    CHECK(sinr_m(1e12, an, am, 1.0) == doctest::Approx(am / an).epsilon(1e-9));
}

TEST_CASE("rates scale with carrier count and bandwidth") {
    ScenarioConfig cfg;
    CHECK(carrier_rate(cfg, 0.0) == 0.0);
    CHECK(carrier_rate(cfg, 1.0) == doctest::Approx(cfg.bandwidth_per_carrier / 4.0));
    CHECK(rate_per_slot(cfg, 0b1011, 3.0) == doctest::Approx(3.0 * 50e6 * 2.0));
    cfg.reuse_mode = ReuseMode::FourColor;
    CHECK(carrier_rate(cfg, 1.0) == doctest::Approx(cfg.bandwidth_per_carrier / 8.0));
}

TEST_CASE("interference matches the brute-force sum") {
    for (ReuseMode mode : {ReuseMode::OneColor, ReuseMode::TwoColor, ReuseMode::FourColor}) {
        auto cfg = testing::small_config(6, 4, 2, 5);
        cfg.reuse_mode = mode;
        cfg.channel_error_variance = 0.05;
        const auto inst = testing::make_instance(cfg, 12);
        const SlotPlan slot = mixed_slot({0, 1, 2, 4, 5});
        for (const auto& alloc : slot.beams) {
            for (const auto& unit : alloc.units) {
                for (int u : {unit.strong, unit.weak}) {
                    if (u < 0) continue;
                    const auto budget = interference(cfg, slot, inst.channels[1], alloc.beam, u);
                    CHECK(budget.zeta() == doctest::Approx(
                                               zeta_oracle(cfg, slot, inst.channels[1], alloc.beam, u))
                                               .epsilon(1e-12));
                    CHECK(budget.noise == cfg.noise_power);
                }
            }
        }
    }
}

TEST_CASE("interference rejects dark beams and unserved users") {
    const auto cfg = testing::small_config(4, 4, 2, 2);
    const auto inst = testing::make_instance(cfg, 1);
    const SlotPlan slot = mixed_slot({0, 2});
    CHECK_THROWS_AS(interference(cfg, slot, inst.channels[0], 1, 4), InactiveBeam);
    CHECK_THROWS_AS(interference(cfg, slot, inst.channels[0], 0, 3), InactiveBeam);
}

TEST_CASE("slot evaluation follows the SIC rate model") {
    const auto cfg = testing::small_config(4, 4, 2, 2);
    const auto inst = testing::make_instance(cfg, 5);
    const auto& ch = inst.channels[0];
    const SlotPlan slot = mixed_slot({1, 2}, 0.25);
    const auto ev = evaluate_slot(cfg, slot, ch);
    const int n = 4, m = 5;
    const double gn = cfg.tx_power * ch.estimated_norm(n, 0b01);
    const double gm = cfg.tx_power * ch.estimated_norm(m, 0b01);
    const double zn = interference(cfg, slot, ch, 1, n).zeta();
    const double zm = interference(cfg, slot, ch, 1, m).zeta();
    CHECK(ev.rate[n] == doctest::Approx(cfg.bandwidth_per_carrier / 2.0 *
                                        std::log2(1.0 + 0.25 * gn / zn)));
    CHECK(ev.rate[m] == doctest::Approx(cfg.bandwidth_per_carrier / 2.0 *
                                        std::log2(1.0 + 0.75 * gm / (0.25 * gm + zm))));
    const int solo = 7;
    const double gs = cfg.tx_power * ch.estimated_norm(solo, 0b11);
    const double zs = interference(cfg, slot, ch, 1, solo).zeta();
    CHECK(ev.rate[solo] == doctest::Approx(cfg.bandwidth_per_carrier * std::log2(1.0 + gs / zs)));
    CHECK(ev.rate[0] == 0.0);  // beam 0 is dark
}

TEST_CASE("window capacity sums slot rates") {
    const auto cfg = testing::small_config(4, 4, 3, 2);
    const auto inst = testing::make_instance(cfg, 8);
    ResourcePlan empty;
    empty.beam_count = 4;
    const auto zero = total_capacity(cfg, empty, inst.channels);
    CHECK(zero == std::vector<double>(16, 0.0));

    ResourcePlan plan;
    plan.beam_count = 4;
    plan.slots = {mixed_slot({0, 1}), mixed_slot({2, 3}), mixed_slot({1, 3}, 0.1)};
    const auto cap = total_capacity(cfg, plan, inst.channels);
    std::vector<double> loop(16, 0.0);
    for (int t = 0; t < 3; ++t) {
        const auto ev = evaluate_slot(cfg, plan.slots[t], inst.channels[t]);
        for (int u = 0; u < 16; ++u) loop[u] += ev.rate[u];
    }
    for (int u = 0; u < 16; ++u) CHECK(cap[u] == doctest::Approx(loop[u]));

    ResourcePlan one;
    one.beam_count = 4;
    one.slots = {plan.slots[0]};
    CHECK(total_capacity(cfg, one, inst.channels) == evaluate_slot(cfg, plan.slots[0], inst.channels[0]).rate);
}

TEST_CASE("plan validator reports each constraint") {
    const auto cfg = testing::small_config(4, 4, 2, 2);
    const auto users = generate_users(cfg, 3);
    const auto first = [&](ResourcePlan p) {
        const auto v = plan_violations(cfg, p, users);
        return v.empty() ? std::string() : v.front();
    };
    ResourcePlan ok;
    ok.beam_count = 4;
    ok.slots = {mixed_slot({0, 1}), mixed_slot({2, 3})};
    CHECK(plan_violations(cfg, ok, users).empty());
    CHECK_NOTHROW(validate_plan(cfg, ok, users));

    ResourcePlan p = ok;
    p.slots.push_back(mixed_slot({0}));
    CHECK(first(p).find("more slots") != std::string::npos);

    p = ok;
    p.slots[0] = mixed_slot({0, 1, 2});
    CHECK(first(p).find("more than B0") != std::string::npos);

    p = ok;
    p.slots[0].beams[0].units[0].weak = 6;
    CHECK(first(p).find("belongs to another beam") != std::string::npos);

    p = ok;
    p.slots[0].beams[0].units[1].strong = 0;
    CHECK(first(p).find("served twice") != std::string::npos);

    p = ok;
    p.slots[0].beams[0].units[0].carriers = 0;
    CHECK(first(p).find("pair shares no carrier") != std::string::npos);

    p = ok;
    p.slots[0].beams[0].units[1].carriers = 0b100;
    CHECK(first(p).find("outside") != std::string::npos);

    p = ok;
    p.slots[0].beams[0].units[0].a_n = 0.6;
    CHECK(first(p).find("0 < a_n <= a_m") != std::string::npos);

    p = ok;
    p.slots[0].beams[0].units[0].a_n = 0.0;
    CHECK(first(p).find("0 < a_n <= a_m") != std::string::npos);

    p = ok;
    p.slots[0].beams[1].beam = 0;
    CHECK(!plan_violations(cfg, p, users).empty());
    CHECK_THROWS_AS(validate_plan(cfg, p, users), ValidationError);

    auto tight = cfg;
    tight.max_carriers_per_user = 1;
    CHECK(plan_violations(tight, ok, users).front().find("more than Q") != std::string::npos);
}

TEST_CASE("minimum-rate check targets the smaller of R_min and demand") {
    auto cfg = testing::small_config(2, 4, 2, 1);
    auto users = generate_users(cfg, 1);
    users[0].demand = 1e6;  // below R_min
    std::vector<double> cap(users.size(), 10e6);
    cap[0] = 1e6;
    cap[1] = 4.9e6;
    const auto v = min_rate_violations(cfg, users, cap);
    REQUIRE(v.size() == 1u);
    CHECK(v[0] == 1);
    CHECK_THROWS_AS(min_rate_violations(cfg, users, std::vector<double>(3, 0.0)), LengthMismatch);
}

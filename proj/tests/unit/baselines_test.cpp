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
#include <numeric>

#include "bhnoma/baselines.hpp"
#include "bhnoma/errors.hpp"
#include "bhnoma/linkmodel.hpp"
#include "support.hpp"

using namespace bhnoma;

TEST_CASE("scheduler names round-trip") {
    for (auto k : {SchedulerKind::UNoma, SchedulerKind::Oma, SchedulerKind::MaxSinr,
                   SchedulerKind::Periodic}) {
        CHECK(parse_scheduler_kind(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_scheduler_kind("greedy"), ParseError);
}

TEST_CASE("periodic illumination follows modular arithmetic") {
    const auto cfg = testing::small_config(7, 4, 9, 3);
    const auto in = testing::make_instance(cfg, 3);
    const auto r = periodic_bh(cfg, in.users, in.channels);
    const int groups = (7 + 3 - 1) / 3;
    const auto sched = r.plan.schedule();
    for (int t = 0; t < cfg.window_slots; ++t) {
        std::vector<int> expected;
        for (int b = 0; b < 7; ++b) {
            if (b / 3 == t % groups) expected.push_back(b);
        }
        CHECK(sched[t] == expected);
    }
    CHECK(plan_violations(cfg, r.plan, in.users).empty());
}

TEST_CASE("periodic illumination edge cases") {
    auto cfg = testing::small_config(4, 4, 3, 4);
    auto in = testing::make_instance(cfg, 1);
    auto r = periodic_bh(cfg, in.users, in.channels);
    for (const auto& s : r.plan.schedule()) CHECK(s == std::vector<int>{0, 1, 2, 3});

    cfg = testing::small_config(6, 4, 6, 2);
    in = testing::make_instance(cfg, 1);
    r = periodic_bh(cfg, in.users, in.channels);
    for (int n : r.plan.slots_per_beam()) CHECK(n == 2);
}

TEST_CASE("max-SINR selection picks the strongest beams per slot") {
    const auto cfg = testing::small_config(6, 4, 4, 2);
    const auto in = testing::make_instance(cfg, 5);
    const auto r = max_sinr_bh(cfg, in.users, in.channels);
    for (int t = 0; t < cfg.window_slots; ++t) {
        const auto& ch = in.channels[t];
        std::vector<double> score(6, 0.0);
        for (const auto& u : in.users) {
            score[u.beam_id] = std::max(score[u.beam_id], ch.effective_norm(u.user_id));
        }
        std::vector<int> order(6);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return score[a] > score[b]; });
        std::vector<int> expected(order.begin(), order.begin() + 2);
        std::sort(expected.begin(), expected.end());
        CHECK(r.plan.schedule()[t] == expected);
    }
}

TEST_CASE("orthogonal service never superposes users") {
    const auto cfg = testing::small_config(6, 4, 6, 3);
    const auto in = testing::make_instance(cfg, 6);
    const auto r = oma_bh(cfg, in.users, in.channels);
    for (const auto& slot : r.plan.slots) {
        for (const auto& alloc : slot.beams) {
            std::uint32_t used = 0;
            for (const auto& unit : alloc.units) {
                CHECK_FALSE(unit.paired());
                CHECK((used & unit.carriers) == 0u);
                used |= unit.carriers;
            }
        }
    }
    CHECK(plan_violations(cfg, r.plan, in.users).empty());
}

TEST_CASE("reuse colours per beam") {
    ResourcePlan plan;
    plan.beam_count = 6;
    CHECK(apply_reuse_mode(plan, ReuseMode::OneColor) == std::vector<int>(6, 0));
    CHECK(apply_reuse_mode(plan, ReuseMode::TwoColor) == std::vector<int>{0, 1, 0, 1, 0, 1});
    CHECK(apply_reuse_mode(plan, ReuseMode::FourColor) == std::vector<int>{0, 1, 2, 3, 0, 1});
}

TEST_CASE("run reports are reproducible and self-consistent") {
    const auto cfg = testing::small_config(6, 4, 6, 3);
    for (auto k : {SchedulerKind::UNoma, SchedulerKind::Oma, SchedulerKind::MaxSinr,
                   SchedulerKind::Periodic}) {
        const auto a = run_scheduler(cfg, k, 11);
        const auto b = run_scheduler(cfg, k, 11);
        CHECK(a.capacity == b.capacity);
        CHECK(a.schedule == b.schedule);
        CHECK(a.objective == b.objective);
        CHECK(a.scheduler == to_string(k));
        CHECK(a.scenario_hash == scenario_hash(cfg));
        CHECK(recomputed_objective(a) == doctest::Approx(a.objective).epsilon(1e-12));
    }
    CHECK(run_joint_optimization(cfg, 11).objective ==
          run_scheduler(cfg, SchedulerKind::UNoma, 11).objective);
}

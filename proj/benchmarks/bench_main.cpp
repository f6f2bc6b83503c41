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


#include <benchmark/benchmark.h>

#include <cstdint>

#include "bhnoma/analytics.hpp"
#include "bhnoma/channel.hpp"
#include "bhnoma/montecarlo.hpp"
#include "bhnoma/optimizer.hpp"
#include "bhnoma/rng.hpp"
#include "bhnoma/scenario.hpp"

namespace {

using namespace bhnoma;

void BM_PhiloxUniform(benchmark::State& state) {
    CounterStream s(1, StreamDomain::OutageTrials);
    double acc = 0.0;
    for (auto _ : state) acc += s.uniform();
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxUniform);

void BM_SimulateOutage(benchmark::State& state) {
    OutageParams p;
    p.rho = 100.0;
    p.omega = 0.1;
    p.eps_n = sinr_threshold(1.0);
    p.eps_m = sinr_threshold(1.5);
    p.K = static_cast<int>(state.range(0));
    const auto w = InterferenceWeightSet::interference_free();
    const long long trials = 100000;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto b = simulate_outage(p, NomaVariant::CodeDomain, CsiMode::Imperfect, w, trials, ++seed);
        benchmark::DoNotOptimize(b.failures_n);
    }
    state.SetItemsProcessed(state.iterations() * trials);
}
BENCHMARK(BM_SimulateOutage)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_OptimizePowerPair(benchmark::State& state) {
    PairLink link;
    link.gain_n = 3e6;
    link.gain_m = 4e4;
    link.rate_scale = 1e8;
    for (auto _ : state) {
        auto sol = optimize_power_pair(link, 1.2e9, 6e8);
        benchmark::DoNotOptimize(sol.a_n);
    }
}
BENCHMARK(BM_OptimizePowerPair);

void BM_AllocateTimeslots(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.beam_count = static_cast<int>(state.range(0));
    cfg.window_slots = 16;
    cfg.demand_min = 150e6;
    cfg.demand_max = 1050e6;
    const auto users = generate_users(cfg, 1);
    const auto channels = draw_window(cfg, users, 1);
    for (auto _ : state) {
        auto r = allocate_timeslots(cfg, users, channels);
        benchmark::DoNotOptimize(r.objective);
    }
}
BENCHMARK(BM_AllocateTimeslots)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

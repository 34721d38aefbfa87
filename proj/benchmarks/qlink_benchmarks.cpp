// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include "benchmark/benchmark.h"
#include "qlink/analysis.hpp"
#include "qlink/montecarlo.hpp"

namespace {

qlink::EffectiveTwoPhotonState chsh_state() {
    qlink::EffectiveTwoPhotonState s;
    s.eta_f = 1.12 * qlink::kPi / 4.0;
    s.p_pair = 1e-3;
    return s;
}

void BM_OutcomeDistribution(benchmark::State &state) {
    auto s = chsh_state();
    qlink::DetectorBank bank;
    bank.eps.fill(0.6);
    bank.p_dark.fill(1e-4);
    double theta = 0.0;
    for (auto _ : state) {
        auto dist = qlink::outcome_distribution(s, {theta, 45.0}, bank);
        benchmark::DoNotOptimize(dist);
        theta += 0.1;
    }
}
BENCHMARK(BM_OutcomeDistribution);

void BM_RunPointConditioned(benchmark::State &state) {
    auto s = chsh_state();
    qlink::DetectorBank bank;
    bank.eps.fill(0.6);
    qlink::SamplerOptions opts;
    opts.mode = qlink::SamplingMode::kConditionedPair;
    const auto trials = static_cast<std::uint64_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto c = qlink::run_point(s, {78.5, 45.0}, bank, trials, ++seed, opts);
        benchmark::DoNotOptimize(c);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunPointConditioned)->Arg(1 << 16)->Arg(1 << 20);

void BM_RunPointSparse(benchmark::State &state) {
    auto s = chsh_state();
    qlink::DetectorBank bank;
    bank.eps.fill(0.6);
    const auto trials = static_cast<std::uint64_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto c = qlink::run_point(s, {78.5, 45.0}, bank, trials, ++seed);
        benchmark::DoNotOptimize(c);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunPointSparse)->Arg(1 << 24);

void BM_FindOptimalAngles(benchmark::State &state) {
    auto s = chsh_state();
    for (auto _ : state) {
        auto opt = qlink::find_optimal_angles(s);
        benchmark::DoNotOptimize(opt);
    }
}
BENCHMARK(BM_FindOptimalAngles)->Unit(benchmark::kMillisecond);

void BM_FitFringe(benchmark::State &state) {
    std::vector<qlink::FringeSample> samples;
    for (int k = 0; k < 12; ++k) {
        double t = 15.0 * k;
        samples.push_back({t, 100.0 + 80.0 * std::cos(2.0 * qlink::deg_to_rad(t - 20.0)), 10.0});
    }
    for (auto _ : state) {
        auto fit = qlink::fit_fringe(samples);
        benchmark::DoNotOptimize(fit);
    }
}
BENCHMARK(BM_FitFringe);

}  // namespace

BENCHMARK_MAIN();

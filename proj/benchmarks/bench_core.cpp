// Copyright 2026 The lhzanneal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <complex>
#include <vector>

#include <benchmark/benchmark.h>

#include "lhz/cohort.hpp"
#include "lhz/dynamics.hpp"
#include "lhz/instance.hpp"
#include "lhz/operators.hpp"
#include "lhz/schedule.hpp"
#include "lhz/spectrum.hpp"

namespace {

const lhz::PhysicalInstance& fixture() {
    static const lhz::PhysicalInstance phys = [] {
        const auto insts = lhz::sample_instances(1, 5, 7);
        return lhz::map_logical_to_physical(insts[0], 2.0);
    }();
    return phys;
}

// One matrix-free H(t)|x> application at K = 10 (dimension 1024), the inner
// kernel of every integrator step and Lanczos iteration.
void BM_ApplyGeneral(benchmark::State& state) {
    const lhz::PassageGenerator gen(fixture());
    std::vector<std::complex<double>> x(gen.dim(), {1.0, 0.5});
    std::vector<std::complex<double>> y(gen.dim());
    for (auto _ : state) {
        gen.apply_general(0.4, 0.6, 0.6, x.data(), y.data());
        benchmark::DoNotOptimize(y.data());
        std::swap(x, y);
    }
    state.SetItemsProcessed(state.iterations());
}

// Full sweep at T = 1 with default accuracy (about 1000 RK4 steps).
void BM_EvolveT1(benchmark::State& state) {
    const auto schedule = lhz::Schedule::linear(1.0, 2.0);
    for (auto _ : state) {
        const auto r = lhz::evolve(fixture(), schedule);
        benchmark::DoNotOptimize(r.fidelity);
    }
}

// Two-level Lanczos trace on the coarsest admissible grid.
void BM_SpectrumScan33(benchmark::State& state) {
    const auto schedule = lhz::Schedule::linear(1.0, 2.0);
    lhz::SpectrumOptions options;
    options.m_points = 33;
    for (auto _ : state) {
        const auto trace = lhz::instantaneous_spectrum(fixture(), schedule, options);
        benchmark::DoNotOptimize(trace.levels.rows());
    }
}

// Schedule evaluation on a three-level dressing chain, the hot call when
// integrator tables are built.
void BM_ScheduleEval(benchmark::State& state) {
    auto base = std::make_shared<const lhz::Schedule>(lhz::Schedule::linear(10.0, 2.0));
    auto mid = std::make_shared<const lhz::Schedule>(
        lhz::Schedule::dressed(base, {{1.3, 0.05, -0.02}}));
    const auto top = lhz::Schedule::dressed(mid, {{2.7, -0.01, 0.03}});
    double tau = 0.0;
    for (auto _ : state) {
        tau += 1e-4;
        if (tau >= 1.0) tau = 0.0;
        benchmark::DoNotOptimize(top.value(tau));
    }
}

}  // namespace

BENCHMARK(BM_ApplyGeneral)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EvolveT1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectrumScan33)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScheduleEval)->Unit(benchmark::kNanosecond);

BENCHMARK_MAIN();

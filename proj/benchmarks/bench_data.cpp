// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pastnet/datagen.hpp"
#include "pastnet/metrics.hpp"

using namespace pastnet;

static void BM_NseStep(benchmark::State& state) {
    datagen::NseConfig cfg;
    cfg.grid = state.range(0);
    datagen::NseSolver s(cfg);
    s.randomize(1);
    s.set_forcing(datagen::default_forcing(cfg));
    for (auto _ : state) s.step(cfg.dt_solver);
    state.SetItemsProcessed(state.iterations() * cfg.grid * cfg.grid);
}
BENCHMARK(BM_NseStep)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_SweStep(benchmark::State& state) {
    datagen::SweConfig cfg;
    cfg.grid = state.range(0);
    datagen::SweSolver s(cfg);
    s.set_dam_break(0.5);
    for (auto _ : state) benchmark::DoNotOptimize(s.step(cfg.dt_record));
    state.SetItemsProcessed(state.iterations() * cfg.grid * cfg.grid);
}
BENCHMARK(BM_SweStep)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_Ssim(benchmark::State& state) {
    const auto n = state.range(0);
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::vector<float> a(static_cast<std::size_t>(n * n)), b(a.size());
    for (auto& v : a) v = u(rng);
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = 0.8f * a[k] + 0.2f * u(rng);
    const metrics::Plane pa{a, n, n}, pb{b, n, n};
    for (auto _ : state) benchmark::DoNotOptimize(metrics::ssim(pa, pb, 1.0));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

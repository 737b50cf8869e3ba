// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <torch/torch.h>

#include "pastnet/dst.hpp"
#include "pastnet/fpg.hpp"
#include "pastnet/model.hpp"

using namespace pastnet;

namespace {

ModelConfig bench_config() {
    ModelConfig c;
    c.embed_dim = 64;
    c.fpg_layers = 4;
    return c;
}

}  // namespace

// One spectral filter layer over T = 10 frames of an 8 x 8 token grid.
static void BM_SpectralLayer(benchmark::State& state) {
    torch::NoGradGuard ng;
    torch::manual_seed(0);
    const auto cfg = bench_config();
    fpg::Fpg f(cfg.fpg_options());
    const auto tokens = torch::randn({cfg.seq_in, cfg.height / cfg.patch_h, cfg.width / cfg.patch_w, cfg.embed_dim});
    for (auto _ : state) benchmark::DoNotOptimize(f->filter_layer(tokens, 0));
}
BENCHMARK(BM_SpectralLayer)->Unit(benchmark::kMicrosecond);

// Nearest-codeword lookup for T = 10 latent maps of 16 x 16 with D^2 codes.
static void BM_Quantize(benchmark::State& state) {
    torch::NoGradGuard ng;
    torch::manual_seed(0);
    const auto d = state.range(0);
    dst::MemoryBank bank(d * d, d);
    const auto z = torch::randn({10, d, 16, 16}) * 0.1;
    for (auto _ : state) benchmark::DoNotOptimize(bank->quantize(z).indices);
    state.SetItemsProcessed(state.iterations() * 10 * 16 * 16);
}
BENCHMARK(BM_Quantize)->Arg(3)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

static void BM_PredictClip(benchmark::State& state) {
    torch::manual_seed(0);
    const auto cfg = bench_config();
    PastNet m(cfg, 4);
    const auto video = torch::rand({cfg.seq_in, cfg.channels, cfg.height, cfg.width});
    for (auto _ : state) benchmark::DoNotOptimize(predict(m, video));
}
BENCHMARK(BM_PredictClip)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    torch::set_num_threads(1);
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}

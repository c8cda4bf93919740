// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "gazeirl/birl_engine.hpp"
#include "gazeirl/rng.hpp"

using namespace gazeirl;

namespace {

struct BirlFixture {
    TableConfig table;
    KernelLayout layout;
    ActionGrid grid;
    std::vector<Demonstration> demos;

    BirlFixture() {
        table = ambiguous_table({{0.0, 0.0}, {1.0, 0.6}}, 0.08, 1.5);
        layout = build_layout(table, 1.5, 1.0);
        grid = build_action_grid(table, 20);
        GazeGenConfig gaze;
        for (int i = 0; i < 5; ++i) {
            gaze.seed = static_cast<std::uint64_t>(i);
            demos.push_back(
                synthesize_demonstration(table, {"bowl", Side::right}, layout, 0.01, gaze));
        }
    }
};

void BM_LogLikelihood(benchmark::State& state) {
    static const BirlFixture fx;
    const auto features = build_features(fx.layout, fx.grid);
    std::vector<std::size_t> cells;
    for (const auto& d : fx.demos) cells.push_back(nearest_cell(fx.grid, d.placement));
    Rng rng(7);
    const auto weights = rng.uniform_simplex(fx.layout.n_kernels());
    for (auto _ : state) {
        const double ll = log_likelihood_features(features, cells, weights, 10.0);
        benchmark::DoNotOptimize(ll);
    }
}
BENCHMARK(BM_LogLikelihood)->Unit(benchmark::kMicrosecond);

void BM_McmcChain(benchmark::State& state) {
    static const BirlFixture fx;
    BirlConfig config;
    config.chain_length = static_cast<int>(state.range(0));
    config.burn_in = config.chain_length / 4;
    config.seed = 3;
    for (auto _ : state) {
        auto chain = run_mcmc(fx.demos, fx.layout, fx.grid, config);
        benchmark::DoNotOptimize(chain);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McmcChain)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

} // namespace

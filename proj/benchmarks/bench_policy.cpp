// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "gazeirl/policy_eval.hpp"
#include "gazeirl/rng.hpp"

using namespace gazeirl;

namespace {

void BM_BestPlacement(benchmark::State& state) {
    TableConfig table;
    table.bounds = {{0.0, 0.0}, {1.0, 0.6}};
    table.objects = {{"bowl", {0.35, 0.3}, 0.08}, {"plate", {0.65, 0.3}, 0.08}};
    const auto layout = build_layout(table, 1.5, 1.0);
    Rng rng(11);
    RewardParams params;
    params.n_objects = 2;
    params.weights = rng.uniform_simplex(layout.n_kernels());
    const int restarts = static_cast<int>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        const Vec2 p = best_placement(params, layout, table, restarts, seed++);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_BestPlacement)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();

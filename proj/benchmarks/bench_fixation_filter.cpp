// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "gazeirl/fixation_filter.hpp"
#include "gazeirl/placement_sim.hpp"

using namespace gazeirl;

namespace {

struct FilterFixture {
    PixelScene scene;
    SceneRaster raster{1, 1, {0, 0, 0}};
    std::vector<ObjectSpec> specs;
    SyntheticTrace synthetic;

    FilterFixture() {
        const auto table = ambiguous_table({{0.0, 0.0}, {1.0, 0.6}}, 0.08, 1.5);
        scene = make_pixel_scene(table, 1280.0, true);
        raster = rasterize_scene(scene);
        specs = scene_object_specs(scene);
        GazeGenConfig gaze;
        gaze.budget_ms = 20000.0; // 1000 samples at 50 Hz
        gaze.switches = 24;
        gaze.gripper_share = 0.2;
        gaze.seed = 1;
        synthetic = synthesize_gaze_trace(
            scene, {{"bowl", 0.5}, {"plate", 0.3}, {"gripper", 0.2}}, gaze);
    }
};

void BM_DetectFixations(benchmark::State& state) {
    static const FilterFixture fx;
    FilterConfig config;
    for (auto _ : state) {
        auto fixations = detect_fixations(fx.synthetic.trace, fx.raster, fx.specs, config);
        benchmark::DoNotOptimize(fixations);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<long>(fx.synthetic.trace.samples.size()));
}
BENCHMARK(BM_DetectFixations)->Unit(benchmark::kMillisecond);

void BM_ObjectOfAttention(benchmark::State& state) {
    static const FilterFixture fx;
    FilterConfig config;
    const Vec2 point = fx.scene.objects.front().center_px;
    for (auto _ : state) {
        auto obj = object_of_attention(point, fx.raster, fx.specs, config);
        benchmark::DoNotOptimize(obj);
    }
}
BENCHMARK(BM_ObjectOfAttention)->Unit(benchmark::kMicrosecond);

} // namespace

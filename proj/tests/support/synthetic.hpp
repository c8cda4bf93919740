// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// Randomized scenes, traces and fixation corpora for tests.

#pragma once

#include <string>
#include <vector>

#include "gazeirl/fixation_filter.hpp"
#include "gazeirl/gaze_io.hpp"
#include "gazeirl/rng.hpp"
#include "gazeirl/scene_raster.hpp"

namespace gazeirl::testing {

struct RandomScene {
    SceneRaster raster{1, 1, {0, 0, 0}};
    std::vector<ObjectSpec> specs;
    std::vector<Vec2> centers;   // px
    std::vector<double> radii;   // px
};

/// Scene of well-separated solid disks with disjoint color ranges.
inline RandomScene make_random_scene(Rng& rng, int width, int height, int n_objects) {
    RandomScene scene;
    scene.raster = SceneRaster(width, height, {250, 250, 250});
    for (int k = 0; k < n_objects; ++k) {
        const double radius = rng.uniform(0.12, 0.2) * std::min(width, height);
        Vec2 center;
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
            center = {rng.uniform(radius, width - radius),
                      rng.uniform(radius, height - radius)};
            placed = true;
            for (std::size_t j = 0; j < scene.centers.size(); ++j)
                if (distance(center, scene.centers[j]) <
                    radius + scene.radii[j] + 4.0)
                    placed = false;
        }
        if (!placed) break;
        // channel-0 value encodes the object id; disjoint 20-wide bands
        const auto r0 = static_cast<std::uint8_t>(20 * k + 10);
        const std::array<std::uint8_t, 3> color{r0, 128, 60};
        scene.raster.fill_disk(center.x, center.y, radius, color);

        ObjectSpec spec;
        spec.name = "obj" + std::to_string(k);
        spec.color.lower = {static_cast<std::uint8_t>(20 * k), 100, 40};
        spec.color.upper = {static_cast<std::uint8_t>(20 * k + 19), 160, 80};
        spec.task_relevant = (k % 2 == 0);
        scene.specs.push_back(std::move(spec));
        scene.centers.push_back(center);
        scene.radii.push_back(radius);
    }
    return scene;
}

/// Random gaze trace over a scene: dwells near object centers or background
/// spots, with saccade jumps, occasional fast wiggles and dropouts.
inline GazeTrace make_random_trace(Rng& rng, const RandomScene& scene, int n_samples,
                                   double sample_rate_hz = 50.0) {
    GazeTrace trace;
    trace.sample_rate_hz = sample_rate_hz;
    trace.frame_width = scene.raster.width();
    trace.frame_height = scene.raster.height();
    const double period = 1000.0 / sample_rate_hz;
    const double w = scene.raster.width();
    const double h = scene.raster.height();

    auto random_anchor = [&]() -> Vec2 {
        if (!scene.centers.empty() && rng.uniform() < 0.7) {
            const auto k = rng.uniform_index(scene.centers.size());
            return scene.centers[k];
        }
        return {rng.uniform(0.0, w - 1.0), rng.uniform(0.0, h - 1.0)};
    };

    Vec2 anchor = random_anchor();
    Vec2 pos = anchor;
    for (int i = 0; i < n_samples; ++i) {
        const double u = rng.uniform();
        if (u < 0.05) {
            anchor = random_anchor(); // saccade target
            pos = anchor;
        } else if (u < 0.10) {
            // fast wiggle that should classify as a saccade
            pos = {std::clamp(pos.x + rng.uniform(-80.0, 80.0), 0.0, w - 1.0),
                   std::clamp(pos.y + rng.uniform(-80.0, 80.0), 0.0, h - 1.0)};
        } else {
            pos = {std::clamp(pos.x + rng.uniform(-3.0, 3.0) - 0.1 * (pos.x - anchor.x),
                              0.0, w - 1.0),
                   std::clamp(pos.y + rng.uniform(-3.0, 3.0) - 0.1 * (pos.y - anchor.y),
                              0.0, h - 1.0)};
        }
        GazeSample s;
        s.timestamp_ms = i * period;
        s.position = pos;
        s.valid = rng.uniform() >= 0.06;
        trace.samples.push_back(s);
    }
    return trace;
}

struct ReferenceCorpusSegment {
    double t0_ms;
    double t1_ms;
    std::string target;
    bool aligned;
};

struct ReferenceCorpus {
    std::vector<Fixation> fixations;
    std::vector<ReferenceCorpusSegment> segments;
};

/// Segments whose fixation-time majority lands on the target object with
/// probability align_ratio and on some other object otherwise.
inline ReferenceCorpus make_reference_corpus(Rng& rng, int n_segments, double align_ratio,
                                             const std::vector<std::string>& objects) {
    ReferenceCorpus corpus;
    double t = 0.0;
    for (int s = 0; s < n_segments; ++s) {
        ReferenceCorpusSegment seg;
        seg.t0_ms = t;
        seg.target = objects[rng.uniform_index(objects.size())];
        seg.aligned = rng.uniform() < align_ratio;

        std::string majority = seg.target;
        if (!seg.aligned) {
            do {
                majority = objects[rng.uniform_index(objects.size())];
            } while (majority == seg.target);
        }
        // majority object gets 55-80% of the segment's object time, the rest
        // is spread over the others in random slices
        const double segment_ms = rng.uniform(800.0, 2000.0);
        const double majority_ms = segment_ms * rng.uniform(0.55, 0.8);
        double cursor = t;
        corpus.fixations.push_back({cursor, cursor + majority_ms, majority, {}});
        cursor += majority_ms + 1.0;
        double remaining = segment_ms - majority_ms;
        for (const auto& name : objects) {
            if (name == majority) continue;
            const double slice = rng.uniform(0.0, remaining / 2.0);
            if (slice < 1.0) continue;
            corpus.fixations.push_back({cursor, cursor + slice, name, {}});
            cursor += slice + 1.0;
            remaining -= slice;
        }
        t = cursor + rng.uniform(10.0, 50.0);
        seg.t1_ms = t;
        corpus.segments.push_back(std::move(seg));
    }
    return corpus;
}

} // namespace gazeirl::testing

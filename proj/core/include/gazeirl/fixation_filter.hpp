// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// Fixation/saccade classification over a gaze trace using velocity, area
// (object-of-attention) and duration criteria.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeirl/gaze_io.hpp"
#include "gazeirl/geometry.hpp"
#include "gazeirl/scene_raster.hpp"

namespace gazeirl {

struct FilterConfig {
    /// Speed above which a movement is a saccade, px/s.
    double max_speed = 700.0;
    /// Radius of the circular area inspected around the gaze point, px.
    double attention_radius = 100.0;
    /// An object owns the gaze point when it covers strictly more than this
    /// fraction of the in-frame disk pixels. 0.5 means strict majority.
    double majority_fraction = 0.5;
    /// Minimum duration for a run to count as a fixation, ms.
    double min_fixation_ms = 100.0;
    /// Tracker dropouts up to this long do not split a fixation, ms.
    double dropout_bridge_ms = 40.0;

    void validate() const;
};

enum class SampleLabel { candidate, saccade, invalid };

/// A maximal interval of stable gaze on one object (or on the background
/// when `object` is empty). The unit of all attention statistics.
struct Fixation {
    double start_ms = 0.0;
    double end_ms = 0.0;
    std::optional<std::string> object; // nullopt = background
    Vec2 centroid;                     // mean position of the valid samples, px

    double duration_ms() const { return end_ms - start_ms; }
};

/// Labels every sample: `saccade` iff the instantaneous speed from the
/// previous valid sample exceeds max_speed, `invalid` for dropouts,
/// `candidate` otherwise (the first valid sample is always a candidate).
std::vector<SampleLabel> classify_speed(const GazeTrace& trace, const FilterConfig& config);

/// Resolves the object of attention at a gaze point: the object whose color
/// range covers strictly more than majority_fraction of the in-frame pixels
/// inside the attention disk. Coverage ties between objects resolve to none.
std::optional<std::string> object_of_attention(Vec2 point, const SceneRaster& raster,
                                               std::span<const ObjectSpec> objects,
                                               const FilterConfig& config);

/// Extracts maximal runs of non-saccade samples with an identical object of
/// attention. Runs may bridge dropout gaps up to dropout_bridge_ms; runs
/// shorter than min_fixation_ms are discarded. Fixations are disjoint and
/// ordered by time.
std::vector<Fixation> detect_fixations(const GazeTrace& trace, const SceneRaster& raster,
                                       std::span<const ObjectSpec> objects,
                                       const FilterConfig& config);

} // namespace gazeirl

// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// Randomized table configurations, the discrete action grid, and synthetic
// ambiguous demonstrations with accompanying gaze fixation data. All
// generators are deterministic functions of explicit seeds; per-item seeds
// are derived by splitting a master seed, so concurrent generation is safe.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeirl/gaze_io.hpp"
#include "gazeirl/geometry.hpp"
#include "gazeirl/reward_model.hpp"
#include "gazeirl/scene_raster.hpp"

namespace gazeirl {

struct Instruction {
    std::string reference_object;
    Side side = Side::right;
};

/// A placement demonstration: the placed location plus, optionally, the
/// per-object fixation times observed while demonstrating. The instruction
/// is the hidden ground truth, carried for evaluation only.
struct Demonstration {
    Vec2 placement; // meters
    std::optional<std::map<std::string, double>> fixation_times_ms;
    Instruction instruction;
};

/// Discrete action set for the one-shot placement decision: resolution^2
/// cell centers exactly tiling the table bounds (x varies fastest).
struct ActionGrid {
    int resolution = 0;
    Rect bounds;
    std::vector<Vec2> cells;
};

/// Synthetic gaze generator settings. Fixation proportions are drawn from a
/// Dirichlet whose concentration is `base_concentration` per object, scaled
/// by `dominance` for the instruction's reference object.
struct GazeGenConfig {
    double base_concentration = 1.0;
    double dominance = 4.0;
    double budget_ms = 5000.0;  // total gaze time represented by fixation_times
    int switches = 2;           // attention switches in a synthesized trace
    double gripper_share = 0.0; // fraction of trace gaze spent on the gripper
    double dropout_rate = 0.0;  // per-sample tracker dropout probability
    std::uint64_t seed = 0;

    void validate() const;
};

/// Prototype of an object placed by sample_configurations.
struct ObjectPrototype {
    std::string name;
    double radius = 0.0;
};

/// n random table configurations with each object placed uniformly inside
/// the bounds (inset by its radius) subject to pairwise center distance
/// >= min_sep. Deterministic given seed. Throws when min_sep cannot be
/// satisfied after bounded rejection attempts.
std::vector<TableConfig> sample_configurations(int n, const Rect& bounds,
                                               std::span<const ObjectPrototype> prototypes,
                                               double min_sep, std::uint64_t seed);

/// The deliberately ambiguous two-object scene: the pair sits at the
/// distance where "right of A" and "left of B" share the same kernel
/// locations, so a placement between them satisfies both instructions.
TableConfig ambiguous_table(const Rect& bounds, double radius, double offset_scale,
                            const std::string& name_a = "bowl",
                            const std::string& name_b = "plate");
TableConfig ambiguous_table_at(const Rect& bounds, double radius, double offset_scale,
                               Vec2 pair_center, const std::string& name_a = "bowl",
                               const std::string& name_b = "plate");

ActionGrid build_action_grid(const TableConfig& table, int resolution);

/// Index of the grid cell nearest to p (first minimal cell on ties).
std::size_t nearest_cell(const ActionGrid& grid, Vec2 p);

/// Global argmax of a reward surface over the bounds: dense-grid scan
/// followed by local gradient refinement. The scan only has to land in the
/// maximal basin; the refinement supplies the precision.
Vec2 argmax_reward(const RewardParams& params, const KernelLayout& layout,
                   const Rect& bounds, int scan_resolution = 128);

/// Synthesizes one demonstration: the ground-truth optimum displaced by
/// Gaussian noise (sd = noise_sd, clamped to bounds), plus fixation times
/// drawn with higher expected proportion on the instruction's reference
/// object. Deterministic given gaze.seed.
Demonstration synthesize_demonstration(const TableConfig& table,
                                       const Instruction& instruction,
                                       const KernelLayout& layout, double noise_sd,
                                       const GazeGenConfig& gaze);

// --- synthetic pixel scenes and gaze traces --------------------------------

struct PixelSceneObject {
    std::string name;
    Vec2 center_px;
    double radius_px = 0.0;
    std::array<std::uint8_t, 3> color{};
    bool task_relevant = true;
    bool is_gripper = false;
};

/// A table configuration mapped into pixel space, with per-object display
/// colors. Source for the scene raster, the object specs and the synthetic
/// gaze traces fed to the fixation filter.
struct PixelScene {
    int width = 0;
    int height = 0;
    std::array<std::uint8_t, 3> background{};
    std::vector<PixelSceneObject> objects;
    double px_per_m = 0.0;
};

PixelScene make_pixel_scene(const TableConfig& table, double px_per_m = 1280.0,
                            bool include_gripper = false);
SceneRaster rasterize_scene(const PixelScene& scene);
std::string scene_layout_json(const PixelScene& scene);
std::vector<ObjectSpec> scene_object_specs(const PixelScene& scene);

/// One planned fixation segment of a synthetic trace.
struct GazeSegment {
    std::string object;
    double start_ms = 0.0;
    double end_ms = 0.0;
};

struct SyntheticTrace {
    GazeTrace trace;
    std::vector<GazeSegment> segments; // the generating plan
};

/// Synthesizes a gaze trace over the scene whose per-object fixation-time
/// proportions match `proportions` (keyed by scene object name; the share
/// given to absent keys is zero). Saccade jumps separate the fixation
/// segments and per-sample dropout follows gaze.dropout_rate.
SyntheticTrace synthesize_gaze_trace(const PixelScene& scene,
                                     const std::map<std::string, double>& proportions,
                                     const GazeGenConfig& gaze,
                                     double sample_rate_hz = 50.0);

/// Keyframes at the attention-switch times of a synthesized trace; a switch
/// between two non-gripper objects is a step keyframe.
KeyframeLog switch_keyframes(const SyntheticTrace& synthetic, const PixelScene& scene);

// --- serialization ----------------------------------------------------------

std::string demonstrations_to_json(std::span<const Demonstration> demos);
std::vector<Demonstration> demonstrations_from_json(const std::string& text);

} // namespace gazeirl

// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration and the pipelines behind the CLI subcommands:
// attention analysis of a gaze log, the gaze-vs-no-gaze reward-learning
// experiment, and synthetic demonstration/trace generation.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gazeirl/birl_engine.hpp"
#include "gazeirl/fixation_filter.hpp"
#include "gazeirl/placement_sim.hpp"
#include "gazeirl/policy_eval.hpp"

namespace gazeirl {

/// Full experiment configuration with defaults; a JSON config file
/// overrides fields selectively (see README for the schema).
struct ExperimentConfig {
    // table
    double table_width = 1.0;  // meters
    double table_height = 0.6; // meters
    double object_radius = 0.08;
    double min_separation = 0.25;

    // kernel layout
    double offset_scale = 1.5;
    double width_scale = 1.0;

    int grid_resolution = 20;
    int restarts = 16;
    double noise_sd = 0.01;

    BirlConfig birl;
    FilterConfig filter;
    RewardEstimate reward_estimate = RewardEstimate::map;
    double sample_rate_hz = 50.0;

    std::vector<int> demo_counts = {1, 5};
    int n_configs = 100;
    int n_replicates = 10;

    std::map<std::string, GazeGenConfig> presets; // "video" and "kt" by default
    std::uint64_t master_seed = 42;
    std::string out_dir = "results";
    int jobs = 1;

    ExperimentConfig();

    Rect bounds() const { return {{0.0, 0.0}, {table_width, table_height}}; }

    static ExperimentConfig load(const std::string& path); // defaults + overrides
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json() const; // canonical (sorted keys), round-trips
    void validate() const;
};

Instruction parse_instruction(const std::string& text); // "bowl-right", "plate-left"

struct AnalyzeInputs {
    std::string gaze_path;
    std::string scene_path;
    std::string objects_path;
    std::optional<std::string> keyframes_path;
};

/// Writes fixations.csv, attention_summary.json and, when keyframes are
/// given, reference_frames.csv and keyframe_report.csv into out_dir.
/// Returns the paths written.
std::vector<std::string> run_analyze(const AnalyzeInputs& inputs,
                                     const ExperimentConfig& config,
                                     const std::string& out_dir);

/// Runs the full experiment grid (instruction x demo count x gaze preset,
/// both arms each) and writes policy_loss.csv, placement_loss.csv and
/// results.csv. `no_gaze_only` forces prior_scale 0, making both arms
/// identical. Returns the paths written.
std::vector<std::string> run_birl(const ExperimentConfig& config, const std::string& out_dir,
                                  bool no_gaze_only = false);

/// Single-scenario variant over externally supplied demonstrations.
std::vector<std::string> run_birl_on_demos(const ExperimentConfig& config,
                                           const std::vector<Demonstration>& demos,
                                           const std::string& out_dir);

/// Writes a synthetic bundle into out_dir: scene.json, objects.json,
/// per-demo demonstration JSON, gaze-log CSV and keyframe CSV files, plus a
/// manifest. The bundle feeds both `analyze` and `birl --demos`.
std::vector<std::string> run_synth(const ExperimentConfig& config, const std::string& out_dir,
                                   int n_demos, const std::string& preset_name,
                                   const Instruction& instruction);

} // namespace gazeirl

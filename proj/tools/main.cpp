// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// gazeirl command line: `analyze` turns a gaze log into attention reports,
// `birl` runs the gaze-vs-no-gaze reward-learning experiment, `synth`
// generates demonstration/trace bundles for the other two.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gazeirl/errors.hpp"
#include "gazeirl/experiment.hpp"

namespace {

gazeirl::ExperimentConfig load_config(const std::string& config_path,
                                      std::optional<std::uint64_t> seed,
                                      std::optional<int> jobs) {
    gazeirl::ExperimentConfig config;
    if (!config_path.empty()) config = gazeirl::ExperimentConfig::load(config_path);
    if (seed) config.master_seed = *seed;
    if (jobs) config.jobs = *jobs;
    return config;
}

/// --out flag beats GAZEIRL_OUT beats the config's out_dir.
std::string resolve_out_dir(const std::string& flag_value,
                            const gazeirl::ExperimentConfig& config) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("GAZEIRL_OUT"); env && *env) return env;
    return config.out_dir;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gaze-informed reward learning toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir_flag;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    app.add_option("--config", config_path, "experiment config JSON file")
        ->expected(1);
    app.add_option("--seed", seed, "master seed override");
    app.add_option("--out", out_dir_flag, "output directory (or set GAZEIRL_OUT)");
    app.add_option("--jobs", jobs, "max concurrent workers");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "attention reports from a gaze log");
    std::string gaze_path, scene_path, objects_path, keyframes_path;
    analyze->add_option("--gaze", gaze_path, "gaze log CSV")->required();
    analyze->add_option("--scene", scene_path, "scene image (.ppm) or layout (.json)")
        ->required();
    analyze->add_option("--objects", objects_path, "object specs JSON")->required();
    analyze->add_option("--keyframes", keyframes_path, "keyframe log CSV");

    // birl
    auto* birl = app.add_subcommand("birl", "reward learning experiment tables");
    std::string demos_path;
    bool no_gaze = false;
    birl->add_option("--demos", demos_path, "run on a demonstration JSON file");
    birl->add_flag("--no-gaze", no_gaze, "force the prior scale to 0 (no-gaze arm only)");

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic demonstrations");
    int n_demos = 5;
    std::string preset = "video";
    std::string instruction_text = "bowl-right";
    synth->add_option("--n", n_demos, "number of demonstrations");
    synth->add_option("--preset", preset, "gaze preset (video or kt)");
    synth->add_option("--instruction", instruction_text, "e.g. bowl-right or plate-left");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = load_config(config_path, seed, jobs);
        const auto out_dir = resolve_out_dir(out_dir_flag, config);

        std::vector<std::string> written;
        if (analyze->parsed()) {
            gazeirl::AnalyzeInputs inputs;
            inputs.gaze_path = gaze_path;
            inputs.scene_path = scene_path;
            inputs.objects_path = objects_path;
            if (!keyframes_path.empty()) inputs.keyframes_path = keyframes_path;
            written = gazeirl::run_analyze(inputs, config, out_dir);
        } else if (birl->parsed()) {
            if (!demos_path.empty()) {
                std::ifstream in(demos_path);
                if (!in) throw gazeirl::Error("cannot open file: " + demos_path);
                std::string text((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
                written = gazeirl::run_birl_on_demos(
                    config, gazeirl::demonstrations_from_json(text), out_dir);
            } else {
                written = gazeirl::run_birl(config, out_dir, no_gaze);
            }
        } else if (synth->parsed()) {
            written = gazeirl::run_synth(config, out_dir, n_demos, preset,
                                         gazeirl::parse_instruction(instruction_text));
        }
        for (const auto& path : written) std::cout << path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

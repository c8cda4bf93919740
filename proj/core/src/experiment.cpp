// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "gazeirl/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gazeirl/attention_analysis.hpp"
#include "gazeirl/errors.hpp"
#include "gazeirl/rng.hpp"
#include "gazeirl/scene_raster.hpp"
#include "gazeirl/text_util.hpp"

namespace gazeirl {

namespace {

using nlohmann::json;

GazeGenConfig video_preset() {
    GazeGenConfig g;
    g.base_concentration = 1.0;
    g.dominance = 6.0;
    g.budget_ms = 5000.0;
    g.switches = 2;
    g.gripper_share = 0.0;
    g.dropout_rate = 0.005;
    return g;
}

GazeGenConfig kt_preset() {
    GazeGenConfig g;
    g.base_concentration = 1.0;
    g.dominance = 2.5;
    g.budget_ms = 20000.0;
    g.switches = 24; // 12x the video switch count
    g.gripper_share = 0.2;
    g.dropout_rate = 0.01;
    return g;
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json gaze_gen_to_json(const GazeGenConfig& g) {
    return {{"base_concentration", g.base_concentration},
            {"dominance", g.dominance},
            {"budget_ms", g.budget_ms},
            {"switches", g.switches},
            {"gripper_share", g.gripper_share},
            {"dropout_rate", g.dropout_rate}};
}

GazeGenConfig gaze_gen_from_json(const json& j, GazeGenConfig base) {
    maybe(j, "base_concentration", base.base_concentration);
    maybe(j, "dominance", base.dominance);
    maybe(j, "budget_ms", base.budget_ms);
    maybe(j, "switches", base.switches);
    maybe(j, "gripper_share", base.gripper_share);
    maybe(j, "dropout_rate", base.dropout_rate);
    return base;
}

void write_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
    if (!out) throw Error("failed writing file: " + path);
}

} // namespace

ExperimentConfig::ExperimentConfig() {
    presets["video"] = video_preset();
    presets["kt"] = kt_preset();
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        if (doc.contains("table")) {
            const auto& t = doc["table"];
            maybe(t, "width", cfg.table_width);
            maybe(t, "height", cfg.table_height);
            maybe(t, "object_radius", cfg.object_radius);
            maybe(t, "min_separation", cfg.min_separation);
        }
        if (doc.contains("layout")) {
            const auto& l = doc["layout"];
            maybe(l, "offset_scale", cfg.offset_scale);
            maybe(l, "width_scale", cfg.width_scale);
        }
        maybe(doc, "grid_resolution", cfg.grid_resolution);
        maybe(doc, "restarts", cfg.restarts);
        maybe(doc, "noise_sd", cfg.noise_sd);
        if (doc.contains("birl")) {
            const auto& b = doc["birl"];
            maybe(b, "confidence", cfg.birl.confidence);
            maybe(b, "prior_scale", cfg.birl.prior_scale);
            maybe(b, "chain_length", cfg.birl.chain_length);
            maybe(b, "burn_in", cfg.birl.burn_in);
            maybe(b, "proposal_step", cfg.birl.proposal_step);
        }
        if (doc.contains("filter")) {
            const auto& f = doc["filter"];
            maybe(f, "max_speed", cfg.filter.max_speed);
            maybe(f, "attention_radius", cfg.filter.attention_radius);
            maybe(f, "majority_fraction", cfg.filter.majority_fraction);
            maybe(f, "min_fixation_ms", cfg.filter.min_fixation_ms);
            maybe(f, "dropout_bridge_ms", cfg.filter.dropout_bridge_ms);
        }
        if (doc.contains("reward_estimate")) {
            const auto est = doc["reward_estimate"].get<std::string>();
            if (est == "map")
                cfg.reward_estimate = RewardEstimate::map;
            else if (est == "mean")
                cfg.reward_estimate = RewardEstimate::mean;
            else
                throw ConfigError("reward_estimate must be `map` or `mean`, got `" + est +
                                  "`");
        }
        maybe(doc, "sample_rate_hz", cfg.sample_rate_hz);
        maybe(doc, "demo_counts", cfg.demo_counts);
        maybe(doc, "n_configs", cfg.n_configs);
        maybe(doc, "n_replicates", cfg.n_replicates);
        if (doc.contains("presets")) {
            for (const auto& [name, body] : doc["presets"].items()) {
                const auto it = cfg.presets.find(name);
                const GazeGenConfig base =
                    it != cfg.presets.end() ? it->second : GazeGenConfig{};
                cfg.presets[name] = gaze_gen_from_json(body, base);
            }
        }
        maybe(doc, "master_seed", cfg.master_seed);
        maybe(doc, "out_dir", cfg.out_dir);
        maybe(doc, "jobs", cfg.jobs);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

std::string ExperimentConfig::to_json() const {
    json doc;
    doc["table"] = {{"width", table_width},
                    {"height", table_height},
                    {"object_radius", object_radius},
                    {"min_separation", min_separation}};
    doc["layout"] = {{"offset_scale", offset_scale}, {"width_scale", width_scale}};
    doc["grid_resolution"] = grid_resolution;
    doc["restarts"] = restarts;
    doc["noise_sd"] = noise_sd;
    doc["birl"] = {{"confidence", birl.confidence},
                   {"prior_scale", birl.prior_scale},
                   {"chain_length", birl.chain_length},
                   {"burn_in", birl.burn_in},
                   {"proposal_step", birl.proposal_step}};
    doc["filter"] = {{"max_speed", filter.max_speed},
                     {"attention_radius", filter.attention_radius},
                     {"majority_fraction", filter.majority_fraction},
                     {"min_fixation_ms", filter.min_fixation_ms},
                     {"dropout_bridge_ms", filter.dropout_bridge_ms}};
    doc["reward_estimate"] = reward_estimate == RewardEstimate::map ? "map" : "mean";
    doc["sample_rate_hz"] = sample_rate_hz;
    doc["demo_counts"] = demo_counts;
    doc["n_configs"] = n_configs;
    doc["n_replicates"] = n_replicates;
    json presets_json;
    for (const auto& [name, g] : presets) presets_json[name] = gaze_gen_to_json(g);
    doc["presets"] = std::move(presets_json);
    doc["master_seed"] = master_seed;
    doc["out_dir"] = out_dir;
    doc["jobs"] = jobs;
    return doc.dump();
}

void ExperimentConfig::validate() const {
    if (table_width <= 0.0 || table_height <= 0.0)
        throw ConfigError("table dimensions must be positive");
    if (object_radius <= 0.0) throw ConfigError("object_radius must be positive");
    if (grid_resolution < 2) throw ConfigError("grid_resolution must be at least 2");
    if (restarts < 1) throw ConfigError("restarts must be at least 1");
    if (noise_sd < 0.0) throw ConfigError("noise_sd must be non-negative");
    if (n_configs < 1) throw ConfigError("n_configs must be at least 1");
    if (n_replicates < 1) throw ConfigError("n_replicates must be at least 1");
    if (demo_counts.empty()) throw ConfigError("demo_counts must not be empty");
    for (const int n : demo_counts)
        if (n < 1) throw ConfigError("demo counts must be at least 1");
    if (jobs < 0) throw ConfigError("jobs must be non-negative");
    try {
        birl.validate();
        filter.validate();
        for (const auto& [name, g] : presets) g.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
}

Instruction parse_instruction(const std::string& text) {
    const auto dash = text.find('-');
    if (dash == std::string::npos)
        throw ConfigError("instruction must look like `<object>-<left|right>`: " + text);
    Instruction instr;
    instr.reference_object = text.substr(0, dash);
    const std::string side = text.substr(dash + 1);
    if (side == "left")
        instr.side = Side::left;
    else if (side == "right")
        instr.side = Side::right;
    else
        throw ConfigError("unknown side `" + side + "` in instruction " + text);
    return instr;
}

namespace {

/// Resolved config without execution-environment fields (jobs, out_dir),
/// which do not influence any result value.
json result_config_json(const ExperimentConfig& config) {
    json doc = json::parse(config.to_json());
    doc.erase("jobs");
    doc.erase("out_dir");
    return doc;
}

std::string repro_header(const ExperimentConfig& config) {
    return "# config: " + result_config_json(config).dump() + "\n# master_seed: " +
           std::to_string(config.master_seed) + "\n";
}

json meta_json(const ExperimentConfig& config) {
    json meta;
    meta["config"] = result_config_json(config);
    meta["master_seed"] = config.master_seed;
    return meta;
}

} // namespace

// --- analyze ----------------------------------------------------------------

std::vector<std::string> run_analyze(const AnalyzeInputs& inputs,
                                     const ExperimentConfig& config,
                                     const std::string& out_dir) {
    config.validate();
    const SceneRaster raster = load_scene(inputs.scene_path);
    const GazeTrace trace = parse_gaze_log_file(inputs.gaze_path, config.sample_rate_hz,
                                                raster.width(), raster.height());
    const auto objects = parse_object_specs_file(inputs.objects_path);
    std::optional<KeyframeLog> keyframes;
    if (inputs.keyframes_path)
        keyframes = parse_keyframes_file(*inputs.keyframes_path, trace.duration_ms());

    const auto fixations = detect_fixations(trace, raster, objects, config.filter);
    const auto summary = summarize_fixations(fixations, trace.duration_ms());

    std::vector<std::string> written;
    const std::string header = repro_header(config);

    // fixations.csv
    {
        std::string csv = header + "start_ms,end_ms,object,centroid_x,centroid_y\n";
        for (const auto& f : fixations) {
            csv += format_double(f.start_ms);
            csv += ',';
            csv += format_double(f.end_ms);
            csv += ',';
            if (f.object) csv += *f.object;
            csv += ',';
            csv += format_double(f.centroid.x);
            csv += ',';
            csv += format_double(f.centroid.y);
            csv += '\n';
        }
        const auto path = out_dir + "/fixations.csv";
        write_file(path, csv);
        written.push_back(path);
    }

    // attention_summary.json
    {
        json doc;
        doc["meta"] = meta_json(config);
        doc["trace_duration_ms"] = summary.trace_duration_ms;
        doc["background_time_ms"] = summary.background_time_ms;
        json times, props;
        for (const auto& [name, ms] : summary.object_time_ms) {
            times[name] = ms;
            props[name] = summary.proportion(name);
        }
        doc["object_time_ms"] = std::move(times);
        doc["proportions"] = std::move(props);
        const auto split = task_relevance_split(summary, objects);
        doc["relevance"] = {{"relevant", split.relevant}, {"irrelevant", split.irrelevant}};
        const bool has_gripper =
            std::any_of(objects.begin(), objects.end(),
                        [](const ObjectSpec& o) { return o.is_gripper; });
        if (has_gripper)
            doc["gripper_attention_ratio"] = gripper_attention_ratio(summary, objects);
        if (keyframes) {
            const auto report = keyframe_attention_change(fixations, *keyframes);
            try {
                const auto rates = step_change_rates(report, *keyframes);
                doc["step_change_rates"] = {{"step", rates.step_rate},
                                            {"nonstep", rates.nonstep_rate}};
            } catch (const ValidationError&) {
                // keyframes without is_step labels or without defined flags
            }
        }
        const auto path = out_dir + "/attention_summary.json";
        write_file(path, doc.dump(2) + "\n");
        written.push_back(path);
    }

    if (keyframes) {
        // reference_frames.csv: inferred frame per inter-keyframe segment
        {
            std::string csv = header + "segment_start_ms,segment_end_ms,reference_object\n";
            for (std::size_t i = 0; i + 1 < keyframes->entries.size(); ++i) {
                const double t0 = keyframes->entries[i].timestamp_ms;
                const double t1 = keyframes->entries[i + 1].timestamp_ms;
                const auto ref = infer_reference_frame(fixations, t0, t1);
                csv += format_double(t0);
                csv += ',';
                csv += format_double(t1);
                csv += ',';
                if (ref) csv += *ref;
                csv += '\n';
            }
            const auto path = out_dir + "/reference_frames.csv";
            write_file(path, csv);
            written.push_back(path);
        }
        // keyframe_report.csv
        {
            const auto report = keyframe_attention_change(fixations, *keyframes);
            const auto path = out_dir + "/keyframe_report.csv";
            write_file(path, header + keyframe_report_csv(report));
            written.push_back(path);
        }
    }
    return written;
}

// --- birl -------------------------------------------------------------------

namespace {

struct CellResult {
    int n_demos;
    std::string preset;
    std::string instruction;
    GeneralizationResult result;
};

std::string instruction_key(const Instruction& instr) {
    return instr.reference_object + "-" + side_name(instr.side);
}

std::vector<std::string> write_birl_tables(const ExperimentConfig& config,
                                           const std::vector<CellResult>& cells,
                                           const std::string& out_dir) {
    const std::string header = repro_header(config);

    auto metric_table = [&](bool evd_metric) {
        std::string csv = header + "arm,n_demos,preset,instruction,value\n";
        for (const char* arm : {"without_gaze", "with_gaze"}) {
            const bool with = std::string(arm) == "with_gaze";
            for (const auto& cell : cells) {
                const auto& stats = with ? cell.result.with_gaze : cell.result.without_gaze;
                csv += std::string(arm) + "," + std::to_string(cell.n_demos) + "," +
                       cell.preset + "," + cell.instruction + "," +
                       format_double(evd_metric ? stats.mean_evd : stats.mean_placement_loss) +
                       "\n";
            }
        }
        // improvement per (demo count x preset), averaged over instructions
        std::map<std::pair<int, std::string>, std::pair<double, int>> groups;
        for (const auto& cell : cells) {
            const double imp = evd_metric ? cell.result.evd_improvement
                                          : cell.result.placement_improvement;
            auto& [sum, count] = groups[{cell.n_demos, cell.preset}];
            sum += imp;
            ++count;
        }
        for (const auto& [key, agg] : groups)
            csv += "improvement," + std::to_string(key.first) + "," + key.second + ",both," +
                   format_double(agg.first / agg.second) + "\n";
        return csv;
    };

    std::vector<std::string> written;
    const auto policy_path = out_dir + "/policy_loss.csv";
    write_file(policy_path, metric_table(true));
    written.push_back(policy_path);

    const auto placement_path = out_dir + "/placement_loss.csv";
    write_file(placement_path, metric_table(false));
    written.push_back(placement_path);

    // combined long-format table; placement loss also normalized by the
    // table diagonal
    const double diagonal = config.bounds().diagonal();
    std::string combined = header +
                           "arm,n_demos,preset,instruction,mean_evd,mean_placement_loss,"
                           "mean_placement_loss_norm,improvement_pct\n";
    for (const auto& cell : cells) {
        for (const bool with : {false, true}) {
            const auto& stats = with ? cell.result.with_gaze : cell.result.without_gaze;
            combined += std::string(with ? "with_gaze" : "without_gaze") + "," +
                        std::to_string(cell.n_demos) + "," + cell.preset + "," +
                        cell.instruction + "," + format_double(stats.mean_evd) + "," +
                        format_double(stats.mean_placement_loss) + "," +
                        format_double(stats.mean_placement_loss / diagonal) + ",\n";
        }
        combined += "improvement," + std::to_string(cell.n_demos) + "," + cell.preset + "," +
                    cell.instruction + ",,,," +
                    format_double(100.0 * cell.result.evd_improvement) + "\n";
    }
    const auto combined_path = out_dir + "/results.csv";
    write_file(combined_path, combined);
    written.push_back(combined_path);
    return written;
}

} // namespace

std::vector<std::string> run_birl(const ExperimentConfig& config, const std::string& out_dir,
                                  bool no_gaze_only) {
    config.validate();

    std::vector<ObjectPrototype> prototypes = {{"bowl", config.object_radius},
                                               {"plate", config.object_radius}};
    const auto eval_configs =
        sample_configurations(config.n_configs, config.bounds(), prototypes,
                              config.min_separation, derive_seed(config.master_seed, 0xEC));

    const std::vector<Instruction> instructions = {parse_instruction("bowl-right"),
                                                   parse_instruction("plate-left")};

    std::vector<CellResult> cells;
    std::uint64_t cell_index = 0;
    for (const auto& [preset_name, preset] : config.presets) {
        for (const int n_demos : config.demo_counts) {
            for (const auto& instruction : instructions) {
                GeneralizationSettings s;
                s.bounds = config.bounds();
                s.instruction = instruction;
                s.demos_per_replicate = n_demos;
                s.n_replicates = config.n_replicates;
                s.object_radius = config.object_radius;
                s.offset_scale = config.offset_scale;
                s.width_scale = config.width_scale;
                s.grid_resolution = config.grid_resolution;
                s.noise_sd = config.noise_sd;
                s.restarts = config.restarts;
                s.gaze = preset;
                s.birl = config.birl;
                if (no_gaze_only) s.birl.prior_scale = 0.0;
                s.reward_estimate = config.reward_estimate;
                s.seed = derive_seed(config.master_seed, 0xB1A0u + cell_index);
                s.jobs = config.jobs;
                cells.push_back({n_demos, preset_name, instruction_key(instruction),
                                 generalization_eval(eval_configs, s)});
                ++cell_index;
            }
        }
    }
    return write_birl_tables(config, cells, out_dir);
}

std::vector<std::string> run_birl_on_demos(const ExperimentConfig& config,
                                           const std::vector<Demonstration>& demos,
                                           const std::string& out_dir) {
    config.validate();
    if (demos.empty()) throw ValidationError("no demonstrations provided");

    std::vector<ObjectPrototype> prototypes = {{"bowl", config.object_radius},
                                               {"plate", config.object_radius}};
    const auto eval_configs =
        sample_configurations(config.n_configs, config.bounds(), prototypes,
                              config.min_separation, derive_seed(config.master_seed, 0xEC));

    GeneralizationSettings s;
    s.bounds = config.bounds();
    s.instruction = demos.front().instruction;
    s.demos_per_replicate = static_cast<int>(demos.size());
    s.n_replicates = config.n_replicates;
    s.object_radius = config.object_radius;
    s.offset_scale = config.offset_scale;
    s.width_scale = config.width_scale;
    s.grid_resolution = config.grid_resolution;
    s.noise_sd = config.noise_sd;
    s.restarts = config.restarts;
    s.birl = config.birl;
    s.reward_estimate = config.reward_estimate;
    s.seed = derive_seed(config.master_seed, 0xF11Eu);
    s.jobs = config.jobs;
    s.fixed_demos = &demos;

    std::vector<CellResult> cells;
    cells.push_back({static_cast<int>(demos.size()), "file",
                     instruction_key(s.instruction), generalization_eval(eval_configs, s)});
    return write_birl_tables(config, cells, out_dir);
}

// --- synth ------------------------------------------------------------------

std::vector<std::string> run_synth(const ExperimentConfig& config, const std::string& out_dir,
                                   int n_demos, const std::string& preset_name,
                                   const Instruction& instruction) {
    config.validate();
    if (n_demos < 1) throw ConfigError("n_demos must be at least 1");
    const auto preset_it = config.presets.find(preset_name);
    if (preset_it == config.presets.end())
        throw ConfigError("unknown gaze preset `" + preset_name + "`");
    const GazeGenConfig& preset = preset_it->second;

    const TableConfig table =
        ambiguous_table(config.bounds(), config.object_radius, config.offset_scale);
    const KernelLayout layout = build_layout(table, config.offset_scale, config.width_scale);
    const PixelScene scene =
        make_pixel_scene(table, 1280.0, /*include_gripper=*/preset.gripper_share > 0.0);

    // every synth output embeds the resolved config and seed
    const std::string header = repro_header(config);
    auto with_meta = [&](const std::string& json_text) {
        json doc = json::parse(json_text);
        doc["meta"] = meta_json(config);
        return doc.dump(2) + "\n";
    };

    std::vector<std::string> written;
    const auto scene_path = out_dir + "/scene.json";
    write_file(scene_path, with_meta(scene_layout_json(scene)));
    written.push_back(scene_path);

    const auto objects_path = out_dir + "/objects.json";
    write_file(objects_path, with_meta(serialize_object_specs(scene_object_specs(scene))));
    written.push_back(objects_path);

    std::vector<Demonstration> demos;
    for (int i = 0; i < n_demos; ++i) {
        GazeGenConfig gaze = preset;
        gaze.seed = derive_seed(config.master_seed, 0x5A0u + static_cast<std::uint64_t>(i));
        const auto demo =
            synthesize_demonstration(table, instruction, layout, config.noise_sd, gaze);
        demos.push_back(demo);

        // trace proportions: fixation shares plus the gripper share
        std::map<std::string, double> proportions;
        for (const auto& [name, ms] : *demo.fixation_times_ms)
            proportions[name] = ms / gaze.budget_ms;
        if (preset.gripper_share > 0.0) proportions["gripper"] = preset.gripper_share;

        const auto synthetic =
            synthesize_gaze_trace(scene, proportions, gaze, config.sample_rate_hz);
        const auto gaze_path = out_dir + "/gaze_" + std::to_string(i) + ".csv";
        write_file(gaze_path, header + serialize_gaze_log(synthetic.trace));
        written.push_back(gaze_path);

        const auto keyframes = switch_keyframes(synthetic, scene);
        const auto kf_path = out_dir + "/keyframes_" + std::to_string(i) + ".csv";
        write_file(kf_path, header + serialize_keyframes(keyframes));
        written.push_back(kf_path);
    }

    const auto demos_path = out_dir + "/demos.json";
    write_file(demos_path, with_meta(demonstrations_to_json(demos)));
    written.push_back(demos_path);

    json manifest;
    manifest["meta"] = meta_json(config);
    manifest["preset"] = preset_name;
    manifest["instruction"] = instruction_key(instruction);
    manifest["n_demos"] = n_demos;
    manifest["files"] = written;
    const auto manifest_path = out_dir + "/manifest.json";
    write_file(manifest_path, manifest.dump(2) + "\n");
    written.push_back(manifest_path);
    return written;
}

} // namespace gazeirl

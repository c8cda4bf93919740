// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "gazeirl/placement_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "gazeirl/errors.hpp"
#include "gazeirl/rng.hpp"

namespace gazeirl {

void GazeGenConfig::validate() const {
    if (base_concentration <= 0.0)
        throw ValidationError("base_concentration must be positive");
    if (dominance <= 0.0) throw ValidationError("dominance must be positive");
    if (budget_ms <= 0.0) throw ValidationError("budget_ms must be positive");
    if (switches < 0) throw ValidationError("switches must be non-negative");
    if (gripper_share < 0.0 || gripper_share >= 1.0)
        throw ValidationError("gripper_share must lie in [0, 1)");
    if (dropout_rate < 0.0 || dropout_rate > 0.5)
        throw ValidationError("dropout_rate must lie in [0, 0.5]");
}

std::vector<TableConfig> sample_configurations(int n, const Rect& bounds,
                                               std::span<const ObjectPrototype> prototypes,
                                               double min_sep, std::uint64_t seed) {
    if (n < 0) throw ValidationError("configuration count must be non-negative");
    constexpr int kMaxAttempts = 10000;

    std::vector<TableConfig> configs;
    configs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            TableConfig config;
            config.bounds = bounds;
            for (const auto& proto : prototypes) {
                const Rect inner = bounds.inset(proto.radius);
                if (inner.width() <= 0.0 || inner.height() <= 0.0)
                    throw ValidationError("object `" + proto.name +
                                          "` does not fit inside the bounds");
                TableObject obj;
                obj.name = proto.name;
                obj.radius = proto.radius;
                obj.center = {rng.uniform(inner.min.x, inner.max.x),
                              rng.uniform(inner.min.y, inner.max.y)};
                config.objects.push_back(std::move(obj));
            }
            bool ok = true;
            for (std::size_t a = 0; a < config.objects.size() && ok; ++a)
                for (std::size_t b = a + 1; b < config.objects.size() && ok; ++b)
                    ok = distance(config.objects[a].center, config.objects[b].center) >=
                         min_sep;
            if (ok) {
                configs.push_back(std::move(config));
                placed = true;
            }
        }
        if (!placed)
            throw ValidationError("min_sep " + std::to_string(min_sep) +
                                  " infeasible within the bounds after bounded attempts");
    }
    return configs;
}

TableConfig ambiguous_table_at(const Rect& bounds, double radius, double offset_scale,
                               Vec2 pair_center, const std::string& name_a,
                               const std::string& name_b) {
    // Same-side diagonal kernels of the two objects coincide at this spacing.
    const double spacing = std::sqrt(2.0) * offset_scale * radius;
    TableConfig config;
    config.bounds = bounds;
    config.objects.push_back({name_a, {pair_center.x - spacing / 2.0, pair_center.y}, radius});
    config.objects.push_back({name_b, {pair_center.x + spacing / 2.0, pair_center.y}, radius});
    for (const auto& o : config.objects)
        if (!bounds.contains(o.center))
            throw ValidationError("ambiguous pair does not fit inside the bounds");
    return config;
}

TableConfig ambiguous_table(const Rect& bounds, double radius, double offset_scale,
                            const std::string& name_a, const std::string& name_b) {
    return ambiguous_table_at(bounds, radius, offset_scale, bounds.center(), name_a, name_b);
}

ActionGrid build_action_grid(const TableConfig& table, int resolution) {
    if (resolution < 2) throw ValidationError("grid resolution must be at least 2");
    ActionGrid grid;
    grid.resolution = resolution;
    grid.bounds = table.bounds;
    grid.cells.reserve(static_cast<std::size_t>(resolution) * resolution);
    const double cw = table.bounds.width() / resolution;
    const double ch = table.bounds.height() / resolution;
    for (int iy = 0; iy < resolution; ++iy)
        for (int ix = 0; ix < resolution; ++ix)
            grid.cells.push_back({table.bounds.min.x + (ix + 0.5) * cw,
                                  table.bounds.min.y + (iy + 0.5) * ch});
    return grid;
}

std::size_t nearest_cell(const ActionGrid& grid, Vec2 p) {
    if (grid.cells.empty()) throw ValidationError("empty action grid");
    std::size_t best = 0;
    double best_d2 = (grid.cells[0] - p).norm2();
    for (std::size_t i = 1; i < grid.cells.size(); ++i) {
        const double d2 = (grid.cells[i] - p).norm2();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

Vec2 argmax_reward(const RewardParams& params, const KernelLayout& layout,
                   const Rect& bounds, int scan_resolution) {
    Vec2 best;
    double best_r = -1.0;
    const double cw = bounds.width() / scan_resolution;
    const double ch = bounds.height() / scan_resolution;
    for (int iy = 0; iy < scan_resolution; ++iy) {
        for (int ix = 0; ix < scan_resolution; ++ix) {
            const Vec2 p{bounds.min.x + (ix + 0.5) * cw, bounds.min.y + (iy + 0.5) * ch};
            const double r = reward(p, params, layout);
            if (r > best_r) {
                best_r = r;
                best = p;
            }
        }
    }
    const Vec2 refined = ascend_reward(best, params, layout, bounds);
    return reward(refined, params, layout) >= best_r ? refined : best;
}

Demonstration synthesize_demonstration(const TableConfig& table,
                                       const Instruction& instruction,
                                       const KernelLayout& layout, double noise_sd,
                                       const GazeGenConfig& gaze) {
    gaze.validate();
    if (noise_sd < 0.0) throw ValidationError("noise_sd must be non-negative");
    const std::size_t ref = table.object_index(instruction.reference_object);

    const auto gt = ground_truth_reward(instruction.reference_object, instruction.side, layout);
    const Vec2 optimum = argmax_reward(gt, layout, table.bounds);

    Rng rng(gaze.seed);
    const Vec2 noise{rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)};
    Demonstration demo;
    demo.placement = table.bounds.clamp(optimum + noise_sd * noise);
    demo.instruction = instruction;

    std::vector<double> alphas(table.objects.size(), gaze.base_concentration);
    alphas[ref] *= gaze.dominance;
    const auto proportions = rng.dirichlet(alphas);
    std::map<std::string, double> times;
    const double object_budget = gaze.budget_ms * (1.0 - gaze.gripper_share);
    for (std::size_t i = 0; i < table.objects.size(); ++i)
        times[table.objects[i].name] = proportions[i] * object_budget;
    demo.fixation_times_ms = std::move(times);
    return demo;
}

// --- pixel scenes -----------------------------------------------------------

namespace {

const std::array<std::array<std::uint8_t, 3>, 6> kPalette = {{
    {{230, 200, 30}},  // yellow
    {{210, 40, 40}},   // red
    {{60, 170, 60}},   // green
    {{60, 90, 210}},   // blue
    {{180, 90, 200}},  // purple
    {{240, 140, 40}},  // orange
}};
constexpr std::array<std::uint8_t, 3> kGripperColor = {120, 120, 130};
constexpr std::array<std::uint8_t, 3> kBackground = {245, 245, 240};

} // namespace

PixelScene make_pixel_scene(const TableConfig& table, double px_per_m,
                            bool include_gripper) {
    if (px_per_m <= 0.0) throw ValidationError("px_per_m must be positive");
    PixelScene scene;
    scene.px_per_m = px_per_m;
    scene.width = static_cast<int>(std::lround(table.bounds.width() * px_per_m));
    scene.height = static_cast<int>(std::lround(table.bounds.height() * px_per_m));
    scene.background = kBackground;

    auto to_px = [&](Vec2 m) -> Vec2 {
        return {(m.x - table.bounds.min.x) * px_per_m, (m.y - table.bounds.min.y) * px_per_m};
    };

    for (std::size_t i = 0; i < table.objects.size(); ++i) {
        const auto& obj = table.objects[i];
        PixelSceneObject po;
        po.name = obj.name;
        po.center_px = to_px(obj.center);
        po.radius_px = obj.radius * px_per_m;
        po.color = kPalette[i % kPalette.size()];
        po.task_relevant = true;
        scene.objects.push_back(std::move(po));
    }

    if (include_gripper) {
        // corner farthest from the task objects, to keep colors unambiguous
        const double margin_x = scene.width * 0.12;
        const double margin_y = scene.height * 0.18;
        const std::array<Vec2, 4> corners = {
            Vec2{margin_x, margin_y}, Vec2{scene.width - margin_x, margin_y},
            Vec2{margin_x, scene.height - margin_y},
            Vec2{scene.width - margin_x, scene.height - margin_y}};
        Vec2 best = corners[0];
        double best_d = -1.0;
        for (const auto& c : corners) {
            double d = std::numeric_limits<double>::max();
            for (const auto& o : scene.objects) d = std::min(d, distance(c, o.center_px));
            if (d > best_d) {
                best_d = d;
                best = c;
            }
        }
        PixelSceneObject gr;
        gr.name = "gripper";
        gr.center_px = best;
        gr.radius_px = 0.07 * px_per_m;
        gr.color = kGripperColor;
        gr.task_relevant = false;
        gr.is_gripper = true;
        scene.objects.push_back(std::move(gr));
    }
    return scene;
}

SceneRaster rasterize_scene(const PixelScene& scene) {
    SceneRaster raster(scene.width, scene.height, scene.background);
    for (const auto& o : scene.objects)
        raster.fill_disk(o.center_px.x, o.center_px.y, o.radius_px, o.color);
    return raster;
}

std::string scene_layout_json(const PixelScene& scene) {
    nlohmann::json doc;
    doc["width"] = scene.width;
    doc["height"] = scene.height;
    doc["background"] = {scene.background[0], scene.background[1], scene.background[2]};
    doc["shapes"] = nlohmann::json::array();
    for (const auto& o : scene.objects) {
        nlohmann::json shape;
        shape["type"] = "disk";
        shape["center"] = {o.center_px.x, o.center_px.y};
        shape["radius"] = o.radius_px;
        shape["color"] = {o.color[0], o.color[1], o.color[2]};
        doc["shapes"].push_back(std::move(shape));
    }
    return doc.dump(2) + "\n";
}

std::vector<ObjectSpec> scene_object_specs(const PixelScene& scene) {
    std::vector<ObjectSpec> specs;
    for (const auto& o : scene.objects) {
        ObjectSpec spec;
        spec.name = o.name;
        for (int c = 0; c < 3; ++c) {
            spec.color.lower[c] = static_cast<std::uint8_t>(std::max(0, o.color[c] - 10));
            spec.color.upper[c] = static_cast<std::uint8_t>(std::min(255, o.color[c] + 10));
        }
        spec.task_relevant = o.task_relevant;
        spec.is_gripper = o.is_gripper;
        specs.push_back(std::move(spec));
    }
    return specs;
}

// --- gaze trace synthesis ---------------------------------------------------

namespace {

struct SegmentPlan {
    std::size_t object_idx;
    double duration_ms;
};

/// Splits the budget into alternating fixation segments whose per-object
/// totals equal proportion * budget.
std::vector<SegmentPlan> plan_segments(const PixelScene& scene,
                                       const std::map<std::string, double>& proportions,
                                       const GazeGenConfig& gaze) {
    struct Entry {
        std::size_t idx;
        double share;
        int n_segments;
    };
    std::vector<Entry> entries;
    double total = 0.0;
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const auto it = proportions.find(scene.objects[i].name);
        if (it != proportions.end() && it->second > 0.0) {
            entries.push_back({i, it->second, 0});
            total += it->second;
        }
    }
    if (entries.empty()) throw ValidationError("no positive gaze proportions");
    for (auto& e : entries) e.share /= total;

    const int n_seg = std::max(gaze.switches + 1, static_cast<int>(entries.size()));
    for (auto& e : entries)
        e.n_segments = std::max(1, static_cast<int>(std::lround(e.share * n_seg)));

    // interleave greedily: most remaining segments first, no immediate repeats
    std::vector<SegmentPlan> plan;
    std::vector<int> remaining;
    for (const auto& e : entries) remaining.push_back(e.n_segments);
    std::size_t last = entries.size();
    const int planned = [&] {
        int s = 0;
        for (const auto& e : entries) s += e.n_segments;
        return s;
    }();
    for (int step = 0; step < planned; ++step) {
        std::size_t pick = entries.size();
        int best_remaining = -1;
        for (std::size_t k = 0; k < entries.size(); ++k) {
            if (remaining[k] <= 0 || k == last) continue;
            if (remaining[k] > best_remaining) {
                best_remaining = remaining[k];
                pick = k;
            }
        }
        if (pick == entries.size()) {
            // only the previous object has segments left; allow the repeat
            for (std::size_t k = 0; k < entries.size(); ++k)
                if (remaining[k] > 0) pick = k;
        }
        if (pick == entries.size()) break;
        --remaining[pick];
        const auto& e = entries[pick];
        plan.push_back({e.idx, e.share * gaze.budget_ms / e.n_segments});
        last = pick;
    }
    return plan;
}

} // namespace

SyntheticTrace synthesize_gaze_trace(const PixelScene& scene,
                                     const std::map<std::string, double>& proportions,
                                     const GazeGenConfig& gaze, double sample_rate_hz) {
    gaze.validate();
    if (sample_rate_hz <= 0.0) throw ValidationError("sample_rate must be positive");

    Rng rng(derive_seed(gaze.seed, 0xA11CE));
    const auto plan = plan_segments(scene, proportions, gaze);
    const double period = 1000.0 / sample_rate_hz;

    SyntheticTrace out;
    out.trace.sample_rate_hz = sample_rate_hz;
    out.trace.frame_width = scene.width;
    out.trace.frame_height = scene.height;

    // per-sample drift stays below the saccade threshold; segment jumps
    // exceed it by construction
    const double drift_sd = 2.5;
    const double max_step = 12.0;

    double t = 0.0;
    Vec2 pos{scene.width / 2.0, scene.height / 2.0};
    bool first_segment = true;
    auto clamp_to_frame = [&](Vec2 p) -> Vec2 {
        return {std::clamp(p.x, 0.0, scene.width - 1.0),
                std::clamp(p.y, 0.0, scene.height - 1.0)};
    };

    for (const auto& seg : plan) {
        const auto& obj = scene.objects[seg.object_idx];
        const double wander = 0.35 * obj.radius_px;
        int n_samples = std::max(2, static_cast<int>(std::lround(seg.duration_ms / period)));

        GazeSegment planned;
        planned.object = obj.name;
        planned.start_ms = t;

        if (!first_segment) {
            // saccade sample mid-jump
            const Vec2 target = obj.center_px;
            const Vec2 mid = clamp_to_frame(0.5 * (pos + target));
            out.trace.samples.push_back({t, mid, true});
            t += period;
            pos = target;
            --n_samples;
        }
        for (int i = 0; i < n_samples; ++i) {
            Vec2 step{rng.normal(0.0, drift_sd), rng.normal(0.0, drift_sd)};
            step = step - 0.15 * (pos - obj.center_px);
            const double sn = step.norm();
            if (sn > max_step) step = (max_step / sn) * step;
            pos = pos + step;
            // keep the gaze point well inside the object
            const Vec2 off = pos - obj.center_px;
            if (off.norm() > wander) pos = obj.center_px + (wander / off.norm()) * off;
            pos = clamp_to_frame(pos);
            const bool dropout = rng.uniform() < gaze.dropout_rate;
            out.trace.samples.push_back({t, pos, !dropout});
            t += period;
        }
        planned.end_ms = t - period;
        out.segments.push_back(std::move(planned));
        first_segment = false;
    }
    return out;
}

KeyframeLog switch_keyframes(const SyntheticTrace& synthetic, const PixelScene& scene) {
    auto is_gripper = [&](const std::string& name) {
        for (const auto& o : scene.objects)
            if (o.name == name) return o.is_gripper;
        return false;
    };
    KeyframeLog log;
    for (std::size_t i = 1; i < synthetic.segments.size(); ++i) {
        const auto& prev = synthetic.segments[i - 1];
        const auto& next = synthetic.segments[i];
        KeyframeEntry entry;
        entry.timestamp_ms = next.start_ms;
        entry.label = next.object;
        entry.is_step = !is_gripper(prev.object) && !is_gripper(next.object);
        log.entries.push_back(std::move(entry));
    }
    return log;
}

// --- serialization ----------------------------------------------------------

std::string demonstrations_to_json(std::span<const Demonstration> demos) {
    nlohmann::json doc;
    doc["demonstrations"] = nlohmann::json::array();
    for (const auto& d : demos) {
        nlohmann::json j;
        j["placement"] = {d.placement.x, d.placement.y};
        if (d.fixation_times_ms) {
            nlohmann::json times;
            for (const auto& [name, ms] : *d.fixation_times_ms) times[name] = ms;
            j["fixation_times_ms"] = std::move(times);
        }
        j["eval_only"] = {{"reference", d.instruction.reference_object},
                          {"side", side_name(d.instruction.side)}};
        doc["demonstrations"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

std::vector<Demonstration> demonstrations_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("demonstrations: ") + e.what());
    }
    std::vector<Demonstration> demos;
    for (const auto& j : doc.at("demonstrations")) {
        Demonstration d;
        d.placement = {j.at("placement")[0].get<double>(), j.at("placement")[1].get<double>()};
        if (j.contains("fixation_times_ms")) {
            std::map<std::string, double> times;
            for (const auto& [name, ms] : j["fixation_times_ms"].items())
                times[name] = ms.get<double>();
            d.fixation_times_ms = std::move(times);
        }
        const auto& eval = j.at("eval_only");
        d.instruction.reference_object = eval.at("reference").get<std::string>();
        const auto side = eval.at("side").get<std::string>();
        if (side == "left")
            d.instruction.side = Side::left;
        else if (side == "right")
            d.instruction.side = Side::right;
        else
            throw ParseError("demonstrations: unknown side `" + side + "`");
        demos.push_back(std::move(d));
    }
    return demos;
}

} // namespace gazeirl

// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "gazeirl/fixation_filter.hpp"

#include <algorithm>
#include <cmath>

#include "gazeirl/errors.hpp"

namespace gazeirl {

void FilterConfig::validate() const {
    if (max_speed <= 0.0) throw ValidationError("max_speed must be positive");
    if (attention_radius <= 0.0) throw ValidationError("attention_radius must be positive");
    if (majority_fraction < 0.5 || majority_fraction > 1.0)
        throw ValidationError("majority_fraction must lie in [0.5, 1]");
    if (min_fixation_ms <= 0.0) throw ValidationError("min_fixation_ms must be positive");
    if (dropout_bridge_ms < 0.0) throw ValidationError("dropout_bridge_ms must be non-negative");
}

std::vector<SampleLabel> classify_speed(const GazeTrace& trace, const FilterConfig& config) {
    config.validate();
    std::vector<SampleLabel> labels(trace.samples.size(), SampleLabel::candidate);
    long prev_valid = -1;
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const auto& s = trace.samples[i];
        if (!s.valid) {
            labels[i] = SampleLabel::invalid;
            continue;
        }
        if (prev_valid >= 0) {
            const auto& p = trace.samples[static_cast<std::size_t>(prev_valid)];
            const double dt_s = (s.timestamp_ms - p.timestamp_ms) / 1000.0;
            const double speed = distance(s.position, p.position) / dt_s;
            labels[i] = speed > config.max_speed ? SampleLabel::saccade
                                                 : SampleLabel::candidate;
        }
        prev_valid = static_cast<long>(i);
    }
    return labels;
}

std::optional<std::string> object_of_attention(Vec2 point, const SceneRaster& raster,
                                               std::span<const ObjectSpec> objects,
                                               const FilterConfig& config) {
    config.validate();
    const double r = config.attention_radius;
    const double r2 = r * r;
    const int x0 = std::max(0, static_cast<int>(std::ceil(point.x - r)));
    const int x1 = std::min(raster.width() - 1, static_cast<int>(std::floor(point.x + r)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(point.y - r)));
    const int y1 = std::min(raster.height() - 1, static_cast<int>(std::floor(point.y + r)));

    std::vector<long> counts(objects.size(), 0);
    long total = 0;
    for (int y = y0; y <= y1; ++y) {
        const double dy = y - point.y;
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - point.x;
            if (dx * dx + dy * dy > r2) continue;
            ++total;
            const auto* px = raster.pixel(x, y);
            for (std::size_t k = 0; k < objects.size(); ++k) {
                if (objects[k].color.contains(px[0], px[1], px[2])) ++counts[k];
            }
        }
    }
    if (total == 0) return std::nullopt;

    long best = 0;
    std::size_t best_idx = 0;
    bool tie = false;
    for (std::size_t k = 0; k < objects.size(); ++k) {
        if (counts[k] > best) {
            best = counts[k];
            best_idx = k;
            tie = false;
        } else if (counts[k] == best && best > 0) {
            tie = true;
        }
    }
    if (tie) return std::nullopt; // ambiguous attention
    if (static_cast<double>(best) > config.majority_fraction * static_cast<double>(total))
        return objects[best_idx].name;
    return std::nullopt;
}

namespace {

struct RunState {
    bool open = false;
    std::size_t first = 0;     // first candidate sample of the run
    std::size_t last = 0;      // last candidate sample of the run
    std::optional<std::string> object;
    Vec2 position_sum;
    std::size_t n_positions = 0;
};

} // namespace

std::vector<Fixation> detect_fixations(const GazeTrace& trace, const SceneRaster& raster,
                                       std::span<const ObjectSpec> objects,
                                       const FilterConfig& config) {
    config.validate();
    if (raster.width() != trace.frame_width || raster.height() != trace.frame_height)
        throw ValidationError("raster dimensions do not match the trace frame size");

    const auto labels = classify_speed(trace, config);
    const double period = trace.nominal_period_ms();

    std::vector<Fixation> out;
    RunState run;
    std::size_t pending_invalid = 0;

    auto close_run = [&]() {
        if (!run.open) return;
        const double start = trace.samples[run.first].timestamp_ms;
        const double end = trace.samples[run.last].timestamp_ms;
        if (end - start >= config.min_fixation_ms) {
            Fixation f;
            f.start_ms = start;
            f.end_ms = end;
            f.object = run.object;
            f.centroid = (1.0 / static_cast<double>(run.n_positions)) * run.position_sum;
            out.push_back(std::move(f));
        }
        run = RunState{};
    };

    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        switch (labels[i]) {
        case SampleLabel::invalid:
            if (run.open) ++pending_invalid;
            continue;
        case SampleLabel::saccade:
            close_run();
            pending_invalid = 0;
            continue;
        case SampleLabel::candidate:
            break;
        }
        const auto obj = object_of_attention(trace.samples[i].position, raster, objects, config);
        if (run.open) {
            const double gap_ms = static_cast<double>(pending_invalid) * period;
            if (obj != run.object || gap_ms > config.dropout_bridge_ms) close_run();
        }
        pending_invalid = 0;
        if (!run.open) {
            run.open = true;
            run.first = i;
            run.object = obj;
        }
        run.last = i;
        run.position_sum = run.position_sum + trace.samples[i].position;
        ++run.n_positions;
    }
    close_run();
    return out;
}

} // namespace gazeirl

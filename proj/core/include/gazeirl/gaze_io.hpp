// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// Parsing and validation of gaze logs, object specifications and keyframe
// logs into canonical in-memory forms. All functions are pure; parsed
// values are immutable and safe to share across threads.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gazeirl/geometry.hpp"

namespace gazeirl {

/// One tracker sample. `valid == false` marks tracker dropout; dropout
/// samples are retained so downstream filters can decide their treatment.
struct GazeSample {
    double timestamp_ms = 0.0;
    Vec2 position; // pixels, egocentric frame
    bool valid = true;
};

/// An ordered gaze stream at a fixed sampling rate.
/// Invariants (enforced by parse_gaze_log): timestamps strictly increasing,
/// consecutive deltas equal 1000/sample_rate within +/-1 ms, valid samples
/// inside the frame.
struct GazeTrace {
    std::vector<GazeSample> samples;
    double sample_rate_hz = 50.0;
    int frame_width = 0;
    int frame_height = 0;

    double duration_ms() const {
        return samples.empty() ? 0.0 : samples.back().timestamp_ms;
    }
    double nominal_period_ms() const { return 1000.0 / sample_rate_hz; }
};

/// Inclusive per-channel color box used to resolve the object of attention.
struct ColorRange {
    std::array<std::uint8_t, 3> lower{};
    std::array<std::uint8_t, 3> upper{};

    bool contains(std::uint8_t r, std::uint8_t g, std::uint8_t b) const {
        return r >= lower[0] && r <= upper[0] && g >= lower[1] && g <= upper[1] &&
               b >= lower[2] && b <= upper[2];
    }
};

struct ObjectSpec {
    std::string name;
    ColorRange color;
    bool task_relevant = false;
    bool is_gripper = false;
};

struct KeyframeEntry {
    double timestamp_ms = 0.0;
    std::optional<std::string> label;
    std::optional<bool> is_step;
};

struct KeyframeLog {
    std::vector<KeyframeEntry> entries;
};

/// Parses the gaze-log text format: a `timestamp_ms,gaze_x_px,gaze_y_px,valid`
/// header followed by one sample per line. Invalid (dropout) samples are
/// retained with valid=false. Throws ParseError naming the line on malformed
/// rows and ValidationError naming the row on timing/bounds violations.
GazeTrace parse_gaze_log(std::istream& raw, double sample_rate_hz, int frame_width,
                         int frame_height);
GazeTrace parse_gaze_log_file(const std::string& path, double sample_rate_hz,
                              int frame_width, int frame_height);

/// Inverse of parse_gaze_log; round-trips field for field.
std::string serialize_gaze_log(const GazeTrace& trace);

/// Parses the JSON object-spec document (see README for the schema).
/// Enforces unique names, lower <= upper per channel and at most one gripper.
std::vector<ObjectSpec> parse_object_specs(std::istream& raw);
std::vector<ObjectSpec> parse_object_specs_file(const std::string& path);

std::string serialize_object_specs(const std::vector<ObjectSpec>& specs);

/// Parses `timestamp_ms[,label[,is_step]]` lines (no header; empty fields
/// allowed). Entries must be strictly increasing and within trace_duration.
KeyframeLog parse_keyframes(std::istream& raw, double trace_duration_ms);
KeyframeLog parse_keyframes_file(const std::string& path, double trace_duration_ms);

std::string serialize_keyframes(const KeyframeLog& log);

} // namespace gazeirl

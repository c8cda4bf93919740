// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "gazeirl/gaze_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gazeirl/errors.hpp"
#include "gazeirl/text_util.hpp"

namespace gazeirl {

namespace {

constexpr char kGazeHeader[] = "timestamp_ms,gaze_x_px,gaze_y_px,valid";

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    return in;
}

} // namespace

GazeTrace parse_gaze_log(std::istream& raw, double sample_rate_hz, int frame_width,
                         int frame_height) {
    if (sample_rate_hz <= 0.0) throw ValidationError("sample_rate must be positive");
    if (frame_width <= 0 || frame_height <= 0)
        throw ValidationError("frame size must be positive");

    GazeTrace trace;
    trace.sample_rate_hz = sample_rate_hz;
    trace.frame_width = frame_width;
    trace.frame_height = frame_height;

    // `#` lines are comments (reproducibility headers and the like)
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(raw, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t != kGazeHeader)
            throw ParseError("line " + std::to_string(line_no) + ": expected header `" +
                             kGazeHeader + "`");
        have_header = true;
        break;
    }
    if (!have_header) throw ParseError("missing header line");

    const double period = 1000.0 / sample_rate_hz;
    int row = 0;
    while (std::getline(raw, line)) {
        ++line_no;
        if (trim(line).empty() || trim(line).front() == '#') continue;
        ++row;
        const auto where = "row " + std::to_string(row) + " (line " +
                           std::to_string(line_no) + ")";
        const auto fields = split(line, ',');
        if (fields.size() != 4)
            throw ParseError(where + ": expected 4 fields, got " +
                             std::to_string(fields.size()));
        GazeSample s;
        if (!parse_double(fields[0], s.timestamp_ms))
            throw ParseError(where + ": bad timestamp_ms `" + std::string(fields[0]) + "`");
        if (!parse_double(fields[1], s.position.x))
            throw ParseError(where + ": bad gaze_x_px `" + std::string(fields[1]) + "`");
        if (!parse_double(fields[2], s.position.y))
            throw ParseError(where + ": bad gaze_y_px `" + std::string(fields[2]) + "`");
        if (!parse_bool(fields[3], s.valid))
            throw ParseError(where + ": bad valid flag `" + std::string(fields[3]) + "`");

        if (s.timestamp_ms < 0.0)
            throw ValidationError(where + ": negative timestamp");
        if (!trace.samples.empty() && s.timestamp_ms <= trace.samples.back().timestamp_ms)
            throw ValidationError(where + ": non-monotonic timestamp " +
                                  format_double(s.timestamp_ms) + " after " +
                                  format_double(trace.samples.back().timestamp_ms));
        if (s.valid) {
            if (s.position.x < 0.0 || s.position.x > frame_width || s.position.y < 0.0 ||
                s.position.y > frame_height)
                throw ValidationError(where + ": valid sample outside frame bounds");
        }
        trace.samples.push_back(s);
    }

    // timing deltas are checked after ordering so that ordering violations
    // are reported as such
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        const double delta =
            trace.samples[i].timestamp_ms - trace.samples[i - 1].timestamp_ms;
        if (std::abs(delta - period) > 1.0)
            throw ValidationError("row " + std::to_string(i + 1) + ": timestamp delta " +
                                  format_double(delta) +
                                  " ms deviates more than 1 ms from nominal " +
                                  format_double(period) + " ms");
    }
    return trace;
}

GazeTrace parse_gaze_log_file(const std::string& path, double sample_rate_hz,
                              int frame_width, int frame_height) {
    auto in = open_or_throw(path);
    return parse_gaze_log(in, sample_rate_hz, frame_width, frame_height);
}

std::string serialize_gaze_log(const GazeTrace& trace) {
    std::string out(kGazeHeader);
    out += '\n';
    for (const auto& s : trace.samples) {
        out += format_double(s.timestamp_ms);
        out += ',';
        out += format_double(s.position.x);
        out += ',';
        out += format_double(s.position.y);
        out += ',';
        out += s.valid ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::vector<ObjectSpec> parse_object_specs(std::istream& raw) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("object specs: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("objects") || !doc["objects"].is_array())
        throw ParseError("object specs: top-level `objects` array required");

    std::vector<ObjectSpec> specs;
    std::set<std::string> names;
    int gripper_count = 0;
    std::size_t idx = 0;
    for (const auto& item : doc["objects"]) {
        const auto where = "object[" + std::to_string(idx) + "]";
        ++idx;
        ObjectSpec spec;
        try {
            spec.name = item.at("name").get<std::string>();
            const auto lo = item.at("color_lower");
            const auto hi = item.at("color_upper");
            if (!lo.is_array() || lo.size() != 3 || !hi.is_array() || hi.size() != 3)
                throw ParseError(where + ": color bounds must be 3-element arrays");
            for (int c = 0; c < 3; ++c) {
                const int l = lo[c].get<int>();
                const int h = hi[c].get<int>();
                if (l < 0 || l > 255 || h < 0 || h > 255)
                    throw ParseError(where + ": color channel out of [0,255]");
                spec.color.lower[c] = static_cast<std::uint8_t>(l);
                spec.color.upper[c] = static_cast<std::uint8_t>(h);
            }
            spec.task_relevant = item.at("task_relevant").get<bool>();
            spec.is_gripper = item.value("is_gripper", false);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        for (int c = 0; c < 3; ++c) {
            if (spec.color.lower[c] > spec.color.upper[c])
                throw ValidationError(where + " (" + spec.name + "): channel " +
                                      std::to_string(c) + " lower bound " +
                                      std::to_string(spec.color.lower[c]) +
                                      " exceeds upper bound " +
                                      std::to_string(spec.color.upper[c]));
        }
        if (!names.insert(spec.name).second)
            throw ValidationError(where + ": duplicate object name `" + spec.name + "`");
        if (spec.is_gripper) ++gripper_count;
        specs.push_back(std::move(spec));
    }
    if (gripper_count > 1)
        throw ValidationError("object specs: more than one is_gripper object");
    return specs;
}

std::vector<ObjectSpec> parse_object_specs_file(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_object_specs(in);
}

std::string serialize_object_specs(const std::vector<ObjectSpec>& specs) {
    nlohmann::json doc;
    doc["objects"] = nlohmann::json::array();
    for (const auto& s : specs) {
        nlohmann::json o;
        o["name"] = s.name;
        o["color_lower"] = {s.color.lower[0], s.color.lower[1], s.color.lower[2]};
        o["color_upper"] = {s.color.upper[0], s.color.upper[1], s.color.upper[2]};
        o["task_relevant"] = s.task_relevant;
        o["is_gripper"] = s.is_gripper;
        doc["objects"].push_back(std::move(o));
    }
    return doc.dump(2) + "\n";
}

KeyframeLog parse_keyframes(std::istream& raw, double trace_duration_ms) {
    KeyframeLog log;
    std::string line;
    int line_no = 0;
    while (std::getline(raw, line)) {
        ++line_no;
        if (trim(line).empty() || trim(line).front() == '#') continue;
        const auto where = "line " + std::to_string(line_no);
        const auto fields = split(line, ',');
        if (fields.size() > 3)
            throw ParseError(where + ": expected at most 3 fields, got " +
                             std::to_string(fields.size()));
        KeyframeEntry entry;
        if (!parse_double(fields[0], entry.timestamp_ms))
            throw ParseError(where + ": bad timestamp_ms `" + std::string(fields[0]) + "`");
        if (fields.size() >= 2 && !trim(fields[1]).empty())
            entry.label = std::string(trim(fields[1]));
        if (fields.size() >= 3 && !trim(fields[2]).empty()) {
            bool b = false;
            if (!parse_bool(fields[2], b))
                throw ParseError(where + ": bad is_step flag `" + std::string(fields[2]) + "`");
            entry.is_step = b;
        }
        if (entry.timestamp_ms < 0.0 || entry.timestamp_ms > trace_duration_ms)
            throw ValidationError(where + ": keyframe at " +
                                  format_double(entry.timestamp_ms) +
                                  " ms outside trace duration " +
                                  format_double(trace_duration_ms) + " ms");
        if (!log.entries.empty() &&
            entry.timestamp_ms <= log.entries.back().timestamp_ms)
            throw ValidationError(where + ": non-monotonic keyframe timestamp");
        log.entries.push_back(std::move(entry));
    }
    return log;
}

KeyframeLog parse_keyframes_file(const std::string& path, double trace_duration_ms) {
    auto in = open_or_throw(path);
    return parse_keyframes(in, trace_duration_ms);
}

std::string serialize_keyframes(const KeyframeLog& log) {
    std::string out;
    for (const auto& e : log.entries) {
        out += format_double(e.timestamp_ms);
        out += ',';
        if (e.label) out += *e.label;
        out += ',';
        if (e.is_step) out += *e.is_step ? "true" : "false";
        out += '\n';
    }
    return out;
}

} // namespace gazeirl

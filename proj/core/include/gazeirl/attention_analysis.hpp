// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// Fixation-level attention statistics: per-object fixation times,
// task-relevance proportions, reference-frame inference per segment,
// attention change around keyframes, and the gripper-attention ratio.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeirl/fixation_filter.hpp"
#include "gazeirl/gaze_io.hpp"

namespace gazeirl {

/// Per-object fixation-time totals over a trace. Background (objectless)
/// fixation time is tracked separately and never competes for dominance.
struct FixationSummary {
    std::map<std::string, double> object_time_ms; // deterministic iteration order
    double background_time_ms = 0.0;
    double trace_duration_ms = 0.0;

    double object_time(const std::string& name) const {
        const auto it = object_time_ms.find(name);
        return it == object_time_ms.end() ? 0.0 : it->second;
    }
    double proportion(const std::string& name) const {
        return trace_duration_ms > 0.0 ? object_time(name) / trace_duration_ms : 0.0;
    }
    double total_object_time_ms() const;
};

struct KeyframeAttention {
    double keyframe_ms = 0.0;
    std::optional<std::string> before; // dominant object in the window before
    std::optional<std::string> after;  // dominant object in the window after
    std::optional<bool> changed;       // defined only when both dominants are
};

struct KeyframeAttentionReport {
    double window_ms = 3000.0;
    std::vector<KeyframeAttention> entries;
};

struct RelevanceSplit {
    double relevant = 0.0;   // proportion of trace time on task-relevant objects
    double irrelevant = 0.0; // proportion on task-irrelevant objects
};

struct StepChangeRates {
    double step_rate = 0.0;
    double nonstep_rate = 0.0;
};

/// Exact per-object fixation-time sums. Throws ValidationError on
/// overlapping fixations or fixations outside [0, trace_duration].
FixationSummary summarize_fixations(std::span<const Fixation> fixations,
                                    double trace_duration_ms);

/// Partitions the object-directed proportion of the trace by the
/// task_relevant flag. Throws on summarized objects missing from specs.
RelevanceSplit task_relevance_split(const FixationSummary& summary,
                                    std::span<const ObjectSpec> objects);

/// The object with maximal total fixation time clipped to [t0, t1];
/// none when no object fixation intersects the segment or on an exact tie.
std::optional<std::string> infer_reference_frame(std::span<const Fixation> fixations,
                                                 double t0_ms, double t1_ms);

/// Dominant object of attention in the windows before and after each
/// keyframe, and whether it changed. Fixations straddling a window edge are
/// clipped proportionally by time.
KeyframeAttentionReport keyframe_attention_change(std::span<const Fixation> fixations,
                                                  const KeyframeLog& keyframes,
                                                  double window_ms = 3000.0);

/// Fraction of step and of non-step keyframes whose attention changed,
/// excluding keyframes with an undefined change flag. Throws when no
/// keyframe carries an is_step label or a group has no defined entries.
StepChangeRates step_change_rates(const KeyframeAttentionReport& report,
                                  const KeyframeLog& keyframes);

/// Gripper time / (gripper time + task-relevant object time); 0 when both
/// are zero. Throws when specs contain no gripper.
double gripper_attention_ratio(const FixationSummary& summary,
                               std::span<const ObjectSpec> objects);

/// CSV export of a keyframe report: `keyframe_ms,before,after,changed`
/// rows; empty fields for undefined values.
std::string keyframe_report_csv(const KeyframeAttentionReport& report);

} // namespace gazeirl

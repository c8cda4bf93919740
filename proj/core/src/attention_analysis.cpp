// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "gazeirl/attention_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "gazeirl/errors.hpp"
#include "gazeirl/text_util.hpp"

namespace gazeirl {

double FixationSummary::total_object_time_ms() const {
    double sum = 0.0;
    for (const auto& [name, t] : object_time_ms) sum += t;
    return sum;
}

FixationSummary summarize_fixations(std::span<const Fixation> fixations,
                                    double trace_duration_ms) {
    if (trace_duration_ms < 0.0)
        throw ValidationError("trace duration must be non-negative");

    std::vector<const Fixation*> sorted;
    sorted.reserve(fixations.size());
    for (const auto& f : fixations) sorted.push_back(&f);
    std::sort(sorted.begin(), sorted.end(),
              [](const Fixation* a, const Fixation* b) { return a->start_ms < b->start_ms; });

    FixationSummary summary;
    summary.trace_duration_ms = trace_duration_ms;
    const Fixation* prev = nullptr;
    for (const Fixation* f : sorted) {
        if (f->end_ms < f->start_ms)
            throw ValidationError("fixation with negative duration");
        if (f->start_ms < 0.0 || f->end_ms > trace_duration_ms)
            throw ValidationError("fixation outside the trace duration");
        if (prev && f->start_ms < prev->end_ms)
            throw ValidationError("overlapping fixations at " + format_double(f->start_ms) +
                                  " ms");
        if (f->object)
            summary.object_time_ms[*f->object] += f->duration_ms();
        else
            summary.background_time_ms += f->duration_ms();
        prev = f;
    }
    return summary;
}

RelevanceSplit task_relevance_split(const FixationSummary& summary,
                                    std::span<const ObjectSpec> objects) {
    RelevanceSplit split;
    for (const auto& [name, time_ms] : summary.object_time_ms) {
        const auto it = std::find_if(objects.begin(), objects.end(),
                                     [&](const ObjectSpec& o) { return o.name == name; });
        if (it == objects.end())
            throw ValidationError("summarized object `" + name + "` has no spec");
        const double p =
            summary.trace_duration_ms > 0.0 ? time_ms / summary.trace_duration_ms : 0.0;
        if (it->task_relevant)
            split.relevant += p;
        else
            split.irrelevant += p;
    }
    return split;
}

namespace {

double overlap_ms(const Fixation& f, double t0, double t1) {
    return std::max(0.0, std::min(f.end_ms, t1) - std::max(f.start_ms, t0));
}

/// Object with maximal total clipped fixation time in [t0, t1], none on a
/// tie or when nothing overlaps. Background fixations never compete.
std::optional<std::string> dominant_object(std::span<const Fixation> fixations, double t0,
                                           double t1) {
    std::map<std::string, double> time_by_object;
    for (const auto& f : fixations) {
        if (!f.object) continue;
        const double t = overlap_ms(f, t0, t1);
        if (t > 0.0) time_by_object[*f.object] += t;
    }
    if (time_by_object.empty()) return std::nullopt;
    const std::string* best = nullptr;
    double best_time = 0.0;
    bool tie = false;
    for (const auto& [name, t] : time_by_object) {
        if (t > best_time) {
            best = &name;
            best_time = t;
            tie = false;
        } else if (t == best_time) {
            tie = true;
        }
    }
    if (tie || !best) return std::nullopt;
    return *best;
}

} // namespace

std::optional<std::string> infer_reference_frame(std::span<const Fixation> fixations,
                                                 double t0_ms, double t1_ms) {
    if (!(t0_ms < t1_ms)) throw ValidationError("segment requires t0 < t1");
    return dominant_object(fixations, t0_ms, t1_ms);
}

KeyframeAttentionReport keyframe_attention_change(std::span<const Fixation> fixations,
                                                  const KeyframeLog& keyframes,
                                                  double window_ms) {
    if (window_ms < 0.0) throw ValidationError("window_ms must be non-negative");
    KeyframeAttentionReport report;
    report.window_ms = window_ms;
    for (const auto& kf : keyframes.entries) {
        KeyframeAttention entry;
        entry.keyframe_ms = kf.timestamp_ms;
        entry.before = dominant_object(fixations, kf.timestamp_ms - window_ms, kf.timestamp_ms);
        entry.after = dominant_object(fixations, kf.timestamp_ms, kf.timestamp_ms + window_ms);
        if (entry.before && entry.after) entry.changed = (*entry.before != *entry.after);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

StepChangeRates step_change_rates(const KeyframeAttentionReport& report,
                                  const KeyframeLog& keyframes) {
    if (report.entries.size() != keyframes.entries.size())
        throw ValidationError("report and keyframe log sizes differ");
    long step_changed = 0;
    long step_total = 0;
    long nonstep_changed = 0;
    long nonstep_total = 0;
    bool any_labeled = false;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& kf = keyframes.entries[i];
        if (!kf.is_step) continue;
        any_labeled = true;
        const auto& changed = report.entries[i].changed;
        if (!changed) continue;
        if (*kf.is_step) {
            ++step_total;
            if (*changed) ++step_changed;
        } else {
            ++nonstep_total;
            if (*changed) ++nonstep_changed;
        }
    }
    if (!any_labeled)
        throw ValidationError("no keyframe carries an is_step label");
    if (step_total == 0 && nonstep_total == 0)
        throw ValidationError("all change flags are undefined");
    StepChangeRates rates;
    rates.step_rate =
        step_total > 0 ? static_cast<double>(step_changed) / step_total : 0.0;
    rates.nonstep_rate =
        nonstep_total > 0 ? static_cast<double>(nonstep_changed) / nonstep_total : 0.0;
    return rates;
}

double gripper_attention_ratio(const FixationSummary& summary,
                               std::span<const ObjectSpec> objects) {
    const ObjectSpec* gripper = nullptr;
    for (const auto& o : objects) {
        if (o.is_gripper) gripper = &o;
    }
    if (!gripper) throw ValidationError("no is_gripper object in specs");

    const double gripper_ms = summary.object_time(gripper->name);
    double task_ms = 0.0;
    for (const auto& o : objects) {
        if (!o.is_gripper && o.task_relevant) task_ms += summary.object_time(o.name);
    }
    const double denom = gripper_ms + task_ms;
    return denom > 0.0 ? gripper_ms / denom : 0.0;
}

std::string keyframe_report_csv(const KeyframeAttentionReport& report) {
    std::string out = "keyframe_ms,before,after,changed\n";
    for (const auto& e : report.entries) {
        out += format_double(e.keyframe_ms);
        out += ',';
        if (e.before) out += *e.before;
        out += ',';
        if (e.after) out += *e.after;
        out += ',';
        if (e.changed) out += *e.changed ? "true" : "false";
        out += '\n';
    }
    return out;
}

} // namespace gazeirl

// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "gazeirl/policy_eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "gazeirl/errors.hpp"
#include "gazeirl/rng.hpp"

namespace gazeirl {

Vec2 best_placement(const RewardParams& params, const KernelLayout& layout,
                    const TableConfig& table, int restarts, std::uint64_t seed) {
    if (restarts < 1) throw ValidationError("restarts must be at least 1");
    Rng rng(seed);
    Vec2 best;
    double best_r = -1.0;
    for (int r = 0; r < restarts; ++r) {
        const Vec2 start{rng.uniform(table.bounds.min.x, table.bounds.max.x),
                         rng.uniform(table.bounds.min.y, table.bounds.max.y)};
        const Vec2 terminus = ascend_reward(start, params, layout, table.bounds, 1e-7);
        const double r_val = reward(terminus, params, layout);
        if (r_val > best_r) {
            best_r = r_val;
            best = terminus;
        }
    }
    return best;
}

double evd(Vec2 policy_placement, const RewardParams& gt_params,
           const KernelLayout& layout, const TableConfig& table, int restarts,
           std::uint64_t seed) {
    const Vec2 x_star = best_placement(gt_params, layout, table, restarts, seed);
    const double r_policy = reward(policy_placement, gt_params, layout);
    // the true optimum is at least as good as any queried point
    const double r_star = std::max(reward(x_star, gt_params, layout), r_policy);
    const double diff = r_star - r_policy;
    return diff < 0.0 ? 0.0 : diff;
}

double placement_loss(Vec2 policy_placement, Vec2 gt_placement) {
    return distance(policy_placement, gt_placement);
}

namespace {

struct EvalConfigContext {
    const TableConfig* table;
    KernelLayout layout;
    RewardParams gt;
    Vec2 gt_placement;
    double gt_reward;
    std::uint64_t placement_seed;
};

struct ArmOutcome {
    bool map_matches = false;
    double mean_evd = 0.0;
    double mean_loss = 0.0;
};

ArmOutcome evaluate_arm(const RewardParams& inferred, const Instruction& instruction,
                        std::span<const EvalConfigContext> contexts,
                        const GeneralizationSettings& s) {
    ArmOutcome out;

    const auto sums = object_weight_sums(inferred);
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < sums.size(); ++i)
        if (sums[i] > sums[argmax]) argmax = i;

    double evd_sum = 0.0;
    double loss_sum = 0.0;
    for (const auto& ctx : contexts) {
        const Vec2 x_pi = best_placement(inferred, ctx.layout, *ctx.table, s.restarts,
                                         ctx.placement_seed);
        const double r_policy = reward(x_pi, ctx.gt, ctx.layout);
        const double r_star = std::max(ctx.gt_reward, r_policy);
        evd_sum += std::max(0.0, r_star - r_policy);
        loss_sum += placement_loss(x_pi, ctx.gt_placement);
    }
    out.mean_evd = evd_sum / static_cast<double>(contexts.size());
    out.mean_loss = loss_sum / static_cast<double>(contexts.size());

    if (!contexts.empty()) {
        const auto& layout = contexts.front().layout;
        out.map_matches = layout.objects[argmax].object == instruction.reference_object;
    }
    return out;
}

} // namespace

GeneralizationResult generalization_eval(std::span<const TableConfig> eval_configs,
                                         const GeneralizationSettings& settings) {
    if (eval_configs.empty()) throw ValidationError("no evaluation configurations");
    settings.birl.validate();
    settings.gaze.validate();

    // training scene shared by every replicate
    const TableConfig train_table =
        ambiguous_table(settings.bounds, settings.object_radius, settings.offset_scale);
    const KernelLayout train_layout =
        build_layout(train_table, settings.offset_scale, settings.width_scale);
    const ActionGrid train_grid = build_action_grid(train_table, settings.grid_resolution);

    // evaluation contexts shared by every replicate and both arms
    std::vector<EvalConfigContext> contexts;
    contexts.reserve(eval_configs.size());
    for (std::size_t c = 0; c < eval_configs.size(); ++c) {
        EvalConfigContext ctx;
        ctx.table = &eval_configs[c];
        ctx.layout = build_layout(eval_configs[c], settings.offset_scale, settings.width_scale);
        ctx.gt = ground_truth_reward(settings.instruction.reference_object,
                                     settings.instruction.side, ctx.layout);
        ctx.placement_seed = derive_seed(settings.seed, 0xE0A1u + c);
        ctx.gt_placement = best_placement(ctx.gt, ctx.layout, eval_configs[c],
                                          settings.restarts, ctx.placement_seed);
        ctx.gt_reward = reward(ctx.gt_placement, ctx.gt, ctx.layout);
        contexts.push_back(std::move(ctx));
    }

    const int n = settings.n_replicates;
    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(n));

    auto run_replicate = [&](int r) {
        // demos shared by both arms of the replicate
        std::vector<Demonstration> demos;
        if (settings.fixed_demos) {
            demos = *settings.fixed_demos;
        } else {
            demos.reserve(static_cast<std::size_t>(settings.demos_per_replicate));
            for (int d = 0; d < settings.demos_per_replicate; ++d) {
                GazeGenConfig gaze = settings.gaze;
                gaze.seed = derive_seed(settings.seed,
                                        0xD0000u + static_cast<std::uint64_t>(r) * 1000u + d);
                demos.push_back(synthesize_demonstration(train_table, settings.instruction,
                                                         train_layout, settings.noise_sd,
                                                         gaze));
            }
        }

        ReplicateOutcome outcome;
        for (const bool use_gaze : {true, false}) {
            BirlConfig birl = settings.birl;
            birl.use_gaze = use_gaze;
            // same chain seed for both arms: with prior_scale 0 the arms are
            // then sample-for-sample identical and improvement is exactly 0
            birl.seed = derive_seed(settings.seed, 0xC0000u + static_cast<std::uint64_t>(r));
            const auto chain = run_mcmc(demos, train_layout, train_grid, birl);
            const auto estimate = settings.reward_estimate == RewardEstimate::map
                                      ? map_reward(chain)
                                      : mean_reward(chain);
            const auto arm = evaluate_arm(estimate, settings.instruction, contexts, settings);
            if (use_gaze) {
                outcome.map_matches_reference_with = arm.map_matches;
                outcome.mean_evd_with = arm.mean_evd;
                outcome.mean_loss_with = arm.mean_loss;
            } else {
                outcome.map_matches_reference_without = arm.map_matches;
                outcome.mean_evd_without = arm.mean_evd;
                outcome.mean_loss_without = arm.mean_loss;
            }
        }
        outcomes[static_cast<std::size_t>(r)] = outcome;
    };

    const int jobs = std::max(1, settings.jobs);
    if (jobs == 1) {
        for (int r = 0; r < n; ++r) run_replicate(r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> workers;
        const int n_workers = std::min(jobs, n);
        workers.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) {
            workers.emplace_back([&] {
                for (;;) {
                    const int r = next.fetch_add(1);
                    if (r >= n) return;
                    run_replicate(r);
                }
            });
        }
        for (auto& w : workers) w.join();
    }

    GeneralizationResult result;
    result.replicates = std::move(outcomes);
    for (const auto& o : result.replicates) {
        result.with_gaze.mean_evd += o.mean_evd_with;
        result.with_gaze.mean_placement_loss += o.mean_loss_with;
        result.without_gaze.mean_evd += o.mean_evd_without;
        result.without_gaze.mean_placement_loss += o.mean_loss_without;
    }
    const double denom = static_cast<double>(n);
    result.with_gaze.mean_evd /= denom;
    result.with_gaze.mean_placement_loss /= denom;
    result.without_gaze.mean_evd /= denom;
    result.without_gaze.mean_placement_loss /= denom;

    result.evd_improvement =
        result.without_gaze.mean_evd > 0.0
            ? 1.0 - result.with_gaze.mean_evd / result.without_gaze.mean_evd
            : 0.0;
    result.placement_improvement =
        result.without_gaze.mean_placement_loss > 0.0
            ? 1.0 - result.with_gaze.mean_placement_loss /
                        result.without_gaze.mean_placement_loss
            : 0.0;
    return result;
}

} // namespace gazeirl

// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "gazeirl/birl_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gazeirl/errors.hpp"
#include "gazeirl/rng.hpp"
#include "gazeirl/text_util.hpp"

namespace gazeirl {

void BirlConfig::validate() const {
    if (confidence < 0.0) throw ValidationError("confidence must be non-negative");
    if (prior_scale < 0.0) throw ValidationError("prior_scale must be non-negative");
    if (chain_length <= 0) throw ValidationError("chain_length must be positive");
    if (burn_in < 0 || burn_in >= chain_length)
        throw ValidationError("burn_in must lie in [0, chain_length)");
    if (proposal_step <= 0.0) throw ValidationError("proposal_step must be positive");
}

double FeatureMatrix::cell_reward(std::size_t cell, std::span<const double> weights) const {
    const double* row = values.data() + cell * n_weights;
    double sum = 0.0;
    for (std::size_t w = 0; w < n_weights; ++w) sum += row[w] * weights[w];
    return sum;
}

FeatureMatrix build_features(const KernelLayout& layout, const ActionGrid& grid) {
    if (grid.cells.empty()) throw ValidationError("empty action grid");
    FeatureMatrix f;
    f.n_cells = grid.cells.size();
    f.n_weights = layout.n_kernels();
    f.values.resize(f.n_cells * f.n_weights);
    for (std::size_t c = 0; c < f.n_cells; ++c) {
        double* row = f.values.data() + c * f.n_weights;
        std::size_t w = 0;
        for (const auto& obj : layout.objects)
            for (std::size_t j = 0; j < kKernelsPerObject; ++j)
                row[w++] = rbf(grid.cells[c], obj.centers[j], obj.sigma2);
    }
    return f;
}

double log_likelihood_features(const FeatureMatrix& features,
                               std::span<const std::size_t> demo_cells,
                               std::span<const double> weights, double confidence) {
    if (features.n_cells == 0) throw ValidationError("empty action grid");
    if (demo_cells.empty()) throw ValidationError("no demonstrations");

    // logsumexp over all cells, ordered reduction for determinism
    double max_v = -std::numeric_limits<double>::infinity();
    std::vector<double> v(features.n_cells);
    for (std::size_t c = 0; c < features.n_cells; ++c) {
        v[c] = confidence * features.cell_reward(c, weights);
        max_v = std::max(max_v, v[c]);
    }
    double sum_exp = 0.0;
    for (std::size_t c = 0; c < features.n_cells; ++c) sum_exp += std::exp(v[c] - max_v);
    const double lse = max_v + std::log(sum_exp);

    double ll = 0.0;
    for (const std::size_t cell : demo_cells) {
        if (cell >= features.n_cells) throw ValidationError("demo cell out of range");
        ll += v[cell] - lse;
    }
    return ll;
}

double log_likelihood(std::span<const Demonstration> demos, const RewardParams& params,
                      const KernelLayout& layout, const ActionGrid& grid,
                      double confidence) {
    if (demos.empty()) throw ValidationError("no demonstrations");
    const auto features = build_features(layout, grid);
    std::vector<std::size_t> cells;
    cells.reserve(demos.size());
    for (const auto& d : demos) cells.push_back(nearest_cell(grid, d.placement));
    if (params.weights.size() != features.n_weights)
        throw ValidationError("params and layout dimensions disagree");
    return log_likelihood_features(features, cells, params.weights, confidence);
}

double gaze_log_prior(const RewardParams& params, std::span<const double> fixation_ms,
                      double lambda) {
    if (lambda < 0.0) throw ValidationError("prior scale must be non-negative");
    if (fixation_ms.size() != params.n_objects)
        throw ValidationError("fixation times do not cover every weighted object");
    for (const double f : fixation_ms)
        if (f < 0.0) throw ValidationError("negative fixation time");

    const auto w = object_weight_sums(params);
    double penalty = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (i == j) continue;
            if (w[i] < w[j] && fixation_ms[i] > fixation_ms[j]) {
                const double denom = fixation_ms[j] == 0.0 ? 1.0 : fixation_ms[j];
                penalty += fixation_ms[i] / denom;
            }
        }
    }
    return -lambda * penalty;
}

std::vector<double> aggregate_fixation_times(std::span<const Demonstration> demos,
                                             const KernelLayout& layout) {
    std::vector<double> totals(layout.n_objects(), 0.0);
    for (const auto& demo : demos) {
        if (!demo.fixation_times_ms)
            throw ValidationError("demonstration lacks fixation times");
        for (std::size_t i = 0; i < layout.n_objects(); ++i) {
            const auto it = demo.fixation_times_ms->find(layout.objects[i].object);
            if (it == demo.fixation_times_ms->end())
                throw ValidationError("fixation times missing object `" +
                                      layout.objects[i].object + "`");
            totals[i] += it->second;
        }
    }
    return totals;
}

double log_posterior(std::span<const Demonstration> demos, const RewardParams& params,
                     const KernelLayout& layout, const ActionGrid& grid,
                     const BirlConfig& config) {
    config.validate();
    const double ll = log_likelihood(demos, params, layout, grid, config.confidence);
    if (!config.use_gaze) return ll;
    const auto fixation = aggregate_fixation_times(demos, layout);
    return ll + gaze_log_prior(params, fixation, config.prior_scale);
}

namespace {

/// Folds u into [0, hi] by reflection at the endpoints.
double reflect(double u, double hi) {
    if (hi <= 0.0) return 0.0;
    u = std::fmod(u, 2.0 * hi);
    if (u < 0.0) u += 2.0 * hi;
    return u > hi ? 2.0 * hi - u : u;
}

} // namespace

WeightChain simplex_metropolis(std::size_t n_weights,
                               const std::function<double(std::span<const double>)>& log_post,
                               const BirlConfig& config) {
    config.validate();
    if (n_weights < 2) throw ValidationError("need at least 2 weights");

    Rng rng(config.seed);
    std::vector<double> w = rng.uniform_simplex(n_weights);
    double score = log_post(w);

    WeightChain chain;
    chain.samples.reserve(static_cast<std::size_t>(config.chain_length - config.burn_in));
    chain.scores.reserve(chain.samples.capacity());

    long accepted = 0;
    std::vector<double> proposal = w;
    for (int t = 0; t < config.chain_length; ++t) {
        const std::size_t i = rng.uniform_index(n_weights);
        std::size_t j = rng.uniform_index(n_weights - 1);
        if (j >= i) ++j;
        const double delta = rng.uniform(-config.proposal_step, config.proposal_step);

        proposal = w;
        const double pool = w[i] + w[j];
        const double u = reflect(w[i] + delta, pool);
        proposal[i] = u;
        proposal[j] = pool - u;

        const double proposal_score = log_post(proposal);
        const double log_u = std::log(rng.uniform());
        if (log_u < proposal_score - score) {
            w = proposal;
            score = proposal_score;
            ++accepted;
        }
        if (t >= config.burn_in) {
            chain.samples.push_back(w);
            chain.scores.push_back(score);
        }
    }
    chain.acceptance_rate = static_cast<double>(accepted) / config.chain_length;
    return chain;
}

PosteriorChain run_mcmc(std::span<const Demonstration> demos, const KernelLayout& layout,
                        const ActionGrid& grid, const BirlConfig& config) {
    config.validate();
    if (demos.empty()) throw ValidationError("no demonstrations");

    const auto features = build_features(layout, grid);
    std::vector<std::size_t> demo_cells;
    demo_cells.reserve(demos.size());
    for (const auto& d : demos) demo_cells.push_back(nearest_cell(grid, d.placement));

    std::vector<double> fixation;
    if (config.use_gaze) fixation = aggregate_fixation_times(demos, layout);

    const std::size_t n_objects = layout.n_objects();
    const auto log_post = [&](std::span<const double> weights) {
        double lp = log_likelihood_features(features, demo_cells, weights, config.confidence);
        if (config.use_gaze) {
            RewardParams p;
            p.n_objects = n_objects;
            p.weights.assign(weights.begin(), weights.end());
            lp += gaze_log_prior(p, fixation, config.prior_scale);
        }
        return lp;
    };

    const auto raw = simplex_metropolis(layout.n_kernels(), log_post, config);

    PosteriorChain chain;
    chain.acceptance_rate = raw.acceptance_rate;
    chain.samples.reserve(raw.samples.size());
    chain.scores = raw.scores;
    for (const auto& w : raw.samples) {
        RewardParams p;
        p.n_objects = n_objects;
        p.weights = w;
        chain.samples.push_back(std::move(p));
    }
    return chain;
}

RewardParams map_reward(const PosteriorChain& chain) {
    if (chain.samples.empty()) throw ValidationError("empty posterior chain");
    std::size_t best = 0;
    for (std::size_t i = 1; i < chain.scores.size(); ++i)
        if (chain.scores[i] > chain.scores[best]) best = i;
    return chain.samples[best];
}

RewardParams mean_reward(const PosteriorChain& chain) {
    if (chain.samples.empty()) throw ValidationError("empty posterior chain");
    RewardParams mean = RewardParams::zeros(chain.samples.front().n_objects);
    for (const auto& s : chain.samples)
        for (std::size_t k = 0; k < s.weights.size(); ++k) mean.weights[k] += s.weights[k];
    double sum = 0.0;
    for (double& v : mean.weights) {
        v /= static_cast<double>(chain.samples.size());
        sum += v;
    }
    if (sum > 0.0)
        for (double& v : mean.weights) v /= sum;
    return mean;
}

std::string chain_csv(const PosteriorChain& chain) {
    std::string out = "score";
    if (!chain.samples.empty())
        for (std::size_t k = 0; k < chain.samples.front().weights.size(); ++k)
            out += ",w" + std::to_string(k);
    out += '\n';
    for (std::size_t i = 0; i < chain.samples.size(); ++i) {
        out += format_double(chain.scores[i]);
        for (const double w : chain.samples[i].weights) {
            out += ',';
            out += format_double(w);
        }
        out += '\n';
    }
    return out;
}

} // namespace gazeirl

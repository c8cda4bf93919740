// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// Bayesian inverse reinforcement learning over RBF reward weights: softmax
// demonstration likelihood, fixation-time log-prior, random-walk Metropolis
// on the weight simplex, and MAP/mean reward extraction.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gazeirl/placement_sim.hpp"
#include "gazeirl/reward_model.hpp"

namespace gazeirl {

struct BirlConfig {
    double confidence = 10.0;  // softmax sharpness c; 0 = uninformed demonstrator
    double prior_scale = 1.0;  // lambda multiplying the gaze log-prior
    int chain_length = 20000;  // total Metropolis steps, burn-in included
    int burn_in = 5000;
    double proposal_step = 0.1; // half-width of the pairwise weight transfer
    std::uint64_t seed = 0;
    bool use_gaze = true;

    void validate() const;
};

/// Post-burn-in Metropolis samples over raw weight vectors with their
/// unnormalized log-posterior scores.
struct WeightChain {
    std::vector<std::vector<double>> samples;
    std::vector<double> scores;
    double acceptance_rate = 0.0;
};

/// WeightChain mapped onto k x 5 RewardParams.
struct PosteriorChain {
    std::vector<RewardParams> samples;
    std::vector<double> scores;
    double acceptance_rate = 0.0;
};

/// Kernel responses of every grid cell: features[cell * m + w] is the
/// response of kernel w at that cell, so the cell reward is the dot product
/// with the weight vector. Precomputing this makes a Metropolis step
/// independent of kernel evaluation cost.
struct FeatureMatrix {
    std::size_t n_cells = 0;
    std::size_t n_weights = 0;
    std::vector<double> values;

    double cell_reward(std::size_t cell, std::span<const double> weights) const;
};

FeatureMatrix build_features(const KernelLayout& layout, const ActionGrid& grid);

/// Softmax likelihood of the demonstrated cells: for each demo,
/// c * R(cell_demo) - logsumexp over all cells of c * R(cell), with R
/// evaluated at grid cells and the demo snapped to its nearest cell.
double log_likelihood(std::span<const Demonstration> demos, const RewardParams& params,
                      const KernelLayout& layout, const ActionGrid& grid,
                      double confidence);

/// Generic form over a precomputed feature matrix and demo cell indices.
double log_likelihood_features(const FeatureMatrix& features,
                               std::span<const std::size_t> demo_cells,
                               std::span<const double> weights, double confidence);

/// Fixation-time log-prior: -lambda * sum over ordered object pairs (i, j)
/// of f_i / f_j where the pair's weight ranking contradicts its fixation
/// ranking (w_i < w_j while f_i > f_j, strict). Always <= 0 and exactly 0
/// when the two rankings agree on every pair. A zero f_j is clamped to 1 ms.
/// fixation_ms is indexed like the object rows of params.
double gaze_log_prior(const RewardParams& params, std::span<const double> fixation_ms,
                      double lambda);

/// log_likelihood plus the gaze prior evaluated on the demos' fixation
/// times aggregated per object (uniform-prior constant 0 when use_gaze is
/// off). Throws when use_gaze is set but a demo lacks fixation times.
double log_posterior(std::span<const Demonstration> demos, const RewardParams& params,
                     const KernelLayout& layout, const ActionGrid& grid,
                     const BirlConfig& config);

/// Random-walk Metropolis over the (m-1)-simplex. The proposal transfers a
/// reflected uniform(-step, step) amount between a random ordered pair of
/// coordinates, which is symmetric, never leaves the simplex and preserves
/// the coordinate sum, so plain Metropolis acceptance applies. Samples
/// before burn_in are discarded.
WeightChain simplex_metropolis(std::size_t n_weights,
                               const std::function<double(std::span<const double>)>& log_post,
                               const BirlConfig& config);

/// Full posterior sampling for a demo set. Deterministic given config.seed.
PosteriorChain run_mcmc(std::span<const Demonstration> demos, const KernelLayout& layout,
                        const ActionGrid& grid, const BirlConfig& config);

/// Sample with the maximal score (earliest on ties). Throws on empty chains.
RewardParams map_reward(const PosteriorChain& chain);

/// Element-wise mean of the samples, renormalized onto the simplex.
RewardParams mean_reward(const PosteriorChain& chain);

/// Diagnostic export: `score,w0,w1,...` rows.
std::string chain_csv(const PosteriorChain& chain);

/// Per-object fixation times of a demo set summed per object and aligned
/// with the layout's object order. Throws on missing objects or demos
/// without fixation data.
std::vector<double> aggregate_fixation_times(std::span<const Demonstration> demos,
                                             const KernelLayout& layout);

} // namespace gazeirl

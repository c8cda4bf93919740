// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// RBF placement reward surfaces over the table: per-object kernel layouts
// (one center kernel plus four diagonal offsets), simplex-constrained
// weights, reward evaluation and ground-truth reward construction.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gazeirl/geometry.hpp"

namespace gazeirl {

/// Number of kernels per object: center, top-right, top-left, bottom-right,
/// bottom-left (in that order).
inline constexpr std::size_t kKernelsPerObject = 5;

enum class Side { left, right };

inline const char* side_name(Side s) { return s == Side::left ? "left" : "right"; }

struct TableObject {
    std::string name;
    Vec2 center; // meters
    double radius = 0.0;
};

struct TableConfig {
    Rect bounds; // meters
    std::vector<TableObject> objects;

    /// Checks centers in bounds and pairwise separation >= min_separation.
    void validate(double min_separation) const;
    std::size_t object_index(const std::string& name) const; // throws on unknown name
};

/// Kernel centers and widths for one object.
struct ObjectKernels {
    std::string object;
    Vec2 centers[kKernelsPerObject];
    double sigma2 = 0.0; // shared width, meters^2
};

struct KernelLayout {
    std::vector<ObjectKernels> objects;

    std::size_t n_objects() const { return objects.size(); }
    std::size_t n_kernels() const { return objects.size() * kKernelsPerObject; }
};

/// k x 5 RBF weight matrix, row per object, stored row-major.
/// Valid parameters are non-negative and sum to 1 (simplex constraint);
/// `reward` itself evaluates any raw weight matrix.
struct RewardParams {
    std::size_t n_objects = 0;
    std::vector<double> weights; // n_objects * kKernelsPerObject

    double& at(std::size_t object, std::size_t kernel) {
        return weights[object * kKernelsPerObject + kernel];
    }
    double at(std::size_t object, std::size_t kernel) const {
        return weights[object * kKernelsPerObject + kernel];
    }

    static RewardParams zeros(std::size_t n_objects);
    bool on_simplex(double tol = 1e-9) const;
    void validate() const; // throws unless non-negative and on the simplex
};

/// exp(-||x - c||^2 / sigma2). Throws on sigma2 <= 0.
double rbf(Vec2 x, Vec2 c, double sigma2);

/// Builds the 5-kernel layout per object: the four diagonal kernels sit at
/// distance offset_scale * radius from the object center on the +/-45
/// degree diagonals, and sigma = width_scale * radius.
KernelLayout build_layout(const TableConfig& table, double offset_scale,
                          double width_scale);

/// Weighted kernel sum: sum_ij w_ij * rbf(x, c_ij, sigma_i^2).
double reward(Vec2 x, const RewardParams& params, const KernelLayout& layout);

/// Analytic gradient of `reward` with respect to x.
Vec2 reward_gradient(Vec2 x, const RewardParams& params, const KernelLayout& layout);

/// Backtracking ascent along the normalized reward gradient, projected into
/// the bounds. The initial step is 0.05 * sigma_min and halves until the
/// reward improves; the walk stops once the accepted step drops below
/// step_tol or no halving improves.
Vec2 ascend_reward(Vec2 start, const RewardParams& params, const KernelLayout& layout,
                   const Rect& bounds, double step_tol = 1e-7, int max_iters = 4000);

/// Per-object sums of the five kernel weights (the quantity ranked by the
/// gaze prior).
std::vector<double> object_weight_sums(const RewardParams& params);

/// Ground-truth reward for `place relative to <object>, <side>`: the two
/// same-side diagonal kernels of the reference object get weight 0.5 each.
RewardParams ground_truth_reward(const std::string& reference_object, Side side,
                                 const KernelLayout& layout);

} // namespace gazeirl

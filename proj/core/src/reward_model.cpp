// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "gazeirl/reward_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gazeirl/errors.hpp"

namespace gazeirl {

void TableConfig::validate(double min_separation) const {
    for (const auto& o : objects) {
        if (!bounds.contains(o.center))
            throw ValidationError("object `" + o.name + "` center outside table bounds");
        if (o.radius <= 0.0)
            throw ValidationError("object `" + o.name + "` radius must be positive");
    }
    for (std::size_t i = 0; i < objects.size(); ++i)
        for (std::size_t j = i + 1; j < objects.size(); ++j)
            if (distance(objects[i].center, objects[j].center) < min_separation)
                throw ValidationError("objects `" + objects[i].name + "` and `" +
                                      objects[j].name + "` closer than the minimum separation");
}

std::size_t TableConfig::object_index(const std::string& name) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
        if (objects[i].name == name) return i;
    throw ValidationError("unknown object `" + name + "`");
}

RewardParams RewardParams::zeros(std::size_t n_objects) {
    RewardParams p;
    p.n_objects = n_objects;
    p.weights.assign(n_objects * kKernelsPerObject, 0.0);
    return p;
}

bool RewardParams::on_simplex(double tol) const {
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) return false;
        sum += w;
    }
    return std::abs(sum - 1.0) <= tol;
}

void RewardParams::validate() const {
    if (weights.size() != n_objects * kKernelsPerObject)
        throw ValidationError("weight matrix size does not match object count");
    if (!on_simplex())
        throw ValidationError("weights must be non-negative and sum to 1");
}

double rbf(Vec2 x, Vec2 c, double sigma2) {
    if (sigma2 <= 0.0) throw ValidationError("rbf width sigma2 must be positive");
    return std::exp(-(x - c).norm2() / sigma2);
}

KernelLayout build_layout(const TableConfig& table, double offset_scale,
                          double width_scale) {
    if (offset_scale < 0.0) throw ValidationError("offset_scale must be non-negative");
    if (width_scale <= 0.0) throw ValidationError("width_scale must be positive");

    KernelLayout layout;
    layout.objects.reserve(table.objects.size());
    for (const auto& obj : table.objects) {
        ObjectKernels k;
        k.object = obj.name;
        const double d = offset_scale * obj.radius;      // diagonal offset distance
        const double a = d / std::sqrt(2.0);             // per-axis component
        k.centers[0] = obj.center;                       // center
        k.centers[1] = obj.center + Vec2{a, a};          // top-right
        k.centers[2] = obj.center + Vec2{-a, a};         // top-left
        k.centers[3] = obj.center + Vec2{a, -a};         // bottom-right
        k.centers[4] = obj.center + Vec2{-a, -a};        // bottom-left
        const double sigma = width_scale * obj.radius;
        k.sigma2 = sigma * sigma;
        layout.objects.push_back(std::move(k));
    }
    return layout;
}

double reward(Vec2 x, const RewardParams& params, const KernelLayout& layout) {
    if (params.n_objects != layout.n_objects() ||
        params.weights.size() != layout.n_kernels())
        throw ValidationError("params and layout dimensions disagree");
    double sum = 0.0;
    for (std::size_t i = 0; i < layout.objects.size(); ++i) {
        const auto& k = layout.objects[i];
        for (std::size_t j = 0; j < kKernelsPerObject; ++j)
            sum += params.at(i, j) * rbf(x, k.centers[j], k.sigma2);
    }
    return sum;
}

Vec2 reward_gradient(Vec2 x, const RewardParams& params, const KernelLayout& layout) {
    if (params.n_objects != layout.n_objects() ||
        params.weights.size() != layout.n_kernels())
        throw ValidationError("params and layout dimensions disagree");
    Vec2 grad;
    for (std::size_t i = 0; i < layout.objects.size(); ++i) {
        const auto& k = layout.objects[i];
        for (std::size_t j = 0; j < kKernelsPerObject; ++j) {
            const double w = params.at(i, j);
            if (w == 0.0) continue;
            const double phi = rbf(x, k.centers[j], k.sigma2);
            const double scale = -2.0 * w * phi / k.sigma2;
            grad = grad + scale * (x - k.centers[j]);
        }
    }
    return grad;
}

Vec2 ascend_reward(Vec2 start, const RewardParams& params, const KernelLayout& layout,
                   const Rect& bounds, double step_tol, int max_iters) {
    double sigma_min = std::numeric_limits<double>::max();
    for (const auto& k : layout.objects) sigma_min = std::min(sigma_min, std::sqrt(k.sigma2));
    const double eta = 0.05 * sigma_min;

    Vec2 x = bounds.clamp(start);
    double rx = reward(x, params, layout);
    for (int iter = 0; iter < max_iters; ++iter) {
        const Vec2 g = reward_gradient(x, params, layout);
        const double gn = g.norm();
        if (gn == 0.0) break;
        const Vec2 dir = (1.0 / gn) * g;
        double s = eta;
        Vec2 next = x;
        double rn = rx;
        bool improved = false;
        while (s >= step_tol / 4.0) {
            const Vec2 cand = bounds.clamp(x + s * dir);
            const double rc = reward(cand, params, layout);
            if (rc > rn) {
                next = cand;
                rn = rc;
                improved = true;
                break;
            }
            s /= 2.0;
        }
        if (!improved) break;
        const double moved = distance(next, x);
        x = next;
        rx = rn;
        if (moved < step_tol) break;
    }
    return x;
}

std::vector<double> object_weight_sums(const RewardParams& params) {
    std::vector<double> sums(params.n_objects, 0.0);
    for (std::size_t i = 0; i < params.n_objects; ++i)
        for (std::size_t j = 0; j < kKernelsPerObject; ++j) sums[i] += params.at(i, j);
    return sums;
}

RewardParams ground_truth_reward(const std::string& reference_object, Side side,
                                 const KernelLayout& layout) {
    std::size_t ref = layout.n_objects();
    for (std::size_t i = 0; i < layout.n_objects(); ++i)
        if (layout.objects[i].object == reference_object) ref = i;
    if (ref == layout.n_objects())
        throw ValidationError("unknown reference object `" + reference_object + "`");

    auto params = RewardParams::zeros(layout.n_objects());
    if (side == Side::right) {
        params.at(ref, 1) = 0.5; // top-right
        params.at(ref, 3) = 0.5; // bottom-right
    } else {
        params.at(ref, 2) = 0.5; // top-left
        params.at(ref, 4) = 0.5; // bottom-left
    }
    return params;
}

} // namespace gazeirl

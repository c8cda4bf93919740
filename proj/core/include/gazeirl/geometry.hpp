// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>

namespace gazeirl {

/// 2-D point/vector. Units depend on context (pixels for gaze space,
/// meters for table space).
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend Vec2 operator*(Vec2 v, double s) { return s * v; }
    friend bool operator==(const Vec2& a, const Vec2& b) = default;

    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Axis-aligned rectangle, min corner inclusive.
struct Rect {
    Vec2 min;
    Vec2 max;

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    Vec2 center() const { return {(min.x + max.x) / 2.0, (min.y + max.y) / 2.0}; }
    double diagonal() const { return std::sqrt(width() * width() + height() * height()); }

    bool contains(Vec2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }

    Vec2 clamp(Vec2 p) const {
        return {std::clamp(p.x, min.x, max.x), std::clamp(p.y, min.y, max.y)};
    }

    /// Rectangle shrunk by `margin` on every side.
    Rect inset(double margin) const {
        return {{min.x + margin, min.y + margin}, {max.x - margin, max.y - margin}};
    }
};

} // namespace gazeirl

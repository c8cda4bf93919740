// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "gazeirl/errors.hpp"
#include "gazeirl/reward_model.hpp"
#include "gazeirl/rng.hpp"

using namespace gazeirl;

namespace {

TableConfig two_object_table() {
    TableConfig table;
    table.bounds = {{0.0, 0.0}, {1.0, 0.6}};
    table.objects = {{"bowl", {0.35, 0.3}, 0.08}, {"plate", {0.65, 0.3}, 0.08}};
    return table;
}

RewardParams random_simplex_params(Rng& rng, std::size_t n_objects) {
    RewardParams p;
    p.n_objects = n_objects;
    p.weights = rng.uniform_simplex(n_objects * kKernelsPerObject);
    return p;
}

} // namespace

TEST_CASE("rbf analytic values") {
    CHECK(rbf({0.3, 0.4}, {0.3, 0.4}, 0.5) == 1.0);
    const double sigma = 0.2;
    CHECK(rbf({sigma, 0.0}, {0.0, 0.0}, sigma * sigma) ==
          doctest::Approx(0.3678794411714423).epsilon(1e-12));
    CHECK(rbf({2.0 * sigma, 0.0}, {0.0, 0.0}, sigma * sigma) ==
          doctest::Approx(0.01831563888873418).epsilon(1e-12));
    CHECK_THROWS_AS(rbf({0, 0}, {0, 0}, 0.0), ValidationError);
    CHECK_THROWS_AS(rbf({0, 0}, {0, 0}, -1.0), ValidationError);
}

TEST_CASE("build_layout puts diagonal kernels at offset_scale * radius") {
    TableConfig table;
    table.bounds = {{-1.0, -1.0}, {1.0, 1.0}};
    table.objects = {{"obj", {0.0, 0.0}, 0.1}};
    const auto layout = build_layout(table, 1.5, 1.0);
    REQUIRE(layout.n_objects() == 1);
    const auto& k = layout.objects[0];
    const double a = 0.15 / std::sqrt(2.0);
    CHECK(k.centers[0] == Vec2{0.0, 0.0});
    CHECK(k.centers[1].x == doctest::Approx(a).epsilon(1e-15));
    CHECK(k.centers[1].y == doctest::Approx(a).epsilon(1e-15));
    CHECK(k.centers[2].x == doctest::Approx(-a).epsilon(1e-15));
    CHECK(k.centers[2].y == doctest::Approx(a).epsilon(1e-15));
    CHECK(k.centers[3].x == doctest::Approx(a).epsilon(1e-15));
    CHECK(k.centers[3].y == doctest::Approx(-a).epsilon(1e-15));
    CHECK(k.centers[4].x == doctest::Approx(-a).epsilon(1e-15));
    CHECK(k.centers[4].y == doctest::Approx(-a).epsilon(1e-15));
    // every diagonal kernel sits at the same distance from the center
    for (int j = 1; j < 5; ++j)
        CHECK(distance(k.centers[j], k.centers[0]) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(k.sigma2 == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("build_layout: two objects give 10 kernels; zero offset collapses") {
    const auto table = two_object_table();
    CHECK(build_layout(table, 1.5, 1.0).n_kernels() == 10);
    const auto collapsed = build_layout(table, 0.0, 1.0);
    for (const auto& obj : collapsed.objects)
        for (int j = 1; j < 5; ++j) CHECK(obj.centers[j] == obj.centers[0]);
}

TEST_CASE("reward: all weight on one kernel peaks at 1 there") {
    const auto table = two_object_table();
    const auto layout = build_layout(table, 1.5, 1.0);
    auto params = RewardParams::zeros(2);
    params.at(0, 1) = 1.0;
    CHECK(reward(layout.objects[0].centers[1], params, layout) == 1.0);
}

TEST_CASE("reward: uniform weights decay to < 1e-9 six sigmas away") {
    TableConfig table;
    table.bounds = {{0.0, 0.0}, {10.0, 10.0}};
    table.objects = {{"obj", {1.0, 1.0}, 0.1}};
    const auto layout = build_layout(table, 1.5, 1.0);
    auto params = RewardParams::zeros(1);
    for (int j = 0; j < 5; ++j) params.at(0, j) = 0.2;
    CHECK(reward({9.0, 9.0}, params, layout) < 1e-9);
}

TEST_CASE("reward equals a term-by-term summation oracle") {
    const auto table = two_object_table();
    const auto layout = build_layout(table, 1.5, 1.0);
    const auto gt = ground_truth_reward("bowl", Side::right, layout);
    const Vec2 x = 0.5 * (layout.objects[0].centers[1] + layout.objects[0].centers[3]);

    double expected = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < kKernelsPerObject; ++j)
            expected += gt.at(i, j) * std::exp(-(x - layout.objects[i].centers[j]).norm2() /
                                               layout.objects[i].sigma2);
    CHECK(reward(x, gt, layout) == doctest::Approx(expected).epsilon(1e-15));

    Rng rng(12);
    for (int round = 0; round < 50; ++round) {
        const auto params = random_simplex_params(rng, 2);
        const Vec2 p{rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.6)};
        double oracle = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < kKernelsPerObject; ++j)
                oracle += params.at(i, j) *
                          std::exp(-(p - layout.objects[i].centers[j]).norm2() /
                                   layout.objects[i].sigma2);
        CHECK(reward(p, params, layout) == doctest::Approx(oracle).epsilon(1e-13));
    }
}

TEST_CASE("reward dimension mismatch is an error") {
    const auto layout = build_layout(two_object_table(), 1.5, 1.0);
    const auto params = RewardParams::zeros(1);
    CHECK_THROWS_AS(reward({0, 0}, params, layout), ValidationError);
}

TEST_CASE("reward is linear in the weights to 1e-12") {
    const auto layout = build_layout(two_object_table(), 1.5, 1.0);
    Rng rng(3);
    for (int round = 0; round < 50; ++round) {
        const auto p = random_simplex_params(rng, 2);
        const auto q = random_simplex_params(rng, 2);
        const double a = rng.uniform(-2.0, 2.0);
        const double b = rng.uniform(-2.0, 2.0);
        RewardParams mix = RewardParams::zeros(2);
        for (std::size_t k = 0; k < mix.weights.size(); ++k)
            mix.weights[k] = a * p.weights[k] + b * q.weights[k];
        const Vec2 x{rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.6)};
        const double lhs = reward(x, mix, layout);
        const double rhs = a * reward(x, p, layout) + b * reward(x, q, layout);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("reward of simplex params stays within [0, 1]") {
    const auto layout = build_layout(two_object_table(), 1.5, 1.0);
    Rng rng(9);
    for (int round = 0; round < 200; ++round) {
        const auto params = random_simplex_params(rng, 2);
        const Vec2 x{rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.0)};
        const double r = reward(x, params, layout);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0 + 1e-12);
    }
}

TEST_CASE("reward is invariant under simultaneous translation") {
    Rng rng(21);
    for (int round = 0; round < 30; ++round) {
        auto table = two_object_table();
        const auto layout = build_layout(table, 1.5, 1.0);
        const auto params = random_simplex_params(rng, 2);
        const Vec2 shift{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};

        auto shifted_table = table;
        shifted_table.bounds.min = table.bounds.min + shift;
        shifted_table.bounds.max = table.bounds.max + shift;
        for (auto& o : shifted_table.objects) o.center = o.center + shift;
        const auto shifted_layout = build_layout(shifted_table, 1.5, 1.0);

        const Vec2 x{rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.6)};
        CHECK(reward(x, params, layout) ==
              doctest::Approx(reward(x + shift, params, shifted_layout)).epsilon(1e-12));
    }
}

TEST_CASE("reward_gradient matches central differences") {
    const auto layout = build_layout(two_object_table(), 1.5, 1.0);
    Rng rng(33);
    for (int round = 0; round < 40; ++round) {
        const auto params = random_simplex_params(rng, 2);
        const Vec2 x{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.5)};
        const double h = 1e-6;
        const double dx = (reward({x.x + h, x.y}, params, layout) -
                           reward({x.x - h, x.y}, params, layout)) /
                          (2.0 * h);
        const double dy = (reward({x.x, x.y + h}, params, layout) -
                           reward({x.x, x.y - h}, params, layout)) /
                          (2.0 * h);
        const Vec2 g = reward_gradient(x, params, layout);
        CHECK(g.x == doctest::Approx(dx).epsilon(1e-5));
        CHECK(g.y == doctest::Approx(dy).epsilon(1e-5));
    }
}

TEST_CASE("object_weight_sums equals a row-sum oracle") {
    SUBCASE("uniform row sums to 1") {
        auto params = RewardParams::zeros(2);
        for (int j = 0; j < 5; ++j) params.at(0, j) = 0.2;
        const auto sums = object_weight_sums(params);
        CHECK(sums[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(sums[1] == 0.0);
    }
    SUBCASE("random simplex params") {
        Rng rng(1);
        for (int round = 0; round < 30; ++round) {
            const auto params = random_simplex_params(rng, 3);
            const auto sums = object_weight_sums(params);
            for (std::size_t i = 0; i < 3; ++i) {
                double expected = 0.0;
                for (std::size_t j = 0; j < kKernelsPerObject; ++j)
                    expected += params.at(i, j);
                CHECK(sums[i] == doctest::Approx(expected).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("ground_truth_reward places 0.5 on the two same-side kernels") {
    const auto layout = build_layout(two_object_table(), 1.5, 1.0);
    SUBCASE("bowl, right") {
        const auto gt = ground_truth_reward("bowl", Side::right, layout);
        CHECK(gt.at(0, 1) == 0.5); // top-right
        CHECK(gt.at(0, 3) == 0.5); // bottom-right
        double rest = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < kKernelsPerObject; ++j)
                if (!(i == 0 && (j == 1 || j == 3))) rest += gt.at(i, j);
        CHECK(rest == 0.0);
        CHECK(gt.on_simplex());
    }
    SUBCASE("plate, left mirrors the rule") {
        const auto gt = ground_truth_reward("plate", Side::left, layout);
        CHECK(gt.at(1, 2) == 0.5); // top-left
        CHECK(gt.at(1, 4) == 0.5); // bottom-left
        CHECK(gt.on_simplex());
    }
    SUBCASE("unknown object") {
        CHECK_THROWS_AS(ground_truth_reward("ladle", Side::left, layout), ValidationError);
    }
}

TEST_CASE("TableConfig validation") {
    auto table = two_object_table();
    CHECK_NOTHROW(table.validate(0.25));
    CHECK_THROWS_AS(table.validate(0.5), ValidationError); // separation too small
    table.objects[0].center = {2.0, 0.3};
    CHECK_THROWS_AS(table.validate(0.25), ValidationError); // out of bounds
    CHECK(two_object_table().object_index("plate") == 1);
    CHECK_THROWS_AS(two_object_table().object_index("ladle"), ValidationError);
}

TEST_CASE("ascend_reward climbs to an isolated kernel center") {
    TableConfig table;
    table.bounds = {{0.0, 0.0}, {1.0, 0.6}};
    table.objects = {{"obj", {0.6, 0.3}, 0.08}};
    const auto layout = build_layout(table, 0.0, 1.0); // all kernels at the center
    auto params = RewardParams::zeros(1);
    params.at(0, 0) = 1.0;
    const Vec2 top = ascend_reward({0.1, 0.1}, params, layout, table.bounds);
    CHECK(distance(top, {0.6, 0.3}) < 1e-4);
}

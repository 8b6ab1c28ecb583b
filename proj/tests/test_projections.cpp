#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "epochgd/errors.hpp"
#include "epochgd/projections.hpp"

using namespace epochgd;

TEST_CASE("whole-space projection is the identity") {
    const Vec y{1.5, -2.0, 0.0};
    CHECK(project_whole_space(y) == y);
}

TEST_CASE("ball projection scales outside points onto the boundary") {
    const Vec p = project_ball({2.0, 2.0}, {{0.0, 0.0}, 1.0});
    const double want = 1.0 / std::sqrt(2.0);
    CHECK(p[0] == doctest::Approx(want).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(want).epsilon(1e-15));

    const Vec inside{0.25, -0.25};
    CHECK(project_ball(inside, {{0.0, 0.0}, 1.0}) == inside);

    const Vec shifted = project_ball({4.0, 2.0}, {{1.0, 2.0}, 2.0});
    CHECK(shifted[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(shifted[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("a radius-zero ball projects everything to its center") {
    CHECK(project_ball({5.0, 5.0}, {{1.0, 2.0}, 0.0}) == Vec{1.0, 2.0});
}

TEST_CASE("ball projection rejects mismatched dimensions") {
    CHECK_THROWS_AS(project_ball({1.0, 2.0, 3.0}, {{0.0, 0.0}, 1.0}),
                    DimensionMismatch);
}

TEST_CASE("box projection clamps componentwise") {
    const Vec p = project_box({-1.0, 0.5, 9.0}, {0.0, 0.0, 0.0}, {1.0, 1.0, 2.0});
    CHECK(p == Vec{0.0, 0.5, 2.0});
}

TEST_CASE("invalid boxes name the offending component") {
    try {
        project_box({0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0});
        FAIL("expected InvalidBox");
    } catch (const InvalidBox& e) {
        CHECK(std::string(e.what()).find("component 1") != std::string::npos);
    }
    CHECK_THROWS_AS(make_box_domain({0.0, 1.0}, {1.0, 0.0}), InvalidBox);
}

TEST_CASE("simplex projection matches the sorted-threshold solution") {
    const Vec p = project_simplex({0.9, -0.3, 0.1});
    CHECK(p[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(p[1] == 0.0);
    CHECK(p[2] == doctest::Approx(0.1).epsilon(1e-15));

    const Vec q = project_simplex({0.0, 0.0});
    CHECK(q[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(q[1] == doctest::Approx(0.5).epsilon(1e-15));

    const Vec vertex = project_simplex({10.0, 0.0, 0.0});
    CHECK(vertex == Vec{1.0, 0.0, 0.0});
}

TEST_CASE("simplex output is feasible for adversarial inputs") {
    const Vec p = project_simplex({-5.0, -5.0, -4.9999});
    double sum = 0.0;
    for (double v : p) {
        CHECK(v >= 0.0);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("intersection projection finds the corner-ball tangent point") {
    const Domain box = make_box_domain({0.0, 0.0}, {1.0, 1.0});
    const BallSpec ball{{1.0, 1.0}, 0.5};
    const Vec p = project_intersection_ball(box, ball, {0.0, 0.0}, 1e-12, 100000);
    const double want = 1.0 - 0.5 / std::sqrt(2.0);
    CHECK(p[0] == doctest::Approx(want).epsilon(1e-9));
    CHECK(p[1] == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("intersection projection short-circuits on a whole-space inner set") {
    const Domain all = make_whole_space(2);
    const BallSpec ball{{0.0, 0.0}, 1.0};
    const Vec y{2.0, 2.0};
    CHECK(project_intersection_ball(all, ball, y) == project_ball(y, ball));
}

TEST_CASE("feasible points are fixed points of the intersection projection") {
    const Domain box = make_box_domain({0.0, 0.0}, {1.0, 1.0});
    const BallSpec ball{{0.0, 0.0}, 1.0};
    const Vec y{0.3, 0.3};
    const Vec p = project_intersection_ball(box, ball, y, 1e-12);
    CHECK(dist(p, y) <= 1e-10);
}

TEST_CASE("intersection projection satisfies the variational inequality") {
    const Domain box = make_box_domain({-0.5, 0.0}, {1.2, 0.8});
    const BallSpec ball{{0.6, 0.6}, 0.5};
    const Vec y{-1.9, 2.1};
    const Vec p = project_intersection_ball(box, ball, y, 1e-12, 1000000);

    Rng rng(17);
    Vec z(2), zp(2);
    const Domain dom = make_intersection_ball_domain(box, ball);
    for (int i = 0; i < 500; ++i) {
        dom.sample_into(rng, z);
        double ip = 0.0;
        for (int j = 0; j < 2; ++j)
            ip += (y[static_cast<std::size_t>(j)] - p[static_cast<std::size_t>(j)]) *
                  (z[static_cast<std::size_t>(j)] - p[static_cast<std::size_t>(j)]);
        CHECK(ip <= 1e-9);
    }
}

TEST_CASE("disjoint box and ball fail with NoConvergence") {
    const Domain box = make_box_domain({0.0, 0.0}, {1.0, 1.0});
    const BallSpec ball{{3.0, 0.0}, 0.5};
    CHECK_THROWS_AS(project_intersection_ball(box, ball, {0.0, 0.0}, 1e-10, 200),
                    NoConvergence);
}

TEST_CASE("nested intersection domains stay consistent") {
    const Domain box = make_box_domain({-1.0, -1.0}, {1.0, 1.0});
    const Domain inner = make_intersection_ball_domain(box, {{0.5, 0.0}, 1.0});
    const Domain outer = make_intersection_ball_domain(inner, {{0.0, 0.5}, 1.0});

    const Vec feasible{0.2, 0.2};
    CHECK(dist(outer.project(feasible), feasible) <= 1e-8);

    const Vec p = outer.project({-3.0, 3.0});
    CHECK(box.contains(p, 1e-7));
    CHECK(dist(p, Vec{0.5, 0.0}) <= 1.0 + 1e-7);
    CHECK(dist(p, Vec{0.0, 0.5}) <= 1.0 + 1e-7);
}

TEST_CASE("domain factories validate their inputs") {
    CHECK_THROWS_AS(make_whole_space(0), ZeroDimension);
    CHECK_THROWS_AS(make_simplex_domain(0), ZeroDimension);
    CHECK_THROWS_AS(make_ball_domain({{}, 1.0}), ZeroDimension);
    CHECK_THROWS_AS(make_ball_domain({{0.0}, -1.0}), NonPositiveConstant);
}

TEST_CASE("domain samplers stay inside their sets") {
    Rng rng(29);
    const Domain ball = make_ball_domain({{0.5, -0.5}, 0.7});
    const Domain box = make_box_domain({0.0, 1.0}, {2.0, 3.0});
    const Domain simplex = make_simplex_domain(4);
    for (int i = 0; i < 1000; ++i) {
        CHECK(ball.contains(ball.sample(rng), 1e-12));
        CHECK(box.contains(box.sample(rng), 1e-12));
        CHECK(simplex.contains(simplex.sample(rng), 1e-12));
    }
}

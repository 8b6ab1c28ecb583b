#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "epochgd/errors.hpp"
#include "epochgd/problems.hpp"

using namespace epochgd;

namespace {

Dataset parse(const std::string& text) {
    std::istringstream in(text);
    return parse_libsvm(in);
}

}  // namespace

TEST_CASE("quadratic config is validated") {
    QuadraticConfig q;
    q.dim = 2;
    CHECK_NOTHROW(make_quadratic(q));

    q.a = 0.0;
    CHECK_THROWS_AS(make_quadratic(q), NonPositiveConstant);
    q.a = 1.0;

    q.dim = 0;
    CHECK_THROWS_AS(make_quadratic(q), ZeroDimension);
    q.dim = 2;

    q.domain_radius = -1.0;
    CHECK_THROWS_AS(make_quadratic(q), NonPositiveConstant);
    q.domain_radius = 1.0;

    q.noise_sigma = 0.1;  // sigma without a cap
    CHECK_THROWS_AS(make_quadratic(q), ConfigError);
    q.noise_cap = 0.3;
    CHECK_NOTHROW(make_quadratic(q));

    q.x_star = {2.0, 0.0};  // outside the unit ball
    CHECK_THROWS_AS(make_quadratic(q), OptimumOutsideDomain);
    q.x_star = {0.5, 0.0};

    q.M = 1.0;  // below the floor a (2R)^2 = 4
    CHECK_THROWS_AS(make_quadratic(q), ConfigError);
    q.M = 0.0;

    q.G = 1.0;  // below the floor 2a(2R) + cap = 4.3
    CHECK_THROWS_AS(make_quadratic(q), ConfigError);
}

TEST_CASE("quadratic floors fill in M and G and plant the optimum") {
    QuadraticConfig q;
    q.dim = 2;
    q.a = 2.0;
    q.domain_radius = 0.5;
    q.noise_sigma = 0.1;
    q.noise_cap = 0.3;
    q.x_star = {0.2, -0.1};
    const Problem p = make_quadratic(q);
    CHECK(p.spec.M == 2.0);           // a (2R)^2
    CHECK(p.spec.G == 4.3);           // 2a(2R) + cap
    CHECK(p.spec.lambda_hk == 2.0);   // a
    REQUIRE(p.optimum.has_value());
    CHECK(p.optimum->point == q.x_star);
    CHECK(p.optimum->value == 0.0);
    CHECK(p.value(q.x_star) == 0.0);
    CHECK(p.value(Vec{0.2, 0.4}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("noiseless stochastic oracle equals the deterministic one") {
    QuadraticConfig q;
    q.dim = 3;
    q.a = 1.5;
    q.x_star = {0.1, 0.2, -0.3};
    const Problem p = make_quadratic(q);
    Rng rng(77);
    const Vec x{0.4, -0.4, 0.2};
    const Vec g = p.subgradient(x);
    Vec gs;
    p.stochastic_subgradient_into(x, rng, gs);
    CHECK(g == gs);
    CHECK(g[0] == doctest::Approx(2.0 * 1.5 * 0.3).epsilon(1e-15));
}

TEST_CASE("capped noise never exceeds the declared G") {
    QuadraticConfig q;
    q.dim = 4;
    q.a = 1.0;
    q.noise_sigma = 0.5;
    q.noise_cap = 0.9;
    const Problem p = make_quadratic(q);
    Rng rng(5);
    Vec x(4), g;
    for (int i = 0; i < 5000; ++i) {
        p.domain.sample_into(rng, x);
        p.stochastic_subgradient_into(x, rng, g);
        CHECK(norm(g) <= p.spec.G + 1e-12);
    }
}

TEST_CASE("libsvm parser handles labels, comments and sparse indices") {
    const Dataset ds = parse(
        "# header comment\n"
        "+1 1:0.5 3:-2.0\n"
        "\n"
        "-1 2:1.0   # trailing comment\n"
        "1 1:1.0\n"
        "0 4:0.25\n");
    CHECK(ds.m == 4);
    CHECK(ds.dim == 4);
    REQUIRE(ds.rows.size() == 4);
    CHECK(ds.labels == std::vector<int>{1, -1, 1, -1});
    CHECK(ds.rows[0].index == std::vector<int>{0, 2});
    CHECK(ds.rows[0].value == std::vector<double>{0.5, -2.0});
    CHECK(ds.rows[1].index == std::vector<int>{1});
    CHECK(ds.rows[3].index == std::vector<int>{3});
}

TEST_CASE("libsvm parser reports malformed lines with their line number") {
    try {
        parse("+1 1:0.5\nabc 1:1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS(parse("+1 0:1\n"), ParseError);       // 1-based indices
    CHECK_THROWS_AS(parse("+1 2:1 2:2\n"), ParseError);   // duplicate index
    CHECK_THROWS_AS(parse("+1 3:1 2:2\n"), ParseError);   // decreasing index
    CHECK_THROWS_AS(parse("+1 1:1.5.2\n"), ParseError);   // trailing junk
    CHECK_THROWS_AS(parse("+1 1:\n"), ParseError);        // missing value
    CHECK_THROWS_AS(parse("+1 :2\n"), ParseError);        // missing index
    CHECK_THROWS_AS(parse("1.5 1:1\n"), NonBinaryLabel);
    try {
        parse("+1 1:1\n2 1:1\n");
        FAIL("expected NonBinaryLabel");
    } catch (const NonBinaryLabel& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("load_libsvm round-trips through a file") {
    const std::string path = "test_problems_tmp.libsvm";
    {
        std::ofstream out(path);
        out << "+1 1:2.0\n-1 2:3.0\n";
    }
    const Dataset ds = load_libsvm(path);
    CHECK(ds.m == 2);
    CHECK(ds.dim == 2);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_libsvm("does_not_exist.libsvm"), Error);
}

TEST_CASE("toy dataset has the documented shape") {
    const Dataset toy = make_toy_separable();
    CHECK(toy.m == 4);
    CHECK(toy.dim == 2);
    CHECK(toy.labels == std::vector<int>{1, 1, -1, -1});
}

TEST_CASE("svm constants follow from the dataset and radius") {
    const Problem p = make_svm(make_toy_separable(), 1.0, 2.0);
    CHECK(p.spec.dim == 2);
    CHECK(p.spec.lambda_hk == 0.5);       // lambda_reg / 2
    CHECK(p.spec.G == 3.0);               // lambda_reg R_w + R_x, R_x = 1
    CHECK(p.spec.M == 5.0);               // (lambda/2) R_w^2 + 1 + R_x R_w
    CHECK(!p.optimum.has_value());

    CHECK_THROWS_AS(make_svm(Dataset{}, 1.0, 2.0), EmptyDataset);
    CHECK_THROWS_AS(make_svm(make_toy_separable(), 0.0, 2.0), NonPositiveConstant);
    CHECK_THROWS_AS(make_svm(make_toy_separable(), 1.0, 0.0), NonPositiveConstant);
}

TEST_CASE("toy svm objective and subgradient match the closed form") {
    const Problem p = make_svm(make_toy_separable(), 1.0, 2.0);
    // all four margins at w* = (0.5, 0.5) equal 0.5, so every hinge is active
    const Vec w_star{0.5, 0.5};
    CHECK(p.value(w_star) == doctest::Approx(0.75).epsilon(1e-15));
    const Vec g = p.subgradient(w_star);
    CHECK(g[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-15));
    // at the origin every hinge is active with margin 0
    CHECK(p.value(Vec{0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("stochastic svm oracle averages to the batch subgradient") {
    const Problem p = make_svm(make_toy_separable(), 1.0, 2.0);
    const Vec w{0.1, -0.2};
    const Vec g = p.subgradient(w);
    Rng rng(123);
    Vec sum(2, 0.0), gs;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        p.stochastic_subgradient_into(w, rng, gs);
        CHECK(norm(gs) <= p.spec.G + 1e-12);
        sum[0] += gs[0];
        sum[1] += gs[1];
    }
    CHECK(sum[0] / n == doctest::Approx(g[0]).epsilon(0.02));
    CHECK(sum[1] / n == doctest::Approx(g[1]).epsilon(0.02));
}

TEST_CASE("reference solver recovers the toy optimum with a valid certificate") {
    Problem p = make_svm(make_toy_separable(), 1.0, 2.0);
    const ReferenceResult ref = reference_optimum(p, 1e-4);
    CHECK(ref.certified_gap <= 1e-4);
    CHECK(ref.f == doctest::Approx(0.75).epsilon(1e-4));
    CHECK(dist(ref.x, Vec{0.5, 0.5}) <= 0.05);
    REQUIRE(p.optimum.has_value());
    CHECK(p.optimum->value == ref.f);

    // a recorded optimum is not overwritten
    const ReferenceResult again = reference_optimum(p, 1e-4);
    CHECK(p.optimum->value == ref.f);
    CHECK(again.f == ref.f);
}

TEST_CASE("solve_reference improves monotonically in budget on the toy svm") {
    const Problem p = make_svm(make_toy_separable(), 1.0, 2.0);
    const ReferenceResult small = solve_reference(p, 20000);
    const ReferenceResult big = solve_reference(p, 400000);
    CHECK(small.f >= 0.75 - 1e-9);
    CHECK(big.f >= 0.75 - 1e-9);
    CHECK(big.f - 0.75 <= small.f - 0.75 + 1e-9);
    CHECK(big.certified_gap < small.certified_gap);
}

TEST_CASE("uncertifiable tolerances are rejected") {
    Problem p = make_svm(make_toy_separable(), 1.0, 2.0);
    try {
        reference_optimum(p, 1e-9, 1000);
        FAIL("expected ToleranceNotCertified");
    } catch (const ToleranceNotCertified& e) {
        CHECK(e.requested == 1e-9);
        CHECK(e.certified > 1e-9);
    }
    CHECK(!p.optimum.has_value());  // nothing installed on failure
    CHECK_THROWS_AS(reference_optimum(p, 0.0), NonPositiveConstant);
}

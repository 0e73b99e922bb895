#include "bregopt/analysis.hpp"
#include "bregopt/problems.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace bregopt;
namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("catalog") {
    auto names = catalog_names<double>();
    REQUIRE(names.size() == 4);
    CHECK(std::find(names.begin(), names.end(), "ex1-1d-k1") != names.end());

    auto ex1 = catalog<double>("ex1-1d-k1");
    CHECK(ex1.kappa == 1.0);
    CHECK(ex1.domain_lower == -1.0);
    CHECK(ex1.domain_upper == 1.0);
    CHECK(catalog<double>("ex2-1d-k12").kappa == 0.5);
    CHECK(catalog<double>("ex3-1d-k13").kappa == doctest::Approx(1.0 / 3.0));
    CHECK(catalog<double>("ex4-2d-k1").dimension == 2);

    try {
        catalog<double>("nope");
        FAIL("expected a throw");
    } catch (const std::invalid_argument& err) {
        const std::string msg = err.what();
        for (const auto& n : names) CHECK(msg.find(n) != std::string::npos);
    }
}

TEST_CASE("catalog laplacians match the stencil to second order") {
    for (const auto& name : catalog_names<double>()) {
        auto spec = catalog<double>(name);
        const Index n = spec.dimension == 1 ? 401 : 51;
        Grid<double> g(spec.dimension, spec.domain_lower, spec.domain_upper, n);
        PoissonOperator<double> op(g);
        GridFunction<double> p =
            spec.dimension == 1
                ? GridFunction<double>::sample(g, [&](double x) { return spec.p1(x); })
                : GridFunction<double>::sample(
                      g, [&](double x, double y) { return spec.p2(x, y); });
        auto w = op.laplacian(p).values();
        double worst = 0.0;
        for (Index i = 0; i < g.node_count(); ++i) {
            if (g.is_boundary(i)) continue;
            // ex2's curvature jumps at the flat zero; skip the stencils
            // straddling it, where the second difference is only O(1) accurate
            if (name == "ex2-1d-k12" && std::abs(g.coordinate(i) - 0.5) <= 2.0 * g.spacing())
                continue;
            double expect;
            if (spec.dimension == 1) {
                expect = -spec.lap1(g.coordinate(i));
            } else {
                expect = -spec.lap2(g.coordinate(i % n), g.coordinate(i / n));
            }
            worst = std::max(worst, std::abs(w(i) - expect));
        }
        const double h2 = g.spacing() * g.spacing();
        CHECK(worst < 400.0 * h2);
    }
}

TEST_CASE("bang-bang construction, 1d") {
    auto spec = catalog<double>("ex1-1d-k1");
    Grid<double> g(1, -1.0, 1.0, 101);
    BoxBounds<double> bounds(-1.0, 1.0);
    auto problem = build_bangbang(spec, bounds, g);

    SUBCASE("sign rule: +1 where sin(pi x) < 0, -1 where > 0") {
        for (Index i = 0; i < g.node_count(); ++i) {
            const double x = g.coordinate(i);
            if (x < -1e-9 && i > 0)
                CHECK(problem.exact_control[i] == 1.0);
            else if (x > 1e-9 && i < g.node_count() - 1)
                CHECK(problem.exact_control[i] == -1.0);
        }
        // the midpoint node x = 0 carries the bound midpoint
        CHECK(problem.exact_adjoint[50] == 0.0);
        CHECK(problem.exact_control[50] == 0.0);
    }

    SUBCASE("stored adjoint vanishes exactly on the boundary") {
        CHECK(problem.exact_adjoint[0] == 0.0);
        CHECK(problem.exact_adjoint[100] == 0.0);
    }

    SUBCASE("recomputed discrete adjoint reproduces the nodal one") {
        GridFunction<double> misfit(
            g, problem.op.forward(problem.exact_control).values() - problem.target.values());
        auto recomputed = problem.op.adjoint(misfit).values();
        CHECK((recomputed - problem.exact_adjoint.values()).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("variational inequality against random feasible controls") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (int t = 0; t < 50; ++t) {
            VectorX<double> v(g.node_count());
            for (Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
            GridFunction<double> diff(g, v - problem.exact_control.values());
            CHECK(inner_l2(problem.exact_adjoint, diff) >= -1e-10);
        }
    }

    SUBCASE("control attains a bound wherever the adjoint is visibly nonzero") {
        for (Index i = 0; i < g.node_count(); ++i) {
            if (std::abs(problem.exact_adjoint[i]) > 1e-14)
                CHECK(std::abs(problem.exact_control[i]) == 1.0);
        }
    }
}

TEST_CASE("bang-bang construction, 2d") {
    auto spec = catalog<double>("ex4-2d-k1");
    Grid<double> g(2, 0.0, 1.0, 24);
    auto problem = build_bangbang(spec, BoxBounds<double>(-1.0, 1.0), g);
    GridFunction<double> misfit(
        g, problem.op.forward(problem.exact_control).values() - problem.target.values());
    auto recomputed = problem.op.adjoint(misfit).values();
    CHECK((recomputed - problem.exact_adjoint.values()).cwiseAbs().maxCoeff() < 1e-10);
    for (Index i = 0; i < g.node_count(); ++i)
        if (g.is_boundary(i)) {
            CHECK(problem.exact_adjoint[i] == 0.0);
            CHECK(problem.target[i] == 0.0);
        }
}

TEST_CASE("post-build checks hold for every catalog entry on a fine grid") {
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (const auto& name : catalog_names<double>()) {
        auto spec = catalog<double>(name);
        const Index n = spec.dimension == 1 ? 1001 : 48;
        Grid<double> g(spec.dimension, spec.domain_lower, spec.domain_upper, n);
        auto problem = build_bangbang(spec, BoxBounds<double>(-1.0, 1.0), g);
        INFO("example ", name);

        GridFunction<double> misfit(
            g, problem.op.forward(problem.exact_control).values() - problem.target.values());
        auto recomputed = problem.op.adjoint(misfit).values();
        CHECK((recomputed - problem.exact_adjoint.values()).cwiseAbs().maxCoeff() < 1e-10);

        for (int t = 0; t < 10; ++t) {
            VectorX<double> v(g.node_count());
            for (Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
            GridFunction<double> diff(g, v - problem.exact_control.values());
            CHECK(inner_l2(problem.exact_adjoint, diff) >= -1e-10);
        }

        for (Index i = 0; i < g.node_count(); ++i)
            if (std::abs(problem.exact_adjoint[i]) > 1e-14)
                CHECK(std::abs(problem.exact_control[i]) == 1.0);
    }
}

TEST_CASE("build rejects bad adjoints") {
    Grid<double> g(1, 0.0, 1.0, 51);
    BoxBounds<double> bounds(-1.0, 1.0);

    AdjointSpec<double> nonvanishing;
    nonvanishing.name = "bad";
    nonvanishing.dimension = 1;
    nonvanishing.domain_lower = 0.0;
    nonvanishing.domain_upper = 1.0;
    nonvanishing.p1 = [](double x) { return std::cos(pi * x); };
    CHECK_THROWS_AS(build_bangbang(nonvanishing, bounds, g), std::invalid_argument);

    AdjointSpec<double> zero;
    zero.name = "zero";
    zero.dimension = 1;
    zero.domain_lower = 0.0;
    zero.domain_upper = 1.0;
    zero.p1 = [](double) { return 0.0; };
    CHECK_THROWS_AS(build_bangbang(zero, bounds, g), std::invalid_argument);

    auto two_d = catalog<double>("ex4-2d-k1");
    CHECK_THROWS_AS(build_bangbang(two_d, bounds, g), std::invalid_argument);
}

TEST_CASE("measure condition") {
    SUBCASE("linear adjoint: measure of {0 < x < eps} is eps") {
        AdjointSpec<double> lin;
        lin.name = "linear";
        lin.dimension = 1;
        lin.domain_lower = 0.0;
        lin.domain_upper = 1.0;
        lin.p1 = [](double x) { return x; };
        auto rows = measure_condition(lin, 100000, {0.1});
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].second == doctest::Approx(0.1).epsilon(1e-3));
    }

    SUBCASE("sine adjoint matches the arcsine expansion (4/pi) eps") {
        auto spec = catalog<double>("ex1-1d-k1");
        auto rows = measure_condition(spec, 4'000'000LL, {1e-2, 1e-3});
        CHECK(rows[0].second == doctest::Approx(4.0 / pi * 1e-2).epsilon(0.02));
        CHECK(rows[1].second == doctest::Approx(4.0 / pi * 1e-3).epsilon(0.02));
    }

    SUBCASE("ex3 log-log slope near 1/3") {
        auto spec = catalog<double>("ex3-1d-k13");
        auto rows = measure_condition(spec, 8'000'000LL, {1e-2, 1e-3, 1e-4, 1e-5});
        const double slope = fit_exponent(rows).slope;
        CHECK(slope > 0.28);
        CHECK(slope < 0.38);
    }

    SUBCASE("precondition violations") {
        auto spec = catalog<double>("ex1-1d-k1");
        CHECK_THROWS_AS(measure_condition(spec, 1000, {0.1}), std::invalid_argument);
        CHECK_THROWS_AS(measure_condition(spec, 200000, {0.1, 0.2}), std::invalid_argument);
        CHECK_THROWS_AS(measure_condition(spec, 200000, {0.1, -0.2}), std::invalid_argument);
    }
}

#pragma once

#include "bregopt/analysis.hpp"
#include "bregopt/bregman.hpp"
#include "bregopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace bregopt::checks {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0;  // worst observed defect / fitted value
    double threshold = 0;
    std::string detail;
};

inline std::string format_results(const std::vector<CheckResult>& results) {
    std::ostringstream out;
    for (const auto& r : results) {
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": measured " << r.measured
            << " vs threshold " << r.threshold;
        if (!r.detail.empty()) out << " (" << r.detail << ")";
        out << '\n';
    }
    return out.str();
}

inline bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.passed; });
}

template <typename Scalar>
GridFunction<Scalar> random_function(const Grid<Scalar>& grid, std::mt19937_64& rng,
                                     Scalar lo = -1, Scalar hi = 1) {
    std::uniform_real_distribution<Scalar> dist(lo, hi);
    VectorX<Scalar> v(grid.node_count());
    for (Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
    return GridFunction<Scalar>(grid, std::move(v));
}

/// max |(Fu, r) - (u, Ar)| / (||u|| ||r||) over random pairs. Takes the
/// forward/adjoint actions as callables so tests can inject a broken pair.
template <typename Scalar, typename Fwd, typename Adj>
CheckResult adjoint_symmetry_check(const Grid<Scalar>& grid, Fwd&& forward, Adj&& adjoint,
                                   int pairs, Scalar tol, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Scalar worst = 0;
    for (int t = 0; t < pairs; ++t) {
        auto u = random_function(grid, rng);
        auto r = random_function(grid, rng);
        const Scalar lhs = inner_l2(forward(u), r);
        const Scalar rhs = inner_l2(u, adjoint(r));
        const Scalar scale = norm_l2(u) * norm_l2(r);
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    std::ostringstream detail;
    detail << grid.dimension() << "D n=" << grid.nodes_per_axis() << ", " << pairs << " pairs";
    return {"adjoint symmetry", worst <= tol, static_cast<double>(worst),
            static_cast<double>(tol), detail.str()};
}

template <typename Scalar>
CheckResult projection_check(const Grid<Scalar>& grid, const BoxBounds<Scalar>& bounds,
                             int pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Scalar worst = 0;
    for (int t = 0; t < pairs; ++t) {
        auto f = random_function(grid, rng, Scalar(-3), Scalar(3));
        auto g = random_function(grid, rng, Scalar(-3), Scalar(3));
        auto pf = project_box(f, bounds);
        auto pg = project_box(g, bounds);
        // idempotence
        worst = std::max(worst,
                         (project_box(pf, bounds).values() - pf.values()).cwiseAbs().maxCoeff());
        // nonexpansiveness in the discrete L2 norm
        GridFunction<Scalar> dp(grid, pf.values() - pg.values());
        GridFunction<Scalar> d(grid, f.values() - g.values());
        worst = std::max(worst, norm_l2(dp) - norm_l2(d));
    }
    return {"projection idempotent+nonexpansive", worst <= Scalar(0), static_cast<double>(worst),
            0.0, ""};
}

/// Streamed run invariants: feasibility, subgradient identity
/// ||u_k - P(lambda_k)||_inf, residual monotonicity, Bregman nonnegativity
/// against random feasible points.
template <typename Scalar>
struct RunInvariants {
    Scalar subgradient_defect = 0;
    Scalar monotonicity_violation = 0;         // max residual increase
    Scalar feasibility_violation = 0;
    Scalar bregman_negativity = 0;             // most negative distance seen
    Scalar prev_residual = std::numeric_limits<Scalar>::infinity();

    void observe(const IterationState<Scalar>& s, const BoxBounds<Scalar>& bounds,
                 std::mt19937_64& rng, int probes = 2) {
        const auto& u = s.control.values();
        feasibility_violation =
            std::max({feasibility_violation, (bounds.lower - u.array()).maxCoeff(),
                      (u.array() - bounds.upper).maxCoeff()});
        auto proj = project_box(s.multiplier, bounds);
        subgradient_defect =
            std::max(subgradient_defect, (u - proj.values()).cwiseAbs().maxCoeff());
        monotonicity_violation = std::max(monotonicity_violation, s.residual - prev_residual);
        prev_residual = s.residual;
        for (int t = 0; t < probes; ++t) {
            auto probe = random_function(s.control.grid(), rng, bounds.lower, bounds.upper);
            bregman_negativity =
                std::min(bregman_negativity, bregman_distance(probe, s.control, s.multiplier, bounds));
        }
    }
};

template <typename Scalar>
std::vector<CheckResult> run_invariant_checks(const TestProblem<Scalar>& problem, Index iterations,
                                              const SolverSettings<Scalar>& settings,
                                              std::uint64_t seed, const std::string& label) {
    std::mt19937_64 rng(seed);
    RunInvariants<Scalar> inv;
    run_bregman(problem, AlphaSchedule<Scalar>::constant(1), iterations, settings,
                [&](const IterationState<Scalar>& s) { inv.observe(s, problem.bounds, rng); });
    std::vector<CheckResult> out;
    out.push_back({"feasibility (" + label + ")", inv.feasibility_violation <= Scalar(0),
                   static_cast<double>(inv.feasibility_violation), 0.0, ""});
    out.push_back({"subgradient identity (" + label + ")",
                   inv.subgradient_defect <= settings.fixed_point_tol,
                   static_cast<double>(inv.subgradient_defect),
                   static_cast<double>(settings.fixed_point_tol), ""});
    out.push_back({"residual monotonicity (" + label + ")",
                   inv.monotonicity_violation <= Scalar(1e-12),
                   static_cast<double>(inv.monotonicity_violation), 1e-12, ""});
    out.push_back({"bregman distance nonnegative (" + label + ")",
                   inv.bregman_negativity >= Scalar(-1e-12),
                   static_cast<double>(inv.bregman_negativity), -1e-12, ""});
    return out;
}

/// Long-run projected-gradient oracle for the subproblem, independent of the
/// active-set path: u <- P(u - grad/L) with L = alpha + ||S||^2.
template <typename Scalar>
GridFunction<Scalar> projected_gradient_oracle(const PoissonOperator<Scalar>& op,
                                               const GridFunction<Scalar>& z,
                                               const BoxBounds<Scalar>& bounds, Scalar alpha,
                                               const GridFunction<Scalar>& lambda_prev,
                                               long iterations) {
    const Grid<Scalar>& grid = op.grid();
    // ||S||^2 via power iteration on S*S (deterministic start)
    VectorX<Scalar> v = VectorX<Scalar>::Ones(grid.node_count());
    Scalar s_norm_sq = 0;
    for (int it = 0; it < 200; ++it) {
        GridFunction<Scalar> g(grid, v);
        VectorX<Scalar> w = op.adjoint(op.forward(g)).values();
        s_norm_sq = w.norm() / v.norm();
        v = w / w.norm();
    }
    const Scalar L = alpha + s_norm_sq;
    VectorX<Scalar> u = VectorX<Scalar>::Zero(grid.node_count());
    const VectorX<Scalar>& lam = lambda_prev.values();
    for (long it = 0; it < iterations; ++it) {
        GridFunction<Scalar> g(grid, u);
        VectorX<Scalar> grad =
            op.adjoint(GridFunction<Scalar>(grid, op.forward(g).values() - z.values())).values() +
            alpha * (u - lam);
        u = (u - grad / L).cwiseMax(bounds.lower).cwiseMin(bounds.upper);
    }
    return GridFunction<Scalar>(grid, std::move(u));
}

/// Active-set subproblem vs projected-gradient oracle on small random
/// instances (12 interior nodes, bounds [-1,1], random z, lambda_prev = 0).
template <typename Scalar>
CheckResult subproblem_oracle_check(int instances, Scalar tol, long pg_iterations,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Grid<Scalar> grid(1, Scalar(0), Scalar(1), 14);
    PoissonOperator<Scalar> op(grid);
    BoxBounds<Scalar> bounds(Scalar(-1), Scalar(1));
    Scalar worst = 0;
    for (int t = 0; t < instances; ++t) {
        auto z = random_function(grid, rng, Scalar(-300), Scalar(300));
        auto lambda = GridFunction<Scalar>::zero(grid);
        auto start = GridFunction<Scalar>::zero(grid);
        auto res = solve_subproblem(op, z, bounds, Scalar(1), lambda, start);
        auto oracle = projected_gradient_oracle(op, z, bounds, Scalar(1), lambda, pg_iterations);
        worst = std::max(worst, (res.control.values() - oracle.values()).cwiseAbs().maxCoeff());
    }
    std::ostringstream detail;
    detail << instances << " instances, " << pg_iterations << " PG iterations";
    return {"subproblem vs projected-gradient oracle", worst <= tol, static_cast<double>(worst),
            static_cast<double>(tol), detail.str()};
}

/// Midpoint-sampled measure exponent of each catalog spec vs its declared
/// kappa. Uses the eps window {1e-2,...,1e-5}; in 2D the thin-band
/// resolution limits the smallest usable eps, so the partition is fixed at
/// 16384 cells per axis.
template <typename Scalar>
std::vector<CheckResult> measure_exponent_checks(Scalar tol = Scalar(0.05)) {
    std::vector<CheckResult> out;
    const std::vector<Scalar> eps{Scalar(1e-2), Scalar(1e-3), Scalar(1e-4), Scalar(1e-5)};
    for (const auto& name : catalog_names<Scalar>()) {
        auto spec = catalog<Scalar>(name);
        const long long samples = spec.dimension == 1 ? 8'000'000LL : 16384LL * 16384LL;
        auto pairs = measure_condition(spec, samples, eps);
        const Scalar slope = fit_exponent(pairs).slope;
        std::ostringstream detail;
        detail << "fit " << slope << " vs declared " << spec.kappa;
        out.push_back({"measure exponent (" + name + ")", std::abs(slope - spec.kappa) <= tol,
                       static_cast<double>(std::abs(slope - spec.kappa)),
                       static_cast<double>(tol), detail.str()});
    }
    return out;
}

/// kappa_numeric returns kappa exactly on the synthetic history e2 = k^-kappa.
template <typename Scalar>
CheckResult synthetic_kappa_check() {
    Scalar worst = 0;
    for (Scalar kappa : {Scalar(1), Scalar(0.5), Scalar(1) / Scalar(3)}) {
        std::vector<Scalar> e2(1025);
        e2[0] = Scalar(2);
        for (Index k = 1; k <= 1024; ++k)
            e2[static_cast<std::size_t>(k)] = std::pow(static_cast<Scalar>(k), -kappa);
        for (Index k = 2; k <= 1024; k += 2)
            worst = std::max(worst, std::abs(*kappa_numeric(e2, k) - kappa));
    }
    return {"synthetic-history kappa exactness", worst <= Scalar(1e-13),
            static_cast<double>(worst), 1e-13, ""};
}

} // namespace bregopt::checks

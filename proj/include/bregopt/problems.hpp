#pragma once

#include "bregopt/grid.hpp"
#include "bregopt/poisson.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bregopt {

/// Closed-form prescribed adjoint state with its Laplacian and the expected
/// convergence exponent kappa of the measure condition.
template <typename Scalar = double>
struct AdjointSpec {
    std::string name;
    int dimension = 1;
    Scalar domain_lower = 0;
    Scalar domain_upper = 1;
    Scalar kappa = 1;
    std::function<Scalar(Scalar)> p1;                  // 1D p(x)
    std::function<Scalar(Scalar)> lap1;                // 1D Lap p(x)
    std::function<Scalar(Scalar, Scalar)> p2;          // 2D p(x,y)
    std::function<Scalar(Scalar, Scalar)> lap2;        // 2D Lap p(x,y)

    Scalar evaluate(Scalar x) const { return p1(x); }
    Scalar evaluate(Scalar x, Scalar y) const { return p2(x, y); }
};

/// Complete bang-bang test problem with known exact discrete solution.
template <typename Scalar = double>
struct TestProblem {
    std::string name;
    Grid<Scalar> grid;
    PoissonOperator<Scalar> op;
    GridFunction<Scalar> target;         // z
    BoxBounds<Scalar> bounds;
    GridFunction<Scalar> exact_control;  // u-dagger
    GridFunction<Scalar> exact_adjoint;  // p-dagger (nodal, zero on boundary)
    Scalar kappa;
};

/// Construct a bang-bang problem from a prescribed adjoint so that the nodal
/// interpolant of u-dagger is the exact solution of the discrete problem.
///
/// The sign of p-dagger forces the control to the opposite bound
/// ((p,u-u') >= 0 for all feasible u); at nodes where the stored adjoint is
/// exactly zero the control takes the bound midpoint. The target uses the
/// discrete-consistent source w_h = A_h p so that S w_h = p exactly and the
/// recomputed discrete adjoint S*(S u' - z) matches p to solver roundoff.
template <typename Scalar>
TestProblem<Scalar> build_bangbang(const AdjointSpec<Scalar>& spec,
                                   const BoxBounds<Scalar>& bounds,
                                   const Grid<Scalar>& grid) {
    using std::abs;
    if (grid.dimension() != spec.dimension)
        throw std::invalid_argument("build_bangbang: grid dimension does not match spec");

    VectorX<Scalar> p(grid.node_count());
    Scalar max_abs = 0;
    if (grid.dimension() == 1) {
        for (Index i = 0; i < grid.node_count(); ++i) {
            p(i) = spec.p1(grid.coordinate(i));
            max_abs = std::max(max_abs, abs(p(i)));
        }
    } else {
        const Index n = grid.nodes_per_axis();
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) {
                p(j * n + i) = spec.p2(grid.coordinate(i), grid.coordinate(j));
                max_abs = std::max(max_abs, abs(p(j * n + i)));
            }
    }
    if (max_abs == Scalar(0))
        throw std::invalid_argument("build_bangbang: adjoint is identically zero");

    // p must vanish on the boundary; pin the stored values to exact zeros.
    const Scalar boundary_tol = Scalar(1e-12) * max_abs;
    for (Index i = 0; i < grid.node_count(); ++i) {
        if (!grid.is_boundary(i)) continue;
        if (abs(p(i)) > boundary_tol)
            throw std::invalid_argument(
                "build_bangbang: adjoint does not vanish on the domain boundary");
        p(i) = Scalar(0);
    }

    VectorX<Scalar> ud(grid.node_count());
    const Scalar mid = bounds.midpoint();
    for (Index i = 0; i < grid.node_count(); ++i)
        ud(i) = p(i) > Scalar(0) ? bounds.lower : (p(i) < Scalar(0) ? bounds.upper : mid);

    PoissonOperator<Scalar> op(grid);
    GridFunction<Scalar> padj(grid, std::move(p));
    GridFunction<Scalar> control(grid, std::move(ud));
    GridFunction<Scalar> w = op.laplacian(padj);
    GridFunction<Scalar> z(grid, op.forward(control).values() - w.values());

    return TestProblem<Scalar>{spec.name, grid,  op, std::move(z), bounds,
                               std::move(control), std::move(padj), spec.kappa};
}

namespace detail {
template <typename Scalar>
std::vector<AdjointSpec<Scalar>> make_catalog() {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    std::vector<AdjointSpec<Scalar>> cat;
    {
        AdjointSpec<Scalar> s;
        s.name = "ex1-1d-k1";
        s.dimension = 1;
        s.domain_lower = -1;
        s.domain_upper = 1;
        s.kappa = 1;
        s.p1 = [pi](Scalar x) { return std::sin(pi * x); };
        s.lap1 = [pi](Scalar x) { return -pi * pi * std::sin(pi * x); };
        cat.push_back(std::move(s));
    }
    {
        AdjointSpec<Scalar> s;
        s.name = "ex2-1d-k12";
        s.dimension = 1;
        s.domain_lower = 0;
        s.domain_upper = 1;
        s.kappa = Scalar(0.5);
        // sign-changing flat zero at 1/2: |p| ~ d^2 gives the kappa = 1/2
        // measure while the sign flip keeps the control bang-bang across it.
        // A same-sign double zero (x(1-x)(2x-1)^2) has the same measure but
        // its one-signed error bump feeds back through the multiplier and
        // destroys the kappa_k plateau.
        s.p1 = [](Scalar x) {
            const Scalar d = 2 * x - 1;
            return x * (1 - x) * d * std::abs(d);
        };
        // second derivative jumps at the flat zero; valid elsewhere
        s.lap1 = [](Scalar x) {
            const Scalar d = 2 * x - 1;
            const Scalar sgn = d > 0 ? Scalar(1) : (d < 0 ? Scalar(-1) : Scalar(0));
            return -10 * d * std::abs(d) + 8 * (x - x * x) * sgn;
        };
        cat.push_back(std::move(s));
    }
    {
        AdjointSpec<Scalar> s;
        s.name = "ex3-1d-k13";
        s.dimension = 1;
        s.domain_lower = 0;
        s.domain_upper = 1;
        s.kappa = Scalar(1) / Scalar(3);
        s.p1 = [](Scalar x) {
            const Scalar d = 3 * x - 1;
            return x * (1 - x) * d * d * d;
        };
        s.lap1 = [](Scalar x) { return ((-540 * x + 648) * x - 216) * x + 20; };
        cat.push_back(std::move(s));
    }
    {
        AdjointSpec<Scalar> s;
        s.name = "ex4-2d-k1";
        s.dimension = 2;
        s.domain_lower = 0;
        s.domain_upper = 1;
        s.kappa = 1;
        s.p2 = [pi](Scalar x, Scalar y) { return std::sin(2 * pi * x) * std::sin(2 * pi * y); };
        s.lap2 = [pi](Scalar x, Scalar y) {
            return -8 * pi * pi * std::sin(2 * pi * x) * std::sin(2 * pi * y);
        };
        cat.push_back(std::move(s));
    }
    return cat;
}
} // namespace detail

template <typename Scalar = double>
std::vector<std::string> catalog_names() {
    std::vector<std::string> names;
    for (const auto& s : detail::make_catalog<Scalar>()) names.push_back(s.name);
    return names;
}

/// Look up a catalog example by name; unknown names list the available ones.
template <typename Scalar = double>
AdjointSpec<Scalar> catalog(const std::string& name) {
    auto cat = detail::make_catalog<Scalar>();
    for (auto& s : cat)
        if (s.name == name) return s;
    std::ostringstream msg;
    msg << "unknown example '" << name << "'; available:";
    for (const auto& s : cat) msg << ' ' << s.name;
    throw std::invalid_argument(msg.str());
}

/// Midpoint-sampled Lebesgue measure of {0 < |p| < eps} for each eps.
///
/// sample_count is the total number of midpoint cells (per-axis count is
/// ceil(sqrt(...)) in 2D). The eps list must be positive and decreasing.
template <typename Scalar>
std::vector<std::pair<Scalar, Scalar>> measure_condition(const AdjointSpec<Scalar>& spec,
                                                         long long sample_count,
                                                         const std::vector<Scalar>& eps_list) {
    if (sample_count < 100000)
        throw std::invalid_argument("measure_condition: need at least 1e5 samples");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > Scalar(0)))
            throw std::invalid_argument("measure_condition: eps values must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("measure_condition: eps values must be decreasing");
    }
    const Scalar len = spec.domain_upper - spec.domain_lower;
    std::vector<long long> hits(eps_list.size(), 0);
    Scalar cell;
    if (spec.dimension == 1) {
        const long long m = sample_count;
        cell = len / static_cast<Scalar>(m);
        for (long long i = 0; i < m; ++i) {
            const Scalar x = spec.domain_lower + (static_cast<Scalar>(i) + Scalar(0.5)) * cell;
            const Scalar v = std::abs(spec.p1(x));
            if (v <= Scalar(0)) continue;
            for (std::size_t e = 0; e < eps_list.size() && v < eps_list[e]; ++e) ++hits[e];
        }
    } else {
        const long long m = static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(sample_count))));
        const Scalar dx = len / static_cast<Scalar>(m);
        cell = dx * dx;
        std::vector<Scalar> sx(static_cast<std::size_t>(m));
        for (long long i = 0; i < m; ++i)
            sx[static_cast<std::size_t>(i)] =
                spec.domain_lower + (static_cast<Scalar>(i) + Scalar(0.5)) * dx;
        for (long long j = 0; j < m; ++j)
            for (long long i = 0; i < m; ++i) {
                const Scalar v = std::abs(spec.p2(sx[static_cast<std::size_t>(i)],
                                                  sx[static_cast<std::size_t>(j)]));
                if (v <= Scalar(0)) continue;
                for (std::size_t e = 0; e < eps_list.size() && v < eps_list[e]; ++e) ++hits[e];
            }
    }
    std::vector<std::pair<Scalar, Scalar>> out;
    out.reserve(eps_list.size());
    for (std::size_t e = 0; e < eps_list.size(); ++e)
        out.emplace_back(eps_list[e], static_cast<Scalar>(hits[e]) * cell);
    return out;
}

} // namespace bregopt

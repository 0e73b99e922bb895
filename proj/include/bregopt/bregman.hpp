#pragma once

#include "bregopt/grid.hpp"
#include "bregopt/poisson.hpp"
#include "bregopt/problems.hpp"

#include <Eigen/Core>

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bregopt {

/// Thrown by bregman_distance when an argument violates the box constraints
/// (the indicator part of J is +infinity there).
class InfeasiblePointError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SubproblemError : public SolverError {
public:
    SubproblemError(const std::string& what, double defect_)
        : SolverError(what), defect(defect_) {}
    double defect;
};

/// Positive bounded sequence (alpha_k), k >= 1: constant or explicit finite.
template <typename Scalar = double>
class AlphaSchedule {
public:
    static AlphaSchedule constant(Scalar value) {
        if (!(value > Scalar(0)))
            throw std::invalid_argument("AlphaSchedule: alpha must be positive");
        AlphaSchedule s;
        s.constant_ = value;
        return s;
    }

    static AlphaSchedule sequence(std::vector<Scalar> values) {
        if (values.empty())
            throw std::invalid_argument("AlphaSchedule: empty sequence");
        for (Scalar v : values)
            if (!(v > Scalar(0)))
                throw std::invalid_argument("AlphaSchedule: alpha must be positive");
        AlphaSchedule s;
        s.values_ = std::move(values);
        return s;
    }

    Scalar alpha(Index k) const {
        if (k < 1) throw std::invalid_argument("AlphaSchedule: k must be >= 1");
        if (!values_.empty()) {
            if (k > static_cast<Index>(values_.size()))
                throw std::invalid_argument("AlphaSchedule: k beyond end of finite sequence");
            return values_[static_cast<std::size_t>(k - 1)];
        }
        return constant_;
    }

private:
    AlphaSchedule() = default;
    Scalar constant_ = 1;
    std::vector<Scalar> values_;
};

template <typename Scalar = double>
struct SolverSettings {
    Scalar fixed_point_tol = Scalar(1e-10);  // sup-norm defect of u = P(q(u))
    int max_newton_steps = 50;               // active-set iterations per subproblem
    Scalar cg_rel_tol = Scalar(1e-12);       // inner CG relative residual
    int cg_max_iters = 1000;

    void validate() const {
        if (!(fixed_point_tol > Scalar(0)) || !(cg_rel_tol > Scalar(0)))
            throw std::invalid_argument("SolverSettings: tolerances must be positive");
        if (max_newton_steps < 1 || cg_max_iters < 1)
            throw std::invalid_argument("SolverSettings: iteration caps must be >= 1");
    }
};

/// Per-iteration record of a Bregman run.
template <typename Scalar = double>
struct IterationState {
    Index k = 0;
    GridFunction<Scalar> control;     // u_k, feasible by construction
    GridFunction<Scalar> multiplier;  // lambda_k in dJ(u_k)
    Scalar residual = 0;              // 1/2 ||S u_k - z||^2
    std::optional<Scalar> error_sq;   // ||u_k - u'||^2 when u' is known
    int newton_steps = 0;
};

/// Bregman distance D^lambda(u, v) = 1/2||u||^2 - 1/2||v||^2 - (u - v, lambda)
/// for J = 1/2||.||^2 + indicator of the box. Nonnegative when lambda is a
/// subgradient of J at v.
template <typename Scalar>
Scalar bregman_distance(const GridFunction<Scalar>& u, const GridFunction<Scalar>& v,
                        const GridFunction<Scalar>& lambda, const BoxBounds<Scalar>& bounds) {
    if (!is_feasible(u, bounds))
        throw InfeasiblePointError("bregman_distance: first argument violates the box bounds");
    if (!is_feasible(v, bounds))
        throw InfeasiblePointError("bregman_distance: second argument violates the box bounds");
    GridFunction<Scalar> diff(u.grid(), u.values() - v.values());
    return Scalar(0.5) * inner_l2(u, u) - Scalar(0.5) * inner_l2(v, v) - inner_l2(diff, lambda);
}

template <typename Scalar>
struct SubproblemResult {
    GridFunction<Scalar> control;
    int steps = 0;
    Scalar defect = 0;
};

/// Solve the regularized subproblem
///   min 1/2 ||S u - z||^2 + alpha * D^{lambda_prev}(u, u_prev)  over the box
/// by the primal-dual active-set method (semi-smooth Newton on the fixed
/// point u = P(lambda_prev + S*(z - S u)/alpha)). The reduced SPD system on
/// the inactive set is solved by matrix-free conjugate gradients; each
/// operator application costs two Poisson solves.
template <typename Scalar>
SubproblemResult<Scalar> solve_subproblem(const PoissonOperator<Scalar>& op,
                                          const GridFunction<Scalar>& z,
                                          const BoxBounds<Scalar>& bounds, Scalar alpha,
                                          const GridFunction<Scalar>& lambda_prev,
                                          const GridFunction<Scalar>& u_start,
                                          const SolverSettings<Scalar>& settings = {}) {
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
    using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;
    settings.validate();
    if (!(alpha > Scalar(0))) throw std::invalid_argument("solve_subproblem: alpha must be positive");

    const Grid<Scalar>& grid = op.grid();
    const Index N = grid.node_count();
    const Array lam = lambda_prev.values().array();
    const Array wz = op.adjoint(z).values().array();  // S* z

    auto ss_apply = [&op, &grid](const Array& v) {  // S* S v, two solves
        GridFunction<Scalar> g(grid, v.matrix());
        return op.adjoint(op.forward(g)).values().array().eval();
    };

    Array u = u_start.values().array().max(bounds.lower).min(bounds.upper);
    Array q = lam + (wz - ss_apply(u)) / alpha;
    Scalar defect = (u - q.max(bounds.lower).min(bounds.upper)).abs().maxCoeff();

    int steps = 0;
    BoolArray prev_up, prev_lo;
    bool have_prev = false;
    while (defect > settings.fixed_point_tol) {
        if (steps >= settings.max_newton_steps) {
            std::ostringstream msg;
            msg << "subproblem: active-set iteration limit (" << settings.max_newton_steps
                << ") exceeded, defect " << defect;
            throw SubproblemError(msg.str(), static_cast<double>(defect));
        }
        BoolArray up = q > bounds.upper;
        BoolArray lo = q < bounds.lower;
        if (have_prev && (up == prev_up).all() && (lo == prev_lo).all()) {
            std::ostringstream msg;
            msg << "subproblem: active sets repeated with defect " << defect
                << " above tolerance";
            throw SubproblemError(msg.str(), static_cast<double>(defect));
        }
        prev_up = up;
        prev_lo = lo;
        have_prev = true;

        Array mask = (!(up || lo)).template cast<Scalar>();
        Array u_fixed = up.select(Array::Constant(N, bounds.upper),
                                  lo.select(Array::Constant(N, bounds.lower),
                                            Array::Zero(N)));
        // (I + S*S/alpha)|_inactive w = (lambda + S*z/alpha - S*S u_fixed/alpha)|_inactive
        Array rhs = mask * (lam + wz / alpha - ss_apply(u_fixed) / alpha);
        auto T = [&](const Array& v) { return (v + mask * ss_apply(mask * v) / alpha).eval(); };

        // On the inactive set the fixed-point defect of the assembled iterate
        // equals the CG residual, so a sup-norm stop tied to the outer
        // tolerance keeps late iterations (where ||rhs|| grows with gamma_k)
        // convergent under the relative criterion.
        Array w = mask * u;
        const Scalar rhs_norm = std::sqrt((rhs * rhs).sum());
        const Scalar sup_target = Scalar(0.25) * settings.fixed_point_tol;
        if (rhs_norm == Scalar(0)) {
            w.setZero();
        } else {
            Array r = rhs - T(w);
            Array p = r;
            Scalar rs = (r * r).sum();
            int it = 0;
            while (std::sqrt(rs) > settings.cg_rel_tol * rhs_norm &&
                   r.abs().maxCoeff() > sup_target) {
                if (it >= settings.cg_max_iters)
                    throw SubproblemError("subproblem: inner CG did not converge",
                                          static_cast<double>(defect));
                Array Tp = T(p);
                const Scalar a = rs / (p * Tp).sum();
                w += a * p;
                r -= a * Tp;
                const Scalar rs_next = (r * r).sum();
                p = r + (rs_next / rs) * p;
                rs = rs_next;
                ++it;
            }
        }

        u = u_fixed + mask * w;
        u = u.max(bounds.lower).min(bounds.upper);  // inactive values are interior up to CG tol
        q = lam + (wz - ss_apply(u)) / alpha;
        defect = (u - q.max(bounds.lower).min(bounds.upper)).abs().maxCoeff();
        ++steps;
    }

    return SubproblemResult<Scalar>{GridFunction<Scalar>(grid, u.matrix()), steps, defect};
}

/// lambda_new = lambda_prev + S*(z - S u_new)/alpha; by induction over the
/// iteration this equals the sum sum_{i<=k} S*(z - S u_i)/alpha_i.
template <typename Scalar>
GridFunction<Scalar> update_multiplier(const GridFunction<Scalar>& lambda_prev, Scalar alpha,
                                       const PoissonOperator<Scalar>& op,
                                       const GridFunction<Scalar>& z,
                                       const GridFunction<Scalar>& u_new) {
    if (!(alpha > Scalar(0))) throw std::invalid_argument("update_multiplier: alpha must be positive");
    GridFunction<Scalar> misfit(z.grid(), z.values() - op.forward(u_new).values());
    return GridFunction<Scalar>(lambda_prev.grid(),
                                lambda_prev.values() + op.adjoint(misfit).values() / alpha);
}

/// Run K Bregman iterations from u_0 = P(0), lambda_0 = 0, invoking the
/// observer with each IterationState as it is produced. Subproblems are
/// warm-started from the previous iterate.
template <typename Scalar, typename Observer>
void run_bregman(const TestProblem<Scalar>& problem, const AlphaSchedule<Scalar>& schedule,
                 Index iterations, const SolverSettings<Scalar>& settings, Observer&& observe) {
    if (iterations < 1) throw std::invalid_argument("run_bregman: need at least one iteration");
    const Grid<Scalar>& grid = problem.grid;
    GridFunction<Scalar> u = project_box(GridFunction<Scalar>::zero(grid), problem.bounds);
    GridFunction<Scalar> lambda = GridFunction<Scalar>::zero(grid);

    for (Index k = 1; k <= iterations; ++k) {
        const Scalar alpha = schedule.alpha(k);
        auto sub = [&]() {
            try {
                return solve_subproblem(problem.op, problem.target, problem.bounds, alpha, lambda,
                                        u, settings);
            } catch (const SolverError& err) {
                std::ostringstream msg;
                msg << "bregman iteration k=" << k << ": " << err.what();
                throw SolverError(msg.str());
            }
        }();
        u = std::move(sub.control);
        lambda = update_multiplier(lambda, alpha, problem.op, problem.target, u);

        GridFunction<Scalar> misfit(grid, problem.op.forward(u).values() - problem.target.values());
        GridFunction<Scalar> err(grid, u.values() - problem.exact_control.values());
        IterationState<Scalar> state{k, u, lambda, Scalar(0.5) * inner_l2(misfit, misfit),
                                     inner_l2(err, err), sub.steps};
        observe(state);
    }
}

/// Convenience overload collecting the whole history (copies every iterate;
/// prefer the observer form for large grids or long runs).
template <typename Scalar>
std::vector<IterationState<Scalar>> run_bregman(const TestProblem<Scalar>& problem,
                                                const AlphaSchedule<Scalar>& schedule,
                                                Index iterations,
                                                const SolverSettings<Scalar>& settings = {}) {
    std::vector<IterationState<Scalar>> history;
    history.reserve(static_cast<std::size_t>(iterations));
    run_bregman(problem, schedule, iterations, settings,
                [&history](const IterationState<Scalar>& s) { history.push_back(s); });
    return history;
}

} // namespace bregopt

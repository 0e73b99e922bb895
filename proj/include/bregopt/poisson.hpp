#pragma once

#include "bregopt/grid.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <memory>
#include <stdexcept>
#include <vector>

namespace bregopt {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Discrete forward operator S: u -> y with -Lap_h y = u on interior nodes
/// and y = 0 on boundary nodes (second-order central differences).
///
/// The discretization is self-adjoint w.r.t. the trapezoid inner product, so
/// the adjoint action S* coincides with S. Factorized once per grid:
/// Thomas algorithm data in 1D, sparse Cholesky (SimplicialLLT) in 2D.
/// Read-only after assembly; safe to share across threads.
template <typename Scalar = double>
class PoissonOperator {
public:
    explicit PoissonOperator(const Grid<Scalar>& grid) : impl_(std::make_shared<Impl>(grid)) {}

    const Grid<Scalar>& grid() const { return impl_->grid; }

    /// y = S u. Only interior values of u enter; y vanishes on the boundary.
    GridFunction<Scalar> forward(const GridFunction<Scalar>& u) const {
        if (u.grid() != impl_->grid) throw GridMismatchError("PoissonOperator: grid mismatch");
        return GridFunction<Scalar>(impl_->grid, impl_->solve(u.values()));
    }

    /// p = S* r; identical solve as forward (self-adjoint discretization).
    GridFunction<Scalar> adjoint(const GridFunction<Scalar>& r) const { return forward(r); }

    /// Action of the assembled system matrix A_h = -Lap_h (SPD, Dirichlet rows
    /// eliminated): interior stencil applied to the stored nodal values,
    /// zero on boundary rows. Equals the matrix action A_h f when f vanishes
    /// on the boundary.
    GridFunction<Scalar> laplacian(const GridFunction<Scalar>& f) const {
        if (f.grid() != impl_->grid) throw GridMismatchError("PoissonOperator: grid mismatch");
        return GridFunction<Scalar>(impl_->grid, impl_->stencil(f.values()));
    }

private:
    struct Impl {
        Grid<Scalar> grid;
        // 1D Thomas factorization of T = tridiag(-1,2,-1): inv_diag_(i) = 1/m_i
        VectorX<Scalar> inv_diag;
        // 2D sparse Cholesky of the Kronecker-sum five-point matrix
        Eigen::SparseMatrix<Scalar> matrix2d;
        Eigen::SimplicialLLT<Eigen::SparseMatrix<Scalar>> llt;

        explicit Impl(const Grid<Scalar>& g) : grid(g) {
            const Index m = g.interior_per_axis();
            if (g.dimension() == 1) {
                inv_diag.resize(m);
                Scalar mi = Scalar(2);
                inv_diag(0) = Scalar(1) / mi;
                for (Index i = 1; i < m; ++i) {
                    mi = Scalar(2) - inv_diag(i - 1);
                    inv_diag(i) = Scalar(1) / mi;
                }
            } else {
                using T = Eigen::Triplet<Scalar>;
                std::vector<T> trip;
                trip.reserve(static_cast<std::size_t>(5 * m * m));
                auto id = [m](Index i, Index j) { return j * m + i; };
                for (Index j = 0; j < m; ++j) {
                    for (Index i = 0; i < m; ++i) {
                        trip.emplace_back(id(i, j), id(i, j), Scalar(4));
                        if (i > 0) trip.emplace_back(id(i, j), id(i - 1, j), Scalar(-1));
                        if (i < m - 1) trip.emplace_back(id(i, j), id(i + 1, j), Scalar(-1));
                        if (j > 0) trip.emplace_back(id(i, j), id(i, j - 1), Scalar(-1));
                        if (j < m - 1) trip.emplace_back(id(i, j), id(i, j + 1), Scalar(-1));
                    }
                }
                matrix2d.resize(m * m, m * m);
                matrix2d.setFromTriplets(trip.begin(), trip.end());
                llt.compute(matrix2d);
                if (llt.info() != Eigen::Success)
                    throw SolverError("PoissonOperator: sparse Cholesky factorization failed");
            }
        }

        // Solve T y_int = h^2 u_int (scaled system), embed with zero boundary.
        VectorX<Scalar> solve(const VectorX<Scalar>& u) const {
            const Index n = grid.nodes_per_axis();
            const Index m = grid.interior_per_axis();
            const Scalar h2 = grid.spacing() * grid.spacing();
            VectorX<Scalar> y = VectorX<Scalar>::Zero(grid.node_count());
            if (grid.dimension() == 1) {
                VectorX<Scalar> t(m);
                t(0) = h2 * u(1) * inv_diag(0);
                for (Index i = 1; i < m; ++i)
                    t(i) = (h2 * u(i + 1) + t(i - 1)) * inv_diag(i);
                y(m) = t(m - 1);
                for (Index i = m - 2; i >= 0; --i)
                    y(i + 1) = t(i) + inv_diag(i) * y(i + 2);
            } else {
                VectorX<Scalar> rhs(m * m);
                for (Index j = 0; j < m; ++j)
                    for (Index i = 0; i < m; ++i)
                        rhs(j * m + i) = h2 * u((j + 1) * n + (i + 1));
                VectorX<Scalar> sol = llt.solve(rhs);
                if (llt.info() != Eigen::Success)
                    throw SolverError("PoissonOperator: sparse Cholesky solve failed");
                for (Index j = 0; j < m; ++j)
                    for (Index i = 0; i < m; ++i)
                        y((j + 1) * n + (i + 1)) = sol(j * m + i);
            }
            return y;
        }

        VectorX<Scalar> stencil(const VectorX<Scalar>& f) const {
            const Index n = grid.nodes_per_axis();
            const Scalar h2 = grid.spacing() * grid.spacing();
            VectorX<Scalar> w = VectorX<Scalar>::Zero(grid.node_count());
            if (grid.dimension() == 1) {
                for (Index i = 1; i < n - 1; ++i)
                    w(i) = (Scalar(2) * f(i) - f(i - 1) - f(i + 1)) / h2;
            } else {
                for (Index j = 1; j < n - 1; ++j)
                    for (Index i = 1; i < n - 1; ++i)
                        w(j * n + i) = (Scalar(4) * f(j * n + i) - f(j * n + i - 1) -
                                        f(j * n + i + 1) - f((j - 1) * n + i) -
                                        f((j + 1) * n + i)) / h2;
            }
            return w;
        }
    };

    std::shared_ptr<const Impl> impl_;
};

template <typename Scalar>
PoissonOperator<Scalar> assemble(const Grid<Scalar>& grid) {
    return PoissonOperator<Scalar>(grid);
}

template <typename Scalar>
GridFunction<Scalar> apply_forward(const PoissonOperator<Scalar>& op, const GridFunction<Scalar>& u) {
    return op.forward(u);
}

template <typename Scalar>
GridFunction<Scalar> apply_adjoint(const PoissonOperator<Scalar>& op, const GridFunction<Scalar>& r) {
    return op.adjoint(r);
}

template <typename Scalar>
GridFunction<Scalar> apply_laplacian(const PoissonOperator<Scalar>& op, const GridFunction<Scalar>& f) {
    return op.laplacian(f);
}

} // namespace bregopt

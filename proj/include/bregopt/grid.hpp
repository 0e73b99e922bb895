#pragma once

#include <Eigen/Core>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <type_traits>
#include <utility>

namespace bregopt {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Thrown when two grid functions that must live on the same grid do not.
class GridMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Uniform tensor grid on [a,b] (1D) or [a,b]^2 (2D), endpoints included.
///
/// Nodes are x_i = a + i*h with h = (b-a)/(n-1). In 2D the node with flat
/// index j*n + i sits at (x_i, x_j). Immutable after construction; cheap to
/// copy (quadrature weights are shared).
template <typename Scalar = double>
class Grid {
public:
    Grid(int dimension, Scalar a, Scalar b, Index nodes_per_axis)
        : dim_(dimension), a_(a), b_(b), n_(nodes_per_axis) {
        if (dim_ != 1 && dim_ != 2)
            throw std::invalid_argument("Grid: dimension must be 1 or 2");
        if (n_ < 3)
            throw std::invalid_argument("Grid: need at least 3 nodes per axis");
        if (!(a_ < b_))
            throw std::invalid_argument("Grid: endpoints must satisfy a < b");
        h_ = (b_ - a_) / static_cast<Scalar>(n_ - 1);
        weights_ = std::make_shared<VectorX<Scalar>>(make_weights());
    }

    int dimension() const { return dim_; }
    Scalar lower() const { return a_; }
    Scalar upper() const { return b_; }
    Index nodes_per_axis() const { return n_; }
    Scalar spacing() const { return h_; }

    Index node_count() const { return dim_ == 1 ? n_ : n_ * n_; }
    Index interior_per_axis() const { return n_ - 2; }
    Index interior_count() const {
        const Index m = n_ - 2;
        return dim_ == 1 ? m : m * m;
    }

    /// Coordinate of axis index i in [0, n).
    Scalar coordinate(Index i) const { return a_ + static_cast<Scalar>(i) * h_; }

    bool is_boundary(Index node) const {
        if (dim_ == 1) return node == 0 || node == n_ - 1;
        const Index i = node % n_, j = node / n_;
        return i == 0 || i == n_ - 1 || j == 0 || j == n_ - 1;
    }

    /// Composite trapezoid weights, tensor product in 2D.
    const VectorX<Scalar>& quadrature_weights() const { return *weights_; }

    friend bool operator==(const Grid& lhs, const Grid& rhs) {
        return lhs.dim_ == rhs.dim_ && lhs.a_ == rhs.a_ && lhs.b_ == rhs.b_ && lhs.n_ == rhs.n_;
    }
    friend bool operator!=(const Grid& lhs, const Grid& rhs) { return !(lhs == rhs); }

private:
    VectorX<Scalar> make_weights() const {
        VectorX<Scalar> axis = VectorX<Scalar>::Constant(n_, h_);
        axis(0) = axis(n_ - 1) = h_ / Scalar(2);
        if (dim_ == 1) return axis;
        VectorX<Scalar> w(n_ * n_);
        for (Index j = 0; j < n_; ++j)
            for (Index i = 0; i < n_; ++i)
                w(j * n_ + i) = axis(i) * axis(j);
        return w;
    }

    int dim_;
    Scalar a_, b_;
    Index n_;
    Scalar h_;
    std::shared_ptr<const VectorX<Scalar>> weights_;
};

/// Constant box constraints u_a <= u <= u_b.
template <typename Scalar = double>
struct BoxBounds {
    Scalar lower;
    Scalar upper;

    BoxBounds(Scalar lo, Scalar hi) : lower(lo), upper(hi) {
        if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper))
            throw std::invalid_argument("BoxBounds: need finite lower < upper");
    }

    Scalar midpoint() const { return (lower + upper) / Scalar(2); }
};

/// Nodal real-valued function on a Grid (boundary nodes included).
template <typename Scalar = double>
class GridFunction {
public:
    GridFunction(Grid<Scalar> grid, VectorX<Scalar> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.node_count())
            throw std::invalid_argument("GridFunction: value count != node count");
    }

    static GridFunction zero(const Grid<Scalar>& g) {
        return GridFunction(g, VectorX<Scalar>::Zero(g.node_count()));
    }

    static GridFunction constant(const Grid<Scalar>& g, Scalar c) {
        return GridFunction(g, VectorX<Scalar>::Constant(g.node_count(), c));
    }

    /// Nodal interpolant of a closed form, f(x) in 1D or f(x, y) in 2D.
    template <typename F>
    static GridFunction sample(const Grid<Scalar>& g, F&& f) {
        VectorX<Scalar> v(g.node_count());
        if (g.dimension() == 1) {
            if constexpr (std::is_invocable_v<F&, Scalar>) {
                for (Index i = 0; i < g.node_count(); ++i) v(i) = f(g.coordinate(i));
            } else {
                throw std::invalid_argument("sample: 1D grid needs a one-argument function");
            }
        } else {
            if constexpr (std::is_invocable_v<F&, Scalar, Scalar>) {
                const Index n = g.nodes_per_axis();
                for (Index j = 0; j < n; ++j)
                    for (Index i = 0; i < n; ++i)
                        v(j * n + i) = f(g.coordinate(i), g.coordinate(j));
            } else {
                throw std::invalid_argument("sample: 2D grid needs a two-argument function");
            }
        }
        return GridFunction(g, std::move(v));
    }

    const Grid<Scalar>& grid() const { return grid_; }
    const VectorX<Scalar>& values() const { return values_; }
    Scalar operator[](Index i) const { return values_(i); }
    Index size() const { return values_.size(); }

private:
    Grid<Scalar> grid_;
    VectorX<Scalar> values_;
};

template <typename Scalar>
Grid<Scalar> uniform_grid(int dimension, Scalar a, Scalar b, Index nodes_per_axis) {
    return Grid<Scalar>(dimension, a, b, nodes_per_axis);
}

inline Grid<double> uniform_grid(int dimension, double a, double b, Index nodes_per_axis) {
    return Grid<double>(dimension, a, b, nodes_per_axis);
}

namespace detail {
template <typename Scalar>
void require_same_grid(const GridFunction<Scalar>& f, const GridFunction<Scalar>& g) {
    if (f.grid() != g.grid()) throw GridMismatchError("grid mismatch");
}
} // namespace detail

/// Trapezoid approximation of the L2 pairing (f, g) over the grid's domain.
template <typename Scalar>
Scalar inner_l2(const GridFunction<Scalar>& f, const GridFunction<Scalar>& g) {
    detail::require_same_grid(f, g);
    const auto& w = f.grid().quadrature_weights();
    return (f.values().array() * g.values().array() * w.array()).sum();
}

template <typename Scalar>
Scalar norm_l2(const GridFunction<Scalar>& f) {
    using std::sqrt;
    return sqrt(inner_l2(f, f));
}

/// Nodewise clamp onto [u_a, u_b].
template <typename Scalar>
GridFunction<Scalar> project_box(const GridFunction<Scalar>& f, const BoxBounds<Scalar>& bounds) {
    return GridFunction<Scalar>(
        f.grid(), f.values().cwiseMax(bounds.lower).cwiseMin(bounds.upper));
}

template <typename Scalar>
bool is_feasible(const GridFunction<Scalar>& f, const BoxBounds<Scalar>& bounds) {
    return (f.values().array() >= bounds.lower).all() &&
           (f.values().array() <= bounds.upper).all();
}

} // namespace bregopt

#pragma once

#include "bregopt/bregman.hpp"

#include <cmath>
#include <optional>
#include <type_traits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bregopt {

/// Dyadic numerical rate kappa_k = log2( e2(k/2) / e2(k) ) from a history of
/// squared errors indexed by iteration (entry [k] is iteration k, entry [0]
/// the initial guess). Defined for even k >= 2; nonpositive entries (exact
/// recovery) yield an empty optional instead of +-infinity.
template <typename Scalar>
std::optional<Scalar> kappa_numeric(const std::vector<Scalar>& error_sq_by_k, Index k) {
    if (k < 2 || k % 2 != 0)
        throw std::invalid_argument("kappa_numeric: k must be even and >= 2");
    if (static_cast<std::size_t>(k) >= error_sq_by_k.size())
        throw std::invalid_argument("kappa_numeric: history has no entry at k");
    const Scalar num = error_sq_by_k[static_cast<std::size_t>(k / 2)];
    const Scalar den = error_sq_by_k[static_cast<std::size_t>(k)];
    if (!(num > Scalar(0)) || !(den > Scalar(0))) return std::nullopt;
    return std::log2(num / den);
}

/// gamma_k = sum_{j=1..k} 1/alpha_j.
template <typename Scalar>
Scalar gamma_k(const AlphaSchedule<Scalar>& schedule, Index k) {
    if (k < 1) throw std::invalid_argument("gamma_k: k must be >= 1");
    Scalar sum = 0;
    for (Index j = 1; j <= k; ++j) sum += Scalar(1) / schedule.alpha(j);
    return sum;
}

/// The bracket of the a-priori estimate,
///   gamma_k^{-1} + gamma_k^{-1} sum_{j=1..k} alpha_j^{-1} gamma_j^{-kappa},
/// leaving the constant in the O(.) to the caller.
template <typename Scalar>
Scalar apriori_bound(const AlphaSchedule<Scalar>& schedule, Scalar kappa, Index k) {
    if (k < 1) throw std::invalid_argument("apriori_bound: k must be >= 1");
    if (!(kappa > Scalar(0)) || kappa > Scalar(1))
        throw std::invalid_argument("apriori_bound: kappa must lie in (0, 1]");
    Scalar gamma = 0;
    Scalar sum = 0;
    for (Index j = 1; j <= k; ++j) {
        const Scalar inv_alpha = Scalar(1) / schedule.alpha(j);
        gamma += inv_alpha;
        sum += inv_alpha * std::pow(gamma, -kappa);
    }
    return (Scalar(1) + sum) / gamma;
}

template <typename Scalar>
struct LineFit {
    Scalar slope;
    Scalar intercept;  // natural-log intercept: log y = slope*log x + intercept
};

/// Restrict a fit to pairs with x in [lo, hi].
template <typename Scalar>
struct FitWindow {
    Scalar lo;
    Scalar hi;
};

/// Ordinary least squares on (log x, log y). All coordinates must be positive.
template <typename Scalar>
LineFit<Scalar> fit_exponent(
    const std::vector<std::pair<Scalar, Scalar>>& pairs,
    std::optional<FitWindow<std::type_identity_t<Scalar>>> window = std::nullopt) {
    std::vector<std::pair<Scalar, Scalar>> logs;
    for (const auto& [x, y] : pairs) {
        if (window && (x < window->lo || x > window->hi)) continue;
        if (!(x > Scalar(0)) || !(y > Scalar(0)))
            throw std::invalid_argument("fit_exponent: coordinates must be positive");
        logs.emplace_back(std::log(x), std::log(y));
    }
    if (logs.size() < 3)
        throw std::invalid_argument("fit_exponent: need at least 3 pairs in the window");
    Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [lx, ly] : logs) {
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const Scalar n = static_cast<Scalar>(logs.size());
    const Scalar denom = n * sxx - sx * sx;
    if (std::abs(denom) <= Scalar(1e-12) * std::max(n * sxx, Scalar(1)))
        throw std::invalid_argument("fit_exponent: degenerate abscissae (all x equal)");
    const Scalar slope = (n * sxy - sx * sy) / denom;
    return LineFit<Scalar>{slope, (sy - slope * sx) / n};
}

/// Scalar summary of one run: per-k squared errors and residuals plus the
/// dyadic kappa_k diagnostics.
template <typename Scalar = double>
struct RateReport {
    std::string grid_label;
    std::vector<Scalar> error_sq;  // indexed by k, [0] = initial guess
    std::vector<Scalar> residual;
    std::vector<int> newton_steps;  // indexed by k, [0] unused

    Index max_k() const { return static_cast<Index>(error_sq.size()) - 1; }

    std::optional<Scalar> kappa(Index k) const { return kappa_numeric(error_sq, k); }

    std::vector<Index> dyadic_ks() const {
        std::vector<Index> ks;
        for (Index k = 4; k <= max_k(); k *= 2) ks.push_back(k);
        return ks;
    }

    /// Largest dyadic range over which the squared errors strictly decrease;
    /// used as the default window for exponent fits.
    std::pair<Index, Index> default_fit_window() const {
        const auto ks = dyadic_ks();
        if (ks.empty()) return {0, 0};
        std::pair<Index, Index> best{ks.front(), ks.front()};
        Index run_start = ks.front();
        for (std::size_t i = 1; i < ks.size(); ++i) {
            const Scalar prev = error_sq[static_cast<std::size_t>(ks[i - 1])];
            const Scalar cur = error_sq[static_cast<std::size_t>(ks[i])];
            if (cur < prev) {
                if (ks[i] - run_start >= best.second - best.first) best = {run_start, ks[i]};
            } else {
                run_start = ks[i];
            }
        }
        return best;
    }

    /// Exponent kappa-hat from e2(k) ~ C k^{-kappa} over dyadic k in the
    /// window (minus the log-log slope).
    Scalar fitted_exponent(std::optional<FitWindow<Scalar>> window = std::nullopt) const {
        std::vector<std::pair<Scalar, Scalar>> pts;
        for (Index k : dyadic_ks()) {
            const Scalar e = error_sq[static_cast<std::size_t>(k)];
            if (e > Scalar(0)) pts.emplace_back(static_cast<Scalar>(k), e);
        }
        if (!window) {
            const auto [lo, hi] = default_fit_window();
            window = FitWindow<Scalar>{static_cast<Scalar>(lo), static_cast<Scalar>(hi)};
        }
        return -fit_exponent(pts, window).slope;
    }
};

} // namespace bregopt

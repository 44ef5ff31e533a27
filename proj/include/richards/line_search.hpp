/**
 * @file line_search.hpp
 * @brief Backtracking line search with the Armijo sufficient-decrease rule.
 */

#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>

namespace richards {

struct LineSearchParams {
    /// sufficient-decrease parameter
    double alpha = 1e-4;
    /// backtracking factor
    double gamma = 0.25;
    /// omega_min = gamma^max_backtracks
    std::size_t max_backtracks = 10;
};

struct LineSearchResult {
    bool accepted = false;
    double omega = 0.0;
    /// number of times omega was reduced
    std::size_t backtracks = 0;
    /// residual norm at the accepted point
    double residual = 0.0;
    std::size_t trials = 0;
};

/// Tries omega = 1, gamma, gamma^2, ..., gamma^max_backtracks and accepts
/// the first one with ||F(h + omega dh)|| < (1 - alpha omega) ||F(h)||.
/// `trial_norm(omega)` evaluates the residual norm at the trial point;
/// non-finite values are rejected.
template <std::invocable<double> TrialNorm>
LineSearchResult armijo_backtrack(double initial_norm, TrialNorm&& trial_norm, const LineSearchParams& p)
{
    LineSearchResult r;
    double omega = 1.0;
    for (std::size_t k = 0; k <= p.max_backtracks; ++k) {
        ++r.trials;
        const double norm = trial_norm(omega);
        if (std::isfinite(norm) && norm < (1.0 - p.alpha * omega) * initial_norm) {
            r.accepted = true;
            r.omega = omega;
            r.backtracks = k;
            r.residual = norm;
            return r;
        }
        if (k < p.max_backtracks) omega *= p.gamma;
    }
    r.backtracks = p.max_backtracks;
    r.omega = omega;
    return r;
}

} // namespace richards

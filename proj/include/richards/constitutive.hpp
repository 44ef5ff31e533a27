/**
 * @file constitutive.hpp
 * @brief Water content and relative permeability curves.
 *
 * Two models are supported:
 *
 *   - van Genuchten--Mualem (VGM), written in pressure head psi = h - z:
 *
 *         theta(psi) = theta_r + (theta_s - theta_r) / (1 + |alpha psi|^n)^m,   m = 1 - 1/n
 *         K_r(S_e)   = S_e^{1/2} (1 - (1 - S_e^{1/m})^m)^2
 *
 *     with theta = theta_s and K_r = 1 for psi >= 0.
 *
 *   - the unconfined flow model: a cell-wise piecewise-linear water content
 *     in hydraulic head, with breakpoints at the cell's vertical extent,
 *     and K_r equal to the saturation theta / phi.
 *
 * Both are plain functions of immutable parameter records. Every curve has
 * an analytic derivative used by the Jacobian; at kinks the right-hand
 * derivative is returned.
 */

#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>

namespace richards {

struct VgmParams {
    double theta_r = 0.05;
    double theta_s = 0.4;
    double alpha = 1.0;  // 1/m
    double n = 1.2;

    double m() const { return 1.0 - 1.0 / n; }

    void validate() const
    {
        if (!(0.0 <= theta_r && theta_r < theta_s && theta_s <= 1.0))
            throw std::invalid_argument("VGM: need 0 <= theta_r < theta_s <= 1");
        if (!(alpha > 0.0)) throw std::invalid_argument("VGM: alpha must be positive");
        if (!(n > 1.0)) throw std::invalid_argument("VGM: n must exceed 1");
    }
};

struct UnconfinedParams {
    double phi = 0.3;
    double alpha_phi = 1e-2;
    double alpha_theta = 1e-3;  // 1/m

    void validate() const
    {
        if (!(phi > 0.0 && phi <= 1.0)) throw std::invalid_argument("unconfined: need 0 < phi <= 1");
        if (!(alpha_phi > 0.0 && alpha_phi < 1.0))
            throw std::invalid_argument("unconfined: need 0 < alpha_phi < 1");
        if (!(alpha_theta > 0.0)) throw std::invalid_argument("unconfined: alpha_theta must be positive");
    }
};

using ConstitutiveModel = std::variant<VgmParams, UnconfinedParams>;

inline void validate(const ConstitutiveModel& model)
{
    std::visit([](const auto& p) { p.validate(); }, model);
}

/// Geometry a cell contributes to constitutive evaluation.
struct CellGeometry {
    double z_center = 0.0;
    double z_min = 0.0;
    double z_max = 1.0;
};

/// A curve value and its derivative with respect to the head argument.
struct CurveValue {
    double value = 0.0;
    double derivative = 0.0;
};

// ---------------------------------------------------------------------------
// van Genuchten--Mualem

namespace detail {

/// u = |alpha psi|^n for psi < 0
inline double vgm_u(double psi, const VgmParams& p) { return std::pow(-p.alpha * psi, p.n); }

/// du/dpsi for psi < 0; never positive
inline double vgm_du_dpsi(double psi, const VgmParams& p)
{
    return -p.n * p.alpha * std::pow(-p.alpha * psi, p.n - 1.0);
}

} // namespace detail

inline double vgm_theta(double psi, const VgmParams& p)
{
    if (psi >= 0.0) return p.theta_s;
    const double u = detail::vgm_u(psi, p);
    return p.theta_r + (p.theta_s - p.theta_r) * std::pow(1.0 + u, -p.m());
}

inline double vgm_dtheta_dpsi(double psi, const VgmParams& p)
{
    if (psi >= 0.0) return 0.0;
    const double u = detail::vgm_u(psi, p);
    const double m = p.m();
    return (p.theta_s - p.theta_r) * (-m) * std::pow(1.0 + u, -m - 1.0) * detail::vgm_du_dpsi(psi, p);
}

inline double vgm_effective_saturation(double theta, const VgmParams& p)
{
    return (theta - p.theta_r) / (p.theta_s - p.theta_r);
}

/// Mualem relative permeability. Throws std::domain_error outside
/// [theta_r, theta_s].
inline double vgm_kr_of_theta(double theta, const VgmParams& p)
{
    if (!(theta >= p.theta_r && theta <= p.theta_s))
        throw std::domain_error("water content " + std::to_string(theta) + " outside [theta_r, theta_s]");
    const double se = vgm_effective_saturation(theta, p);
    if (se >= 1.0) return 1.0;
    if (se <= 0.0) return 0.0;
    const double m = p.m();
    const double b = 1.0 - std::pow(1.0 - std::pow(se, 1.0 / m), m);
    return std::sqrt(se) * b * b;
}

/// K_r(h) = K_r(theta(h - z)). Evaluated through u = |alpha psi|^n, which
/// avoids cancellation in 1 - S_e^{1/m} = u / (1 + u) near saturation.
inline CurveValue vgm_kr_of_head(double h, double z, const VgmParams& p)
{
    const double psi = h - z;
    if (psi >= 0.0) return {1.0, 0.0};
    const double m = p.m();
    const double u = detail::vgm_u(psi, p);
    if (!std::isfinite(u)) return {0.0, 0.0};
    const double se = std::pow(1.0 + u, -m);
    const double w = u / (1.0 + u);
    const double wm = std::pow(w, m);
    const double b = 1.0 - wm;
    const double kr = std::sqrt(se) * b * b;

    const double dse_du = -m * se / (1.0 + u);
    double dkr_du = 0.5 / std::sqrt(se) * dse_du * b * b;
    if (w > 0.0) {
        const double dw_du = 1.0 / ((1.0 + u) * (1.0 + u));
        dkr_du += std::sqrt(se) * 2.0 * b * (-m * wm / w) * dw_du;
    }
    return {kr, dkr_du * detail::vgm_du_dpsi(psi, p)};
}

// ---------------------------------------------------------------------------
// Unconfined flow model

namespace detail {
inline std::atomic<std::size_t> unconfined_clamp_count{0};
}

/// Number of times the unconfined water-content floor has been applied.
inline std::size_t unconfined_clamp_activations() { return detail::unconfined_clamp_count.load(); }
inline void reset_unconfined_clamp_activations() { detail::unconfined_clamp_count.store(0); }

/// Head at which the middle branch reaches phi * alpha_phi.
inline double unconf_residual_head(double z_min, double z_max, const UnconfinedParams& p)
{
    return z_min + p.alpha_phi * (z_max - z_min);
}

/// Lower bound applied to the third branch, which would otherwise turn
/// negative for very low heads.
inline double unconf_theta_floor(const UnconfinedParams& p) { return p.phi * p.alpha_phi * 1e-6; }

inline CurveValue unconf_theta_curve(double h, double z_min, double z_max, const UnconfinedParams& p)
{
    if (h > z_max) return {p.phi, 0.0};
    const double h_r = unconf_residual_head(z_min, z_max, p);
    if (h > h_r) {
        // Anchored at the nearer breakpoint so both joins are exact in floating
        // point; slope * (h - z_min) loses digits when |z_min| >> z_max - z_min.
        const double slope = p.phi / (z_max - z_min);
        if (h - h_r < z_max - h) return {p.phi * p.alpha_phi + slope * (h - h_r), slope};
        return {p.phi - slope * (z_max - h), slope};
    }
    const double theta = p.phi * (p.alpha_phi - p.alpha_theta * (h_r - h));
    const double floor = unconf_theta_floor(p);
    if (theta <= floor) {
        detail::unconfined_clamp_count.fetch_add(1, std::memory_order_relaxed);
        return {floor, 0.0};
    }
    return {theta, p.phi * p.alpha_theta};
}

inline double unconf_theta(double h, double z_min, double z_max, const UnconfinedParams& p)
{
    return unconf_theta_curve(h, z_min, z_max, p).value;
}

inline CurveValue unconf_kr(double h, double z_min, double z_max, const UnconfinedParams& p)
{
    const CurveValue t = unconf_theta_curve(h, z_min, z_max, p);
    return {t.value / p.phi, t.derivative / p.phi};
}

// ---------------------------------------------------------------------------
// Dispatch over the model variant

/// Relative permeability and dK_r/dh for a cell at head h.
inline CurveValue relative_permeability(const ConstitutiveModel& model, double h, const CellGeometry& g)
{
    if (const auto* v = std::get_if<VgmParams>(&model)) return vgm_kr_of_head(h, g.z_center, *v);
    return unconf_kr(h, g.z_min, g.z_max, std::get<UnconfinedParams>(model));
}

inline double water_content(const ConstitutiveModel& model, double h, const CellGeometry& g)
{
    if (const auto* v = std::get_if<VgmParams>(&model)) return vgm_theta(h - g.z_center, *v);
    return unconf_theta(h, g.z_min, g.z_max, std::get<UnconfinedParams>(model));
}

/// Effective saturation for VGM, theta / phi for the unconfined model.
inline double saturation(const ConstitutiveModel& model, double h, const CellGeometry& g)
{
    if (const auto* v = std::get_if<VgmParams>(&model))
        return vgm_effective_saturation(vgm_theta(h - g.z_center, *v), *v);
    const auto& u = std::get<UnconfinedParams>(model);
    return unconf_theta(h, g.z_min, g.z_max, u) / u.phi;
}

// ---------------------------------------------------------------------------
// Continuation in the nonlinearity

enum class ContinuationKind { Linear, Power };

inline const char* to_string(ContinuationKind k) { return k == ContinuationKind::Linear ? "linear" : "power"; }

/// K(kr, q): 1 at q = 0 and kr at q = 1. Linear: 1 + q (kr - 1); Power: kr^q.
/// Power with kr = 0 and q > 0 gives 0.
inline double continuation_kr(double kr, double q, ContinuationKind kind)
{
    if (q == 0.0) return 1.0;
    if (q == 1.0) return kr;
    if (kind == ContinuationKind::Linear) return 1.0 + q * (kr - 1.0);
    if (kr <= 0.0) return 0.0;
    return std::pow(kr, q);
}

/// dK/dkr. Zero for Power at kr = 0 with q < 1.
inline double continuation_dkr(double kr, double q, ContinuationKind kind)
{
    if (q == 0.0) return 0.0;
    if (kind == ContinuationKind::Linear || q == 1.0) return q;
    if (kr <= 0.0) return 0.0;
    return q * std::pow(kr, q - 1.0);
}

} // namespace richards

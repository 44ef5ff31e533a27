/**
 * @file flux.hpp
 * @brief Linear flux approximations: TPFA and the MPFA O-method.
 *
 * Both schemes produce, for every face, the saturated (K_r = 1) Darcy flux
 * through the face as an affine function of the cell heads,
 *
 *     flux_f(h) = sum_j w_fj h_j + c_f,
 *
 * oriented along the stored face normal (first cell to second, outward on
 * the boundary). Dirichlet and Neumann data enter through c_f. Faces
 * carrying a Neumann condition are marked `prescribed`: their flux is the
 * given boundary flux and is not scaled by the relative permeability.
 */

#pragma once

#include "richards/problem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace richards {

class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scheme { TPFA, MPFA_O };

inline const char* to_string(Scheme s) { return s == Scheme::TPFA ? "tpfa" : "mpfa-o"; }

struct StencilEntry {
    Index cell;
    double weight;
};

/// Per-face affine flux stencils in compressed layout.
class FluxStencils {
public:
    explicit FluxStencils(std::size_t num_faces)
        : offsets_(num_faces + 1, 0), constant_(num_faces, 0.0), prescribed_(num_faces, false)
    {
    }

    std::size_t num_faces() const { return constant_.size(); }

    std::span<const StencilEntry> weights(Index face) const
    {
        return {entries_.data() + offsets_[face], offsets_[face + 1] - offsets_[face]};
    }
    double constant(Index face) const { return constant_[face]; }
    bool prescribed(Index face) const { return prescribed_[face]; }

    /// Linear flux (without relative permeability) at heads h.
    double linear_flux(Index face, std::span<const double> h) const
    {
        double s = constant_[face];
        for (const StencilEntry& e : weights(face)) s += e.weight * h[e.cell];
        return s;
    }

    /// Faces must be added in order 0, 1, 2, ...
    void push_face(Index face, const std::map<Index, double>& w, double constant, bool prescribed)
    {
        if (face != next_face_ || face >= num_faces()) throw std::logic_error("faces must be pushed in order");
        ++next_face_;
        for (const auto& [cell, weight] : w) entries_.push_back({cell, weight});
        offsets_[face + 1] = entries_.size();
        constant_[face] = constant;
        prescribed_[face] = prescribed;
    }

private:
    std::vector<std::size_t> offsets_;
    std::vector<StencilEntry> entries_;
    std::vector<double> constant_;
    std::vector<bool> prescribed_;
    std::size_t next_face_ = 0;
};

namespace detail {

/// Distance from the cell centroid to the face line, along the face normal.
inline double normal_distance(const Mesh2D& mesh, Index face, Index cell)
{
    const Face& f = mesh.faces()[face];
    const double d = std::abs(dot(f.centroid - mesh.cells()[cell].centroid, f.normal));
    if (!(d > 1e-14 * f.length))
        throw AssemblyError("cell " + std::to_string(cell) + " centroid lies on face " + std::to_string(face));
    return d;
}

/// One-sided transmissibility (n.K.n) |f| / d.
inline double half_transmissibility(const ProblemSpec& spec, Index face, Index cell)
{
    const Mesh2D& mesh = spec.grid();
    const Face& f = mesh.faces()[face];
    return spec.medium_of(cell).conductivity.quadratic(f.normal) * f.length / normal_distance(mesh, face, cell);
}

} // namespace detail

/// TPFA transmissibility per face (m^2/day): the harmonic combination of
/// the two one-sided values on interior faces, the one-sided value on
/// Dirichlet faces, and 0 on Neumann faces.
inline std::vector<double> tpfa_transmissibilities(const ProblemSpec& spec)
{
    const Mesh2D& mesh = spec.grid();
    std::vector<double> T(mesh.num_faces(), 0.0);
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.faces()[f];
        const double kl = detail::half_transmissibility(spec, f, face.cells[0]);
        if (!face.is_boundary()) {
            const double kr = detail::half_transmissibility(spec, f, face.cells[1]);
            T[f] = kl * kr / (kl + kr);
        } else if (spec.face_bc[f].kind == BoundaryKind::Dirichlet) {
            T[f] = kl;
        }
    }
    return T;
}

inline FluxStencils tpfa_stencils(const ProblemSpec& spec)
{
    const Mesh2D& mesh = spec.grid();
    const std::vector<double> T = tpfa_transmissibilities(spec);
    FluxStencils st(mesh.num_faces());
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.faces()[f];
        std::map<Index, double> w;
        if (!face.is_boundary()) {
            w[face.cells[0]] = T[f];
            w[face.cells[1]] = -T[f];
            st.push_face(f, w, 0.0, false);
        } else if (spec.face_bc[f].kind == BoundaryKind::Dirichlet) {
            w[face.cells[0]] = T[f];
            st.push_face(f, w, -T[f] * spec.face_bc[f].value, false);
        } else {
            st.push_face(f, w, spec.face_bc[f].value * face.length, true);
        }
    }
    return st;
}

namespace detail {

/// Solves the small dense system M x = rhs (`rhs` row-major with ncols
/// right-hand sides) in place by partial pivoting. Returns false if M is
/// numerically singular.
inline bool dense_solve_in_place(std::vector<double>& M, std::size_t n, std::vector<double>& rhs,
                                 std::size_t ncols)
{
    double scale = 0.0;
    for (double v : M) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return n == 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(M[r * n + c]) > std::abs(M[piv * n + c])) piv = r;
        if (std::abs(M[piv * n + c]) <= 1e-13 * scale) return false;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(M[c * n + k], M[piv * n + k]);
            for (std::size_t k = 0; k < ncols; ++k) std::swap(rhs[c * ncols + k], rhs[piv * ncols + k]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = M[r * n + c] / M[c * n + c];
            if (f == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) M[r * n + k] -= f * M[c * n + k];
            for (std::size_t k = 0; k < ncols; ++k) rhs[r * ncols + k] -= f * rhs[c * ncols + k];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = 0; k < ncols; ++k) {
            double s = rhs[i * ncols + k];
            for (std::size_t j = i + 1; j < n; ++j) s -= M[i * n + j] * rhs[j * ncols + k];
            rhs[i * ncols + k] = s / M[i * n + i];
        }
    }
    return true;
}

/// Affine expression over the local unknowns of one interaction region:
/// face-point values u (by local index), cell heads (by global cell), and
/// a constant.
struct LocalExpr {
    std::map<std::size_t, double> u;
    std::map<Index, double> h;
    double constant = 0.0;
};

} // namespace detail

/**
 * MPFA O-method stencils (continuity points at face midpoints).
 *
 * Every face is split at its midpoint into two half-faces, one per end
 * vertex. Around each vertex, the interaction region couples the cells
 * sharing that vertex: in each cell a linear head is reconstructed from the
 * cell-center value and the two face-midpoint values on the half-faces
 * touching the vertex. Flux continuity across interior half-faces and the
 * prescribed flux on Neumann half-faces determine the unknown face-point
 * values, which are eliminated locally; Dirichlet half-faces use the
 * boundary head. The face flux is the sum of its two half-face fluxes.
 *
 * On K-orthogonal rectangular grids this reduces to TPFA, and it is exact
 * for linear head fields on any grid.
 */
inline FluxStencils mpfa_o_stencils(const ProblemSpec& spec)
{
    const Mesh2D& mesh = spec.grid();
    const auto& faces = mesh.faces();
    const auto& cells = mesh.cells();

    std::vector<detail::LocalExpr> face_expr(mesh.num_faces());  // accumulated over both vertices

    for (Index v = 0; v < mesh.num_vertices(); ++v) {
        const auto& vfaces = mesh.vertex_faces()[v];
        const auto& vcells = mesh.vertex_cells()[v];
        if (vcells.empty()) continue;

        // Local unknown index per face (interior or Neumann), or npos for Dirichlet.
        constexpr std::size_t npos = static_cast<std::size_t>(-1);
        std::map<Index, std::size_t> unknown;
        std::size_t nu = 0;
        for (Index f : vfaces) {
            const bool dirichlet = faces[f].is_boundary() && spec.face_bc[f].kind == BoundaryKind::Dirichlet;
            unknown[f] = dirichlet ? npos : nu++;
        }

        // Half-face flux expressions, outward from the cell: flux[{cell, face}].
        std::map<std::pair<Index, Index>, detail::LocalExpr> half_flux;
        for (Index c : vcells) {
            const Cell& cell = cells[c];
            const std::size_t k = cell.vertices.size();
            std::size_t pos = 0;
            while (cell.vertices[pos] != v) ++pos;
            const Index fa = cell.faces[pos];
            const Index fb = cell.faces[(pos + k - 1) % k];
            const Point2 da = faces[fa].centroid - cell.centroid;
            const Point2 db = faces[fb].centroid - cell.centroid;
            const double det = da.x * db.z - da.z * db.x;
            if (std::abs(det) <= 1e-14 * norm(da) * norm(db))
                throw AssemblyError("degenerate interaction region at vertex " + std::to_string(v) + " (cell " +
                                    std::to_string(c) + ")");
            // grad = D^{-1} [u_a - h_c, u_b - h_c], D = [da^T; db^T]
            // D^{-1} = 1/det [[db.z, -da.z], [-db.x, da.x]]
            const Tensor2& K = spec.medium_of(c).conductivity;
            for (Index f : {fa, fb}) {
                const Point2 n = mesh.orientation(f, c) * faces[f].normal;
                const Point2 Kn = K.apply(n);
                // flux = -(|f|/2) (Kn)^T D^{-1} delta = -(|f|/2) (D^{-T} Kn)^T delta
                const double wa = (db.z * Kn.x - db.x * Kn.z) / det;
                const double wb = (-da.z * Kn.x + da.x * Kn.z) / det;
                const double s = -0.5 * faces[f].length;
                detail::LocalExpr e;
                auto add_face_value = [&](Index face, double coef) {
                    if (unknown[face] == npos) e.constant += coef * spec.face_bc[face].value;
                    else e.u[unknown[face]] += coef;
                };
                add_face_value(fa, s * wa);
                add_face_value(fb, s * wb);
                e.h[c] -= s * (wa + wb);
                half_flux[{c, f}] = std::move(e);
            }
        }

        // Local system: one equation per unknown face point.
        // Columns of the right-hand side: one per cell of the region, plus the constant.
        std::map<Index, std::size_t> cell_col;
        for (Index c : vcells) cell_col.emplace(c, cell_col.size());
        const std::size_t ncols = cell_col.size() + 1;
        std::vector<double> M(nu * nu, 0.0), rhs(nu * ncols, 0.0);
        auto add_equation = [&](std::size_t row, const detail::LocalExpr& e, double sign) {
            for (const auto& [j, a] : e.u) M[row * nu + j] += sign * a;
            for (const auto& [c, a] : e.h) rhs[row * ncols + cell_col.at(c)] -= sign * a;
            rhs[row * ncols + ncols - 1] -= sign * e.constant;
        };
        for (Index f : vfaces) {
            const std::size_t row = unknown[f];
            if (row == npos) continue;
            const Face& face = faces[f];
            add_equation(row, half_flux.at({face.cells[0], f}), 1.0);
            if (!face.is_boundary()) {
                add_equation(row, half_flux.at({face.cells[1], f}), 1.0);
            } else {
                // Neumann: outward half-face flux equals the prescribed value.
                rhs[row * ncols + ncols - 1] += spec.face_bc[f].value * 0.5 * face.length;
            }
        }
        if (nu > 0 && !detail::dense_solve_in_place(M, nu, rhs, ncols))
            throw AssemblyError("singular interaction-region system at vertex " + std::to_string(v));

        // Substitute u = rhs * [h; 1] into each non-prescribed half-face flux.
        for (Index f : vfaces) {
            const Face& face = faces[f];
            if (face.is_boundary() && spec.face_bc[f].kind == BoundaryKind::Neumann) continue;
            const detail::LocalExpr& e = half_flux.at({face.cells[0], f});
            detail::LocalExpr& out = face_expr[f];
            for (const auto& [c, a] : e.h) out.h[c] += a;
            out.constant += e.constant;
            for (const auto& [j, a] : e.u) {
                for (const auto& [c, col] : cell_col) out.h[c] += a * rhs[j * ncols + col];
                out.constant += a * rhs[j * ncols + ncols - 1];
            }
        }
    }

    FluxStencils st(mesh.num_faces());
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = faces[f];
        if (face.is_boundary() && spec.face_bc[f].kind == BoundaryKind::Neumann) {
            st.push_face(f, {}, spec.face_bc[f].value * face.length, true);
        } else {
            std::map<Index, double> w;
            for (const auto& [c, a] : face_expr[f].h)
                if (a != 0.0) w[c] = a;
            // The two adjacent cells are always part of the stencil.
            w.try_emplace(face.cells[0], 0.0);
            if (!face.is_boundary()) w.try_emplace(face.cells[1], 0.0);
            st.push_face(f, w, face_expr[f].constant, false);
        }
    }
    return st;
}

/// MPFA-O weights per face; alias kept for symmetry with the TPFA API.
inline FluxStencils mpfa_o_transmissibilities(const ProblemSpec& spec) { return mpfa_o_stencils(spec); }

inline FluxStencils build_stencils(const ProblemSpec& spec, Scheme scheme)
{
    return scheme == Scheme::TPFA ? tpfa_stencils(spec) : mpfa_o_stencils(spec);
}

} // namespace richards

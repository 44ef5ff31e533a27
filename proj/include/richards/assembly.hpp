/**
 * @file assembly.hpp
 * @brief Nonlinear residual F(h) = A(h) h - b(h), Picard matrix and Jacobian.
 *
 * The flux through face f is K_f(h, q) * (sum_j w_fj h_j + c_f), where the
 * face permeability K_f is the continuation function applied to the face
 * relative permeability (central or upwind combination of the adjacent
 * cell values). For each cell E,
 *
 *     F_E(h) = sum_{f in E} +-flux_f(h) - Q_E |E|.
 *
 * On Dirichlet faces the outer value is evaluated at the boundary head with
 * the adjacent cell's geometry. Neumann faces carry the prescribed flux.
 */

#pragma once

#include "richards/flux.hpp"
#include "richards/linalg.hpp"

#include <span>
#include <vector>

namespace richards {

/// Face relative permeability and its derivatives with respect to the two
/// adjacent cell values of K_r.
struct FaceKr {
    double value = 0.0;
    double d_left = 0.0;   // d value / d kr_L
    double d_right = 0.0;  // d value / d kr_R
};

/// Central: half-sum. Upwind: value of the cell with the larger head, the
/// half-sum on ties.
inline FaceKr face_kr_weights(double h_left, double h_right, double kr_left, double kr_right, FaceKrMode mode)
{
    if (mode == FaceKrMode::Upwind && h_left != h_right)
        return h_left > h_right ? FaceKr{kr_left, 1.0, 0.0} : FaceKr{kr_right, 0.0, 1.0};
    return {0.5 * (kr_left + kr_right), 0.5, 0.5};
}

inline double face_kr(double h_left, double h_right, double kr_left, double kr_right, FaceKrMode mode)
{
    return face_kr_weights(h_left, h_right, kr_left, kr_right, mode).value;
}

struct AssemblyOutput {
    SparseMatrix matrix;  // A(h), or J(h) from assemble_jacobian
    Vector rhs;           // b(h)
    Vector residual;      // F(h)
};

/// Continuation state: K(h, q) with the chosen kind.
struct Continuation {
    double q = 1.0;
    ContinuationKind kind = ContinuationKind::Linear;
};

/**
 * Discrete operator for one problem and one flux scheme. Stencils are built
 * once; all evaluations are pure functions of (h, q, kind).
 */
class Discretization {
public:
    Discretization(const ProblemSpec& spec, Scheme scheme)
        : spec_(spec), scheme_(scheme), stencils_(build_stencils(spec, scheme))
    {
        spec_.validate();
        const std::size_t nc = spec_.grid().num_cells();
        geometry_.reserve(nc);
        for (Index c = 0; c < nc; ++c) geometry_.push_back(spec_.geometry(c));
    }

    const ProblemSpec& problem() const { return spec_; }
    Scheme scheme() const { return scheme_; }
    const FluxStencils& stencils() const { return stencils_; }
    std::size_t size() const { return spec_.grid().num_cells(); }

    /// Face permeability K_f(h, q) and its derivatives with respect to the
    /// heads of the first and second adjacent cells. Prescribed faces get 1.
    struct FacePermeability {
        double value = 1.0;
        double d_first = 0.0;
        double d_second = 0.0;
    };

    FacePermeability face_permeability(Index face, std::span<const double> h, Continuation cont) const
    {
        if (stencils_.prescribed(face) || cont.q == 0.0) return {};
        const Face& f = spec_.grid().faces()[face];
        const Index c0 = f.cells[0];
        const CurveValue k0 = relative_permeability(spec_.medium_of(c0).model, h[c0], geometry_[c0]);
        double h1 = 0.0;
        CurveValue k1;
        if (f.is_boundary()) {
            h1 = spec_.face_bc[face].value;
            k1 = relative_permeability(spec_.medium_of(c0).model, h1, geometry_[c0]);
            k1.derivative = 0.0;  // boundary head is data
        } else {
            h1 = h[f.cells[1]];
            k1 = relative_permeability(spec_.medium_of(f.cells[1]).model, h1, geometry_[f.cells[1]]);
        }
        const FaceKr raw = face_kr_weights(h[c0], h1, k0.value, k1.value, spec_.kr_mode);
        const double dK = continuation_dkr(raw.value, cont.q, cont.kind);
        return {continuation_kr(raw.value, cont.q, cont.kind), dK * raw.d_left * k0.derivative,
                dK * raw.d_right * k1.derivative};
    }

    /// Flux through every face along its stored normal.
    Vector face_fluxes(std::span<const double> h, Continuation cont) const
    {
        check_size(h);
        Vector flux(stencils_.num_faces());
        for (Index f = 0; f < flux.size(); ++f) {
            if (stencils_.prescribed(f)) flux[f] = stencils_.constant(f);
            else flux[f] = face_permeability(f, h, cont).value * stencils_.linear_flux(f, h);
        }
        return flux;
    }

    Vector residual(std::span<const double> h, Continuation cont) const
    {
        const Vector flux = face_fluxes(h, cont);
        const Mesh2D& mesh = spec_.grid();
        Vector F(size());
        for (Index c = 0; c < size(); ++c) F[c] = -spec_.source[c] * mesh.cells()[c].area;
        for (Index f = 0; f < flux.size(); ++f) {
            const Face& face = mesh.faces()[f];
            F[face.cells[0]] += flux[f];
            if (!face.is_boundary()) F[face.cells[1]] -= flux[f];
        }
        return F;
    }

    /// A(h), b(h) and F(h).
    AssemblyOutput assemble(std::span<const double> h, Continuation cont) const
    {
        return build(h, cont, false);
    }

    /// J(h) = dF/dh, with b(h) and F(h).
    AssemblyOutput assemble_jacobian(std::span<const double> h, Continuation cont) const
    {
        return build(h, cont, true);
    }

private:
    void check_size(std::span<const double> h) const
    {
        if (h.size() != size()) throw std::invalid_argument("head vector size does not match cell count");
    }

    AssemblyOutput build(std::span<const double> h, Continuation cont, bool jacobian) const
    {
        check_size(h);
        const Mesh2D& mesh = spec_.grid();
        std::vector<Triplet> trips;
        trips.reserve(4 * stencils_.num_faces() + size());
        Vector b(size());
        for (Index c = 0; c < size(); ++c) b[c] = spec_.source[c] * mesh.cells()[c].area;

        for (Index f = 0; f < stencils_.num_faces(); ++f) {
            const Face& face = mesh.faces()[f];
            const Index c0 = face.cells[0];
            const Index c1 = face.cells[1];
            if (stencils_.prescribed(f)) {
                b[c0] -= stencils_.constant(f);
                continue;
            }
            const FacePermeability K = face_permeability(f, h, cont);
            for (const StencilEntry& e : stencils_.weights(f)) {
                trips.push_back({c0, e.cell, K.value * e.weight});
                if (!face.is_boundary()) trips.push_back({c1, e.cell, -K.value * e.weight});
            }
            b[c0] -= K.value * stencils_.constant(f);
            if (!face.is_boundary()) b[c1] += K.value * stencils_.constant(f);

            if (jacobian && (K.d_first != 0.0 || K.d_second != 0.0)) {
                const double lin = stencils_.linear_flux(f, h);
                trips.push_back({c0, c0, K.d_first * lin});
                if (!face.is_boundary()) {
                    trips.push_back({c0, c1, K.d_second * lin});
                    trips.push_back({c1, c0, -K.d_first * lin});
                    trips.push_back({c1, c1, -K.d_second * lin});
                }
            }
        }

        AssemblyOutput out;
        out.matrix = SparseMatrix::from_triplets(size(), std::move(trips));
        out.rhs = std::move(b);
        out.residual = residual(h, cont);
        return out;
    }

    ProblemSpec spec_;
    Scheme scheme_;
    FluxStencils stencils_;
    std::vector<CellGeometry> geometry_;
};

/// One-shot helpers that build the discretization on every call.
inline AssemblyOutput assemble(const ProblemSpec& spec, Scheme scheme, std::span<const double> h, Continuation cont)
{
    return Discretization(spec, scheme).assemble(h, cont);
}

inline SparseMatrix assemble_jacobian(const ProblemSpec& spec, Scheme scheme, std::span<const double> h,
                                      Continuation cont)
{
    return Discretization(spec, scheme).assemble_jacobian(h, cont).matrix;
}

} // namespace richards

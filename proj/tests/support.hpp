// Small helpers shared by the test programs.

#pragma once

#include "richards/richards.hpp"

#include <random>

namespace richards::check {

/// Copy of `m` with interior vertices moved randomly by up to `amount`
/// times the local spacing; boundary faces all tagged "wall".
inline Mesh2D perturbed(const Mesh2D& m, double amount, double spacing, std::uint32_t seed)
{
    std::vector<bool> on_boundary(m.num_vertices(), false);
    for (const Face& f : m.faces())
        if (f.is_boundary()) on_boundary[f.vertices[0]] = on_boundary[f.vertices[1]] = true;
    std::mt19937 g(seed);
    std::uniform_real_distribution<double> u(-amount * spacing, amount * spacing);
    std::vector<Point2> v = m.vertices();
    for (Index i = 0; i < v.size(); ++i)
        if (!on_boundary[i]) v[i] = v[i] + Point2{u(g), u(g)};
    std::vector<std::vector<Index>> loops;
    for (const Cell& c : m.cells()) loops.push_back(c.vertices);
    return Mesh2D(std::move(v), std::move(loops), {}, "wall");
}

/// Direct solution of the q = 0 (linear) problem.
inline Vector solve_linear_stage(const Discretization& d)
{
    const Vector zero(d.size(), 0.0);
    const AssemblyOutput a = d.assemble(zero, {0.0, ContinuationKind::Linear});
    Vector x(d.size());
    const LinearSolveReport rep = dense_lu_solve(a.matrix, a.rhs, x);
    if (!(rep.relative_residual < 1e-10)) throw std::runtime_error("linear stage solve failed");
    return x;
}

/// Largest |flux| over all faces at h.
inline double max_face_flux(const Discretization& d, std::span<const double> h, Continuation c)
{
    return norm_inf(d.face_fluxes(h, c));
}

/// Max over interior cells (cells with no boundary face) of
/// |sum of outgoing face fluxes - Q area|.
inline double interior_imbalance(const Discretization& d, std::span<const double> h, Continuation c)
{
    const Mesh2D& m = d.problem().grid();
    const Vector flux = d.face_fluxes(h, c);
    double worst = 0.0;
    for (Index ci = 0; ci < m.num_cells(); ++ci) {
        const Cell& cell = m.cells()[ci];
        bool interior = true;
        double sum = 0.0;
        for (Index f : cell.faces) {
            interior = interior && !m.faces()[f].is_boundary();
            sum += m.orientation(f, ci) * flux[f];
        }
        if (interior) worst = std::max(worst, std::abs(sum - d.problem().source[ci] * cell.area));
    }
    return worst;
}

} // namespace richards::check

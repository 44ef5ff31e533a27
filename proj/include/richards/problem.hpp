/**
 * @file problem.hpp
 * @brief Boundary-value problem description for steady-state Richards flow.
 */

#pragma once

#include "richards/constitutive.hpp"
#include "richards/mesh.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace richards {

/// Symmetric 2x2 conductivity tensor in (x, z), m/day.
struct Tensor2 {
    double xx = 1.0;
    double xz = 0.0;
    double zz = 1.0;

    Point2 apply(Point2 v) const { return {xx * v.x + xz * v.z, xz * v.x + zz * v.z}; }
    double quadratic(Point2 n) const { return dot(n, apply(n)); }

    /// Eigenvalues in ascending order.
    std::pair<double, double> eigenvalues() const
    {
        const double mean = 0.5 * (xx + zz);
        const double r = std::hypot(0.5 * (xx - zz), xz);
        return {mean - r, mean + r};
    }

    bool positive_definite() const { return eigenvalues().first > 0.0; }

    /// diag(k1, k2) with its principal frame rotated by `angle`:
    /// [[k1 c^2 + k2 s^2, (k2 - k1) s c], [(k2 - k1) s c, k1 s^2 + k2 c^2]]
    static Tensor2 rotated(double k1, double k2, double angle)
    {
        const double c = std::cos(angle), s = std::sin(angle);
        return {k1 * c * c + k2 * s * s, (k2 - k1) * s * c, k1 * s * s + k2 * c * c};
    }

    Tensor2 scaled(double s) const { return {s * xx, s * xz, s * zz}; }
};

struct Medium {
    std::string name;
    Tensor2 conductivity;
    ConstitutiveModel model;
};

enum class BoundaryKind { Dirichlet, Neumann };

/// Dirichlet: hydraulic head (m). Neumann: outward normal flux density
/// (m/day), 0 for an impermeable boundary.
struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::Neumann;
    double value = 0.0;

    static BoundaryCondition dirichlet(double head) { return {BoundaryKind::Dirichlet, head}; }
    static BoundaryCondition neumann(double flux = 0.0) { return {BoundaryKind::Neumann, flux}; }
};

enum class FaceKrMode { Central, Upwind };

inline const char* to_string(FaceKrMode m) { return m == FaceKrMode::Central ? "central" : "upwind"; }

class ProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProblemSpec {
    std::shared_ptr<const Mesh2D> mesh;
    std::vector<Medium> media;
    /// medium index per cell
    std::vector<std::size_t> cell_medium;
    /// one entry per face; ignored on interior faces
    std::vector<BoundaryCondition> face_bc;
    /// volumetric source per cell, 1/day
    std::vector<double> source;
    FaceKrMode kr_mode = FaceKrMode::Central;

    const Mesh2D& grid() const { return *mesh; }

    const Medium& medium_of(Index cell) const { return media[cell_medium[cell]]; }

    CellGeometry geometry(Index cell) const
    {
        const Cell& c = mesh->cells()[cell];
        return {c.centroid.z, c.z_min, c.z_max};
    }

    void validate() const
    {
        if (!mesh) throw ProblemError("problem has no mesh");
        const std::size_t nc = mesh->num_cells();
        if (media.empty()) throw ProblemError("problem has no media");
        if (cell_medium.size() != nc) throw ProblemError("medium assignment size does not match cell count");
        if (source.size() != nc) throw ProblemError("source size does not match cell count");
        if (face_bc.size() != mesh->num_faces()) throw ProblemError("boundary conditions do not cover all faces");
        for (std::size_t c = 0; c < nc; ++c)
            if (cell_medium[c] >= media.size())
                throw ProblemError("cell " + std::to_string(c) + " references missing medium");
        for (const Medium& m : media) {
            const Tensor2& K = m.conductivity;
            if (!K.positive_definite())
                throw ProblemError("conductivity of medium '" + m.name + "' is not positive definite");
            validate_model(m);
        }
        bool any_dirichlet = false;
        for (Index f = 0; f < mesh->num_faces(); ++f) {
            if (!mesh->faces()[f].is_boundary()) continue;
            if (!std::isfinite(face_bc[f].value))
                throw ProblemError("boundary face " + std::to_string(f) + " has a non-finite value");
            any_dirichlet = any_dirichlet || face_bc[f].kind == BoundaryKind::Dirichlet;
        }
        if (!any_dirichlet) throw ProblemError("problem needs at least one Dirichlet face");
    }

    std::vector<Index> dirichlet_faces() const
    {
        std::vector<Index> out;
        for (Index f = 0; f < mesh->num_faces(); ++f)
            if (mesh->faces()[f].is_boundary() && face_bc[f].kind == BoundaryKind::Dirichlet) out.push_back(f);
        return out;
    }

private:
    static void validate_model(const Medium& m)
    {
        try {
            richards::validate(m.model);
        } catch (const std::invalid_argument& e) {
            throw ProblemError("medium '" + m.name + "': " + e.what());
        }
    }
};

/// Homogeneous problem with every boundary face impermeable and no sources.
inline ProblemSpec make_problem(std::shared_ptr<const Mesh2D> mesh, Medium medium)
{
    ProblemSpec p;
    const std::size_t nc = mesh->num_cells();
    p.face_bc.assign(mesh->num_faces(), BoundaryCondition::neumann());
    p.mesh = std::move(mesh);
    p.media.push_back(std::move(medium));
    p.cell_medium.assign(nc, 0);
    p.source.assign(nc, 0.0);
    return p;
}

/// Applies `bc(face)` to every boundary face for which `select(face)` holds.
inline void set_boundary(ProblemSpec& p, const std::function<bool(const Face&)>& select,
                         const std::function<BoundaryCondition(const Face&)>& bc)
{
    const auto& faces = p.grid().faces();
    for (Index f = 0; f < faces.size(); ++f)
        if (faces[f].is_boundary() && select(faces[f])) p.face_bc[f] = bc(faces[f]);
}

} // namespace richards

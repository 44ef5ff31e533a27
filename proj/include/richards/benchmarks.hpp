/**
 * @file benchmarks.hpp
 * @brief Preset problems: the modified dam, a layered slab and a
 *        linear-field verification problem.
 *
 * Dam: 10 m x 10 m, homogeneous, K = diag{K0, 10 K0} rotated by pi/6 with
 * K0 = 0.864 m/day, h = 10 m on the left boundary, h = 2 m on the right
 * boundary up to z = 2 m, impermeable elsewhere, no sources.
 *
 * VGM parameters other than n = 1.2 are not prescribed by the benchmark;
 * the defaults theta_r = 0.05, theta_s = 0.4, alpha = 1 1/m are choices of
 * this library. n = 1.2 < 2 makes dK_r/dh unbounded as psi -> 0-, which
 * is what makes this preset hard for Newton.
 */

#pragma once

#include "richards/mesh_io.hpp"
#include "richards/problem.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace richards {

inline constexpr double dam_k0 = 0.864;        // m/day
inline constexpr double dam_size = 10.0;       // m
inline constexpr double dam_left_head = 10.0;  // m
inline constexpr double dam_right_head = 2.0;  // m

enum class DamModel { Unconfined, Vgm };

inline Tensor2 dam_conductivity(double k0 = dam_k0)
{
    return Tensor2::rotated(k0, 10.0 * k0, std::numbers::pi / 6.0);
}

/**
 * Mesh selector: "cartesian:NXxNZ", "triangular:NXxNZ" or "file:PATH".
 * Generated meshes cover [0, width] x [0, height].
 */
inline Mesh2D make_mesh(const std::string& choice, double width, double height)
{
    const auto colon = choice.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("mesh choice '" + choice + "' lacks ':'");
    const std::string kind = choice.substr(0, colon);
    const std::string arg = choice.substr(colon + 1);
    if (kind == "file") return read_mesh(arg);

    const auto x = arg.find('x');
    std::size_t nx = 0, nz = 0;
    auto parse = [&](std::string_view s, std::size_t& v) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return ec == std::errc() && p == s.data() + s.size();
    };
    if (x == std::string::npos || !parse(std::string_view(arg).substr(0, x), nx) ||
        !parse(std::string_view(arg).substr(x + 1), nz))
        throw std::invalid_argument("mesh choice '" + choice + "': expected NXxNZ");
    if (kind == "cartesian") return gen_cartesian(nx, nz, width, height);
    if (kind == "triangular") return gen_triangular(nx, nz, width, height);
    throw std::invalid_argument("unknown mesh kind '" + kind + "' (expected cartesian, triangular or file)");
}

/// Named dam meshes: 400 and 6400 Cartesian cells, 74x74 = 5476 as the
/// closest square grid to 5500 cells, and 1922 triangles (~1900).
inline std::string dam_mesh_choice(const std::string& alias)
{
    if (alias == "cart400") return "cartesian:20x20";
    if (alias == "cart6400") return "cartesian:80x80";
    if (alias == "cart5500") return "cartesian:74x74";
    if (alias == "tri1900") return "triangular:31x31";
    return alias;
}

inline ProblemSpec build_dam(DamModel model, std::shared_ptr<const Mesh2D> mesh, VgmParams vgm = {},
                             UnconfinedParams unconfined = {})
{
    Medium medium;
    medium.name = "dam";
    medium.conductivity = dam_conductivity();
    if (model == DamModel::Vgm) medium.model = vgm;
    else medium.model = unconfined;

    ProblemSpec p = make_problem(std::move(mesh), std::move(medium));
    const Mesh2D& m = p.grid();
    const auto left = m.find_tag("left");
    const auto right = m.find_tag("right");
    set_boundary(
        p, [&](const Face& f) { return left && f.tag == *left; },
        [](const Face&) { return BoundaryCondition::dirichlet(dam_left_head); });
    set_boundary(
        p, [&](const Face& f) { return right && f.tag == *right && f.centroid.z <= dam_right_head; },
        [](const Face&) { return BoundaryCondition::dirichlet(dam_right_head); });
    p.validate();
    return p;
}

inline ProblemSpec build_dam(DamModel model, const std::string& mesh_choice, VgmParams vgm = {},
                             UnconfinedParams unconfined = {})
{
    return build_dam(model, std::make_shared<const Mesh2D>(make_mesh(dam_mesh_choice(mesh_choice), dam_size, dam_size)),
                     vgm, unconfined);
}

/**
 * Saturated linear field h = a x + b z + c imposed as Dirichlet data on
 * every boundary face (evaluated at face midpoints). With c large enough
 * that h > z everywhere, K_r = 1 and the problem is linear.
 */
inline ProblemSpec build_verification_linear(std::shared_ptr<const Mesh2D> mesh, Tensor2 K, double a, double b,
                                             double c)
{
    ProblemSpec p = make_problem(std::move(mesh), Medium{"verify", K, UnconfinedParams{}});
    set_boundary(
        p, [](const Face&) { return true; },
        [=](const Face& f) { return BoundaryCondition::dirichlet(a * f.centroid.x + b * f.centroid.z + c); });
    p.validate();
    return p;
}

/// Max |h_E - (a x_E + b z_E + c)| over cell centroids.
inline double linear_field_error(const ProblemSpec& p, std::span<const double> h, double a, double b, double c)
{
    double err = 0.0;
    const auto& cells = p.grid().cells();
    for (Index i = 0; i < cells.size(); ++i)
        err = std::max(err, std::abs(h[i] - (a * cells[i].centroid.x + b * cells[i].centroid.z + c)));
    return err;
}

/**
 * Synthetic heterogeneous slab, 100 m x 20 m, three horizontal layers with
 * K = diag{K, 0.1 K}: K = 4.76 m/day (z < 6 m), 0.011 m/day (6-13 m) and
 * 0.5 m/day (z > 13 m). Left head 18 m, right head 12 m up to z = 12 m,
 * impermeable elsewhere. Unconfined model by default.
 */
inline ProblemSpec build_layered_slab(std::shared_ptr<const Mesh2D> mesh, DamModel model = DamModel::Unconfined,
                                      VgmParams vgm = {}, UnconfinedParams unconfined = {})
{
    const double ks[3] = {4.76, 0.011, 0.5};
    const char* names[3] = {"lower", "middle", "upper"};
    ProblemSpec p;
    p.mesh = std::move(mesh);
    const Mesh2D& m = p.grid();
    for (int i = 0; i < 3; ++i) {
        Medium med{names[i], Tensor2{ks[i], 0.0, 0.1 * ks[i]}, UnconfinedParams{}};
        if (model == DamModel::Vgm) med.model = vgm;
        else med.model = unconfined;
        p.media.push_back(med);
    }
    p.cell_medium.resize(m.num_cells());
    for (Index c = 0; c < m.num_cells(); ++c) {
        const double z = m.cells()[c].centroid.z;
        p.cell_medium[c] = z < 6.0 ? 0 : (z < 13.0 ? 1 : 2);
    }
    p.source.assign(m.num_cells(), 0.0);
    p.face_bc.assign(m.num_faces(), BoundaryCondition::neumann());
    const auto left = m.find_tag("left");
    const auto right = m.find_tag("right");
    set_boundary(
        p, [&](const Face& f) { return left && f.tag == *left; },
        [](const Face&) { return BoundaryCondition::dirichlet(18.0); });
    set_boundary(
        p, [&](const Face& f) { return right && f.tag == *right && f.centroid.z <= 12.0; },
        [](const Face&) { return BoundaryCondition::dirichlet(12.0); });
    p.validate();
    return p;
}

} // namespace richards

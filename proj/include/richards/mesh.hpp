/**
 * @file mesh.hpp
 * @brief Cell-centered 2D polygonal meshes in the vertical (x, z) plane.
 *
 * A Mesh2D is built once from vertices and cell vertex loops and is
 * immutable afterwards. Faces are derived from the cell loops; every face
 * stores its unit normal oriented from its first adjacent cell towards the
 * second one (or outward, for boundary faces).
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace richards {

using Index = std::size_t;

struct Point2 {
    double x = 0.0;
    double z = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.z + b.z}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.z - b.z}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.z}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.z * b.z; }
inline double cross(Point2 a, Point2 b) { return a.x * b.z - a.z * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.z); }

/// Raised for malformed topology or degenerate geometry.
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr Index no_cell = static_cast<Index>(-1);

struct Face {
    std::array<Index, 2> vertices{};
    /// cells[1] == no_cell for boundary faces
    std::array<Index, 2> cells{no_cell, no_cell};
    double length = 0.0;
    Point2 normal;    // unit, from cells[0] towards cells[1]
    Point2 centroid;
    /// Index into Mesh2D::tag_names; only meaningful on boundary faces.
    std::size_t tag = 0;

    bool is_boundary() const { return cells[1] == no_cell; }
};

struct Cell {
    std::vector<Index> vertices;  // counter-clockwise
    /// faces[i] joins vertices[i] and vertices[(i+1) % k]
    std::vector<Index> faces;
    Point2 centroid;
    double area = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
};

/// Boundary tag. The condition type (Dirichlet/Neumann) is assigned by the
/// problem definition, per face.
struct BoundaryTag {
    std::string name;
};

class Mesh2D {
public:
    /// Builds a mesh from vertex coordinates and cell vertex loops.
    /// `boundary_tags` maps an unordered vertex pair to a tag name; boundary
    /// faces without an entry get `default_tag` if given, otherwise the
    /// build fails.
    Mesh2D(std::vector<Point2> vertices,
           std::vector<std::vector<Index>> cell_loops,
           const std::map<std::pair<Index, Index>, std::string>& boundary_tags,
           std::optional<std::string> default_tag = std::nullopt);

    const std::vector<Point2>& vertices() const { return vertices_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Face>& faces() const { return faces_; }
    const std::vector<BoundaryTag>& tags() const { return tags_; }

    std::size_t num_cells() const { return cells_.size(); }
    std::size_t num_faces() const { return faces_.size(); }
    std::size_t num_vertices() const { return vertices_.size(); }

    std::size_t num_interior_faces() const
    {
        return static_cast<std::size_t>(std::count_if(
            faces_.begin(), faces_.end(), [](const Face& f) { return !f.is_boundary(); }));
    }

    const std::string& tag_name(const Face& f) const { return tags_.at(f.tag).name; }

    /// Returns the tag index for `name`, if present.
    std::optional<std::size_t> find_tag(const std::string& name) const
    {
        for (std::size_t i = 0; i < tags_.size(); ++i)
            if (tags_[i].name == name) return i;
        return std::nullopt;
    }

    /// +1 if the face normal points out of `cell`, -1 if into it.
    double orientation(Index face, Index cell) const
    {
        return faces_[face].cells[0] == cell ? 1.0 : -1.0;
    }

    /// Faces incident to each vertex.
    const std::vector<std::vector<Index>>& vertex_faces() const { return vertex_faces_; }
    /// Cells incident to each vertex.
    const std::vector<std::vector<Index>>& vertex_cells() const { return vertex_cells_; }

    /// Returns a copy with the stored orientation of `face` reversed. The
    /// face must be interior.
    Mesh2D with_flipped_face(Index face) const
    {
        Mesh2D copy = *this;
        Face& f = copy.faces_.at(face);
        if (f.is_boundary()) throw MeshError("cannot flip a boundary face");
        std::swap(f.cells[0], f.cells[1]);
        f.normal = -1.0 * f.normal;
        return copy;
    }

private:
    void build(const std::map<std::pair<Index, Index>, std::string>& boundary_tags,
               const std::optional<std::string>& default_tag);

    std::vector<Point2> vertices_;
    std::vector<Cell> cells_;
    std::vector<Face> faces_;
    std::vector<BoundaryTag> tags_;
    std::vector<std::vector<Index>> vertex_faces_;
    std::vector<std::vector<Index>> vertex_cells_;
};

inline std::pair<Index, Index> edge_key(Index a, Index b)
{
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

inline Mesh2D::Mesh2D(std::vector<Point2> vertices,
                      std::vector<std::vector<Index>> cell_loops,
                      const std::map<std::pair<Index, Index>, std::string>& boundary_tags,
                      std::optional<std::string> default_tag)
    : vertices_(std::move(vertices))
{
    if (cell_loops.empty()) throw MeshError("mesh has no cells");
    cells_.resize(cell_loops.size());
    for (std::size_t c = 0; c < cell_loops.size(); ++c) cells_[c].vertices = std::move(cell_loops[c]);
    build(boundary_tags, default_tag);
}

inline void Mesh2D::build(const std::map<std::pair<Index, Index>, std::string>& boundary_tags,
                          const std::optional<std::string>& default_tag)
{
    const std::size_t nv = vertices_.size();
    std::map<std::pair<Index, Index>, Index> edge_to_face;

    for (std::size_t c = 0; c < cells_.size(); ++c) {
        Cell& cell = cells_[c];
        const std::size_t k = cell.vertices.size();
        if (k < 3)
            throw MeshError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        for (Index v : cell.vertices)
            if (v >= nv)
                throw MeshError("cell " + std::to_string(c) + " references missing vertex " +
                                std::to_string(v));

        // Shoelace area and centroid; loops are normalized to counter-clockwise.
        double twice_area = 0.0;
        Point2 acc;
        for (std::size_t i = 0; i < k; ++i) {
            const Point2 a = vertices_[cell.vertices[i]];
            const Point2 b = vertices_[cell.vertices[(i + 1) % k]];
            const double w = cross(a, b);
            twice_area += w;
            acc = acc + w * (a + b);
        }
        if (twice_area < 0.0) {
            std::reverse(cell.vertices.begin(), cell.vertices.end());
            twice_area = -twice_area;
            acc = -1.0 * acc;
        }
        if (!(twice_area > 0.0))
            throw MeshError("cell " + std::to_string(c) + " has non-positive area");
        cell.area = 0.5 * twice_area;
        cell.centroid = (1.0 / (3.0 * twice_area)) * acc;

        cell.z_min = cell.z_max = vertices_[cell.vertices[0]].z;
        for (Index v : cell.vertices) {
            cell.z_min = std::min(cell.z_min, vertices_[v].z);
            cell.z_max = std::max(cell.z_max, vertices_[v].z);
        }
        if (!(cell.z_min < cell.z_max))
            throw MeshError("cell " + std::to_string(c) + " has zero vertical extent");

        cell.faces.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            const Index a = cell.vertices[i];
            const Index b = cell.vertices[(i + 1) % k];
            if (a == b) throw MeshError("cell " + std::to_string(c) + " has a repeated vertex");
            const auto key = edge_key(a, b);
            auto it = edge_to_face.find(key);
            if (it == edge_to_face.end()) {
                Face f;
                f.vertices = {a, b};
                f.cells = {c, no_cell};
                const Point2 t = vertices_[b] - vertices_[a];
                f.length = norm(t);
                if (!(f.length > 0.0))
                    throw MeshError("cell " + std::to_string(c) + " has a zero-length face");
                // Counter-clockwise loop: outward normal is the tangent rotated clockwise.
                f.normal = (1.0 / f.length) * Point2{t.z, -t.x};
                f.centroid = 0.5 * (vertices_[a] + vertices_[b]);
                edge_to_face.emplace(key, faces_.size());
                cell.faces[i] = faces_.size();
                faces_.push_back(f);
            } else {
                Face& f = faces_[it->second];
                if (f.cells[1] != no_cell)
                    throw MeshError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                    ") is shared by more than two cells");
                if (f.cells[0] == c)
                    throw MeshError("cell " + std::to_string(c) + " uses an edge twice");
                f.cells[1] = c;
                cell.faces[i] = it->second;
            }
        }
    }

    for (const auto& [key, tag] : boundary_tags) {
        auto it = edge_to_face.find(edge_key(key.first, key.second));
        if (it == edge_to_face.end())
            throw MeshError("boundary tag '" + tag + "' references non-existent edge (" +
                            std::to_string(key.first) + ", " + std::to_string(key.second) + ")");
        if (!faces_[it->second].is_boundary())
            throw MeshError("boundary tag '" + tag + "' placed on interior edge (" +
                            std::to_string(key.first) + ", " + std::to_string(key.second) + ")");
    }

    auto tag_index = [this](const std::string& name) {
        for (std::size_t i = 0; i < tags_.size(); ++i)
            if (tags_[i].name == name) return i;
        tags_.push_back({name});
        return tags_.size() - 1;
    };
    for (Face& f : faces_) {
        if (!f.is_boundary()) continue;
        auto it = boundary_tags.find(edge_key(f.vertices[0], f.vertices[1]));
        if (it != boundary_tags.end()) {
            f.tag = tag_index(it->second);
        } else if (default_tag) {
            f.tag = tag_index(*default_tag);
        } else {
            throw MeshError("boundary edge (" + std::to_string(f.vertices[0]) + ", " +
                            std::to_string(f.vertices[1]) + ") has no boundary tag");
        }
    }

    vertex_faces_.assign(nv, {});
    vertex_cells_.assign(nv, {});
    for (Index f = 0; f < faces_.size(); ++f)
        for (Index v : faces_[f].vertices) vertex_faces_[v].push_back(f);
    for (Index c = 0; c < cells_.size(); ++c)
        for (Index v : cells_[c].vertices) vertex_cells_[v].push_back(c);
}

namespace detail {

inline void check_extent(std::size_t nx, std::size_t nz, double width, double height)
{
    if (nx < 1 || nz < 1) throw std::invalid_argument("mesh needs at least one cell per direction");
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height))
        throw std::invalid_argument("mesh width and height must be positive");
}

inline std::vector<Point2> lattice(std::size_t nx, std::size_t nz, double width, double height)
{
    std::vector<Point2> v;
    v.reserve((nx + 1) * (nz + 1));
    for (std::size_t j = 0; j <= nz; ++j)
        for (std::size_t i = 0; i <= nx; ++i)
            v.push_back({width * static_cast<double>(i) / static_cast<double>(nx),
                         height * static_cast<double>(j) / static_cast<double>(nz)});
    return v;
}

inline std::map<std::pair<Index, Index>, std::string>
rectangle_tags(std::size_t nx, std::size_t nz)
{
    auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
    std::map<std::pair<Index, Index>, std::string> tags;
    for (std::size_t i = 0; i < nx; ++i) {
        tags[edge_key(id(i, 0), id(i + 1, 0))] = "bottom";
        tags[edge_key(id(i, nz), id(i + 1, nz))] = "top";
    }
    for (std::size_t j = 0; j < nz; ++j) {
        tags[edge_key(id(0, j), id(0, j + 1))] = "left";
        tags[edge_key(id(nx, j), id(nx, j + 1))] = "right";
    }
    return tags;
}

} // namespace detail

/// Uniform nx-by-nz rectangular mesh of [0, width] x [0, height]. Boundary
/// faces are tagged left/right/top/bottom.
inline Mesh2D gen_cartesian(std::size_t nx, std::size_t nz, double width, double height)
{
    detail::check_extent(nx, nz, width, height);
    auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
    std::vector<std::vector<Index>> cells;
    cells.reserve(nx * nz);
    for (std::size_t j = 0; j < nz; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    return Mesh2D(detail::lattice(nx, nz, width, height), std::move(cells),
                  detail::rectangle_tags(nx, nz));
}

/// Each rectangle of the nx-by-nz lattice split into two triangles, with
/// the diagonal direction alternating in a checkerboard pattern.
inline Mesh2D gen_triangular(std::size_t nx, std::size_t nz, double width, double height)
{
    detail::check_extent(nx, nz, width, height);
    auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
    std::vector<std::vector<Index>> cells;
    cells.reserve(2 * nx * nz);
    for (std::size_t j = 0; j < nz; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if ((i + j) % 2 == 0) {
                cells.push_back({a, b, c});
                cells.push_back({a, c, d});
            } else {
                cells.push_back({a, b, d});
                cells.push_back({b, c, d});
            }
        }
    }
    return Mesh2D(detail::lattice(nx, nz, width, height), std::move(cells),
                  detail::rectangle_tags(nx, nz));
}

} // namespace richards

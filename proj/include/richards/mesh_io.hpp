/**
 * @file mesh_io.hpp
 * @brief Plain-text mesh reader/writer.
 *
 * Format (one record per line, blank lines and '#' comments ignored):
 *
 *     MESH2D <nvertices> <ncells>
 *     v <x> <z>
 *     c <k> <v1> ... <vk>
 *     b <vertex_a> <vertex_b> <tagname>
 *
 * Faces are derived from the cell loops. Boundary faces without a `b`
 * record are rejected.
 */

#pragma once

#include "richards/mesh.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace richards {

class MeshParseError : public std::runtime_error {
public:
    MeshParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

inline Mesh2D parse_mesh(std::istream& in, const std::string& source = "<stream>")
{
    std::string raw;
    std::size_t lineno = 0;
    bool have_header = false;
    std::size_t nv = 0, nc = 0;
    std::vector<Point2> vertices;
    std::vector<std::vector<Index>> cells;
    std::map<std::pair<Index, Index>, std::string> tags;

    auto fail = [&](const std::string& msg) -> MeshParseError {
        return MeshParseError(source, lineno, msg);
    };

    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        ls.imbue(std::locale::classic());
        std::string key;
        if (!(ls >> key)) continue;

        if (!have_header) {
            if (key != "MESH2D") throw fail("expected 'MESH2D <nvertices> <ncells>' header");
            if (!(ls >> nv >> nc)) throw fail("malformed header");
            have_header = true;
        } else if (key == "v") {
            Point2 p;
            if (!(ls >> p.x >> p.z)) throw fail("malformed vertex record");
            vertices.push_back(p);
        } else if (key == "c") {
            std::size_t k = 0;
            if (!(ls >> k) || k < 3) throw fail("malformed cell record");
            std::vector<Index> loop(k);
            for (auto& v : loop)
                if (!(ls >> v)) throw fail("cell record has fewer than " + std::to_string(k) + " vertices");
            cells.push_back(std::move(loop));
        } else if (key == "b") {
            Index a = 0, b = 0;
            std::string name;
            if (!(ls >> a >> b >> name)) throw fail("malformed boundary record");
            tags[edge_key(a, b)] = name;
        } else {
            throw fail("unknown record '" + key + "'");
        }
        std::string extra;
        if (ls >> extra) throw fail("trailing data '" + extra + "'");
    }

    if (!have_header) throw MeshParseError(source, lineno, "empty mesh file");
    if (vertices.size() != nv)
        throw MeshParseError(source, lineno, "header declares " + std::to_string(nv) +
                                                 " vertices, found " + std::to_string(vertices.size()));
    if (cells.size() != nc)
        throw MeshParseError(source, lineno, "header declares " + std::to_string(nc) +
                                                 " cells, found " + std::to_string(cells.size()));
    return Mesh2D(std::move(vertices), std::move(cells), tags);
}

inline Mesh2D read_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file '" + path + "'");
    return parse_mesh(in, path);
}

inline void format_mesh(const Mesh2D& mesh, std::ostream& out)
{
    out.imbue(std::locale::classic());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "MESH2D " << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
    for (const Point2& p : mesh.vertices()) out << "v " << p.x << ' ' << p.z << '\n';
    for (const Cell& c : mesh.cells()) {
        out << "c " << c.vertices.size();
        for (Index v : c.vertices) out << ' ' << v;
        out << '\n';
    }
    for (const Face& f : mesh.faces())
        if (f.is_boundary())
            out << "b " << f.vertices[0] << ' ' << f.vertices[1] << ' ' << mesh.tag_name(f) << '\n';
}

inline void write_mesh(const Mesh2D& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    format_mesh(mesh, out);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace richards

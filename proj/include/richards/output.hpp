/**
 * @file output.hpp
 * @brief Field export (legacy VTK) and convergence traces (CSV).
 *
 * All writers use the classic locale and round-trip precision, so identical
 * inputs give identical bytes.
 */

#pragma once

#include "richards/continuation.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace richards {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FieldSnapshot {
    std::shared_ptr<const Mesh2D> mesh;
    Vector head;
    Vector psi;
    Vector saturation;
    Vector kr;
};

/// Evaluates the per-cell derived fields at heads h.
inline FieldSnapshot make_snapshot(const ProblemSpec& spec, std::span<const double> h)
{
    const std::size_t nc = spec.grid().num_cells();
    if (h.size() != nc) throw std::invalid_argument("head vector size does not match cell count");
    FieldSnapshot s;
    s.mesh = spec.mesh;
    s.head.assign(h.begin(), h.end());
    s.psi.resize(nc);
    s.saturation.resize(nc);
    s.kr.resize(nc);
    for (Index c = 0; c < nc; ++c) {
        const CellGeometry g = spec.geometry(c);
        const ConstitutiveModel& model = spec.medium_of(c).model;
        s.psi[c] = h[c] - g.z_center;
        s.saturation[c] = std::clamp(saturation(model, h[c], g), 0.0, 1.0);
        s.kr[c] = relative_permeability(model, h[c], g).value;
    }
    return s;
}

namespace detail {

inline void prepare(std::ostream& out)
{
    out.imbue(std::locale::classic());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
}

template <class Writer>
void write_file(const std::string& path, Writer&& w)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw OutputError("cannot open '" + path + "' for writing");
    w(out);
    out.flush();
    if (!out) throw OutputError("write failed for '" + path + "'");
}

inline int vtk_cell_type(std::size_t nverts)
{
    if (nverts == 3) return 5;  // VTK_TRIANGLE
    if (nverts == 4) return 9;  // VTK_QUAD
    return 7;                   // VTK_POLYGON
}

} // namespace detail

/// Legacy ASCII VTK unstructured grid. Points are written as (x, 0, z).
inline void format_vtk(const FieldSnapshot& s, std::ostream& out)
{
    const Mesh2D& m = *s.mesh;
    const std::size_t nc = m.num_cells();
    if (s.head.size() != nc || s.psi.size() != nc || s.saturation.size() != nc || s.kr.size() != nc)
        throw std::invalid_argument("snapshot arrays do not match the mesh cell count");
    detail::prepare(out);
    out << "# vtk DataFile Version 3.0\n";
    out << "steady-state Richards solution\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << m.num_vertices() << " double\n";
    for (const Point2& p : m.vertices()) out << p.x << " 0 " << p.z << '\n';
    std::size_t total = 0;
    for (const Cell& c : m.cells()) total += c.vertices.size() + 1;
    out << "CELLS " << nc << ' ' << total << '\n';
    for (const Cell& c : m.cells()) {
        out << c.vertices.size();
        for (Index v : c.vertices) out << ' ' << v;
        out << '\n';
    }
    out << "CELL_TYPES " << nc << '\n';
    for (const Cell& c : m.cells()) out << detail::vtk_cell_type(c.vertices.size()) << '\n';
    out << "CELL_DATA " << nc << '\n';
    auto array = [&](const char* name, const Vector& v) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (double x : v) out << x << '\n';
    };
    array("head", s.head);
    array("psi", s.psi);
    array("saturation", s.saturation);
    array("kr", s.kr);
}

inline void write_vtk(const FieldSnapshot& s, const std::string& path)
{
    detail::write_file(path, [&](std::ostream& out) { format_vtk(s, out); });
}

inline constexpr const char* trace_csv_header = "iter,phase,res2,resinf,omega,backtracks,liniters";

inline void format_trace_row(std::ostream& out, const IterationRecord& r)
{
    out << r.iter << ',' << to_string(r.phase) << ',' << r.res2 << ',' << r.resinf << ',' << r.omega << ','
        << r.backtracks << ',' << r.linear.iterations << '\n';
}

/// One header row, then one row per record after the initial state.
inline void format_convergence_csv(const ConvergenceTrace& trace, std::ostream& out)
{
    detail::prepare(out);
    out << trace_csv_header << '\n';
    for (std::size_t i = 1; i < trace.records.size(); ++i) format_trace_row(out, trace.records[i]);
}

/// Every iteration of every continuation step, prefixed by the step index
/// and its target q.
inline void format_convergence_csv(const ContinuationReport& report, std::ostream& out)
{
    detail::prepare(out);
    out << "step,q," << trace_csv_header << '\n';
    for (std::size_t s = 0; s < report.steps.size(); ++s) {
        const ContinuationStep& step = report.steps[s];
        for (std::size_t i = 1; i < step.trace.records.size(); ++i) {
            out << s << ',' << step.q_target << ',';
            format_trace_row(out, step.trace.records[i]);
        }
    }
}

/// One row per continuation step.
inline void format_report_csv(const ContinuationReport& report, std::ostream& out)
{
    detail::prepare(out);
    out << "step,linear_stage,q,delta_q,outcome,iterations,initial_hash,final_hash\n";
    for (std::size_t s = 0; s < report.steps.size(); ++s) {
        const ContinuationStep& st = report.steps[s];
        out << s << ',' << (st.linear_stage ? 1 : 0) << ',' << st.q_target << ',' << st.delta_q << ','
            << to_string(st.outcome) << ',' << st.iterations() << ',' << std::hex << st.initial_hash << ','
            << st.final_hash << std::dec << '\n';
    }
}

template <class T>
void write_convergence_csv(const T& trace_or_report, const std::string& path)
{
    detail::write_file(path, [&](std::ostream& out) { format_convergence_csv(trace_or_report, out); });
}

inline void write_report_csv(const ContinuationReport& report, const std::string& path)
{
    detail::write_file(path, [&](std::ostream& out) { format_report_csv(report, out); });
}

} // namespace richards

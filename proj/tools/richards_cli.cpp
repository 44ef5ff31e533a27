// richards: run steady-state Richards presets and solver-comparison sweeps.
//
//   richards solve --preset dam-vgm --mesh cart5500 --solver newton --out run1
//   richards sweep --preset dam-vgm --scheme tpfa,mpfa --solver newton,mixed --out sweep1
//
// Exit status: 0 success, 1 usage or configuration error, 2 solver failure
// (solve only; a sweep reports failures as table rows).

#include "run_config.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace richards;
using namespace richards::cli;

namespace {

struct Flags {
    std::string config;
    std::string preset, mesh, out;
    // optional so that an explicitly empty sweep list is distinguishable
    std::optional<std::string> scheme, solver, continuation;
    bool no_timing = false;
};

void add_common(CLI::App* sub, Flags& f, bool lists)
{
    sub->add_option("--config", f.config, "INI-style configuration file");
    sub->add_option("--preset", f.preset, "dam-unconfined | dam-vgm | layered-slab | verify-linear");
    sub->add_option("--mesh", f.mesh, "cartesian:NXxNZ | triangular:NXxNZ | file:PATH | cart400 | cart5500 | ...");
    const char* list = lists ? " (comma-separated)" : "";
    sub->add_option("--scheme", f.scheme, std::string("tpfa | mpfa") + list);
    sub->add_option("--solver", f.solver, std::string("newton | picard | mixed") + list);
    sub->add_option("--continuation", f.continuation, std::string("linear | power") + list);
    sub->add_option("--out", f.out, "output directory");
}

/// Config file first, then flags on top.
RunConfig resolve(const Flags& f, bool sweep)
{
    RunConfig c;
    if (!f.config.empty()) load_config(c, f.config);
    if (!f.preset.empty()) check_preset(f.preset), c.preset = f.preset;
    if (!f.mesh.empty()) c.mesh = f.mesh;
    if (!f.out.empty()) c.out_dir = f.out;
    if (sweep) {
        if (f.scheme) c.sweep_schemes = parse_list(*f.scheme, parse_scheme);
        if (f.solver) c.sweep_solvers = parse_list(*f.solver, parse_solver);
        if (f.continuation) c.sweep_kinds = parse_list(*f.continuation, parse_kind);
        if (f.no_timing) c.sweep_timing = false;
    } else {
        if (f.scheme) c.scheme = parse_scheme(*f.scheme);
        if (f.solver) c.solver.method = parse_solver(*f.solver);
        if (f.continuation) c.continuation.kind = parse_kind(*f.continuation);
    }
    validate(c);
    return c;
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) throw OutputError("cannot write '" + p.string() + "'");
}

int cmd_solve(const RunConfig& c)
{
    const ProblemSpec spec = build_problem(c);
    fs::create_directories(c.out_dir);
    const Discretization d(spec, c.scheme);

    reset_unconfined_clamp_activations();
    const ContinuationResult r = run_continuation(d, c.solver, c.continuation);
    const std::size_t clamps = unconfined_clamp_activations();

    const fs::path dir(c.out_dir);
    write_report_csv(r.report, (dir / "report.csv").string());
    write_convergence_csv(r.report, (dir / "convergence.csv").string());
    for (std::size_t s = 0; s < r.report.steps.size(); ++s) {
        char name[32];
        std::snprintf(name, sizeof name, "trace_step%03zu.csv", s);
        write_convergence_csv(r.report.steps[s].trace, (dir / name).string());
    }
    write_vtk(make_snapshot(spec, r.head), (dir / "field.vtk").string());

    std::cout << c.preset << " on " << spec.grid().num_cells() << " cells, " << to_string(c.scheme) << ", "
              << to_string(c.solver.method) << ", " << to_string(c.continuation.kind) << '\n'
              << "outcome: " << to_string(r.report.outcome) << ", final q = " << r.report.final_q
              << ", successful steps = " << r.report.successful_steps()
              << ", failed steps = " << r.report.failed_steps()
              << ", total iterations = " << r.report.total_iterations() << '\n'
              << "output: " << dir.string() << '\n';
    if (clamps > 0)
        std::cerr << "warning: unconfined water-content floor was applied " << clamps << " times\n";
    return r.report.success() ? 0 : 2;
}

int cmd_sweep(const RunConfig& c)
{
    const ProblemSpec spec = build_problem(c);
    fs::create_directories(c.out_dir);
    const auto cases = sweep_matrix(c.sweep_schemes, c.sweep_solvers, c.sweep_kinds);
    const auto rows = run_sweep(spec, cases, c.solver, c.continuation, sweep_threads_from_env());

    std::ostringstream csv, table;
    format_sweep_csv(rows, csv, c.sweep_timing);
    format_sweep_table(rows, table, c.sweep_timing);
    const fs::path dir(c.out_dir);
    write_text(dir / "sweep.csv", csv.str());
    write_text(dir / "table.txt", table.str());

    std::cout << std::left << std::setw(8) << "scheme" << std::setw(8) << "solver" << std::setw(8) << "kind"
              << std::setw(8) << "outcome" << std::right << std::setw(10) << "time, s" << std::setw(10) << "cont.st."
              << std::setw(10) << "failed" << std::setw(10) << "tot.iter." << '\n';
    for (const SweepRow& r : rows) {
        std::cout << std::left << std::setw(8) << to_string(r.config.scheme) << std::setw(8)
                  << to_string(r.config.method) << std::setw(8) << to_string(r.config.kind) << std::setw(8)
                  << (r.success ? "ok" : "Fail") << std::right << std::setw(10) << std::fixed
                  << std::setprecision(2) << (c.sweep_timing ? r.wall_seconds : 0.0) << std::setw(10)
                  << r.cont_success << std::setw(10) << r.cont_failed << std::setw(10) << r.total_iters << '\n';
        if (!r.error.empty()) std::cerr << "run error: " << r.error << '\n';
    }
    std::cout << rows.size() << " runs\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady-state Richards equation solver with nonlinearity continuation"};
    app.require_subcommand(1);
    Flags solve_flags, sweep_flags;
    CLI::App* solve = app.add_subcommand("solve", "run one continuation solve and write CSV and VTK output");
    add_common(solve, solve_flags, false);
    CLI::App* sweep = app.add_subcommand("sweep", "run a scheme x solver x continuation comparison");
    add_common(sweep, sweep_flags, true);
    sweep->add_flag("--no-timing", sweep_flags.no_timing, "write zero wall times so output is reproducible");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const bool is_sweep = sweep->parsed();
    RunConfig cfg;
    try {
        cfg = resolve(is_sweep ? sweep_flags : solve_flags, is_sweep);
    } catch (const ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 1;
    }

    try {
        return is_sweep ? cmd_sweep(cfg) : cmd_solve(cfg);
    } catch (const MeshParseError& e) {
        std::cerr << "mesh error: " << e.what() << '\n';
        return 1;
    } catch (const MeshError& e) {
        std::cerr << "mesh error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

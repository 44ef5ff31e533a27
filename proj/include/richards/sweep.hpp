/**
 * @file sweep.hpp
 * @brief Solver-comparison sweeps over scheme x solver x continuation kind.
 */

#pragma once

#include "richards/continuation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace richards {

struct SweepCase {
    Scheme scheme = Scheme::TPFA;
    SolverMethod method = SolverMethod::Newton;
    ContinuationKind kind = ContinuationKind::Linear;
};

/// Cartesian product in scheme-major order.
inline std::vector<SweepCase> sweep_matrix(const std::vector<Scheme>& schemes, const std::vector<SolverMethod>& methods,
                                           const std::vector<ContinuationKind>& kinds)
{
    std::vector<SweepCase> out;
    for (Scheme s : schemes)
        for (SolverMethod m : methods)
            for (ContinuationKind k : kinds) out.push_back({s, m, k});
    return out;
}

struct SweepRow {
    SweepCase config;
    bool success = false;
    double wall_seconds = 0.0;
    std::size_t cont_success = 0;
    std::size_t cont_failed = 0;
    std::size_t total_iters = 0;
    ContinuationReport report;
    Vector head;
    /// set if the run threw (e.g. a degenerate MPFA interaction region)
    std::string error;
};

/// Worker count from RICHARDS_THREADS (default 1, at least 1).
inline std::size_t sweep_threads_from_env()
{
    if (const char* v = std::getenv("RICHARDS_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(v, &end, 10);
        if (end != v && n > 0) return static_cast<std::size_t>(n);
    }
    return 1;
}

/// Runs every case independently. `solver.method` and `cont.kind` are
/// overridden per case. Rows come back in case order.
inline std::vector<SweepRow> run_sweep(const ProblemSpec& spec, const std::vector<SweepCase>& cases,
                                       const SolverConfig& solver, const ContinuationConfig& cont,
                                       std::size_t threads = 1)
{
    std::vector<SweepRow> rows(cases.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            SweepRow& row = rows[i];
            row.config = cases[i];
            SolverConfig sc = solver;
            sc.method = cases[i].method;
            ContinuationConfig cc = cont;
            cc.kind = cases[i].kind;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const Discretization d(spec, cases[i].scheme);
                ContinuationResult r = run_continuation(d, sc, cc);
                row.report = std::move(r.report);
                row.head = std::move(r.head);
                row.success = row.report.success();
                row.cont_success = row.report.successful_steps();
                row.cont_failed = row.report.failed_steps();
                row.total_iters = row.report.total_iterations();
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(threads, cases.size()));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

inline constexpr const char* sweep_csv_header =
    "scheme,solver,kind,outcome,wall_seconds,cont_success,cont_failed,total_iters";

/// CSV table; with `timing` false the wall_seconds column is written as 0
/// so the output is reproducible byte for byte.
inline void format_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out, bool timing = true)
{
    out.imbue(std::locale::classic());
    out << sweep_csv_header << '\n';
    for (const SweepRow& r : rows) {
        out << to_string(r.config.scheme) << ',' << to_string(r.config.method) << ',' << to_string(r.config.kind) << ','
            << (r.success ? "ok" : "Fail") << ',' << std::fixed << std::setprecision(3)
            << (timing ? r.wall_seconds : 0.0) << std::defaultfloat << ',' << r.cont_success << ',' << r.cont_failed
            << ',' << r.total_iters << '\n';
    }
}

/**
 * Aligned comparison table: one line per (scheme, kind), and for each
 * solver the columns "Time, s", "Cont.st." and "Tot.iter.". Failed runs
 * show "Fail" in the time column.
 */
inline void format_sweep_table(const std::vector<SweepRow>& rows, std::ostream& out, bool timing = true)
{
    out.imbue(std::locale::classic());
    std::vector<SolverMethod> methods;
    std::vector<std::pair<Scheme, ContinuationKind>> lines;
    for (const SweepRow& r : rows) {
        if (std::find(methods.begin(), methods.end(), r.config.method) == methods.end())
            methods.push_back(r.config.method);
        const std::pair key{r.config.scheme, r.config.kind};
        if (std::find(lines.begin(), lines.end(), key) == lines.end()) lines.push_back(key);
    }
    constexpr int label_w = 16, col_w = 10;
    out << std::left << std::setw(label_w) << "";
    for (SolverMethod m : methods) out << " | " << std::setw(3 * col_w + 2) << to_string(m);
    out << '\n' << std::setw(label_w) << "";
    for (std::size_t i = 0; i < methods.size(); ++i)
        out << " | " << std::right << std::setw(col_w) << "Time, s" << ' ' << std::setw(col_w) << "Cont.st." << ' '
            << std::setw(col_w) << "Tot.iter." << std::left;
    out << '\n';
    for (const auto& [scheme, kind] : lines) {
        out << std::left << std::setw(label_w) << (std::string(to_string(scheme)) + ", " + to_string(kind));
        for (SolverMethod m : methods) {
            auto it = std::find_if(rows.begin(), rows.end(), [&](const SweepRow& r) {
                return r.config.scheme == scheme && r.config.kind == kind && r.config.method == m;
            });
            out << " | " << std::right;
            if (it == rows.end()) {
                out << std::setw(3 * col_w + 2) << "";
            } else {
                std::ostringstream t;
                t.imbue(std::locale::classic());
                if (it->success) t << std::fixed << std::setprecision(1) << (timing ? it->wall_seconds : 0.0);
                else t << "Fail";
                out << std::setw(col_w) << t.str() << ' ' << std::setw(col_w) << it->cont_success << ' '
                    << std::setw(col_w) << it->total_iters;
            }
            out << std::left;
        }
        out << '\n';
    }
}

} // namespace richards

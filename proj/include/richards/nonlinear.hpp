/**
 * @file nonlinear.hpp
 * @brief Newton, Picard and mixed Picard-Newton iterations.
 *
 * All solvers share the update h^{k+1} = h^k + omega dh, where dh solves
 *
 *     J(h^k) dh = -F(h^k)   (Newton)
 *     A(h^k) dh = -F(h^k)   (Picard, update form of A(h^k) h^{k+1} = b(h^k))
 *
 * and omega comes from, in order of precedence: the fixed warm-up
 * relaxation, the Armijo line search, or a full step. Iterations stop when
 * ||F||_2 < eps_rel ||F(h^0)||_2 or ||F||_inf < eps_abs; they fail on the
 * iteration cap, on ||F||_2 > eps_div, on line-search exhaustion or on a
 * failed linear solve. Failures are reported in the trace, never thrown.
 */

#pragma once

#include "richards/assembly.hpp"
#include "richards/line_search.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace richards {

enum class SolverMethod { Newton, Picard, Mixed };

inline const char* to_string(SolverMethod m)
{
    switch (m) {
    case SolverMethod::Newton: return "newton";
    case SolverMethod::Picard: return "picard";
    default: return "mixed";
    }
}

struct LineSearchConfig : LineSearchParams {
    bool enabled = true;
    /// Line search is skipped for iterations 1..enabled_after.
    std::size_t enabled_after = 5;
};

struct WarmupConfig {
    /// Iterations 1..nit_nls use omega_fixed and no line search.
    std::size_t nit_nls = 0;
    double omega_fixed = 0.1;
};

struct SolverConfig {
    SolverMethod method = SolverMethod::Newton;
    /// Picard iterations before switching to Newton (Mixed only).
    std::size_t nit_pic = 5;
    double eps_rel = 1e-5;
    double eps_abs = 1e-6;
    std::size_t nit_max = 50;
    double eps_div = 1e15;
    LineSearchConfig line_search;
    WarmupConfig warmup;
    LinearSolverOptions linear;

    void validate() const
    {
        if (!(eps_rel > 0.0 && eps_rel < 1.0)) throw std::invalid_argument("eps_rel must be in (0, 1)");
        if (!(eps_abs > 0.0)) throw std::invalid_argument("eps_abs must be positive");
        if (!(eps_div > 0.0)) throw std::invalid_argument("eps_div must be positive");
        if (!(line_search.alpha > 0.0 && line_search.alpha < 1.0))
            throw std::invalid_argument("line-search alpha must be in (0, 1)");
        if (!(line_search.gamma > 0.0 && line_search.gamma < 1.0))
            throw std::invalid_argument("line-search gamma must be in (0, 1)");
        if (!(warmup.omega_fixed > 0.0 && warmup.omega_fixed <= 1.0))
            throw std::invalid_argument("omega_fixed must be in (0, 1]");
        if (!(linear.tol > 0.0 && linear.tol < 1.0)) throw std::invalid_argument("linear tolerance must be in (0, 1)");
    }

    /// Linearization used at iteration k (1-based).
    SolverMethod step_kind(std::size_t k) const
    {
        if (method == SolverMethod::Mixed) return k <= nit_pic ? SolverMethod::Picard : SolverMethod::Newton;
        return method;
    }

    bool is_warmup(std::size_t k) const { return k <= warmup.nit_nls; }

    bool uses_line_search(std::size_t k) const
    {
        return line_search.enabled && !is_warmup(k) && k > line_search.enabled_after;
    }
};

enum class SolveOutcome { Converged, MaxIterations, Diverged, LineSearchFailed, LinearSolveFailed };

inline const char* to_string(SolveOutcome o)
{
    switch (o) {
    case SolveOutcome::Converged: return "converged";
    case SolveOutcome::MaxIterations: return "max-iterations";
    case SolveOutcome::Diverged: return "diverged";
    case SolveOutcome::LineSearchFailed: return "line-search-failed";
    default: return "linear-solve-failed";
    }
}

enum class Phase { Initial, Picard, Newton };

inline const char* to_string(Phase p)
{
    switch (p) {
    case Phase::Initial: return "init";
    case Phase::Picard: return "picard";
    default: return "newton";
    }
}

struct IterationRecord {
    std::size_t iter = 0;
    Phase phase = Phase::Initial;
    bool warmup = false;
    bool line_search = false;
    /// false if the iterate was not updated (failed line search or linear solve)
    bool accepted = true;
    double res2 = 0.0;
    double resinf = 0.0;
    double omega = 0.0;
    std::size_t backtracks = 0;
    LinearSolveReport linear;

    bool operator==(const IterationRecord&) const = default;
};

struct ConvergenceTrace {
    std::vector<IterationRecord> records;
    SolveOutcome outcome = SolveOutcome::MaxIterations;

    /// Number of nonlinear iterations performed (records after the initial one).
    std::size_t iterations() const { return records.empty() ? 0 : records.size() - 1; }
    bool converged() const { return outcome == SolveOutcome::Converged; }
    bool operator==(const ConvergenceTrace&) const = default;
};

struct StepResult {
    Vector update;
    LinearSolveReport linear;
    bool ok = false;
    std::string error;
};

namespace detail {

inline StepResult solve_for_update(const SparseMatrix& M, std::span<const double> F, const LinearSolverOptions& opt)
{
    StepResult r;
    Vector rhs(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) rhs[i] = -F[i];
    try {
        auto [x, rep] = solve(M, rhs, opt);
        r.update = std::move(x);
        r.linear = rep;
        r.ok = rep.converged;
        if (!r.ok) r.error = "linear solver did not reach tolerance";
    } catch (const SingularMatrixError& e) {
        r.error = e.what();
    }
    return r;
}

} // namespace detail

/// Solves J(h) dh = -F(h).
inline StepResult newton_step(const Discretization& d, std::span<const double> h, Continuation cont,
                              const LinearSolverOptions& opt = {})
{
    const AssemblyOutput a = d.assemble_jacobian(h, cont);
    return detail::solve_for_update(a.matrix, a.residual, opt);
}

/// Solves A(h) dh = -F(h).
inline StepResult picard_step(const Discretization& d, std::span<const double> h, Continuation cont,
                              const LinearSolverOptions& opt = {})
{
    const AssemblyOutput a = d.assemble(h, cont);
    return detail::solve_for_update(a.matrix, a.residual, opt);
}

/// Classical Picard iterate A(h)^{-1} b(h).
inline StepResult picard_classical(const Discretization& d, std::span<const double> h, Continuation cont,
                                   const LinearSolverOptions& opt = {})
{
    const AssemblyOutput a = d.assemble(h, cont);
    StepResult r;
    try {
        auto [x, rep] = solve(a.matrix, a.rhs, opt);
        r.update = std::move(x);
        r.linear = rep;
        r.ok = rep.converged;
    } catch (const SingularMatrixError& e) {
        r.error = e.what();
    }
    return r;
}

/// Armijo line search along dh from h, re-evaluating the full residual for
/// every trial. On success `accepted_residual` holds F at the new iterate.
inline LineSearchResult armijo_line_search(const Discretization& d, std::span<const double> h,
                                           std::span<const double> dh, Continuation cont,
                                           const LineSearchParams& params, Vector* accepted_residual = nullptr)
{
    const double f0 = norm2(d.residual(h, cont));
    Vector trial(h.size());
    Vector best;
    auto eval = [&](double omega) {
        for (std::size_t i = 0; i < h.size(); ++i) trial[i] = h[i] + omega * dh[i];
        Vector F = d.residual(trial, cont);
        const double n = norm2(F);
        best = std::move(F);
        return n;
    };
    LineSearchResult r = armijo_backtrack(f0, eval, params);
    if (r.accepted && accepted_residual) *accepted_residual = std::move(best);
    return r;
}

struct NonlinearResult {
    Vector head;
    ConvergenceTrace trace;
};

inline NonlinearResult solve_nonlinear(const Discretization& d, Vector h0, Continuation cont,
                                       const SolverConfig& cfg)
{
    cfg.validate();
    if (h0.size() != d.size()) throw std::invalid_argument("initial guess size does not match cell count");

    NonlinearResult out;
    Vector& h = out.head;
    h = std::move(h0);
    ConvergenceTrace& trace = out.trace;

    Vector F = d.residual(h, cont);
    const double r0 = norm2(F);
    {
        IterationRecord rec;
        rec.res2 = r0;
        rec.resinf = norm_inf(F);
        trace.records.push_back(rec);
        if (!std::isfinite(r0) || r0 > cfg.eps_div) {
            trace.outcome = SolveOutcome::Diverged;
            return out;
        }
        if (rec.resinf < cfg.eps_abs) {
            trace.outcome = SolveOutcome::Converged;
            return out;
        }
    }

    for (std::size_t k = 1; k <= cfg.nit_max; ++k) {
        IterationRecord rec;
        rec.iter = k;
        const SolverMethod kind = cfg.step_kind(k);
        rec.phase = kind == SolverMethod::Picard ? Phase::Picard : Phase::Newton;
        rec.warmup = cfg.is_warmup(k);
        rec.line_search = cfg.uses_line_search(k);

        const AssemblyOutput a = kind == SolverMethod::Picard ? d.assemble(h, cont) : d.assemble_jacobian(h, cont);
        const StepResult step = detail::solve_for_update(a.matrix, F, cfg.linear);
        rec.linear = step.linear;
        if (!step.ok) {
            rec.accepted = false;
            rec.res2 = trace.records.back().res2;
            rec.resinf = trace.records.back().resinf;
            trace.records.push_back(rec);
            trace.outcome = SolveOutcome::LinearSolveFailed;
            return out;
        }

        if (rec.line_search) {
            Vector Fnew;
            const LineSearchResult ls = armijo_line_search(d, h, step.update, cont, cfg.line_search, &Fnew);
            rec.backtracks = ls.backtracks;
            if (!ls.accepted) {
                rec.accepted = false;
                rec.omega = ls.omega;
                rec.res2 = trace.records.back().res2;
                rec.resinf = trace.records.back().resinf;
                trace.records.push_back(rec);
                trace.outcome = SolveOutcome::LineSearchFailed;
                return out;
            }
            rec.omega = ls.omega;
            for (std::size_t i = 0; i < h.size(); ++i) h[i] += ls.omega * step.update[i];
            F = std::move(Fnew);
        } else {
            rec.omega = rec.warmup ? cfg.warmup.omega_fixed : 1.0;
            for (std::size_t i = 0; i < h.size(); ++i) h[i] += rec.omega * step.update[i];
            F = d.residual(h, cont);
        }

        rec.res2 = norm2(F);
        rec.resinf = norm_inf(F);
        trace.records.push_back(rec);

        if (!std::isfinite(rec.res2) || rec.res2 > cfg.eps_div) {
            trace.outcome = SolveOutcome::Diverged;
            return out;
        }
        if (rec.res2 < cfg.eps_rel * r0 || rec.resinf < cfg.eps_abs) {
            trace.outcome = SolveOutcome::Converged;
            return out;
        }
    }
    trace.outcome = SolveOutcome::MaxIterations;
    return out;
}

} // namespace richards

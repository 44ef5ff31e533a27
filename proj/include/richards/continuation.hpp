/**
 * @file continuation.hpp
 * @brief Nonlinearity continuation driver.
 *
 * The relative permeability is replaced by K(h, q) with K(h, 0) = 1 and
 * K(h, 1) = K_r(h). The q = 0 problem is linear; its solution seeds a
 * nonlinear solve at some q_1 > 0, whose solution seeds q_2 > q_1, and so
 * on until q = 1. Steps are chosen adaptively: a failed step is retried
 * from the last successful state with a smaller increment, a successful
 * one enlarges the next increment.
 */

#pragma once

#include "richards/nonlinear.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace richards {

struct ContinuationConfig {
    ContinuationKind kind = ContinuationKind::Linear;
    double initial_step = 1.0;
    double decrease = 0.5;
    double increase = 2.0;
    double min_step = 1e-4;
    /// attempted steps after the linear stage
    std::size_t max_steps = 100;

    void validate() const
    {
        if (!(decrease > 0.0 && decrease < 1.0)) throw std::invalid_argument("step decrease factor must be in (0, 1)");
        if (!(increase > 1.0)) throw std::invalid_argument("step increase factor must exceed 1");
        if (!(min_step > 0.0 && min_step <= initial_step && initial_step <= 1.0))
            throw std::invalid_argument("need 0 < min_step <= initial_step <= 1");
    }
};

/// FNV-1a over the bytes of a state vector.
inline std::uint64_t state_hash(std::span<const double> h)
{
    std::uint64_t x = 1469598103934665603ull;
    for (double v : h) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            x ^= b;
            x *= 1099511628211ull;
        }
    }
    return x;
}

struct ContinuationStep {
    /// true for the q = 0 stage
    bool linear_stage = false;
    double q_target = 0.0;
    /// increment used to reach q_target (0 for the linear stage)
    double delta_q = 0.0;
    SolveOutcome outcome = SolveOutcome::MaxIterations;
    ConvergenceTrace trace;
    std::uint64_t initial_hash = 0;
    std::uint64_t final_hash = 0;

    std::size_t iterations() const { return trace.iterations(); }
    bool succeeded() const { return outcome == SolveOutcome::Converged; }
};

enum class ContinuationOutcome { Success, LinearStageFailed, StepTooSmall, StepBudgetExhausted };

inline const char* to_string(ContinuationOutcome o)
{
    switch (o) {
    case ContinuationOutcome::Success: return "success";
    case ContinuationOutcome::LinearStageFailed: return "linear-stage-failed";
    case ContinuationOutcome::StepTooSmall: return "step-too-small";
    default: return "step-budget-exhausted";
    }
}

struct ContinuationReport {
    std::vector<ContinuationStep> steps;
    ContinuationOutcome outcome = ContinuationOutcome::LinearStageFailed;
    double final_q = 0.0;

    bool success() const { return outcome == ContinuationOutcome::Success; }

    /// Successful steps with q > 0 (the linear stage is not counted).
    std::size_t successful_steps() const
    {
        return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const ContinuationStep& s) {
            return !s.linear_stage && s.succeeded();
        }));
    }

    std::size_t failed_steps() const
    {
        return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const ContinuationStep& s) {
            return !s.linear_stage && !s.succeeded();
        }));
    }

    /// All nonlinear iterations, including the linear stage and failed steps.
    std::size_t total_iterations() const
    {
        std::size_t n = 0;
        for (const auto& s : steps) n += s.iterations();
        return n;
    }
};

struct ContinuationResult {
    Vector head;
    ContinuationReport report;
};

/// Mean of the Dirichlet boundary heads, as a constant field.
inline Vector dirichlet_mean_guess(const ProblemSpec& spec)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (Index f : spec.dirichlet_faces()) {
        sum += spec.face_bc[f].value;
        ++n;
    }
    return Vector(spec.grid().num_cells(), n ? sum / static_cast<double>(n) : 0.0);
}

inline ContinuationResult run_continuation(const Discretization& d, const SolverConfig& solver,
                                           const ContinuationConfig& cc)
{
    solver.validate();
    cc.validate();
    ContinuationResult out;
    ContinuationReport& rep = out.report;

    {
        Vector guess = dirichlet_mean_guess(d.problem());
        ContinuationStep stage;
        stage.linear_stage = true;
        stage.initial_hash = state_hash(guess);
        NonlinearResult r = solve_nonlinear(d, std::move(guess), {0.0, cc.kind}, solver);
        stage.outcome = r.trace.outcome;
        stage.final_hash = state_hash(r.head);
        stage.trace = std::move(r.trace);
        rep.steps.push_back(std::move(stage));
        out.head = std::move(r.head);
        if (!rep.steps.back().succeeded()) {
            rep.outcome = ContinuationOutcome::LinearStageFailed;
            return out;
        }
    }

    double q = 0.0;
    double dq = cc.initial_step;
    std::size_t attempts = 0;
    while (q < 1.0) {
        if (attempts == cc.max_steps) {
            rep.outcome = ContinuationOutcome::StepBudgetExhausted;
            rep.final_q = q;
            return out;
        }
        ++attempts;
        double q_next = std::min(1.0, q + dq);
        if (1.0 - q_next < 1e-12) q_next = 1.0;

        ContinuationStep step;
        step.q_target = q_next;
        step.delta_q = q_next - q;
        step.initial_hash = state_hash(out.head);
        NonlinearResult r = solve_nonlinear(d, out.head, {q_next, cc.kind}, solver);
        step.outcome = r.trace.outcome;
        step.final_hash = state_hash(r.head);
        step.trace = std::move(r.trace);
        const bool ok = step.succeeded();
        rep.steps.push_back(std::move(step));

        if (ok) {
            q = q_next;
            out.head = std::move(r.head);
            dq = std::min(cc.increase * dq, 1.0 - q);
        } else {
            dq *= cc.decrease;
            if (dq < cc.min_step) {
                rep.outcome = ContinuationOutcome::StepTooSmall;
                rep.final_q = q;
                return out;
            }
        }
    }
    rep.outcome = ContinuationOutcome::Success;
    rep.final_q = 1.0;
    return out;
}

} // namespace richards

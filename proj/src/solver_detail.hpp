#pragma once

// Bookkeeping shared by the two outer solvers.

#include "iafb/afb_solver.hpp"

namespace iafb::detail {

/// Fills objective, objective_gap and lyapunov of `rec` from the new state.
void annotate_record(IterationRecord& rec, const SolverState& next, double mu,
                     const Problem& problem);

/// |lhs - rhs| / max(|terms|, tiny) for an identity sum(terms) = 0.
double relative_residual(std::initializer_list<double> terms);

template <typename Step>
SolveResult run_loop(SolverState state, const StopRule& stop, const RecordSink& sink, Step step) {
    SolveResult out;
    while (state.k < stop.max_outer) {
        if (stop.max_total_inner && state.cumulative_inner >= *stop.max_total_inner) break;
        StepResult r;
        try {
            r = step(state);
        } catch (const SolverError& e) {
            if (e.kind() != SolverError::Kind::WeightOverflow) throw;
            out.weight_overflow = true;
            break;
        }
        state = std::move(r.state);
        if (sink) sink(r.record);
        const bool reached = stop.target_gap && r.record.objective_gap &&
                             *r.record.objective_gap <= *stop.target_gap;
        out.records.push_back(std::move(r.record));
        if (reached) break;
    }
    out.state = std::move(state);
    return out;
}

}  // namespace iafb::detail

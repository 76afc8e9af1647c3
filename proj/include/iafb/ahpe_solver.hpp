#pragma once

#include <cstddef>

#include "iafb/afb_solver.hpp"
#include "iafb/schedules.hpp"

namespace iafb {

/// Accelerated hybrid proximal extragradient method for min g (no smooth part).
struct AhpeConfig {
    SequenceRule steps = SequenceRule::constant(1.0);
    /// sigma_k in [0, 1].
    SequenceRule sigma = SequenceRule::zero();
    double mu = 0.0;
    std::size_t max_inner_per_prox = 10000;
    bool warm_start = true;
    bool verify_certificates = true;

    /// Rejects sigma = 1 together with mu = 0, where the A-update is undefined.
    void validate() const;
};

/// A_{k+1} for step lambda, relative error sigma and strong convexity mu.
/// Throws std::domain_error when 1 - sigma^2 + lambda mu sigma <= 0.
double a_next_ahpe(double A, double lambda, double sigma, double mu);

/// Relative residuals of the two identities satisfied by a_next_ahpe: the
/// general one (sigma in (0, 1]) and the sigma = 0 one.
double ahpe_identity_residual(double A, double A_next, double lambda, double sigma, double mu);
double ahpe_identity_residual_sigma0(double A, double A_next, double lambda, double mu);

StepResult ahpe_step(const SolverState& state, const AhpeConfig& config, const Problem& problem);

SolveResult ahpe_solve(const Problem& problem, const AhpeConfig& config, const StopRule& stop,
                       const RecordSink& sink = {});

}  // namespace iafb

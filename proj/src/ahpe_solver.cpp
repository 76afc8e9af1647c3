#include "iafb/ahpe_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "iafb/guarantees.hpp"
#include "iafb/inexact_criterion.hpp"
#include "solver_detail.hpp"

namespace iafb {

void AhpeConfig::validate() const {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be nonnegative");
    if (max_inner_per_prox == 0) throw std::invalid_argument("max_inner_per_prox must be positive");
    sigma.require_range(0.0, 1.0, false, "sigma");
    steps.require_range(0.0, std::numeric_limits<double>::infinity(), true, "step");
    using Kind = SequenceRule::Kind;
    if (steps.kind() == Kind::Zero || (steps.kind() == Kind::Constant && steps.coefficient() == 0.0)) {
        throw std::invalid_argument("step sizes must be positive");
    }
    for (double v : steps.values()) {
        if (v == 0.0) throw std::invalid_argument("step sizes must be positive");
    }
    if (mu == 0.0) {
        const bool hits_one = (sigma.kind() == Kind::Constant && sigma.coefficient() == 1.0) ||
                              (sigma.kind() == Kind::Polynomial && sigma.coefficient() == 1.0) ||
                              (sigma.kind() == Kind::Geometric && sigma.coefficient() == 1.0);
        bool list_hits_one = false;
        for (double v : sigma.values()) list_hits_one = list_hits_one || v == 1.0;
        if (hits_one || list_hits_one) {
            throw std::invalid_argument("sigma = 1 requires mu > 0");
        }
    }
}

double a_next_ahpe(double A, double lambda, double sigma, double mu) {
    const double lm = lambda * mu;
    const double den = 1.0 - sigma * sigma + lm * sigma;
    if (!(den > 0.0)) throw std::domain_error("a_next_ahpe: 1 - sigma^2 + lambda mu sigma must be positive");
    const double b = (2.0 * (1.0 - sigma) + lm) * lambda;
    const double inner = (1.0 + lm) * (1.0 + lm) - sigma * (sigma + lm);
    const double root = A > 1e100 ? std::sqrt(A) * std::sqrt(1.0 / A + 4.0 * (1.0 + A * mu) * inner / b)
                                  : std::sqrt(1.0 + 4.0 * A * (1.0 + A * mu) * inner / b);
    return A + b * (1.0 + 2.0 * A * mu + root) / (2.0 * den);
}

double ahpe_identity_residual(double A, double A_next, double lambda, double sigma, double mu) {
    const double lm = lambda * mu;
    const double c1 = 1.0 - sigma * sigma + lm * lm + lm * (2.0 - sigma);
    const double c2 = 1.0 - sigma * sigma + lm * sigma;
    const double c3 = lambda * (2.0 * (1.0 - sigma) + lm);
    const double r = A / A_next;
    return detail::relative_residual({2.0 * r * c1, -r * r * c1, -c2, c3 / A_next});
}

double ahpe_identity_residual_sigma0(double A, double A_next, double lambda, double mu) {
    const double lm = lambda * mu;
    const double s2 = (1.0 + lm) * (1.0 + lm);
    const double r = A / A_next;
    return detail::relative_residual({1.0, -lambda * (2.0 + lm) / A_next, -2.0 * r * s2, r * r * s2});
}

StepResult ahpe_step(const SolverState& state, const AhpeConfig& config, const Problem& problem) {
    const std::size_t k = state.k;
    const double lambda = config.steps(k);
    const double sigma = config.sigma(k);
    const double mu = config.mu;
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("step size must be positive");
    if (!(sigma >= 0.0 && sigma <= 1.0)) throw std::domain_error("sigma_k outside [0, 1]");

    const double A_next = a_next_ahpe(state.A, lambda, sigma, mu);
    if (!std::isfinite(A_next)) throw SolverError(SolverError::Kind::WeightOverflow, k, "A_k overflowed");
    const Vector y = extrapolate_y(state.x, state.z, state.A, A_next, mu);

    ToleranceParams params{sigma, 0.0, 0.0, lambda, mu, true};
    ProxRequest request;
    request.anchor = y;
    request.step = lambda;
    request.mu = mu;
    request.accept = make_stop_test(params, y, std::nullopt);
    request.max_iterations = config.max_inner_per_prox;
    if (config.warm_start && !state.dual_state.empty()) request.warm_start = &state.dual_state;

    ApproxProxCertificate cert = problem.g->approximate_prox(request);
    if (!all_finite(cert.x) || !all_finite(cert.v)) {
        throw SolverError(SolverError::Kind::NonFinite, k, "non-finite prox output");
    }
    if (!cert.converged) {
        throw SolverError(SolverError::Kind::InnerBudgetExhausted, k,
                          "inner solver did not meet the tolerance within " +
                              std::to_string(config.max_inner_per_prox) + " iterations");
    }
    if (config.verify_certificates && !accept_prox(cert, params, y, nullptr, y, *problem.g)) {
        throw SolverError(SolverError::Kind::CertificateRejected, k,
                          "certificate failed independent verification");
    }

    StepResult out;
    SolverState& next = out.state;
    next.k = k + 1;
    next.A = A_next;
    const double coef = (A_next - state.A) / (1.0 + mu * A_next);
    Vector dir = mu * (cert.x - state.z);
    dir -= cert.v;
    next.z = state.z;
    axpy(coef, dir, next.z);
    next.x = std::move(cert.x);
    next.lambda = lambda;
    next.cumulative_inner = state.cumulative_inner + cert.inner_iterations;
    next.sum_sqrt_eta = state.sum_sqrt_eta + std::sqrt(2.0 * lambda / (1.0 + sigma));
    next.min_eta = std::min(state.min_eta, lambda);
    next.dual_state = std::move(cert.dual_state);
    if (!all_finite(next.z)) throw SolverError(SolverError::Kind::NonFinite, k, "non-finite z update");

    IterationRecord& rec = out.record;
    rec.k = next.k;
    rec.cumulative_inner = next.cumulative_inner;
    rec.inner_iterations = cert.inner_iterations;
    rec.lambda = lambda;
    rec.eta = lambda;
    rec.A = A_next;
    rec.sigma = sigma;
    rec.root_residual = sigma > 0.0 ? ahpe_identity_residual(state.A, A_next, lambda, sigma, mu)
                                    : ahpe_identity_residual_sigma0(state.A, A_next, lambda, mu);
    // Slack 1e-9, relative once A exceeds 1: the mu > 0 floor is tight asymptotically.
    const double slack = 1e-9 * std::max(1.0, A_next);
    rec.growth_ok = mu > 0.0 ? A_next >= state.A * ahpe_growth_ratio(lambda, sigma, mu) - slack
                             : A_next >= quadratic_growth_floor(next.sum_sqrt_eta) - slack;
    detail::annotate_record(rec, next, mu, problem);
    return out;
}

SolveResult ahpe_solve(const Problem& problem, const AhpeConfig& config, const StopRule& stop,
                       const RecordSink& sink) {
    config.validate();
    if (problem.f) throw std::invalid_argument("ahpe_solve: problem must not have a smooth part");
    if (!problem.g) throw std::invalid_argument("ahpe_solve: problem has no prox component");
    if (problem.g->dimension() != problem.x0.size()) throw std::invalid_argument("ahpe_solve: dimension mismatch");
    if (config.mu > problem.g->strong_convexity()) {
        throw std::invalid_argument("ahpe_solve: mu exceeds the strong convexity of g");
    }
    SolverState init = SolverState::initial(problem.x0, config.steps(0));
    return detail::run_loop(std::move(init), stop, sink,
                            [&](const SolverState& s) { return ahpe_step(s, config, problem); });
}

}  // namespace iafb

#include "iafb/afb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <string>

#include "iafb/guarantees.hpp"
#include "iafb/inexact_criterion.hpp"
#include "solver_detail.hpp"

namespace iafb {

namespace {
constexpr double kLargeWeight = 1e100;
}

SolverError::SolverError(Kind kind, std::size_t iteration, const std::string& what)
    : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
      kind_(kind),
      iteration_(iteration) {}

void AfbConfig::validate() const {
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) throw std::invalid_argument("lambda0 must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (!(beta >= 1.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be >= 1");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be nonnegative");
    if (max_inner_per_prox == 0) throw std::invalid_argument("max_inner_per_prox must be positive");
    if (!(lambda_floor_ratio > 0.0 && lambda_floor_ratio < 1.0)) {
        throw std::invalid_argument("lambda_floor_ratio must lie in (0, 1)");
    }
    schedule.validate();
}

SolverState SolverState::initial(const Vector& x0, double lambda0) {
    SolverState s;
    s.x = x0;
    s.z = x0;
    s.lambda = lambda0;
    s.min_eta = std::numeric_limits<double>::infinity();
    return s;
}

double eta(double lambda, double zeta) { return (1.0 - zeta * zeta) * lambda; }

double a_next_afb(double A, double eta_k, double mu) {
    double root = 0.0;
    if (A > kLargeWeight) {
        // Same value with A factored out, so A^2 never forms.
        root = std::sqrt(A) * std::sqrt(eta_k * eta_k / A + 4.0 * eta_k * (1.0 + eta_k * mu) * (1.0 + A * mu));
    } else {
        root = std::sqrt(eta_k * eta_k + 4.0 * eta_k * A * (1.0 + eta_k * mu) * (1.0 + A * mu));
    }
    return A + 0.5 * (eta_k + 2.0 * A * mu * eta_k + root);
}

double afb_root_residual(double A, double A_next, double eta_k, double mu) {
    // Divided through by A_next^2 so that large weights do not overflow.
    const double r = A / A_next;
    const double s = 1.0 + eta_k * mu;
    return detail::relative_residual({1.0, -eta_k / A_next, -2.0 * r * s, r * r * s});
}

Vector extrapolate_y(const Vector& x, const Vector& z, double A, double A_next, double mu) {
    double coef = 1.0;
    if (A > 0.0) {
        const double r = A / A_next;
        coef = (1.0 - r) * (mu + 1.0 / A) / (1.0 / A + (2.0 - r) * mu);
    }
    Vector y = x;
    axpy(coef, z - x, y);
    return y;
}

Vector update_z(const Vector& z, const Vector& x_next, const Vector& v, const Vector& grad_y,
                double A, double A_next, double mu) {
    const double coef = (1.0 - A / A_next) / (1.0 / A_next + mu);
    Vector dir = mu * (x_next - z);
    dir -= v;
    dir -= grad_y;
    Vector out = z;
    axpy(coef, dir, out);
    return out;
}

bool smooth_condition(double f_y, const Vector& grad_y, double f_x, const Vector& grad_x,
                      const Vector& y, const Vector& x_next, double lambda, double sigma) {
    const double rhs = f_x + dot(grad_x, y - x_next) +
                       lambda / (2.0 * (1.0 - sigma * sigma)) * squared_distance(grad_y, grad_x);
    return f_y >= rhs - 1e-12 * (1.0 + std::abs(f_y));
}

bool smooth_condition(const SmoothOracle& f, const Vector& y, const Vector& x_next, double lambda,
                      double sigma) {
    const auto [fy, gy] = f.value_and_gradient(y);
    const auto [fx, gx] = f.value_and_gradient(x_next);
    return smooth_condition(fy, gy, fx, gx, y, x_next, lambda, sigma);
}

StepResult afb_step(const SolverState& state, const AfbConfig& config, const Problem& problem) {
    const std::size_t k = state.k;
    const std::size_t n = state.x.size();
    const double sigma = config.schedule.sigma(k);
    const double zeta = config.schedule.zeta(k);
    const double xi = config.schedule.xi(k);
    const double mu = config.mu;
    const double floor = config.lambda_floor_ratio * config.lambda0;

    double lambda = state.lambda;
    std::size_t backtracks = 0;
    std::size_t inner = 0;

    while (true) {
        if (lambda < floor) {
            throw SolverError(SolverError::Kind::BacktrackingFloor, k,
                              "step size fell below the backtracking floor");
        }
        const double eta_k = eta(lambda, zeta);
        const double A_next = a_next_afb(state.A, eta_k, mu);
        if (!std::isfinite(A_next)) {
            throw SolverError(SolverError::Kind::WeightOverflow, k, "A_k overflowed");
        }
        const Vector y = extrapolate_y(state.x, state.z, state.A, A_next, mu);

        double f_y = 0.0;
        Vector grad_y(n);
        if (problem.f) std::tie(f_y, grad_y) = problem.f->value_and_gradient(y);
        if (!std::isfinite(f_y) || !all_finite(grad_y)) {
            throw SolverError(SolverError::Kind::NonFinite, k, "non-finite smooth oracle output");
        }

        ToleranceParams params{sigma, zeta, xi, lambda, mu, false};
        ProxRequest request;
        request.anchor = y;
        axpy(-lambda, grad_y, request.anchor);
        request.step = lambda;
        request.mu = mu;
        request.accept = make_stop_test(params, y, grad_y);
        request.max_iterations = config.max_inner_per_prox;
        if (config.warm_start && !state.dual_state.empty()) request.warm_start = &state.dual_state;

        ApproxProxCertificate cert = problem.g->approximate_prox(request);
        inner += cert.inner_iterations;
        if (!all_finite(cert.x) || !all_finite(cert.v)) {
            throw SolverError(SolverError::Kind::NonFinite, k, "non-finite prox output");
        }
        if (!cert.converged) {
            throw SolverError(SolverError::Kind::InnerBudgetExhausted, k,
                              "inner solver did not meet the tolerance within " +
                                  std::to_string(config.max_inner_per_prox) + " iterations");
        }
        if (config.verify_certificates &&
            !accept_prox(cert, params, y, &grad_y, request.anchor, *problem.g)) {
            throw SolverError(SolverError::Kind::CertificateRejected, k,
                              "certificate failed independent verification");
        }

        if (problem.f) {
            const auto [f_x, grad_x] = problem.f->value_and_gradient(cert.x);
            if (!smooth_condition(f_y, grad_y, f_x, grad_x, y, cert.x, lambda, sigma)) {
                lambda *= config.alpha;
                ++backtracks;
                continue;
            }
        }

        StepResult out;
        SolverState& next = out.state;
        next.k = k + 1;
        next.A = A_next;
        next.z = update_z(state.z, cert.x, cert.v, grad_y, state.A, A_next, mu);
        next.x = std::move(cert.x);
        next.lambda = config.beta * lambda;
        next.cumulative_inner = state.cumulative_inner + inner;
        next.weighted_xi_sum = state.weighted_xi_sum + A_next * xi;
        next.sum_sqrt_eta = state.sum_sqrt_eta + std::sqrt(eta_k);
        next.min_eta = std::min(state.min_eta, eta_k);
        next.dual_state = std::move(cert.dual_state);
        if (!all_finite(next.z)) throw SolverError(SolverError::Kind::NonFinite, k, "non-finite z update");

        IterationRecord& rec = out.record;
        rec.k = next.k;
        rec.cumulative_inner = next.cumulative_inner;
        rec.inner_iterations = inner;
        rec.backtracks = backtracks;
        rec.lambda = lambda;
        rec.eta = eta_k;
        rec.A = A_next;
        rec.sigma = sigma;
        rec.xi = xi;
        rec.root_residual = afb_root_residual(state.A, A_next, eta_k, mu);
        const double slack = 1e-9 * std::max(1.0, A_next);
        rec.growth_ok = mu > 0.0 ? A_next >= state.A * afb_growth_ratio(eta_k, mu) - slack
                                 : A_next >= quadratic_growth_floor(next.sum_sqrt_eta) - slack;
        detail::annotate_record(rec, next, mu, problem);
        return out;
    }
}

SolveResult afb_solve(const Problem& problem, const AfbConfig& config, const StopRule& stop,
                      const RecordSink& sink) {
    config.validate();
    if (!problem.g) throw std::invalid_argument("afb_solve: problem has no prox component");
    if (problem.g->dimension() != problem.x0.size()) throw std::invalid_argument("afb_solve: dimension mismatch");
    if (problem.f && problem.f->dimension() != problem.x0.size()) {
        throw std::invalid_argument("afb_solve: dimension mismatch");
    }
    if (config.mu > problem.g->strong_convexity()) {
        throw std::invalid_argument("afb_solve: mu exceeds the strong convexity of g");
    }
    return detail::run_loop(SolverState::initial(problem.x0, config.lambda0), stop, sink,
                            [&](const SolverState& s) { return afb_step(s, config, problem); });
}

double sublinear_bound_for(const AfbConfig& config, double L, std::size_t N, double dist0_sq) {
    using Kind = SequenceRule::Kind;
    const auto& sch = config.schedule;
    auto constant_value = [](const SequenceRule& r, const char* name) {
        if (r.kind() == Kind::Zero) return 0.0;
        if (r.kind() == Kind::Constant) return r.coefficient();
        throw std::invalid_argument(std::string("sublinear bound needs constant ") + name);
    };
    const double sigma = constant_value(sch.sigma_rule, "sigma");
    const double zeta = constant_value(sch.zeta_rule, "zeta");
    double C = 0.0;
    double q = 0.0;
    if (sch.xi_rule.kind() == Kind::Polynomial) {
        C = sch.xi_rule.coefficient();
        q = sch.xi_rule.exponent();
    } else if (sch.xi_rule.kind() != Kind::Zero) {
        throw std::invalid_argument("sublinear bound needs a zero or polynomial xi rule");
    }
    if (C > 0.0 && config.beta != 1.0) {
        throw std::invalid_argument("sublinear bound with absolute errors requires beta = 1");
    }
    return bound_sublinear_rate(N, eta_min(config.lambda0, config.alpha, sigma, zeta, L),
                      eta_max(config.lambda0, sigma, zeta, L), C, q, dist0_sq);
}

namespace detail {

void annotate_record(IterationRecord& rec, const SolverState& next, double mu,
                     const Problem& problem) {
    rec.objective = problem.objective(next.x);
    if (problem.optimal_value) {
        rec.objective_gap = rec.objective - *problem.optimal_value;
        if (problem.minimizer) {
            rec.lyapunov = lyapunov(next.A, *rec.objective_gap, next.z, *problem.minimizer, mu);
        }
    }
}

double relative_residual(std::initializer_list<double> terms) {
    double sum = 0.0;
    double scale = 0.0;
    for (double t : terms) {
        sum += t;
        scale = std::max(scale, std::abs(t));
    }
    return scale > 0.0 ? std::abs(sum) / scale : 0.0;
}

}  // namespace detail
}  // namespace iafb

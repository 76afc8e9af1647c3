#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iafb/linops.hpp"
#include "iafb/oracles.hpp"
#include "iafb/schedules.hpp"

namespace iafb {

class SolverError : public std::runtime_error {
public:
    /// WeightOverflow: A_k left the double range (the solve loop treats
    /// this as convergence to machine precision and stops).
    enum class Kind { BacktrackingFloor, InnerBudgetExhausted, NonFinite, CertificateRejected, WeightOverflow };

    SolverError(Kind kind, std::size_t iteration, const std::string& what);

    Kind kind() const noexcept { return kind_; }
    std::size_t iteration() const noexcept { return iteration_; }

private:
    Kind kind_;
    std::size_t iteration_;
};

struct AfbConfig {
    double lambda0 = 1.0;
    double alpha = 0.5;
    double beta = 1.0;
    /// Strong convexity used by the method; any value in [0, mu_g] is valid.
    double mu = 0.0;
    ToleranceSchedule schedule;
    std::size_t max_inner_per_prox = 10000;
    /// Backtracking gives up once lambda < lambda_floor_ratio * lambda0.
    double lambda_floor_ratio = 1e-12;
    /// Seed each prox with the previous dual iterate.
    bool warm_start = true;
    /// Re-check every returned certificate with accept_prox.
    bool verify_certificates = true;

    void validate() const;
};

struct StopRule {
    std::size_t max_outer = 100;
    std::optional<std::size_t> max_total_inner;
    /// Stop once F(x_k) - F* <= target (needs a known optimal value).
    std::optional<double> target_gap;
};

struct SolverState {
    std::size_t k = 0;
    double A = 0.0;
    Vector x;
    Vector z;
    double lambda = 0.0;
    std::size_t cumulative_inner = 0;
    /// sum_{i<k} A_{i+1} xi_i
    double weighted_xi_sum = 0.0;
    /// sum_{i<k} sqrt(eta_i)
    double sum_sqrt_eta = 0.0;
    /// min_{i<k} eta_i (+inf before the first step)
    double min_eta = 0.0;
    Vector dual_state;

    /// z_0 = x_0, A_0 = 0.
    static SolverState initial(const Vector& x0, double lambda0);
};

struct IterationRecord {
    std::size_t k = 0;  ///< index of the new iterate x_k
    std::size_t cumulative_inner = 0;
    std::size_t inner_iterations = 0;  ///< spent in this step, discarded attempts included
    std::size_t backtracks = 0;
    double objective = 0.0;
    std::optional<double> objective_gap;
    double lambda = 0.0;  ///< step used by the accepted attempt
    double eta = 0.0;
    double A = 0.0;
    double sigma = 0.0;
    double xi = 0.0;
    std::optional<double> lyapunov;
    /// Relative residual of the A-recursion identity.
    double root_residual = 0.0;
    /// A-growth lower bound held for this step.
    bool growth_ok = true;
};

using RecordSink = std::function<void(const IterationRecord&)>;

struct StepResult {
    SolverState state;
    IterationRecord record;
};

struct SolveResult {
    SolverState state;
    std::vector<IterationRecord> records;
    /// The run ended early because A_k overflowed.
    bool weight_overflow = false;
};

/// (1 - zeta^2) lambda
double eta(double lambda, double zeta);

/// Larger root of A'(A' - eta) = A (1 + eta mu)(2A' - A).
double a_next_afb(double A, double eta, double mu);

/// Relative residual of the identity above.
double afb_root_residual(double A, double A_next, double eta, double mu);

/// x + (A'-A)(A mu + 1)/(A' + A(2A'-A) mu) (z - x)
Vector extrapolate_y(const Vector& x, const Vector& z, double A, double A_next, double mu);

/// z + (A'-A)/(1 + mu A') (mu (x' - z) - (v + grad_y))
Vector update_z(const Vector& z, const Vector& x_next, const Vector& v, const Vector& grad_y,
                double A, double A_next, double mu);

/// f(y) >= f(x') + <f'(x'), y - x'> + lambda/(2(1-sigma^2)) |f'(y) - f'(x')|^2,
/// with slack 1e-12 (1 + |f(y)|).
bool smooth_condition(const SmoothOracle& f, const Vector& y, const Vector& x_next, double lambda,
                      double sigma);
bool smooth_condition(double f_y, const Vector& grad_y, double f_x, const Vector& grad_x,
                      const Vector& y, const Vector& x_next, double lambda, double sigma);

/// One outer iteration, including the backtracking loop. problem.f may be null.
StepResult afb_step(const SolverState& state, const AfbConfig& config, const Problem& problem);

SolveResult afb_solve(const Problem& problem, const AfbConfig& config, const StopRule& stop,
                      const RecordSink& sink = {});

/// Sublinear-rate bound for this configuration. Requires
/// constant sigma and zeta, xi zero or polynomial, and beta = 1 whenever xi
/// is nonzero.
double sublinear_bound_for(const AfbConfig& config, double L, std::size_t N, double dist0_sq);

}  // namespace iafb

#pragma once

#include <cstddef>

#include "iafb/linops.hpp"

namespace iafb {

struct LyapunovSnapshot {
    std::size_t k = 0;
    double A = 0.0;
    double potential = 0.0;
    /// Sum over i < k of A_{i+1} xi_i / 2.
    double accumulated_slack = 0.0;
};

/// A (F(x) - F*) + (1 + mu A)/2 |z - x*|^2.
double lyapunov(double A, double objective_gap, const Vector& z, const Vector& x_star, double mu);

/// |x0 - x*|^2 / (2 A_N) + weighted_xi_sum / (2 A_N), where
/// weighted_xi_sum = sum_{i<N} A_{i+1} xi_i. Throws if A_N <= 0.
double bound_relative_error(double A_N, double dist0_sq, double weighted_xi_sum);

/// 1 - sqrt(eta mu / (1 + eta mu)).
double linear_rate_factor(double eta, double mu);

/// Linear-rate bound for constant sigma, zeta and xi_k = C rho^k. The case
/// is picked by comparing rho with linear_rate_factor(eta, mu). C = 0 keeps
/// only the geometric term. Requires N >= 1, eta > 0, mu > 0, rho > 0.
double bound_linear_rate(std::size_t N, double eta, double mu, double C, double rho, double dist0_sq);

/// Smallest and largest step (1 - zeta^2) lambda that backtracking can produce.
double eta_min(double lambda0, double alpha, double sigma, double zeta, double L);
double eta_max(double lambda0, double sigma, double zeta, double L);

/// sum_{k>=0} (k+1)^(2-q) for q > 3: explicit summation until the terms
/// drop below 1e-12 (or 1e7 terms), plus an integral bound on the tail.
double polynomial_tail_constant(double q);

/// Sublinear bound for xi_k = C (k+1)^(-q) (beta = 1 when C > 0).
/// Throws std::domain_error for C > 0 and q <= 1.
double bound_sublinear_rate(std::size_t N, double eta_min, double eta_max, double C, double q,
                  double dist0_sq);

/// |x0 - x*|^2 / (2 A_N).
double bound_ahpe(double A_N, double dist0_sq);

/// Lower bound on A_{k+1}/A_k for the forward-backward recursion.
double afb_growth_ratio(double eta, double mu);
/// Lower bound on A_{k+1}/A_k for the hybrid proximal extragradient recursion.
double ahpe_growth_ratio(double lambda, double sigma, double mu);
/// (1/4) (sum_i sqrt(eta_i))^2 given the running sum of square roots.
double quadratic_growth_floor(double sum_sqrt);

}  // namespace iafb

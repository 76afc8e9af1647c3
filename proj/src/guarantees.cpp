#include "iafb/guarantees.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iafb {

double lyapunov(double A, double objective_gap, const Vector& z, const Vector& x_star, double mu) {
    return A * objective_gap + 0.5 * (1.0 + mu * A) * squared_distance(z, x_star);
}

double bound_relative_error(double A_N, double dist0_sq, double weighted_xi_sum) {
    if (!(A_N > 0.0)) throw std::domain_error("bound_relative_error: A_N must be positive");
    return dist0_sq / (2.0 * A_N) + weighted_xi_sum / (2.0 * A_N);
}

double linear_rate_factor(double eta, double mu) {
    const double em = eta * mu;
    return 1.0 - std::sqrt(em / (1.0 + em));
}

double bound_linear_rate(std::size_t N, double eta, double mu, double C, double rho, double dist0_sq) {
    if (N == 0) throw std::invalid_argument("bound_linear_rate: N must be >= 1");
    if (!(eta > 0.0)) throw std::invalid_argument("bound_linear_rate: eta must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("bound_linear_rate: mu must be positive");
    if (!(rho > 0.0)) throw std::invalid_argument("bound_linear_rate: rho must be positive");
    if (!(C >= 0.0)) throw std::invalid_argument("bound_linear_rate: C must be nonnegative");
    const double q = linear_rate_factor(eta, mu);
    const double n = static_cast<double>(N);
    const double head = std::pow(q, n - 1.0) * dist0_sq / (2.0 * eta);
    if (C == 0.0) return head;
    if (rho < q) return head + C / (2.0 * (q - rho)) * std::pow(q, n);
    if (rho == q) return head + 0.5 * C * n * std::pow(q, n - 1.0);
    return head + C / (2.0 * (rho - q)) * std::pow(rho, n);
}

double eta_min(double lambda0, double alpha, double sigma, double zeta, double L) {
    return (1.0 - zeta * zeta) * std::min(lambda0, alpha * (1.0 - sigma * sigma) / L);
}

double eta_max(double lambda0, double sigma, double zeta, double L) {
    return (1.0 - zeta * zeta) * std::max(lambda0, (1.0 - sigma * sigma) / L);
}

double polynomial_tail_constant(double q) {
    if (!(q > 3.0)) throw std::domain_error("polynomial_tail_constant: requires q > 3");
    const double p = q - 2.0;
    constexpr double kMaxTerms = 1e7;
    double sum = 0.0;
    double j = 1.0;
    for (; j <= kMaxTerms; j += 1.0) {
        const double term = std::pow(j, -p);
        sum += term;
        if (term < 1e-12) break;
    }
    // sum_{i > j} i^{-p} <= int_j^inf t^{-p} dt
    return sum + std::pow(j, 1.0 - p) / (p - 1.0);
}

double bound_sublinear_rate(std::size_t N, double eta_min_value, double eta_max_value, double C, double q,
                  double dist0_sq) {
    if (N == 0) throw std::invalid_argument("bound_sublinear_rate: N must be >= 1");
    if (!(eta_min_value > 0.0) || eta_max_value < eta_min_value) {
        throw std::invalid_argument("bound_sublinear_rate: need 0 < eta_min <= eta_max");
    }
    if (!(C >= 0.0) || !(q >= 0.0)) throw std::invalid_argument("bound_sublinear_rate: C and q must be >= 0");
    const double n = static_cast<double>(N);
    const double head = 2.0 * dist0_sq / (eta_min_value * n * n);
    if (C == 0.0) return head;
    if (q <= 1.0) throw std::domain_error("bound_sublinear_rate: no bound for q <= 1 with C > 0");
    const double scale = 2.0 * C * eta_max_value / eta_min_value;
    if (q > 3.0) return head + scale * polynomial_tail_constant(q) / (n * n);
    if (q == 3.0) return head + scale * (1.0 + std::log(n)) / (n * n);
    return head + scale * (1.0 / (n * n) + 1.0 / ((3.0 - q) * std::pow(n, q - 1.0)));
}

double bound_ahpe(double A_N, double dist0_sq) {
    if (!(A_N > 0.0)) throw std::domain_error("bound_ahpe: A_N must be positive");
    return dist0_sq / (2.0 * A_N);
}

double afb_growth_ratio(double eta, double mu) { return 1.0 / linear_rate_factor(eta, mu); }

double ahpe_growth_ratio(double lambda, double sigma, double mu) {
    const double lm = lambda * mu;
    const double num = lm * (2.0 * (1.0 - sigma) + lm);
    const double den = (1.0 + lm) * (1.0 + lm) - sigma * (sigma + lm);
    return 1.0 / (1.0 - std::sqrt(num / den));
}

double quadratic_growth_floor(double sum_sqrt) { return 0.25 * sum_sqrt * sum_sqrt; }

}  // namespace iafb

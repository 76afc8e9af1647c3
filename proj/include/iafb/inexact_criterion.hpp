#pragma once

#include <optional>

#include "iafb/linops.hpp"
#include "iafb/oracles.hpp"

namespace iafb {

struct GapEvaluation {
    double quadratic = 0.0;  ///< |x - z + lambda v|^2 / (2 (1 + lambda mu)^2)
    double bregman = 0.0;    ///< lambda/(1+lambda mu) (g(x) - g(w) + mu/2 |x-w|^2 - <x-w, v>)
    double excess = 0.0;     ///< lambda/(1+lambda mu) * conjugate_excess
    double total = 0.0;
    double magnitude = 0.0;  ///< dimension times the largest absolute term, for roundoff slack
};

/// Primal-dual gap of the mu-shifted prox subproblem at anchor z, written in
/// terms of a witness w with v - mu x + mu w in dg(w).
///
/// When w is only approximately a witness, the caller may pass the
/// nonnegative `conjugate_excess` by which <w, v - mu x> - g_mu(w)
/// underestimates the conjugate g_mu^*(v - mu x); the result is then an upper
/// bound on the exact gap. Throws on lambda <= 0, mu < 0, or non-finite input.
GapEvaluation pd_gap(const Vector& x, const Vector& v, const Vector& w, const Vector& z,
                     double lambda, double mu, const ProxFunction& g,
                     double conjugate_excess = 0.0);

/// Phi_p(x; z) - Phi_d(v; z) for the unshifted subproblem
/// min_x lambda g(x) + |x - z|^2 / 2, from g(x) and g^*(v).
double pd_gap_direct(const Vector& x, const Vector& v, const Vector& z, double lambda,
                     double g_value, double g_conjugate_value);

/// Same, using g.shifted_conjugate(., 0). Throws std::logic_error when g has
/// no closed-form conjugate.
double pd_gap_direct(const Vector& x, const Vector& v, const Vector& z, double lambda,
                     const ProxFunction& g);

/// Scalars entering the tolerance eps_k.
struct ToleranceParams {
    double sigma = 0.0;
    double zeta = 0.0;
    double xi = 0.0;
    double lambda = 1.0;
    double mu = 0.0;
    /// Upper limit for sigma: 1 excluded for forward-backward, included for A-HPE.
    bool sigma_may_equal_one = false;

    void validate() const;
};

struct ToleranceInputs {
    ToleranceParams params;
    const Vector& x;
    const Vector& y;
    const Vector& v;
    /// f'(y); null when there is no smooth part (zeta is then ignored).
    const Vector* grad_y = nullptr;
};

/// sigma^2/(2(1+lambda mu)^2) |x-y|^2 + zeta^2 lambda^2/(2(1+lambda mu)^2) |v+f'(y)|^2
///   + lambda xi / (2(1+lambda mu)^2)
double epsilon_tolerance(const ToleranceInputs& t);

/// gap <= eps + u * scale, with u the unit roundoff and scale the gap magnitude.
/// Ties are accepted.
bool gap_within(double gap, double scale, double eps) noexcept;

/// Recomputes the gap of `cert` from scratch and tests it against the
/// tolerance built from (cert.x, cert.v).
bool accept_prox(const ApproxProxCertificate& cert, const ToleranceParams& params,
                 const Vector& y, const Vector* grad_y, const Vector& z, const ProxFunction& g);

/// Self-referential stop test for inner solvers: compares the certificate's
/// own gap with the tolerance evaluated at its own (x, v).
StopTest make_stop_test(const ToleranceParams& params, Vector y, std::optional<Vector> grad_y);

/// Stop test for a fixed tolerance.
StopTest fixed_tolerance(double eps);

/// v = (z - x) / lambda, which zeroes the quadratic part of the gap.
Vector residual_dual(const Vector& x, const Vector& z, double lambda);

/// Certificate built around a primal point alone, using residual_dual and
/// g.witness. Empty when g cannot supply a witness for that pair.
std::optional<ApproxProxCertificate> residual_certificate(const Vector& x, const Vector& z,
                                                       double lambda, double mu,
                                                       const ProxFunction& g);

}  // namespace iafb

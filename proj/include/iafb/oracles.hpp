#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>

#include "iafb/linops.hpp"

namespace iafb {

/// Value of an extended-real-valued function. `infinite` marks +inf
/// (a point outside the domain); `value` is meaningless in that case.
struct ExtendedReal {
    double value = 0.0;
    bool infinite = false;

    static ExtendedReal finite(double v) { return {v, false}; }
    static ExtendedReal infinity() { return {std::numeric_limits<double>::infinity(), true}; }
};

class SmoothOracle {
public:
    virtual ~SmoothOracle() = default;

    virtual std::size_t dimension() const = 0;
    virtual double value(const Vector& x) const = 0;
    virtual Vector gradient(const Vector& x) const = 0;
    virtual std::pair<double, Vector> value_and_gradient(const Vector& x) const {
        return {value(x), gradient(x)};
    }
    /// Initial guess or overestimate of the gradient Lipschitz constant.
    virtual double lipschitz_estimate() const = 0;
};

/// Output of an approximate proximal step: primal x, dual v, and a witness w
/// with v - mu x + mu w in the subdifferential of g at w.
struct ApproxProxCertificate {
    Vector x;
    Vector v;
    Vector w;
    /// Nonnegative amount added to the gap when w is only an approximate
    /// witness (see pd_gap).
    double conjugate_excess = 0.0;
    double gap = 0.0;
    /// Magnitude of the terms that made up `gap`; sets the roundoff slack.
    double gap_scale = 0.0;
    std::size_t inner_iterations = 0;
    bool converged = false;
    /// Solver-specific dual iterate, reusable as a warm start.
    Vector dual_state;
};

using StopTest = std::function<bool(const ApproxProxCertificate&)>;

/// Asks for an approximation of prox_{step * g}(anchor). The inner solver
/// stops at the first certificate accepted by `accept`.
struct ProxRequest {
    Vector anchor;
    double step = 1.0;
    double mu = 0.0;
    StopTest accept;
    std::size_t max_iterations = 10000;
    const Vector* warm_start = nullptr;
};

class ProxFunction {
public:
    virtual ~ProxFunction() = default;

    virtual std::size_t dimension() const = 0;
    virtual ExtendedReal value(const Vector& x) const = 0;
    virtual double strong_convexity() const = 0;
    virtual ApproxProxCertificate approximate_prox(const ProxRequest& request) const = 0;

    /// A point w with v - mu x + mu w in dg(w), when one can be written down.
    virtual std::optional<Vector> witness(const Vector& /*x*/, const Vector& /*v*/,
                                          double /*mu*/) const {
        return std::nullopt;
    }
    /// Conjugate of g - (mu/2)|.|^2 at u, when available in closed form.
    /// +inf is reported as std::numeric_limits<double>::infinity().
    virtual std::optional<double> shifted_conjugate(const Vector& /*u*/, double /*mu*/) const {
        return std::nullopt;
    }
};

/// f(y) >= f(x) + <f'(x), y - x> + |f'(x) - f'(y)|^2 / (2 L_eff), with an
/// additive slack of 1e-12 (1 + |f(y)|).
bool check_smoothness_inequality(const SmoothOracle& f, const Vector& x, const Vector& y,
                                 double L_eff);

/// g(y) >= g(x) + <s, y - x> + (mu/2)|x - y|^2 with slack 1e-12 (1 + |g(y)|).
/// Returns true when g(y) is +inf and false when g(x) is +inf.
bool check_strong_convexity_inequality(const ProxFunction& g, const Vector& x, const Vector& y,
                                       const Vector& subgrad_at_x, double mu);

/// Composite problem min f(x) + g(x). `f` may be null (f = 0).
struct Problem {
    std::shared_ptr<const SmoothOracle> f;
    std::shared_ptr<const ProxFunction> g;
    Vector x0;
    std::optional<Vector> minimizer;
    std::optional<double> optimal_value;

    std::size_t dimension() const { return x0.size(); }
    /// f(x) + g(x); +inf outside dom g.
    double objective(const Vector& x) const;
};

}  // namespace iafb

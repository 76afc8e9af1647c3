#include "iafb/inexact_criterion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace iafb {

namespace {

double finite_value(const ProxFunction& g, const Vector& x, const char* what) {
    const ExtendedReal e = g.value(x);
    if (e.infinite) throw std::domain_error(std::string(what) + " lies outside dom g");
    return e.value;
}

}  // namespace

GapEvaluation pd_gap(const Vector& x, const Vector& v, const Vector& w, const Vector& z,
                     double lambda, double mu, const ProxFunction& g, double conjugate_excess) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("pd_gap: lambda must be positive");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("pd_gap: mu must be nonnegative");
    if (!std::isfinite(conjugate_excess)) throw std::invalid_argument("pd_gap: non-finite excess");
    require_finite(x, "pd_gap x");
    require_finite(v, "pd_gap v");
    require_finite(w, "pd_gap w");
    require_finite(z, "pd_gap z");

    const double s = 1.0 + lambda * mu;
    const double scaled = lambda / s;

    Vector r = x - z;
    axpy(lambda, v, r);

    GapEvaluation out;
    out.quadratic = squared_norm(r) / (2.0 * s * s);

    const ExtendedReal gx = g.value(x);
    if (gx.infinite) {
        out.bregman = out.total = out.magnitude = std::numeric_limits<double>::infinity();
        return out;
    }
    const double gw = finite_value(g, w, "pd_gap witness");
    const Vector xw = x - w;
    const double t_quad = 0.5 * mu * squared_norm(xw);
    const double t_lin = dot(xw, v);
    out.bregman = scaled * (gx.value - gw + t_quad - t_lin);
    out.excess = scaled * conjugate_excess;
    out.total = out.quadratic + out.bregman + out.excess;
    // Summation roundoff grows with the dimension.
    out.magnitude = static_cast<double>(std::max<std::size_t>(x.size(), 1)) *
                    std::max({out.quadratic, scaled * std::abs(gx.value), scaled * std::abs(gw),
                              scaled * t_quad, scaled * std::abs(t_lin), std::abs(out.excess)});
    return out;
}

double pd_gap_direct(const Vector& x, const Vector& v, const Vector& z, double lambda,
                     double g_value, double g_conjugate_value) {
    if (!(lambda > 0.0)) throw std::invalid_argument("pd_gap_direct: lambda must be positive");
    const double primal = lambda * g_value + 0.5 * squared_distance(x, z);
    Vector zv = z;
    axpy(-lambda, v, zv);
    const double dual = -lambda * g_conjugate_value - 0.5 * squared_norm(zv) + 0.5 * squared_norm(z);
    return primal - dual;
}

double pd_gap_direct(const Vector& x, const Vector& v, const Vector& z, double lambda,
                     const ProxFunction& g) {
    const auto conj = g.shifted_conjugate(v, 0.0);
    if (!conj) throw std::logic_error("pd_gap_direct: conjugate unavailable for this function");
    const ExtendedReal gx = g.value(x);
    if (gx.infinite || std::isinf(*conj)) return std::numeric_limits<double>::infinity();
    return pd_gap_direct(x, v, z, lambda, gx.value, *conj);
}

void ToleranceParams::validate() const {
    const bool sigma_ok = sigma_may_equal_one ? (sigma >= 0.0 && sigma <= 1.0)
                                              : (sigma >= 0.0 && sigma < 1.0);
    if (!sigma_ok) throw std::invalid_argument("tolerance: sigma out of range");
    if (!(zeta >= 0.0 && zeta < 1.0)) throw std::invalid_argument("tolerance: zeta out of range [0, 1)");
    if (!(xi >= 0.0) || !std::isfinite(xi)) throw std::invalid_argument("tolerance: xi must be nonnegative");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("tolerance: lambda must be positive");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("tolerance: mu must be nonnegative");
}

double epsilon_tolerance(const ToleranceInputs& t) {
    const auto& p = t.params;
    p.validate();
    const double s = 1.0 + p.lambda * p.mu;
    const double denom = 2.0 * s * s;
    double eps = p.sigma * p.sigma * squared_distance(t.x, t.y) / denom;
    if (p.zeta > 0.0) {
        Vector r = t.v;
        if (t.grad_y) r += *t.grad_y;
        eps += p.zeta * p.zeta * p.lambda * p.lambda * squared_norm(r) / denom;
    }
    eps += p.lambda * p.xi / denom;
    return eps;
}

bool gap_within(double gap, double scale, double eps) noexcept {
    return gap <= eps + 0.5 * std::numeric_limits<double>::epsilon() * scale;
}

bool accept_prox(const ApproxProxCertificate& cert, const ToleranceParams& params,
                 const Vector& y, const Vector* grad_y, const Vector& z, const ProxFunction& g) {
    if (!all_finite(cert.x) || !all_finite(cert.v) || !all_finite(cert.w)) return false;
    const GapEvaluation gap =
        pd_gap(cert.x, cert.v, cert.w, z, params.lambda, params.mu, g, cert.conjugate_excess);
    const double eps = epsilon_tolerance({params, cert.x, y, cert.v, grad_y});
    return gap_within(gap.total, gap.magnitude, eps);
}

StopTest make_stop_test(const ToleranceParams& params, Vector y, std::optional<Vector> grad_y) {
    params.validate();
    return [params, y = std::move(y), grad_y = std::move(grad_y)](const ApproxProxCertificate& c) {
        const double eps =
            epsilon_tolerance({params, c.x, y, c.v, grad_y ? &*grad_y : nullptr});
        return gap_within(c.gap, c.gap_scale, eps);
    };
}

StopTest fixed_tolerance(double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("fixed_tolerance: eps must be nonnegative");
    return [eps](const ApproxProxCertificate& c) { return gap_within(c.gap, c.gap_scale, eps); };
}

Vector residual_dual(const Vector& x, const Vector& z, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("residual_dual: lambda must be positive");
    return (1.0 / lambda) * (z - x);
}

std::optional<ApproxProxCertificate> residual_certificate(const Vector& x, const Vector& z,
                                                       double lambda, double mu,
                                                       const ProxFunction& g) {
    ApproxProxCertificate cert;
    cert.x = x;
    cert.v = residual_dual(x, z, lambda);
    auto w = g.witness(cert.x, cert.v, mu);
    if (!w) return std::nullopt;
    cert.w = std::move(*w);
    const GapEvaluation gap = pd_gap(cert.x, cert.v, cert.w, z, lambda, mu, g);
    cert.gap = gap.total;
    cert.gap_scale = gap.magnitude;
    cert.converged = true;
    return cert;
}

}  // namespace iafb

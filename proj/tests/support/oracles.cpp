#include "support/oracles.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "iafb/kernels.hpp"

namespace iafb::testing {

Vector random_vector(std::size_t n, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 17);
    std::normal_distribution<double> normal(0.0, scale);
    Vector out(n);
    for (double& e : out) e = normal(rng);
    return out;
}

double random_uniform(std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed * 0xbf58476d1ce4e5b9ULL + 5);
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double fd_gradient_error(const SmoothOracle& f, const Vector& x, std::size_t directions,
                         std::uint64_t seed) {
    const Vector g = f.gradient(x);
    const double h = 1e-6 * (1.0 + norm(x));
    double worst = 0.0;
    for (std::size_t i = 0; i < directions; ++i) {
        Vector d = random_vector(x.size(), seed + i);
        d *= 1.0 / norm(d);
        Vector xp = x;
        axpy(h, d, xp);
        Vector xm = x;
        axpy(-h, d, xm);
        const double fd = (f.value(xp) - f.value(xm)) / (2.0 * h);
        worst = std::max(worst, std::abs(dot(g, d) - fd) / (1.0 + norm(g)));
    }
    return worst;
}

long double larger_root(long double a, long double b, long double c) {
    const long double disc = b * b - 4.0L * a * c;
    if (disc < 0.0L) throw std::domain_error("larger_root: complex roots");
    const long double sq = std::sqrt(disc);
    // Avoid cancellation: pick the root that adds magnitudes, recover the other from c/a.
    if (b <= 0.0L) return (-b + sq) / (2.0L * a);
    const long double other = (-b - sq) / (2.0L * a);
    return c / (a * other);
}

double afb_weight_oracle(double A, double eta, double mu) {
    // In d = A' - A the identity reads d^2 - eta (1 + 2 mu A) d - eta A (1 + mu A) = 0,
    // whose coefficients do not cancel for large A.
    const long double a = A;
    const long double b = static_cast<long double>(eta) * (1.0L + 2.0L * mu * a);
    const long double c = static_cast<long double>(eta) * a * (1.0L + mu * a);
    return static_cast<double>(a + larger_root(1.0L, -b, -c));
}

double ahpe_weight_oracle(double A, double lambda, double sigma, double mu) {
    const long double lm = static_cast<long double>(lambda) * mu;
    const long double s = sigma;
    const long double c2 = 1.0L - s * s + lm * s;
    const long double c3 = lambda * (2.0L * (1.0L - s) + lm);
    // c2 t^2 - (2 A c1 + c3) t + A^2 c1 = 0 with c1 = c2 + mu c3, rewritten in d = t - A:
    // c2 d^2 - (2 A mu c3 + c3) d - (A^2 mu c3 + A c3) = 0.
    const long double a = A;
    const long double k = mu * c3;
    return static_cast<double>(a + larger_root(c2, -(2.0L * a * k + c3), -(a * a * k + a * c3)));
}

Vector group_prox_reference(const GroupNormRegularizer& reg, const Vector& z, double lambda,
                            std::size_t iterations) {
    const auto& fams = reg.families();
    const double m = reg.mu_reg();
    const double s = 1.0 + lambda * m;
    if (fams.empty()) return (1.0 / s) * z;
    if (fams.size() == 1) {
        return group_soft_threshold((1.0 / s) * z, fams[0].groups, lambda * fams[0].weight / s);
    }
    if (fams.size() != 2) throw std::invalid_argument("group_prox_reference: at most two families");
    const double gamma = 1.0;
    const double d = gamma * s + 1.0;
    Vector u = z;
    Vector x;
    for (std::size_t it = 0; it < iterations; ++it) {
        Vector c = gamma * z;
        c += u;
        c *= 1.0 / d;
        x = group_soft_threshold(c, fams[0].groups, gamma * lambda * fams[0].weight / d);
        Vector refl = 2.0 * x;
        refl -= u;
        const Vector y = group_soft_threshold(refl, fams[1].groups, gamma * lambda * fams[1].weight);
        Vector step = y - x;
        u += step;
        if (norm(step) <= 1e-15 * (1.0 + norm(x))) break;
    }
    return x;
}

Vector smoothed_group_prox(const std::vector<Group>& groups, const Vector& z, double tau,
                           std::size_t iterations) {
    const double delta = 1e-9;
    Vector x = z;
    // The objective separates over groups; each gets its own line search so a
    // vanishing group (curvature tau / delta) does not stall the others.
    for (const auto& g : groups) {
        const std::size_t m = g.size();
        std::vector<double> xg(m);
        std::vector<double> zg(m);
        for (std::size_t i = 0; i < m; ++i) xg[i] = zg[i] = z[g[i]];
        auto objective = [&](const std::vector<double>& p) {
            double v = 0.0;
            double sq = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                v += 0.5 * (p[i] - zg[i]) * (p[i] - zg[i]);
                sq += p[i] * p[i];
            }
            return v + tau * std::sqrt(sq + delta * delta);
        };
        double step = 1.0;
        for (std::size_t it = 0; it < iterations; ++it) {
            double sq = 0.0;
            for (double e : xg) sq += e * e;
            const double r = std::sqrt(sq + delta * delta);
            std::vector<double> grad(m);
            double gn = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                grad[i] = xg[i] - zg[i] + tau * xg[i] / r;
                gn += grad[i] * grad[i];
            }
            if (gn < 1e-30) break;
            const double f0 = objective(xg);
            step = std::min(1.0, 2.0 * step);
            while (true) {
                std::vector<double> trial = xg;
                for (std::size_t i = 0; i < m; ++i) trial[i] -= step * grad[i];
                if (objective(trial) <= f0 - 0.5 * step * gn || step < 1e-20) {
                    xg = std::move(trial);
                    break;
                }
                step *= 0.5;
            }
        }
        for (std::size_t i = 0; i < m; ++i) x[g[i]] = xg[i];
    }
    return x;
}

Vector tv_prox_reference(const TvRegularizer& reg, const Vector& z, double lambda,
                         std::size_t iterations) {
    const std::size_t rows = reg.rows();
    const std::size_t cols = reg.cols();
    const std::size_t n = rows * cols;
    const double s = 1.0 + lambda * reg.mu_reg();
    const double inner = lambda / s;
    const Vector anchor = (1.0 / s) * z;
    Vector p(2 * n);
    Vector div(n);
    Vector grad(2 * n);
    Vector x = anchor;
    for (std::size_t it = 0; it < iterations; ++it) {
        kernels::serial::image_divergence(p.span().first(n), p.span().last(n), rows, cols, div.span());
        x = anchor;
        axpy(inner, div, x);
        kernels::serial::image_gradient(x.span(), rows, cols, grad.span().first(n), grad.span().last(n));
        axpy(1.0 / (8.0 * inner), grad, p);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::hypot(p[i], p[n + i]);
            if (r > reg.lambda_reg()) {
                p[i] *= reg.lambda_reg() / r;
                p[n + i] *= reg.lambda_reg() / r;
            }
        }
    }
    kernels::serial::image_divergence(p.span().first(n), p.span().last(n), rows, cols, div.span());
    x = anchor;
    axpy(inner, div, x);
    return x;
}

double prox_objective(const ProxFunction& g, const Vector& x, const Vector& z, double lambda) {
    const ExtendedReal v = g.value(x);
    if (v.infinite) return v.value;
    return lambda * v.value + 0.5 * squared_distance(x, z);
}

}  // namespace iafb::testing

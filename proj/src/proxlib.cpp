#include "iafb/proxlib.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "iafb/inexact_criterion.hpp"
#include "iafb/kernels.hpp"

namespace iafb {

namespace {

constexpr double kBoundaryTol = 1e-12;

void require_step(const ProxRequest& r, std::size_t dim, double strong_convexity) {
    if (r.anchor.size() != dim) throw std::invalid_argument("prox request: anchor has wrong length");
    if (!(r.step > 0.0) || !std::isfinite(r.step)) throw std::invalid_argument("prox request: step must be positive");
    if (!(r.mu >= 0.0)) throw std::invalid_argument("prox request: mu must be nonnegative");
    if (r.mu > strong_convexity) {
        throw std::invalid_argument("prox request: mu exceeds the strong convexity of g");
    }
    require_finite(r.anchor, "prox request anchor");
}

bool accepts(const ProxRequest& r, const ApproxProxCertificate& c) {
    return r.accept ? r.accept(c) : gap_within(c.gap, c.gap_scale, 0.0);
}

void fill_gap(ApproxProxCertificate& cert, const Vector& anchor, double step, double mu,
              const ProxFunction& g) {
    const GapEvaluation e =
        pd_gap(cert.x, cert.v, cert.w, anchor, step, mu, g, cert.conjugate_excess);
    cert.gap = e.total;
    cert.gap_scale = e.magnitude;
}

double block_norm(const Vector& x, const Group& g) {
    double s = 0.0;
    for (std::size_t i : g) s += x[i] * x[i];
    return std::sqrt(s);
}

}  // namespace

Vector soft_threshold(const Vector& z, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("soft_threshold: tau must be nonnegative");
    Vector out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double a = std::abs(z[i]) - tau;
        out[i] = a > 0.0 ? std::copysign(a, z[i]) : 0.0;
    }
    return out;
}

Vector group_soft_threshold(const Vector& z, const std::vector<Group>& groups, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("group_soft_threshold: tau must be nonnegative");
    Vector out = z;
    for (const auto& g : groups) {
        const double n = block_norm(z, g);
        const double scale = n > tau ? 1.0 - tau / n : 0.0;
        for (std::size_t i : g) out[i] = scale * z[i];
    }
    return out;
}

Vector prox_with_tikhonov(const BaseProx& base, const Vector& z, double lambda, double mu) {
    if (!(mu >= 0.0)) throw std::invalid_argument("prox_with_tikhonov: mu must be nonnegative");
    const double s = 1.0 + lambda * mu;
    return base((1.0 / s) * z, lambda / s);
}

// ---------------------------------------------------------------------------

SquaredNormRegularizer::SquaredNormRegularizer(std::size_t dim, double c) : dim_(dim), c_(c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("SquaredNormRegularizer: c must be >= 0");
}

ExtendedReal SquaredNormRegularizer::value(const Vector& x) const {
    return ExtendedReal::finite(0.5 * c_ * squared_norm(x));
}

ApproxProxCertificate SquaredNormRegularizer::approximate_prox(const ProxRequest& r) const {
    require_step(r, dim_, c_);
    ApproxProxCertificate cert;
    cert.x = (1.0 / (1.0 + r.step * c_)) * r.anchor;
    cert.v = c_ * cert.x;
    cert.w = *witness(cert.x, cert.v, r.mu);
    fill_gap(cert, r.anchor, r.step, r.mu, *this);
    cert.converged = accepts(r, cert);
    return cert;
}

std::optional<Vector> SquaredNormRegularizer::witness(const Vector& x, const Vector& v,
                                                      double mu) const {
    if (mu > c_) return std::nullopt;
    Vector u = v;
    axpy(-mu, x, u);
    if (c_ == mu) {
        if (norm(u) > kBoundaryTol * (1.0 + norm(v))) return std::nullopt;
        return x;
    }
    return (1.0 / (c_ - mu)) * u;
}

std::optional<double> SquaredNormRegularizer::shifted_conjugate(const Vector& u, double mu) const {
    if (mu > c_) return std::nullopt;
    const double c = c_ - mu;
    if (c == 0.0) return squared_norm(u) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return squared_norm(u) / (2.0 * c);
}

// ---------------------------------------------------------------------------

GroupNormRegularizer::GroupNormRegularizer(std::size_t dim, std::vector<GroupFamily> families,
                                           double mu_reg)
    : dim_(dim), families_(std::move(families)), mu_reg_(mu_reg), covered_(dim, false) {
    if (!(mu_reg >= 0.0) || !std::isfinite(mu_reg)) {
        throw std::invalid_argument("GroupNormRegularizer: mu_reg must be >= 0");
    }
    for (const auto& fam : families_) {
        if (!(fam.weight >= 0.0) || !std::isfinite(fam.weight)) {
            throw std::invalid_argument("GroupNormRegularizer: weights must be >= 0");
        }
        std::vector<bool> seen(dim, false);
        for (const auto& g : fam.groups) {
            if (g.empty()) throw std::invalid_argument("GroupNormRegularizer: empty group");
            for (std::size_t i : g) {
                if (i >= dim) throw std::invalid_argument("GroupNormRegularizer: index out of range");
                if (seen[i]) throw std::invalid_argument("GroupNormRegularizer: groups overlap within a family");
                seen[i] = true;
                covered_[i] = true;
            }
            dual_size_ += g.size();
        }
    }
}

GroupNormRegularizer GroupNormRegularizer::l1(std::size_t dim, double tau, double mu_reg) {
    GroupFamily fam{tau, {}};
    fam.groups.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) fam.groups.push_back({i});
    return GroupNormRegularizer(dim, {std::move(fam)}, mu_reg);
}

GroupNormRegularizer GroupNormRegularizer::rows_and_cols(std::size_t rows, std::size_t cols,
                                                         double lambda_row, double lambda_col,
                                                         double mu_reg) {
    GroupFamily row_fam{lambda_row, {}};
    GroupFamily col_fam{lambda_col, {}};
    for (std::size_t i = 0; i < rows; ++i) {
        Group g(cols);
        for (std::size_t j = 0; j < cols; ++j) g[j] = i * cols + j;
        row_fam.groups.push_back(std::move(g));
    }
    for (std::size_t j = 0; j < cols; ++j) {
        Group g(rows);
        for (std::size_t i = 0; i < rows; ++i) g[i] = i * cols + j;
        col_fam.groups.push_back(std::move(g));
    }
    return GroupNormRegularizer(rows * cols, {std::move(row_fam), std::move(col_fam)}, mu_reg);
}

double GroupNormRegularizer::group_norm_value(const Vector& x) const {
    double total = 0.0;
    for (const auto& fam : families_) {
        if (fam.weight == 0.0) continue;
        double s = 0.0;
        for (const auto& g : fam.groups) s += block_norm(x, g);
        total += fam.weight * s;
    }
    return total;
}

ExtendedReal GroupNormRegularizer::value(const Vector& x) const {
    if (x.size() != dim_) throw std::invalid_argument("GroupNormRegularizer: wrong length");
    return ExtendedReal::finite(group_norm_value(x) + 0.5 * mu_reg_ * squared_norm(x));
}

Vector GroupNormRegularizer::project_dual(Vector dual) const {
    if (dual.size() != dual_size_) throw std::invalid_argument("project_dual: wrong length");
    std::size_t off = 0;
    for (const auto& fam : families_) {
        for (const auto& g : fam.groups) {
            double s = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) s += dual[off + i] * dual[off + i];
            const double n = std::sqrt(s);
            if (n > fam.weight) {
                const double scale = fam.weight / n;
                for (std::size_t i = 0; i < g.size(); ++i) dual[off + i] *= scale;
            }
            off += g.size();
        }
    }
    return dual;
}

std::optional<Vector> GroupNormRegularizer::witness(const Vector& x, const Vector& v,
                                                    double mu) const {
    if (families_.size() > 1 || mu > mu_reg_) return std::nullopt;
    const double c = mu_reg_ - mu;
    Vector u = v;
    axpy(-mu, x, u);
    Vector w(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
        if (covered_[j]) continue;
        if (c > 0.0) {
            w[j] = u[j] / c;
        } else if (u[j] != 0.0) {
            return std::nullopt;
        }
    }
    if (families_.empty()) return w;
    const auto& fam = families_.front();
    const double tau = fam.weight;
    for (const auto& g : fam.groups) {
        const double n = block_norm(u, g);
        if (c > 0.0) {
            if (n > tau) {
                const double scale = (n - tau) / (c * n);
                for (std::size_t i : g) w[i] = scale * u[i];
            }
            continue;
        }
        if (n < tau * (1.0 - kBoundaryTol)) continue;
        if (n > tau * (1.0 + kBoundaryTol)) return std::nullopt;
        if (n == 0.0) continue;
        double xu = 0.0;
        for (std::size_t i : g) xu += x[i] * u[i];
        const double t = std::max(xu, 0.0) / (n * n);
        for (std::size_t i : g) w[i] = t * u[i];
    }
    return w;
}

std::optional<double> GroupNormRegularizer::shifted_conjugate(const Vector& u, double mu) const {
    if (families_.size() > 1 || mu > mu_reg_) return std::nullopt;
    const double c = mu_reg_ - mu;
    const double inf = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
        if (covered_[j]) continue;
        if (c > 0.0) {
            total += u[j] * u[j] / (2.0 * c);
        } else if (u[j] != 0.0) {
            return inf;
        }
    }
    if (families_.empty()) return total;
    const double tau = families_.front().weight;
    for (const auto& g : families_.front().groups) {
        const double n = block_norm(u, g);
        if (c > 0.0) {
            const double e = std::max(n - tau, 0.0);
            total += e * e / (2.0 * c);
        } else if (n > tau * (1.0 + kBoundaryTol)) {
            return inf;
        }
    }
    return total;
}

ApproxProxCertificate GroupNormRegularizer::certificate_from_dual(const Vector& anchor,
                                                                  double step, double mu,
                                                                  Vector dual) const {
    const double s = 1.0 + step * mu_reg_;
    const double inner_step = step / s;

    Vector kt(dim_);
    std::size_t off = 0;
    for (const auto& fam : families_) {
        for (const auto& g : fam.groups) {
            for (std::size_t i = 0; i < g.size(); ++i) kt[g[i]] += dual[off + i];
            off += g.size();
        }
    }

    ApproxProxCertificate cert;
    cert.x = (1.0 / s) * anchor;
    axpy(-inner_step, kt, cert.x);
    cert.v = kt;
    axpy(mu_reg_, cert.x, cert.v);

    const double c = mu_reg_ - mu;
    std::optional<Vector> w;
    if (families_.size() <= 1) w = witness(cert.x, cert.v, mu);
    if (w) {
        cert.w = std::move(*w);
    } else if (c == 0.0) {
        cert.w = Vector(dim_);
    } else {
        // Approximate witness: w = x and the Fenchel-Young excess of the
        // group-norm part is charged to the gap.
        cert.w = cert.x;
        double pairing = 0.0;
        off = 0;
        for (const auto& fam : families_) {
            for (const auto& g : fam.groups) {
                for (std::size_t i = 0; i < g.size(); ++i) pairing += dual[off + i] * cert.x[g[i]];
                off += g.size();
            }
        }
        cert.conjugate_excess = std::max(group_norm_value(cert.x) - pairing, 0.0);
    }
    fill_gap(cert, anchor, step, mu, *this);
    cert.dual_state = std::move(dual);
    return cert;
}

ApproxProxCertificate GroupNormRegularizer::approximate_prox(const ProxRequest& r) const {
    return prox_group_dual_bca(*this, r);
}

ApproxProxCertificate prox_group_dual_bca(const GroupNormRegularizer& reg, const ProxRequest& r) {
    require_step(r, reg.dimension(), reg.mu_reg());
    const double inner_step = r.step / (1.0 + r.step * reg.mu_reg());

    Vector p = (r.warm_start && r.warm_start->size() == reg.dual_size())
                   ? reg.project_dual(*r.warm_start)
                   : Vector(reg.dual_size());

    ApproxProxCertificate cert = reg.certificate_from_dual(r.anchor, r.step, r.mu, p);
    if (accepts(r, cert)) {
        cert.converged = true;
        return cert;
    }
    Vector x = cert.x;
    for (std::size_t it = 1; it <= r.max_iterations; ++it) {
        std::size_t off = 0;
        for (const auto& fam : reg.families()) {
            const double radius = fam.weight;
            for (const auto& g : fam.groups) {
                double s = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double target = (x[g[i]] + inner_step * p[off + i]) / inner_step;
                    s += target * target;
                }
                const double n = std::sqrt(s);
                const double scale = n > radius ? radius / n : 1.0;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double rgi = x[g[i]] + inner_step * p[off + i];
                    p[off + i] = scale * rgi / inner_step;
                    x[g[i]] = rgi - inner_step * p[off + i];
                }
                off += g.size();
            }
        }
        cert = reg.certificate_from_dual(r.anchor, r.step, r.mu, p);
        cert.inner_iterations = it;
        if (accepts(r, cert)) {
            cert.converged = true;
            return cert;
        }
        x = cert.x;
    }
    cert.converged = false;
    return cert;
}

// ---------------------------------------------------------------------------

TvRegularizer::TvRegularizer(std::size_t rows, std::size_t cols, double lambda_reg, double mu_reg)
    : rows_(rows), cols_(cols), lambda_reg_(lambda_reg), mu_reg_(mu_reg) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("TvRegularizer: empty image");
    if (!(lambda_reg >= 0.0) || !std::isfinite(lambda_reg)) {
        throw std::invalid_argument("TvRegularizer: lambda_reg must be >= 0");
    }
    if (!(mu_reg >= 0.0) || !std::isfinite(mu_reg)) throw std::invalid_argument("TvRegularizer: mu_reg must be >= 0");
}

double TvRegularizer::tv_value(const Vector& x) const {
    const std::size_t n = rows_ * cols_;
    Vector grad(2 * n);
    kernels::image_gradient(x.span(), rows_, cols_, grad.span().first(n), grad.span().last(n));
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::hypot(grad[i], grad[n + i]);
    return lambda_reg_ * s;
}

ExtendedReal TvRegularizer::value(const Vector& x) const {
    if (x.size() != rows_ * cols_) throw std::invalid_argument("TvRegularizer: wrong length");
    return ExtendedReal::finite(tv_value(x) + 0.5 * mu_reg_ * squared_norm(x));
}

void TvRegularizer::project_dual(Vector& dual) const {
    const std::size_t n = rows_ * cols_;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::hypot(dual[i], dual[n + i]);
        if (m > lambda_reg_) {
            const double scale = m > 0.0 ? lambda_reg_ / m : 0.0;
            dual[i] *= scale;
            dual[n + i] *= scale;
        }
    }
}

ApproxProxCertificate TvRegularizer::certificate_from_dual(const Vector& anchor, double step,
                                                           double mu, Vector dual) const {
    const std::size_t n = rows_ * cols_;
    const double s = 1.0 + step * mu_reg_;
    const double inner_step = step / s;

    Vector div(n);
    kernels::image_divergence(dual.span().first(n), dual.span().last(n), rows_, cols_, div.span());

    ApproxProxCertificate cert;
    cert.x = (1.0 / s) * anchor;
    axpy(inner_step, div, cert.x);
    cert.v = -div;
    axpy(mu_reg_, cert.x, cert.v);

    if (mu_reg_ - mu == 0.0) {
        cert.w = Vector(n);
    } else {
        cert.w = cert.x;
        Vector grad(2 * n);
        kernels::image_gradient(cert.x.span(), rows_, cols_, grad.span().first(n),
                                grad.span().last(n));
        double tv = 0.0;
        for (std::size_t i = 0; i < n; ++i) tv += std::hypot(grad[i], grad[n + i]);
        cert.conjugate_excess = std::max(lambda_reg_ * tv - dot(dual, grad), 0.0);
    }
    fill_gap(cert, anchor, step, mu, *this);
    cert.dual_state = std::move(dual);
    return cert;
}

ApproxProxCertificate TvRegularizer::approximate_prox(const ProxRequest& r) const {
    return prox_tv_dual_fista(*this, r);
}

ApproxProxCertificate prox_tv_dual_fista(const TvRegularizer& reg, const ProxRequest& r) {
    require_step(r, reg.dimension(), reg.mu_reg());
    const std::size_t rows = reg.rows();
    const std::size_t cols = reg.cols();
    const std::size_t n = rows * cols;
    const double s = 1.0 + r.step * reg.mu_reg();
    const double inner_step = r.step / s;
    const double ascent = 1.0 / (8.0 * inner_step);

    Vector p(2 * n);
    if (r.warm_start && r.warm_start->size() == 2 * n) {
        p = *r.warm_start;
        reg.project_dual(p);
    }

    ApproxProxCertificate cert = reg.certificate_from_dual(r.anchor, r.step, r.mu, p);
    if (accepts(r, cert)) {
        cert.converged = true;
        return cert;
    }

    const Vector scaled_anchor = (1.0 / s) * r.anchor;
    Vector q = p;
    Vector xq(n);
    Vector div(n);
    Vector grad(2 * n);
    double t = 1.0;
    for (std::size_t it = 1; it <= r.max_iterations; ++it) {
        kernels::image_divergence(q.span().first(n), q.span().last(n), rows, cols, div.span());
        xq = scaled_anchor;
        axpy(inner_step, div, xq);
        kernels::image_gradient(xq.span(), rows, cols, grad.span().first(n), grad.span().last(n));
        Vector next = q;
        axpy(ascent, grad, next);
        reg.project_dual(next);

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double momentum = (t - 1.0) / t_next;
        q = next;
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += momentum * (next[i] - p[i]);
        p = std::move(next);
        t = t_next;

        cert = reg.certificate_from_dual(r.anchor, r.step, r.mu, p);
        cert.inner_iterations = it;
        if (accepts(r, cert)) {
            cert.converged = true;
            return cert;
        }
    }
    cert.converged = false;
    return cert;
}

// ---------------------------------------------------------------------------

TiltedProx::TiltedProx(std::shared_ptr<const ProxFunction> base, Vector tilt, double offset)
    : base_(std::move(base)), tilt_(std::move(tilt)), offset_(offset) {
    if (!base_) throw std::invalid_argument("TiltedProx: null base");
    if (tilt_.size() != base_->dimension()) throw std::invalid_argument("TiltedProx: tilt has wrong length");
    require_finite(tilt_, "TiltedProx tilt");
}

ExtendedReal TiltedProx::value(const Vector& x) const {
    ExtendedReal b = base_->value(x);
    if (b.infinite) return b;
    return ExtendedReal::finite(b.value - dot(tilt_, x) + offset_);
}

ApproxProxCertificate TiltedProx::approximate_prox(const ProxRequest& r) const {
    ProxRequest inner = r;
    inner.anchor = r.anchor;
    axpy(r.step, tilt_, inner.anchor);
    // The gap is invariant under the tilt but its roundoff scale is not, so
    // the stop test sees the gap recomputed for the tilted function.
    auto translate = [this, &r](ApproxProxCertificate c) {
        c.v -= tilt_;
        fill_gap(c, r.anchor, r.step, r.mu, *this);
        return c;
    };
    if (r.accept) {
        inner.accept = [&r, &translate](const ApproxProxCertificate& c) { return r.accept(translate(c)); };
    }
    return translate(base_->approximate_prox(inner));
}

std::optional<Vector> TiltedProx::witness(const Vector& x, const Vector& v, double mu) const {
    return base_->witness(x, v + tilt_, mu);
}

std::optional<double> TiltedProx::shifted_conjugate(const Vector& u, double mu) const {
    auto c = base_->shifted_conjugate(u + tilt_, mu);
    if (!c) return c;
    return *c - offset_;
}

// ---------------------------------------------------------------------------

std::vector<ClosedFormProx> closed_form_catalog(std::size_t dim) {
    std::vector<ClosedFormProx> out;

    const double c_sq = 1.5;
    out.push_back({"squared_norm",
                   [c_sq](const Vector& z, double lambda) { return (1.0 / (1.0 + lambda * c_sq)) * z; },
                   [c_sq](const Vector& u, double lambda) {
                       return (c_sq * lambda / (1.0 + c_sq * lambda)) * u;
                   }});

    const double tau_l1 = 0.7;
    out.push_back({"l1",
                   [tau_l1](const Vector& z, double lambda) { return soft_threshold(z, lambda * tau_l1); },
                   [tau_l1](const Vector& u, double) {
                       Vector y = u;
                       for (double& e : y) e = std::clamp(e, -tau_l1, tau_l1);
                       return y;
                   }});

    std::vector<Group> pairs;
    for (std::size_t i = 0; i < dim; i += 2) {
        Group g{i};
        if (i + 1 < dim) g.push_back(i + 1);
        pairs.push_back(std::move(g));
    }
    const double tau_grp = 0.9;
    out.push_back({"group_l2",
                   [pairs, tau_grp](const Vector& z, double lambda) {
                       return group_soft_threshold(z, pairs, lambda * tau_grp);
                   },
                   [pairs, tau_grp](const Vector& u, double) {
                       Vector y = u;
                       for (const auto& g : pairs) {
                           const double n = block_norm(u, g);
                           if (n > tau_grp) {
                               for (std::size_t i : g) y[i] = u[i] * tau_grp / n;
                           }
                       }
                       return y;
                   }});

    const double tau_el = 0.4;
    const double c_el = 2.0;
    out.push_back({"elastic_net",
                   [tau_el, c_el](const Vector& z, double lambda) {
                       return (1.0 / (1.0 + lambda * c_el)) * soft_threshold(z, lambda * tau_el);
                   },
                   [tau_el, c_el](const Vector& u, double lambda) {
                       // g^*(y) = sum (|y_i| - tau)_+^2 / (2c)
                       Vector y = u;
                       const double shrink = c_el * lambda / (1.0 + c_el * lambda);
                       for (double& e : y) {
                           const double a = std::abs(e);
                           if (a > tau_el) e = std::copysign(tau_el + (a - tau_el) * shrink, e);
                       }
                       return y;
                   }});

    const double lo = -0.5;
    const double hi = 1.2;
    out.push_back({"box_indicator",
                   [lo, hi](const Vector& z, double) {
                       Vector x = z;
                       for (double& e : x) e = std::clamp(e, lo, hi);
                       return x;
                   },
                   [lo, hi](const Vector& u, double lambda) {
                       // g^*(y) = sum max(hi y_i, lo y_i)
                       Vector y(u.size());
                       for (std::size_t i = 0; i < u.size(); ++i) {
                           const double up = u[i] - hi / lambda;
                           const double down = u[i] - lo / lambda;
                           y[i] = up > 0.0 ? up : (down < 0.0 ? down : 0.0);
                       }
                       return y;
                   }});
    return out;
}

}  // namespace iafb

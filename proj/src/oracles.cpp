#include "iafb/oracles.hpp"

#include <cmath>

namespace iafb {

bool check_smoothness_inequality(const SmoothOracle& f, const Vector& x, const Vector& y,
                                 double L_eff) {
    const auto [fx, gx] = f.value_and_gradient(x);
    const auto [fy, gy] = f.value_and_gradient(y);
    const double rhs = fx + dot(gx, y - x) + squared_distance(gx, gy) / (2.0 * L_eff);
    return fy >= rhs - 1e-12 * (1.0 + std::abs(fy));
}

bool check_strong_convexity_inequality(const ProxFunction& g, const Vector& x, const Vector& y,
                                       const Vector& subgrad_at_x, double mu) {
    const ExtendedReal gy = g.value(y);
    if (gy.infinite) return true;
    const ExtendedReal gx = g.value(x);
    if (gx.infinite) return false;
    const double rhs = gx.value + dot(subgrad_at_x, y - x) + 0.5 * mu * squared_distance(x, y);
    return gy.value >= rhs - 1e-12 * (1.0 + std::abs(gy.value));
}

double Problem::objective(const Vector& x) const {
    const ExtendedReal gx = g->value(x);
    if (gx.infinite) return std::numeric_limits<double>::infinity();
    return (f ? f->value(x) : 0.0) + gx.value;
}

}  // namespace iafb

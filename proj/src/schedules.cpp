#include "iafb/schedules.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace iafb {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

std::string shortest(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace

SequenceRule SequenceRule::zero() { return SequenceRule{}; }

SequenceRule SequenceRule::constant(double c) {
    if (!finite_nonneg(c)) throw std::invalid_argument("constant rule: value must be finite and >= 0");
    SequenceRule r;
    r.kind_ = Kind::Constant;
    r.c_ = c;
    return r;
}

SequenceRule SequenceRule::geometric(double C, double rho) {
    if (!(C > 0.0) || !std::isfinite(C)) throw std::invalid_argument("geometric rule: C must be > 0");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("geometric rule: rho must be > 0");
    SequenceRule r;
    r.kind_ = Kind::Geometric;
    r.c_ = C;
    r.rho_ = rho;
    return r;
}

SequenceRule SequenceRule::polynomial(double C, double q) {
    if (!finite_nonneg(C)) throw std::invalid_argument("polynomial rule: C must be >= 0");
    if (!finite_nonneg(q)) throw std::invalid_argument("polynomial rule: q must be >= 0");
    SequenceRule r;
    r.kind_ = Kind::Polynomial;
    r.c_ = C;
    r.q_ = q;
    return r;
}

SequenceRule SequenceRule::list(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("list rule: no values");
    for (double v : values) {
        if (!finite_nonneg(v)) throw std::invalid_argument("list rule: values must be finite and >= 0");
    }
    SequenceRule r;
    r.kind_ = Kind::List;
    r.values_ = std::move(values);
    return r;
}

SequenceRule SequenceRule::custom(std::function<double(std::size_t)> fn, std::string label) {
    if (!fn) throw std::invalid_argument("custom rule: empty callback");
    SequenceRule r;
    r.kind_ = Kind::Custom;
    r.fn_ = std::move(fn);
    r.label_ = std::move(label);
    return r;
}

double SequenceRule::operator()(std::size_t k) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return c_;
        case Kind::Geometric: return c_ * std::pow(rho_, static_cast<double>(k));
        case Kind::Polynomial: return c_ * std::pow(static_cast<double>(k) + 1.0, -q_);
        case Kind::List: return values_[std::min(k, values_.size() - 1)];
        case Kind::Custom: return fn_(k);
    }
    return 0.0;
}

std::string SequenceRule::describe() const {
    switch (kind_) {
        case Kind::Zero: return "zero";
        case Kind::Constant: return "constant " + shortest(c_);
        case Kind::Geometric: return "geometric " + shortest(c_) + " " + shortest(rho_);
        case Kind::Polynomial: return "polynomial " + shortest(c_) + " " + shortest(q_);
        case Kind::List: {
            std::string out = "list";
            for (double v : values_) out += " " + shortest(v);
            return out;
        }
        case Kind::Custom: return label_;
    }
    return {};
}

void SequenceRule::require_range(double lo, double hi, bool hi_open, const char* name) const {
    auto check = [&](double v) {
        const bool ok = v >= lo && (hi_open ? v < hi : v <= hi);
        if (!ok) {
            std::ostringstream os;
            os << name << ": value " << v << " outside [" << lo << ", " << hi << (hi_open ? ")" : "]");
            throw std::invalid_argument(os.str());
        }
    };
    switch (kind_) {
        case Kind::Zero: check(0.0); break;
        case Kind::Constant: check(c_); break;
        case Kind::List:
            for (double v : values_) check(v);
            break;
        case Kind::Geometric:
            check(c_);
            if (rho_ > 1.0 && std::isfinite(hi)) {
                throw std::invalid_argument(std::string(name) + ": growing geometric rule is unbounded");
            }
            break;
        case Kind::Polynomial: check(c_); break;
        case Kind::Custom: break;
    }
}

namespace {

double checked(const SequenceRule& rule, std::size_t k, double hi, bool hi_open, const char* name) {
    const double v = rule(k);
    const bool ok = std::isfinite(v) && v >= 0.0 && (hi_open ? v < hi : v <= hi);
    if (!ok) {
        std::ostringstream os;
        os << name << "_" << k << " = " << v << " is out of range";
        throw std::domain_error(os.str());
    }
    return v;
}

}  // namespace

double ToleranceSchedule::sigma(std::size_t k) const { return checked(sigma_rule, k, 1.0, true, "sigma"); }
double ToleranceSchedule::zeta(std::size_t k) const { return checked(zeta_rule, k, 1.0, true, "zeta"); }
double ToleranceSchedule::xi(std::size_t k) const {
    return checked(xi_rule, k, std::numeric_limits<double>::infinity(), true, "xi");
}

void ToleranceSchedule::validate() const {
    sigma_rule.require_range(0.0, 1.0, true, "sigma");
    zeta_rule.require_range(0.0, 1.0, true, "zeta");
    if (xi_rule.kind() == SequenceRule::Kind::List) {
        xi_rule.require_range(0.0, std::numeric_limits<double>::infinity(), true, "xi");
    }
}

}  // namespace iafb

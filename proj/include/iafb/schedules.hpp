#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace iafb {

/// A nonnegative scalar sequence indexed by the outer iteration k >= 0.
class SequenceRule {
public:
    enum class Kind { Zero, Constant, Geometric, Polynomial, List, Custom };

    SequenceRule() = default;

    static SequenceRule zero();
    static SequenceRule constant(double c);
    /// C * rho^k, with C > 0 and rho > 0.
    static SequenceRule geometric(double C, double rho);
    /// C * (k+1)^(-q), with C, q >= 0.
    static SequenceRule polynomial(double C, double q);
    /// values[k], repeating the last entry past the end. Must be nonempty.
    static SequenceRule list(std::vector<double> values);
    static SequenceRule custom(std::function<double(std::size_t)> fn, std::string label = "custom");

    double operator()(std::size_t k) const;

    Kind kind() const noexcept { return kind_; }
    double coefficient() const noexcept { return c_; }
    double ratio() const noexcept { return rho_; }
    double exponent() const noexcept { return q_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Text form such as "geometric 1 0.5"; built-in rules read back with the
    /// same syntax in experiment configs.
    std::string describe() const;

    /// Throws std::invalid_argument if any built-in value leaves [lo, hi]
    /// (or [lo, hi) when hi_open). Custom rules are checked on evaluation only.
    void require_range(double lo, double hi, bool hi_open, const char* name) const;

private:
    Kind kind_ = Kind::Zero;
    double c_ = 0.0;
    double rho_ = 0.0;
    double q_ = 0.0;
    std::vector<double> values_;
    std::function<double(std::size_t)> fn_;
    std::string label_;
};

/// Error sequences sigma_k, zeta_k (relative) and xi_k (absolute).
struct ToleranceSchedule {
    SequenceRule sigma_rule = SequenceRule::zero();
    SequenceRule zeta_rule = SequenceRule::zero();
    SequenceRule xi_rule = SequenceRule::zero();

    /// Range-checked evaluations; throw std::domain_error on violation.
    double sigma(std::size_t k) const;
    double zeta(std::size_t k) const;
    double xi(std::size_t k) const;

    /// sigma, zeta in [0, 1); xi zero, geometric, polynomial, or custom.
    void validate() const;
};

}  // namespace iafb

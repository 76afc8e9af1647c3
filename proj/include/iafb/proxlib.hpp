#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iafb/linops.hpp"
#include "iafb/oracles.hpp"

namespace iafb {

using Group = std::vector<std::size_t>;

/// sign(z_i) max(|z_i| - tau, 0)
Vector soft_threshold(const Vector& z, double tau);
/// Per group: max(1 - tau/|z_g|, 0) z_g. Coordinates outside every group
/// are copied unchanged.
Vector group_soft_threshold(const Vector& z, const std::vector<Group>& groups, double tau);

/// Prox of a base function b at step s and anchor z: b_prox(z, s).
using BaseProx = std::function<Vector(const Vector& anchor, double step)>;
/// prox_{lambda g}(z) for g = b + (mu/2)|.|^2, via b_prox(z/(1+lambda mu), lambda/(1+lambda mu)).
Vector prox_with_tikhonov(const BaseProx& base, const Vector& z, double lambda, double mu);

/// g(x) = (c/2)|x|^2. Exact prox.
class SquaredNormRegularizer final : public ProxFunction {
public:
    SquaredNormRegularizer(std::size_t dim, double c);

    std::size_t dimension() const override { return dim_; }
    ExtendedReal value(const Vector& x) const override;
    double strong_convexity() const override { return c_; }
    ApproxProxCertificate approximate_prox(const ProxRequest& request) const override;
    std::optional<Vector> witness(const Vector& x, const Vector& v, double mu) const override;
    std::optional<double> shifted_conjugate(const Vector& u, double mu) const override;

private:
    std::size_t dim_;
    double c_;
};

/// One family of groups sharing a weight. Groups within a family are disjoint.
struct GroupFamily {
    double weight = 0.0;
    std::vector<Group> groups;
};

/// g(x) = sum_F weight_F sum_{G in F} |x_G|_2 + (mu_reg/2)|x|^2.
///
/// Different families may overlap (rows and columns of a matrix). The prox is
/// computed by block coordinate ascent on the dual; one sweep over all
/// groups counts as one inner iteration. With a single family the witness
/// and shifted conjugate have closed forms.
class GroupNormRegularizer final : public ProxFunction {
public:
    GroupNormRegularizer(std::size_t dim, std::vector<GroupFamily> families, double mu_reg);

    /// tau |x|_1 + (mu_reg/2)|x|^2
    static GroupNormRegularizer l1(std::size_t dim, double tau, double mu_reg = 0.0);
    /// Row and column group norms of a row-major rows x cols matrix.
    static GroupNormRegularizer rows_and_cols(std::size_t rows, std::size_t cols,
                                              double lambda_row, double lambda_col,
                                              double mu_reg);

    std::size_t dimension() const override { return dim_; }
    ExtendedReal value(const Vector& x) const override;
    double strong_convexity() const override { return mu_reg_; }
    ApproxProxCertificate approximate_prox(const ProxRequest& request) const override;
    std::optional<Vector> witness(const Vector& x, const Vector& v, double mu) const override;
    std::optional<double> shifted_conjugate(const Vector& u, double mu) const override;

    const std::vector<GroupFamily>& families() const noexcept { return families_; }
    double mu_reg() const noexcept { return mu_reg_; }
    /// Length of the stacked dual variable (sum of group sizes).
    std::size_t dual_size() const noexcept { return dual_size_; }

    /// Builds the certificate induced by a feasible dual iterate.
    ApproxProxCertificate certificate_from_dual(const Vector& anchor, double step, double mu,
                                                Vector dual) const;
    /// Projects a stacked dual vector onto the product of group balls.
    Vector project_dual(Vector dual) const;

    /// sum_F weight_F sum_G |x_G|
    double group_norm_value(const Vector& x) const;

private:
    std::size_t dim_;
    std::vector<GroupFamily> families_;
    double mu_reg_;
    std::size_t dual_size_ = 0;
    std::vector<bool> covered_;
};

/// Block coordinate ascent on the dual of prox_{lambda g}(z).
ApproxProxCertificate prox_group_dual_bca(const GroupNormRegularizer& reg,
                                          const ProxRequest& request);

/// g(X) = lambda_reg sum_ij |(grad X)_ij|_2 + (mu_reg/2)|X|_F^2 on a
/// rows x cols image stored row-major.
class TvRegularizer final : public ProxFunction {
public:
    TvRegularizer(std::size_t rows, std::size_t cols, double lambda_reg, double mu_reg);

    std::size_t dimension() const override { return rows_ * cols_; }
    ExtendedReal value(const Vector& x) const override;
    double strong_convexity() const override { return mu_reg_; }
    ApproxProxCertificate approximate_prox(const ProxRequest& request) const override;

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double lambda_reg() const noexcept { return lambda_reg_; }
    double mu_reg() const noexcept { return mu_reg_; }

    /// lambda_reg * sum of pixelwise gradient magnitudes.
    double tv_value(const Vector& x) const;
    ApproxProxCertificate certificate_from_dual(const Vector& anchor, double step, double mu,
                                                Vector dual) const;
    /// Projects the stacked (horizontal, vertical) field onto per-pixel balls.
    void project_dual(Vector& dual) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    double lambda_reg_;
    double mu_reg_;
};

/// Accelerated projected gradient (FISTA) on the dual of prox_{lambda g}(z),
/// with step 1/8 relative to the dual curvature.
ApproxProxCertificate prox_tv_dual_fista(const TvRegularizer& reg, const ProxRequest& request);

/// g(x) = base(x) - <c, x> + offset. Its prox is the base prox at the
/// shifted anchor z + lambda c, and certificates carry over unchanged up to
/// v -> v - c.
class TiltedProx final : public ProxFunction {
public:
    TiltedProx(std::shared_ptr<const ProxFunction> base, Vector tilt, double offset);

    std::size_t dimension() const override { return base_->dimension(); }
    ExtendedReal value(const Vector& x) const override;
    double strong_convexity() const override { return base_->strong_convexity(); }
    ApproxProxCertificate approximate_prox(const ProxRequest& request) const override;
    std::optional<Vector> witness(const Vector& x, const Vector& v, double mu) const override;
    std::optional<double> shifted_conjugate(const Vector& u, double mu) const override;

private:
    std::shared_ptr<const ProxFunction> base_;
    Vector tilt_;
    double offset_;
};

/// A function with closed-form prox and an independently derived prox of
/// its conjugate, for the Moreau decomposition check.
struct ClosedFormProx {
    std::string name;
    /// prox_{lambda g}(z)
    std::function<Vector(const Vector& z, double lambda)> prox;
    /// prox_{g^*/lambda}(u)
    std::function<Vector(const Vector& u, double lambda)> conjugate_prox;
};

/// Squared norm, l1, group l2, elastic net, and box indicator on R^dim.
std::vector<ClosedFormProx> closed_form_catalog(std::size_t dim);

}  // namespace iafb

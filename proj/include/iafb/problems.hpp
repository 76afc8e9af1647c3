#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>

#include "iafb/linops.hpp"
#include "iafb/oracles.hpp"
#include "iafb/proxlib.hpp"

namespace iafb {

/// f(x) = (1/2)|A x - b|^2.
class LeastSquares final : public SmoothOracle {
public:
    /// L defaults to the power-iteration estimate of |A|^2.
    LeastSquares(LinearOperator A, Vector b, double lipschitz = 0.0);

    std::size_t dimension() const override { return A_.input_dim; }
    double value(const Vector& x) const override;
    Vector gradient(const Vector& x) const override;
    std::pair<double, Vector> value_and_gradient(const Vector& x) const override;
    double lipschitz_estimate() const override { return L_; }

private:
    LinearOperator A_;
    Vector b_;
    double L_;
};

/// f(X) = (1/2)|W - W X W|_F^2 with W m x p and X p x m, both row-major.
class CurSmooth final : public SmoothOracle {
public:
    explicit CurSmooth(Matrix W);

    std::size_t dimension() const override { return W_.cols() * W_.rows(); }
    double value(const Vector& x) const override;
    Vector gradient(const Vector& x) const override;
    std::pair<double, Vector> value_and_gradient(const Vector& x) const override;
    double lipschitz_estimate() const override { return L_; }

    const Matrix& data() const noexcept { return W_; }

private:
    Matrix W_;
    Matrix Wt_;
    double L_;
};

/// Value and gradient -W^T (W - W X W) W^T.
std::pair<double, Matrix> cur_value_grad(const Matrix& W, const Matrix& X);
/// |W|_2^4 by power iteration (relative tolerance 1e-10).
double cur_lipschitz(const Matrix& W);

/// Value (1/2)|A X - Y|^2 and gradient A^T (A X - Y).
std::pair<double, Matrix> tv_value_grad(const LinearOperator& A, const Matrix& Y, const Matrix& X);

struct LassoProblem {
    Matrix design;
    Vector response;
    double l1_weight = 0.0;
    double mu_reg = 0.0;
    double L = 0.0;
    Problem problem;
};

/// Lasso (plus optional Tikhonov term) with a planted minimizer: a sparse x*
/// and a subgradient are drawn first and the response is built so that x*
/// satisfies the optimality condition exactly. Requires rows >= dim.
LassoProblem make_planted_lasso(std::size_t rows, std::size_t dim, std::size_t nonzeros,
                                double l1_weight, double mu_reg, std::uint64_t seed);

struct CurProblem {
    Matrix W;
    double lambda_row = 0.0;
    double lambda_col = 0.0;
    double mu_reg = 0.0;
    double L = 0.0;
    Problem problem;
};

/// Centers W and scales it to unit Frobenius norm when `normalize` is set,
/// then sets lambda_col = sqrt(p/m) lambda_row and mu_reg = mu_reg_scale * L.
/// The starting point is X = 0.
CurProblem make_cur_instance(Matrix W_raw, double lambda_row = 2e-3, double mu_reg_scale = 2e-3,
                             bool normalize = true);
Matrix synthetic_cur_matrix(std::size_t m, std::size_t p, std::uint64_t seed);

struct TvProblem {
    Matrix clean;
    Matrix observed;
    std::size_t kernel_size = 5;
    double noise_std = 0.0;
    double lambda_reg = 1.0;
    double mu_reg = 0.0;
    double L = 1.0;
    Problem problem;
};

/// Y = blur(clean) + N(0, (noise_rel * mean(blur(clean)))^2) noise drawn
/// from a seeded generator. L is taken as 1, mu_reg = mu_reg_scale * L, and
/// the starting point is Y.
TvProblem make_tv_instance(const Matrix& clean, std::size_t kernel_size = 5,
                           double noise_rel = 0.01, std::uint64_t seed = 0,
                           double lambda_reg = 1.0, double mu_reg_scale = 1e-2);

/// Piecewise-constant n x n test image on a 0..255 scale (rectangles and a disc).
Matrix synthetic_piecewise_image(std::size_t n);

/// min (1/2)|X - Y|^2 + TV(X) + (mu_reg/2)|X|^2 written as a single
/// prox-friendly function (no smooth part), for the extragradient method.
/// minimizer/optimal_value are left empty.
Problem make_tv_denoise_problem(const Matrix& noisy, double lambda_reg, double mu_reg);

/// min (1/2)|x - b|^2 + tau |x|_1 + (mu_reg/2)|x|^2 as a single prox-friendly
/// function, with its closed-form minimizer.
Problem make_quadratic_l1_problem(Vector b, double tau, double mu_reg, Vector x0);

}  // namespace iafb

#include "iafb/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace iafb {

LeastSquares::LeastSquares(LinearOperator A, Vector b, double lipschitz)
    : A_(std::move(A)), b_(std::move(b)), L_(lipschitz) {
    if (b_.size() != A_.output_dim) throw std::invalid_argument("LeastSquares: response length mismatch");
    if (L_ <= 0.0) {
        const double n = power_iteration_norm(A_, 1e-10);
        L_ = n * n;
    }
}

double LeastSquares::value(const Vector& x) const {
    return 0.5 * squared_distance(A_.forward(x), b_);
}

Vector LeastSquares::gradient(const Vector& x) const { return value_and_gradient(x).second; }

std::pair<double, Vector> LeastSquares::value_and_gradient(const Vector& x) const {
    Vector r = A_.forward(x);
    r -= b_;
    const double v = 0.5 * squared_norm(r);
    return {v, A_.adjoint(r)};
}

// ---------------------------------------------------------------------------

std::pair<double, Matrix> cur_value_grad(const Matrix& W, const Matrix& X) {
    if (X.rows() != W.cols() || X.cols() != W.rows()) {
        throw std::invalid_argument("cur_value_grad: X must be p x m for W m x p");
    }
    Matrix residual = W;
    residual.vec() -= matmul(matmul(W, X), W).vec();
    const double value = 0.5 * squared_norm(residual.vec());
    const Matrix Wt = transpose(W);
    Matrix grad = matmul(matmul(Wt, residual), Wt);
    grad.vec() *= -1.0;
    return {value, std::move(grad)};
}

double cur_lipschitz(const Matrix& W) {
    const double n = power_iteration_norm(dense_operator(W), 1e-10);
    return n * n * n * n;
}

CurSmooth::CurSmooth(Matrix W) : W_(std::move(W)), Wt_(transpose(W_)), L_(cur_lipschitz(W_)) {}

double CurSmooth::value(const Vector& x) const { return value_and_gradient(x).first; }

Vector CurSmooth::gradient(const Vector& x) const { return value_and_gradient(x).second; }

std::pair<double, Vector> CurSmooth::value_and_gradient(const Vector& x) const {
    if (x.size() != dimension()) throw std::invalid_argument("CurSmooth: wrong length");
    const Matrix X(W_.cols(), W_.rows(), x);
    Matrix residual = W_;
    residual.vec() -= matmul(matmul(W_, X), W_).vec();
    const double value = 0.5 * squared_norm(residual.vec());
    Matrix grad = matmul(matmul(Wt_, residual), Wt_);
    grad.vec() *= -1.0;
    return {value, std::move(grad).take_vec()};
}

std::pair<double, Matrix> tv_value_grad(const LinearOperator& A, const Matrix& Y, const Matrix& X) {
    if (X.rows() != Y.rows() || X.cols() != Y.cols() || X.size() != A.input_dim ||
        Y.size() != A.output_dim) {
        throw std::invalid_argument("tv_value_grad: shape mismatch");
    }
    Vector r = A.forward(X.vec());
    r -= Y.vec();
    const double value = 0.5 * squared_norm(r);
    return {value, Matrix(X.rows(), X.cols(), A.adjoint(r))};
}

// ---------------------------------------------------------------------------

LassoProblem make_planted_lasso(std::size_t rows, std::size_t dim, std::size_t nonzeros,
                                double l1_weight, double mu_reg, std::uint64_t seed) {
    if (rows < dim || dim == 0) throw std::invalid_argument("make_planted_lasso: need rows >= dim > 0");
    if (nonzeros > dim) throw std::invalid_argument("make_planted_lasso: too many nonzeros");
    if (!(l1_weight >= 0.0) || !(mu_reg >= 0.0)) throw std::invalid_argument("make_planted_lasso: weights must be >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(-0.9, 0.9);

    Matrix A(rows, dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
    for (double& e : A.vec()) e = scale * normal(rng);

    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = dim; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(order[i - 1], order[pick(rng)]);
    }
    Vector x_star(dim);
    Vector subgrad(dim);
    for (std::size_t i = 0; i < dim; ++i) subgrad[i] = uniform(rng);
    for (std::size_t t = 0; t < nonzeros; ++t) {
        const std::size_t i = order[t];
        const double mag = 0.5 + std::abs(normal(rng));
        const double sign = normal(rng) >= 0.0 ? 1.0 : -1.0;
        x_star[i] = sign * mag;
        subgrad[i] = sign;
    }

    // A^T (b - A x*) = tau s + mu x*  with  b - A x* = A (A^T A)^{-1} q.
    Vector q = l1_weight * subgrad;
    axpy(mu_reg, x_star, q);
    const Matrix gram = matmul(transpose(A), A);
    const Vector r = matvec(A, cholesky_solve(gram, q));
    Vector b = matvec(A, x_star);
    b += r;

    LassoProblem out;
    out.design = A;
    out.response = b;
    out.l1_weight = l1_weight;
    out.mu_reg = mu_reg;
    auto f = std::make_shared<LeastSquares>(dense_operator(A), b);
    out.L = f->lipschitz_estimate();
    out.problem.f = f;
    out.problem.g = std::make_shared<GroupNormRegularizer>(GroupNormRegularizer::l1(dim, l1_weight, mu_reg));
    out.problem.x0 = Vector(dim);
    out.problem.minimizer = x_star;
    out.problem.optimal_value = out.problem.objective(x_star);
    return out;
}

// ---------------------------------------------------------------------------

CurProblem make_cur_instance(Matrix W_raw, double lambda_row, double mu_reg_scale, bool normalize) {
    if (W_raw.rows() == 0 || W_raw.cols() == 0) throw std::invalid_argument("make_cur_instance: empty W");
    if (!(lambda_row >= 0.0) || !(mu_reg_scale >= 0.0)) {
        throw std::invalid_argument("make_cur_instance: parameters must be >= 0");
    }
    CurProblem out;
    out.W = std::move(W_raw);
    if (normalize) {
        double mean = 0.0;
        for (double e : out.W.vec()) mean += e;
        mean /= static_cast<double>(out.W.size());
        for (double& e : out.W.vec()) e -= mean;
        const double fro = frobenius_norm(out.W);
        if (fro == 0.0) throw std::invalid_argument("make_cur_instance: W is constant");
        out.W.vec() *= 1.0 / fro;
    }
    const std::size_t m = out.W.rows();
    const std::size_t p = out.W.cols();
    auto f = std::make_shared<CurSmooth>(out.W);
    out.L = f->lipschitz_estimate();
    out.lambda_row = lambda_row;
    out.lambda_col = std::sqrt(static_cast<double>(p) / static_cast<double>(m)) * lambda_row;
    out.mu_reg = mu_reg_scale * out.L;
    out.problem.f = f;
    out.problem.g = std::make_shared<GroupNormRegularizer>(
        GroupNormRegularizer::rows_and_cols(p, m, out.lambda_row, out.lambda_col, out.mu_reg));
    out.problem.x0 = Vector(p * m);
    return out;
}

Matrix synthetic_cur_matrix(std::size_t m, std::size_t p, std::uint64_t seed) {
    return Matrix(m, p, random_normal_vector(m * p, seed));
}

// ---------------------------------------------------------------------------

TvProblem make_tv_instance(const Matrix& clean, std::size_t kernel_size, double noise_rel,
                           std::uint64_t seed, double lambda_reg, double mu_reg_scale) {
    if (clean.rows() == 0 || clean.rows() != clean.cols()) {
        throw std::invalid_argument("make_tv_instance: image must be square and nonempty");
    }
    if (!(noise_rel >= 0.0)) throw std::invalid_argument("make_tv_instance: noise_rel must be >= 0");
    TvProblem out;
    out.clean = clean;
    out.kernel_size = kernel_size;
    out.lambda_reg = lambda_reg;
    out.L = 1.0;
    out.mu_reg = mu_reg_scale * out.L;

    const std::size_t n = clean.rows();
    LinearOperator blur = blur_operator(n, n, kernel_size);
    Matrix blurred(n, n, blur.forward(clean.vec()));
    double mean = 0.0;
    for (double e : blurred.vec()) mean += e;
    mean /= static_cast<double>(blurred.size());
    out.noise_std = noise_rel * mean;

    out.observed = blurred;
    if (out.noise_std > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, out.noise_std);
        for (double& e : out.observed.vec()) e += normal(rng);
    }

    out.problem.f = std::make_shared<LeastSquares>(std::move(blur), out.observed.vec(), out.L);
    out.problem.g = std::make_shared<TvRegularizer>(n, n, lambda_reg, out.mu_reg);
    out.problem.x0 = out.observed.vec();
    return out;
}

Matrix synthetic_piecewise_image(std::size_t n) {
    Matrix img(n, n, 40.0);
    const double N = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double r = static_cast<double>(i);
            const double c = static_cast<double>(j);
            if (r >= N / 8 && r < N / 2 && c >= N / 8 && c < 5 * N / 8) img(i, j) = 200.0;
            if (r >= N / 2 && r < 7 * N / 8 && c >= N / 4 && c < 3 * N / 4) img(i, j) = 120.0;
            const double dr = r - 2 * N / 3;
            const double dc = c - 2 * N / 3;
            if (dr * dr + dc * dc <= (N / 6) * (N / 6)) img(i, j) = 250.0;
        }
    }
    return img;
}

Problem make_tv_denoise_problem(const Matrix& noisy, double lambda_reg, double mu_reg) {
    auto base = std::make_shared<TvRegularizer>(noisy.rows(), noisy.cols(), lambda_reg, mu_reg + 1.0);
    Problem p;
    p.g = std::make_shared<TiltedProx>(base, noisy.vec(), 0.5 * squared_norm(noisy.vec()));
    p.x0 = noisy.vec();
    return p;
}

Problem make_quadratic_l1_problem(Vector b, double tau, double mu_reg, Vector x0) {
    const std::size_t d = b.size();
    if (x0.size() != d) throw std::invalid_argument("make_quadratic_l1_problem: x0 length mismatch");
    auto base = std::make_shared<GroupNormRegularizer>(GroupNormRegularizer::l1(d, tau, mu_reg + 1.0));
    Problem p;
    const double offset = 0.5 * squared_norm(b);
    Vector x_star = (1.0 / (1.0 + mu_reg)) * soft_threshold(b, tau);
    p.g = std::make_shared<TiltedProx>(base, std::move(b), offset);
    p.x0 = std::move(x0);
    p.optimal_value = p.objective(x_star);
    p.minimizer = std::move(x_star);
    return p;
}

}  // namespace iafb

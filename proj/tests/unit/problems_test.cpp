#include <gtest/gtest.h>

#include <cmath>

#include "iafb/afb_solver.hpp"
#include "iafb/problems.hpp"
#include "support/oracles.hpp"

namespace iafb {
namespace {

using testing::random_vector;

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed, double scale = 1.0) {
    return Matrix(r, c, random_vector(r * c, seed, scale));
}

TEST(CurValueGrad, AtZero) {
    const Matrix W = random_matrix(4, 3, 1);
    const auto [v, g] = cur_value_grad(W, Matrix(3, 4));
    EXPECT_NEAR(v, 0.5 * frobenius_norm(W) * frobenius_norm(W), 1e-14);
    const Matrix wt = transpose(W);
    const Matrix expect = matmul(matmul(wt, W), wt);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g.vec()[i], -expect.vec()[i], 1e-14);
}

TEST(CurValueGrad, ZeroData) {
    const auto [v, g] = cur_value_grad(Matrix(3, 2), random_matrix(2, 3, 2));
    EXPECT_EQ(v, 0.0);
    EXPECT_EQ(frobenius_norm(g), 0.0);
}

TEST(CurValueGrad, ShapeMismatchThrows) {
    EXPECT_THROW(cur_value_grad(Matrix(3, 2), Matrix(3, 2)), std::invalid_argument);
}

TEST(CurSmooth, DirectionalDerivativeMatchesGradient) {
    const CurSmooth f(random_matrix(5, 4, 3));
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Vector x = random_vector(20, 10 + s);
        const Vector d = random_vector(20, 40 + s);
        const double h = 1e-6;
        Vector xp = x;
        axpy(h, d, xp);
        Vector xm = x;
        axpy(-h, d, xm);
        const double fd = (f.value(xp) - f.value(xm)) / (2.0 * h);
        EXPECT_NEAR(dot(f.gradient(x), d), fd, 1e-6 * (1.0 + std::abs(fd)));
    }
}

TEST(CurLipschitz, Examples) {
    EXPECT_NEAR(cur_lipschitz(Matrix::identity(3)), 1.0, 1e-10);
    const Matrix d(2, 2, Vector{2, 0, 0, 1});
    EXPECT_NEAR(cur_lipschitz(d), 16.0, 1e-8);
}

TEST(CurLipschitz, BoundsSampledCurvature) {
    const Matrix W = random_matrix(6, 4, 5);
    const CurSmooth f(W);
    const double L = cur_lipschitz(W);
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Vector x = random_vector(24, 100 + s);
        const Vector y = random_vector(24, 300 + s);
        const double curv = norm(f.gradient(x) - f.gradient(y)) / norm(x - y);
        EXPECT_LE(curv, L * (1.0 + 1e-9));
    }
}

TEST(TvValueGrad, Examples) {
    const Matrix X = random_matrix(4, 4, 6);
    const LinearOperator A = blur_operator(4, 4, 3);
    const Matrix Y(4, 4, A.forward(X.vec()));
    const auto [v0, g0] = tv_value_grad(A, Y, X);
    EXPECT_NEAR(v0, 0.0, 1e-24);
    EXPECT_LE(frobenius_norm(g0), 1e-14);

    const Matrix Y2 = random_matrix(4, 4, 7);
    const auto [v, g] = tv_value_grad(dense_operator(Matrix::identity(16)), Y2, X);
    const Vector diff = X.vec() - Y2.vec();
    EXPECT_NEAR(v, 0.5 * squared_norm(diff), 1e-13);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(g.vec()[i], diff[i], 1e-15);
}

TEST(TvValueGrad, FiniteDifferences) {
    const LeastSquares f(blur_operator(5, 5, 3), random_vector(25, 8), 1.0);
    EXPECT_LE(testing::fd_gradient_error(f, random_vector(25, 9), 50, 10), 1e-5);
}

TEST(MakeTvInstance, NoiseFreeIsPureBlur) {
    const Matrix clean = synthetic_piecewise_image(16);
    const TvProblem tv = make_tv_instance(clean, 5, 0.0, 1);
    EXPECT_EQ(tv.observed, box_blur(clean, 5));
    EXPECT_EQ(tv.noise_std, 0.0);
}

TEST(MakeTvInstance, DefaultsAndDeterminism) {
    const Matrix clean = synthetic_piecewise_image(16);
    const TvProblem a = make_tv_instance(clean);
    const TvProblem b = make_tv_instance(clean);
    EXPECT_EQ(a.observed, b.observed);
    EXPECT_EQ(a.lambda_reg, 1.0);
    EXPECT_EQ(a.L, 1.0);
    EXPECT_DOUBLE_EQ(a.mu_reg, 1e-2);
    EXPECT_EQ(a.kernel_size, 5u);
    EXPECT_EQ(a.problem.x0, a.observed.vec());
    EXPECT_NE(make_tv_instance(clean, 5, 0.01, 1).observed, a.observed);
}

TEST(MakeTvInstance, NoiseLevelMatchesTarget) {
    const Matrix clean = synthetic_piecewise_image(32);
    const Matrix blurred = box_blur(clean, 5);
    double mean = 0.0;
    for (double e : blurred.vec()) mean += e;
    mean /= static_cast<double>(blurred.size());
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const TvProblem tv = make_tv_instance(clean, 5, 0.01, seed);
        EXPECT_NEAR(tv.noise_std, 0.01 * mean, 1e-12);
        const Vector noise = tv.observed.vec() - blurred.vec();
        double m = 0.0;
        for (double e : noise.values()) m += e;
        m /= static_cast<double>(noise.size());
        double var = 0.0;
        for (double e : noise.values()) var += (e - m) * (e - m);
        const double sd = std::sqrt(var / static_cast<double>(noise.size() - 1));
        EXPECT_NEAR(sd, tv.noise_std, 0.1 * tv.noise_std) << seed;
    }
}

TEST(MakeCurInstance, DefaultsAndNormalization) {
    const CurProblem c = make_cur_instance(synthetic_cur_matrix(30, 20, 4));
    EXPECT_EQ(c.lambda_row, 2e-3);
    EXPECT_DOUBLE_EQ(c.lambda_col, std::sqrt(20.0 / 30.0) * 2e-3);
    EXPECT_DOUBLE_EQ(c.mu_reg, 2e-3 * c.L);
    double mean = 0.0;
    for (double e : c.W.vec()) mean += e;
    EXPECT_NEAR(mean / 600.0, 0.0, 1e-15);
    EXPECT_NEAR(frobenius_norm(c.W), 1.0, 1e-12);
    EXPECT_NEAR(c.L, cur_lipschitz(c.W), 1e-15);
    EXPECT_EQ(c.problem.x0, Vector(600));
    EXPECT_EQ(c.problem.g->strong_convexity(), c.mu_reg);
}

TEST(MakeCurInstance, WithoutNormalizationKeepsData) {
    const Matrix W = synthetic_cur_matrix(5, 3, 2);
    EXPECT_EQ(make_cur_instance(W, 2e-3, 2e-3, false).W, W);
    EXPECT_THROW(make_cur_instance(Matrix(3, 3, 1.0)), std::invalid_argument);
}

TEST(MakeCurInstance, SmokeSolve) {
    const CurProblem c = make_cur_instance(synthetic_cur_matrix(20, 15, 5));
    AfbConfig cfg;
    cfg.lambda0 = 1.0 / c.L;
    cfg.mu = c.mu_reg;
    cfg.schedule.sigma_rule = SequenceRule::constant(0.8);
    cfg.lambda0 *= 1.0 - 0.64;
    cfg.beta = 1.1;
    StopRule stop;
    stop.max_outer = 50;
    const SolveResult r = afb_solve(c.problem, cfg, stop);
    ASSERT_EQ(r.records.size(), 50u);
    EXPECT_LT(r.records.back().objective, c.problem.objective(c.problem.x0));
}

TEST(PlantedLasso, MinimizerSatisfiesOptimality) {
    for (double mu_reg : {0.0, 0.3}) {
        const LassoProblem l = make_planted_lasso(30, 12, 4, 0.2, mu_reg, 11);
        const Vector& xs = *l.problem.minimizer;
        const Vector grad = l.problem.f->gradient(xs);
        std::size_t nz = 0;
        for (std::size_t i = 0; i < 12; ++i) {
            const double r = -grad[i] - mu_reg * xs[i];
            if (xs[i] != 0.0) {
                ++nz;
                EXPECT_NEAR(r, 0.2 * (xs[i] > 0 ? 1.0 : -1.0), 1e-10);
            } else {
                EXPECT_LE(std::abs(r), 0.2 + 1e-10);
            }
        }
        EXPECT_EQ(nz, 4u);
        // No random point does better.
        for (std::uint64_t s = 0; s < 50; ++s) {
            Vector x = xs;
            axpy(1e-3, random_vector(12, s), x);
            EXPECT_GE(l.problem.objective(x), *l.problem.optimal_value - 1e-12);
        }
    }
}

TEST(QuadraticL1, ClosedFormMinimizer) {
    const Vector b{2.0, -0.1, 0.7};
    const Problem p = make_quadratic_l1_problem(b, 0.5, 1.0, Vector(3));
    EXPECT_NEAR((*p.minimizer)[0], 0.75, 1e-15);
    EXPECT_EQ((*p.minimizer)[1], 0.0);
    EXPECT_NEAR((*p.minimizer)[2], 0.1, 1e-15);
    const double opt = *p.optimal_value;
    for (std::uint64_t s = 0; s < 50; ++s) {
        Vector x = *p.minimizer;
        axpy(1e-2, random_vector(3, s), x);
        EXPECT_GT(p.objective(x), opt);
    }
    EXPECT_NEAR(p.objective(Vector(3)), 0.5 * squared_norm(b), 1e-15);
}

TEST(TvDenoise, ObjectiveDefinition) {
    const Matrix noisy = random_matrix(4, 4, 12);
    const Problem p = make_tv_denoise_problem(noisy, 0.7, 0.1);
    const Vector x = random_vector(16, 13);
    const TvRegularizer tv(4, 4, 0.7, 0.0);
    const double expect = 0.5 * squared_distance(x, noisy.vec()) + tv.tv_value(x) + 0.05 * squared_norm(x);
    EXPECT_NEAR(p.objective(x), expect, 1e-12 * (1.0 + expect));
    EXPECT_DOUBLE_EQ(p.g->strong_convexity(), 1.1);
    EXPECT_FALSE(p.f);
}

TEST(SyntheticImage, PiecewiseConstantOnByteScale) {
    const Matrix img = synthetic_piecewise_image(32);
    double lo = 1e9;
    double hi = -1e9;
    for (double e : img.vec()) {
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    EXPECT_GE(lo, 0.0);
    EXPECT_LE(hi, 255.0);
    EXPECT_GT(hi - lo, 100.0);
}

}  // namespace
}  // namespace iafb

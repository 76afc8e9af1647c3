#include "iafb/linops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "iafb/kernels.hpp"

namespace iafb {

namespace {

void require_same_length(const Vector& a, const Vector& b, const char* what) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
}

}  // namespace

Vector& Vector::operator+=(const Vector& other) {
    require_same_length(*this, other, "Vector::operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Vector& Vector::operator-=(const Vector& other) {
    require_same_length(*this, other, "Vector::operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Vector& Vector::operator*=(double s) noexcept {
    for (double& e : data_) e *= s;
    return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator-(Vector a) { return a *= -1.0; }
Vector operator*(double s, Vector a) { return a *= s; }
Vector operator*(Vector a, double s) { return a *= s; }

double dot(const Vector& a, const Vector& b) {
    require_same_length(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    if (!std::isfinite(acc)) throw std::domain_error("dot: non-finite result");
    return acc;
}

double squared_norm(const Vector& a) { return dot(a, a); }
double norm(const Vector& a) { return std::sqrt(squared_norm(a)); }

double squared_distance(const Vector& a, const Vector& b) {
    require_same_length(a, b, "squared_distance");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    if (!std::isfinite(acc)) throw std::domain_error("squared_distance: non-finite result");
    return acc;
}

void axpy(double a, const Vector& x, Vector& y) {
    require_same_length(x, y, "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

bool all_finite(const Vector& a) noexcept {
    for (double e : a) {
        if (!std::isfinite(e)) return false;
    }
    return true;
}

void require_finite(const Vector& a, const char* what) {
    if (!all_finite(a)) throw std::domain_error(std::string(what) + ": non-finite entries");
}

// ---------------------------------------------------------------------------

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, Vector storage)
    : rows_(rows), cols_(cols), data_(std::move(storage)) {
    if (data_.size() != rows * cols) {
        throw std::invalid_argument("Matrix: storage has " + std::to_string(data_.size()) +
                                    " entries, expected " + std::to_string(rows * cols));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    kernels::matmul(a.vec().span(), b.vec().span(), out.vec().span(), a.rows(), a.cols(),
                    b.cols());
    return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

Vector matvec_transposed(const Matrix& a, const Vector& x) {
    if (a.rows() != x.size()) throw std::invalid_argument("matvec_transposed: dimension mismatch");
    Vector out(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(i, j) * xi;
    }
    return out;
}

double frobenius_norm(const Matrix& a) { return norm(a.vec()); }

Vector cholesky_solve(const Matrix& spd, const Vector& b) {
    const std::size_t n = spd.rows();
    if (spd.cols() != n || b.size() != n) throw std::invalid_argument("cholesky_solve: shape");
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = spd(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw std::domain_error("cholesky_solve: matrix not positive definite");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = spd(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Images

GradientField image_gradient(const Matrix& x) {
    GradientField g{Matrix(x.rows(), x.cols()), Matrix(x.rows(), x.cols())};
    if (x.size() == 0) return g;
    kernels::image_gradient(x.vec().span(), x.rows(), x.cols(), g.horizontal.vec().span(),
                            g.vertical.vec().span());
    return g;
}

Matrix image_divergence(const GradientField& p) {
    const auto& h = p.horizontal;
    const auto& v = p.vertical;
    if (h.rows() != v.rows() || h.cols() != v.cols()) {
        throw std::invalid_argument("image_divergence: field components differ in shape");
    }
    Matrix out(h.rows(), h.cols());
    if (out.size() == 0) return out;
    kernels::image_divergence(h.vec().span(), v.vec().span(), h.rows(), h.cols(),
                              out.vec().span());
    return out;
}

Matrix box_blur(const Matrix& x, std::size_t kernel_size) {
    if (kernel_size % 2 == 0) throw std::invalid_argument("box_blur: kernel size must be odd");
    const auto along_rows = kernels::box_stencil(x.cols(), kernel_size);
    const auto along_cols = kernels::box_stencil(x.rows(), kernel_size);
    Matrix out(x.rows(), x.cols());
    kernels::separable_filter(x.vec().span(), x.rows(), x.cols(), along_rows, along_cols,
                              out.vec().span());
    return out;
}

Matrix box_blur_adjoint(const Matrix& x, std::size_t kernel_size) {
    if (kernel_size % 2 == 0) throw std::invalid_argument("box_blur: kernel size must be odd");
    const auto along_rows = kernels::transpose_stencil(kernels::box_stencil(x.cols(), kernel_size));
    const auto along_cols = kernels::transpose_stencil(kernels::box_stencil(x.rows(), kernel_size));
    Matrix out(x.rows(), x.cols());
    kernels::separable_filter(x.vec().span(), x.rows(), x.cols(), along_rows, along_cols,
                              out.vec().span());
    return out;
}

// ---------------------------------------------------------------------------
// Operators

LinearOperator dense_operator(Matrix a) {
    LinearOperator op;
    op.input_dim = a.cols();
    op.output_dim = a.rows();
    // Frobenius norm bounds the spectral norm.
    op.norm_bound = frobenius_norm(a);
    auto shared = std::make_shared<const Matrix>(std::move(a));
    op.forward = [shared](const Vector& x) { return matvec(*shared, x); };
    op.adjoint = [shared](const Vector& y) { return matvec_transposed(*shared, y); };
    return op;
}

LinearOperator blur_operator(std::size_t rows, std::size_t cols, std::size_t kernel_size) {
    if (kernel_size % 2 == 0) throw std::invalid_argument("blur_operator: kernel size must be odd");
    struct Stencils {
        kernels::Stencil1D rows_fwd, cols_fwd, rows_adj, cols_adj;
    };
    auto s = std::make_shared<Stencils>();
    s->rows_fwd = kernels::box_stencil(cols, kernel_size);
    s->cols_fwd = kernels::box_stencil(rows, kernel_size);
    s->rows_adj = kernels::transpose_stencil(s->rows_fwd);
    s->cols_adj = kernels::transpose_stencil(s->cols_fwd);
    LinearOperator op;
    op.input_dim = op.output_dim = rows * cols;
    op.norm_bound = 1.0;
    op.forward = [s, rows, cols](const Vector& x) {
        if (x.size() != rows * cols) throw std::invalid_argument("blur: shape mismatch");
        Vector out(rows * cols);
        kernels::separable_filter(x.span(), rows, cols, s->rows_fwd, s->cols_fwd, out.span());
        return out;
    };
    op.adjoint = [s, rows, cols](const Vector& y) {
        if (y.size() != rows * cols) throw std::invalid_argument("blur: shape mismatch");
        Vector out(rows * cols);
        kernels::separable_filter(y.span(), rows, cols, s->rows_adj, s->cols_adj, out.span());
        return out;
    };
    return op;
}

LinearOperator gradient_operator(std::size_t rows, std::size_t cols) {
    LinearOperator op;
    const std::size_t n = rows * cols;
    op.input_dim = n;
    op.output_dim = 2 * n;
    op.norm_bound = std::sqrt(8.0);
    op.forward = [rows, cols, n](const Vector& x) {
        if (x.size() != n) throw std::invalid_argument("gradient: shape mismatch");
        Vector out(2 * n);
        kernels::image_gradient(x.span(), rows, cols, out.span().first(n), out.span().last(n));
        return out;
    };
    op.adjoint = [rows, cols, n](const Vector& p) {
        if (p.size() != 2 * n) throw std::invalid_argument("gradient adjoint: shape mismatch");
        Vector out(n);
        kernels::image_divergence(p.span().first(n), p.span().last(n), rows, cols, out.span());
        out *= -1.0;
        return out;
    };
    return op;
}

Vector random_normal_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (double& e : v) e = normal(rng);
    return v;
}

double adjoint_mismatch(const LinearOperator& op, std::size_t probes, std::uint64_t seed) {
    double worst = 0.0;
    for (std::size_t t = 0; t < probes; ++t) {
        const Vector u = random_normal_vector(op.input_dim, seed + 2 * t);
        const Vector v = random_normal_vector(op.output_dim, seed + 2 * t + 1);
        const double lhs = dot(op.forward(u), v);
        const double rhs = dot(u, op.adjoint(v));
        worst = std::max(worst, std::abs(lhs - rhs) / (norm(u) * norm(v)));
    }
    return worst;
}

double power_iteration_norm(const LinearOperator& op, double tolerance,
                            std::size_t max_iterations) {
    Vector u(op.input_dim, 1.0);
    // A constant start vector can be orthogonal to the top singular vector.
    const Vector jitter = random_normal_vector(op.input_dim, 0x5eed);
    axpy(0.1, jitter, u);
    u *= 1.0 / norm(u);
    double estimate = 0.0;
    for (std::size_t it = 0; it < max_iterations; ++it) {
        Vector w = op.adjoint(op.forward(u));
        const double nw = norm(w);
        if (nw == 0.0) return 0.0;
        const double next = std::sqrt(nw);
        w *= 1.0 / nw;
        u = std::move(w);
        if (std::abs(next - estimate) <= tolerance * next) return next;
        estimate = next;
    }
    return estimate;
}

// ---------------------------------------------------------------------------
// CSV

Matrix read_csv(std::istream& in) {
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t count = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw std::invalid_argument("read_csv: bad number on line " +
                                            std::to_string(line_no));
            }
            ++count;
        }
        if (rows == 0) cols = count;
        if (count != cols) {
            throw std::invalid_argument("read_csv: ragged row on line " + std::to_string(line_no));
        }
        ++rows;
    }
    if (rows == 0) throw std::invalid_argument("read_csv: no data");
    return Matrix(rows, cols, Vector(std::move(values)));
}

void write_csv(std::ostream& out, const Matrix& m) {
    char buf[32];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j > 0) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace iafb

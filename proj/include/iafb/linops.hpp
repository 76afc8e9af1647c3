#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace iafb {

/// Dense real vector. Houses every iterate (x, y, z, v, w) and flattened
/// matrix variable used by the solvers.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    std::span<double> span() noexcept { return data_; }
    std::span<const double> span() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    const std::vector<double>& values() const noexcept { return data_; }

    Vector& operator+=(const Vector& other);
    Vector& operator-=(const Vector& other);
    Vector& operator*=(double s) noexcept;

    bool operator==(const Vector&) const = default;

private:
    std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator-(Vector a);
Vector operator*(double s, Vector a);
Vector operator*(Vector a, double s);

/// Inner product, summed sequentially in index order. Throws on length
/// mismatch or a non-finite result.
double dot(const Vector& a, const Vector& b);
double squared_norm(const Vector& a);
double norm(const Vector& a);
double squared_distance(const Vector& a, const Vector& b);

/// y += a * x
void axpy(double a, const Vector& x, Vector& y);

bool all_finite(const Vector& a) noexcept;
/// Throws std::domain_error naming `what` if any element is NaN/Inf.
void require_finite(const Vector& a, const char* what);

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Takes ownership of row-major storage; throws if the size disagrees.
    Matrix(std::size_t rows, std::size_t cols, Vector storage);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    const Vector& vec() const noexcept { return data_; }
    Vector& vec() noexcept { return data_; }
    Vector take_vec() && { return std::move(data_); }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector data_;
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
/// a^T x without forming the transpose.
Vector matvec_transposed(const Matrix& a, const Vector& x);
double frobenius_norm(const Matrix& a);

/// Solves S x = b for symmetric positive definite S (Cholesky). Throws if S
/// is not numerically positive definite.
Vector cholesky_solve(const Matrix& spd, const Vector& b);

/// Horizontal and vertical forward differences of an image.
struct GradientField {
    Matrix horizontal;  ///< X(i, j+1) - X(i, j), zero in the last column
    Matrix vertical;    ///< X(i+1, j) - X(i, j), zero in the last row
};

GradientField image_gradient(const Matrix& x);
/// Negative adjoint of image_gradient: <grad X, P> = -<X, div P>.
Matrix image_divergence(const GradientField& p);

/// Uniform kernel_size x kernel_size average with half-sample symmetric
/// (reflect) boundary. The operator is doubly stochastic, so its norm is <= 1.
Matrix box_blur(const Matrix& x, std::size_t kernel_size);
Matrix box_blur_adjoint(const Matrix& x, std::size_t kernel_size);

/// Linear map between flat vectors with a declared operator-norm bound.
struct LinearOperator {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    std::function<Vector(const Vector&)> forward;
    std::function<Vector(const Vector&)> adjoint;
    double norm_bound = 0.0;
};

LinearOperator dense_operator(Matrix a);
LinearOperator blur_operator(std::size_t rows, std::size_t cols, std::size_t kernel_size);
/// Maps an image to its stacked (horizontal, vertical) differences.
LinearOperator gradient_operator(std::size_t rows, std::size_t cols);

/// Largest |<Au, v> - <u, A^T v>| / (|u| |v|) over random probes.
double adjoint_mismatch(const LinearOperator& op, std::size_t probes, std::uint64_t seed);

/// Spectral norm estimate from power iteration on A^T A. Stops once the
/// relative change of the estimate falls below `tolerance`.
double power_iteration_norm(const LinearOperator& op, double tolerance = 1e-12,
                            std::size_t max_iterations = 100000);

Vector random_normal_vector(std::size_t n, std::uint64_t seed);

Matrix read_csv(std::istream& in);
void write_csv(std::ostream& out, const Matrix& m);

}  // namespace iafb

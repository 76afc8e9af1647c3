#pragma once

// Data-parallel inner loops behind linops. Every kernel has an OpenMP
// version (iafb::kernels) and a plain serial twin (iafb::kernels::serial)
// kept as the reference for tests and benchmarks. Each output element is
// computed by the same sequential summation in both, so results agree
// bit for bit regardless of thread count.

#include <cstddef>
#include <span>
#include <vector>

namespace iafb::kernels {

/// Precomputed 1-D box filter with reflect boundary: output i reads
/// taps[offsets[i] .. offsets[i+1]).
struct Stencil1D {
    struct Tap {
        std::size_t index;
        double weight;
    };
    std::size_t length = 0;
    std::vector<std::size_t> offsets;
    std::vector<Tap> taps;
};

/// Index of the half-sample symmetric extension of [0, n).
std::size_t reflect_index(long long i, std::size_t n) noexcept;
Stencil1D box_stencil(std::size_t length, std::size_t kernel_size);
/// Transposed stencil (adjoint of the 1-D filter).
Stencil1D transpose_stencil(const Stencil1D& s);

// Problems below this many output elements stay on one thread.
inline constexpr std::size_t kParallelThreshold = 4096;

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> out,
            std::size_t m, std::size_t k, std::size_t n);
void image_gradient(std::span<const double> x, std::size_t rows, std::size_t cols,
                    std::span<double> gx, std::span<double> gy);
void image_divergence(std::span<const double> gx, std::span<const double> gy, std::size_t rows,
                      std::size_t cols, std::span<double> out);
/// Applies `along_cols` down each column, then `along_rows` across each row.
void separable_filter(std::span<const double> x, std::size_t rows, std::size_t cols,
                      const Stencil1D& along_rows, const Stencil1D& along_cols,
                      std::span<double> out);

namespace serial {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> out,
            std::size_t m, std::size_t k, std::size_t n);
void image_gradient(std::span<const double> x, std::size_t rows, std::size_t cols,
                    std::span<double> gx, std::span<double> gy);
void image_divergence(std::span<const double> gx, std::span<const double> gy, std::size_t rows,
                      std::size_t cols, std::span<double> out);
void separable_filter(std::span<const double> x, std::size_t rows, std::size_t cols,
                      const Stencil1D& along_rows, const Stencil1D& along_cols,
                      std::span<double> out);

}  // namespace serial
}  // namespace iafb::kernels

#include "iafb/kernels.hpp"

#include <stdexcept>

namespace iafb::kernels {

std::size_t reflect_index(long long i, std::size_t n) noexcept {
    const auto period = static_cast<long long>(2 * n);
    long long j = i % period;
    if (j < 0) j += period;
    if (j >= static_cast<long long>(n)) j = period - 1 - j;
    return static_cast<std::size_t>(j);
}

Stencil1D box_stencil(std::size_t length, std::size_t kernel_size) {
    if (kernel_size % 2 == 0) throw std::invalid_argument("box_stencil: kernel size must be odd");
    if (length == 0) throw std::invalid_argument("box_stencil: empty signal");
    Stencil1D s;
    s.length = length;
    s.offsets.reserve(length + 1);
    s.offsets.push_back(0);
    const auto half = static_cast<long long>(kernel_size / 2);
    const double weight = 1.0 / static_cast<double>(kernel_size);
    for (std::size_t i = 0; i < length; ++i) {
        for (long long o = -half; o <= half; ++o) {
            s.taps.push_back({reflect_index(static_cast<long long>(i) + o, length), weight});
        }
        s.offsets.push_back(s.taps.size());
    }
    return s;
}

Stencil1D transpose_stencil(const Stencil1D& s) {
    Stencil1D t;
    t.length = s.length;
    std::vector<std::size_t> counts(s.length, 0);
    for (const auto& tap : s.taps) ++counts[tap.index];
    t.offsets.assign(s.length + 1, 0);
    for (std::size_t j = 0; j < s.length; ++j) t.offsets[j + 1] = t.offsets[j] + counts[j];
    t.taps.resize(s.taps.size());
    std::vector<std::size_t> cursor(t.offsets.begin(), t.offsets.end() - 1);
    for (std::size_t i = 0; i < s.length; ++i) {
        for (std::size_t p = s.offsets[i]; p < s.offsets[i + 1]; ++p) {
            const auto& tap = s.taps[p];
            t.taps[cursor[tap.index]++] = {i, tap.weight};
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// OpenMP kernels

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> out,
            std::size_t m, std::size_t k, std::size_t n) {
    const auto rows = static_cast<long long>(m);
#pragma omp parallel for schedule(static) if (m * n >= kParallelThreshold)
    for (long long ii = 0; ii < rows; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double* out_row = out.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) out_row[j] = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            const double a_il = a[i * k + l];
            const double* b_row = b.data() + l * n;
            for (std::size_t j = 0; j < n; ++j) out_row[j] += a_il * b_row[j];
        }
    }
}

void image_gradient(std::span<const double> x, std::size_t rows, std::size_t cols,
                    std::span<double> gx, std::span<double> gy) {
    const auto nrows = static_cast<long long>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
    for (long long ii = 0; ii < nrows; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* row = x.data() + i * cols;
        double* hx = gx.data() + i * cols;
        double* vy = gy.data() + i * cols;
        for (std::size_t j = 0; j + 1 < cols; ++j) hx[j] = row[j + 1] - row[j];
        hx[cols - 1] = 0.0;
        if (i + 1 < rows) {
            const double* next = row + cols;
            for (std::size_t j = 0; j < cols; ++j) vy[j] = next[j] - row[j];
        } else {
            for (std::size_t j = 0; j < cols; ++j) vy[j] = 0.0;
        }
    }
}

void image_divergence(std::span<const double> gx, std::span<const double> gy, std::size_t rows,
                      std::size_t cols, std::span<double> out) {
    const auto nrows = static_cast<long long>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
    for (long long ii = 0; ii < nrows; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t p = i * cols + j;
            double d = 0.0;
            if (j + 1 < cols) d += gx[p];
            if (j > 0) d -= gx[p - 1];
            if (i + 1 < rows) d += gy[p];
            if (i > 0) d -= gy[p - cols];
            out[p] = d;
        }
    }
}

void separable_filter(std::span<const double> x, std::size_t rows, std::size_t cols,
                      const Stencil1D& along_rows, const Stencil1D& along_cols,
                      std::span<double> out) {
    std::vector<double> tmp(rows * cols);
    const auto nrows = static_cast<long long>(rows);
    const bool parallel = rows * cols >= kParallelThreshold;
#pragma omp parallel if (parallel)
    {
#pragma omp for schedule(static)
        for (long long ii = 0; ii < nrows; ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            double* t = tmp.data() + i * cols;
            for (std::size_t j = 0; j < cols; ++j) t[j] = 0.0;
            for (std::size_t p = along_cols.offsets[i]; p < along_cols.offsets[i + 1]; ++p) {
                const auto& tap = along_cols.taps[p];
                const double* src = x.data() + tap.index * cols;
                for (std::size_t j = 0; j < cols; ++j) t[j] += tap.weight * src[j];
            }
        }
#pragma omp for schedule(static)
        for (long long ii = 0; ii < nrows; ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            const double* t = tmp.data() + i * cols;
            double* o = out.data() + i * cols;
            for (std::size_t j = 0; j < cols; ++j) {
                double acc = 0.0;
                for (std::size_t p = along_rows.offsets[j]; p < along_rows.offsets[j + 1]; ++p) {
                    acc += along_rows.taps[p].weight * t[along_rows.taps[p].index];
                }
                o[j] = acc;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Serial reference

namespace serial {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> out,
            std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += a[i * k + l] * b[l * n + j];
        }
    }
}

void image_gradient(std::span<const double> x, std::size_t rows, std::size_t cols,
                    std::span<double> gx, std::span<double> gy) {
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t p = i * cols + j;
            gx[p] = j + 1 < cols ? x[p + 1] - x[p] : 0.0;
            gy[p] = i + 1 < rows ? x[p + cols] - x[p] : 0.0;
        }
    }
}

void image_divergence(std::span<const double> gx, std::span<const double> gy, std::size_t rows,
                      std::size_t cols, std::span<double> out) {
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t p = i * cols + j;
            double d = 0.0;
            if (j + 1 < cols) d += gx[p];
            if (j > 0) d -= gx[p - 1];
            if (i + 1 < rows) d += gy[p];
            if (i > 0) d -= gy[p - cols];
            out[p] = d;
        }
    }
}

void separable_filter(std::span<const double> x, std::size_t rows, std::size_t cols,
                      const Stencil1D& along_rows, const Stencil1D& along_cols,
                      std::span<double> out) {
    std::vector<double> tmp(rows * cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t p = along_cols.offsets[i]; p < along_cols.offsets[i + 1]; ++p) {
            const auto& tap = along_cols.taps[p];
            for (std::size_t j = 0; j < cols; ++j) {
                tmp[i * cols + j] += tap.weight * x[tap.index * cols + j];
            }
        }
    }
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            double acc = 0.0;
            for (std::size_t p = along_rows.offsets[j]; p < along_rows.offsets[j + 1]; ++p) {
                acc += along_rows.taps[p].weight * tmp[i * cols + along_rows.taps[p].index];
            }
            out[i * cols + j] = acc;
        }
    }
}

}  // namespace serial
}  // namespace iafb::kernels

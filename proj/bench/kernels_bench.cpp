// Serial reference vs OpenMP kernels. Arg is the matrix/image side length.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "iafb/kernels.hpp"
#include "iafb/linops.hpp"

namespace {

namespace k = iafb::kernels;

std::vector<double> data(std::size_t n, std::uint64_t seed) {
    const iafb::Vector v = iafb::random_normal_vector(n, seed);
    return std::vector<double>(v.begin(), v.end());
}

template <bool Parallel>
void BM_Matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = data(n * n, 1);
    const auto b = data(n * n, 2);
    std::vector<double> out(n * n);
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::matmul(a, b, out, n, n, n);
        } else {
            k::serial::matmul(a, b, out, n, n, n);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(n * n * n));
}

template <bool Parallel>
void BM_Gradient(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = data(n * n, 3);
    std::vector<double> gx(n * n), gy(n * n);
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::image_gradient(x, n, n, gx, gy);
        } else {
            k::serial::image_gradient(x, n, n, gx, gy);
        }
        benchmark::DoNotOptimize(gx.data());
        benchmark::DoNotOptimize(gy.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(n * n));
}

template <bool Parallel>
void BM_Divergence(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto gx = data(n * n, 4);
    const auto gy = data(n * n, 5);
    std::vector<double> out(n * n);
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::image_divergence(gx, gy, n, n, out);
        } else {
            k::serial::image_divergence(gx, gy, n, n, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(n * n));
}

template <bool Parallel>
void BM_BoxBlur(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = data(n * n, 6);
    const k::Stencil1D s = k::box_stencil(n, 5);
    std::vector<double> out(n * n);
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::separable_filter(x, n, n, s, s, out);
        } else {
            k::serial::separable_filter(x, n, n, s, s, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(n * n));
}

}  // namespace

BENCHMARK(BM_Matmul<false>)->Name("matmul/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_Matmul<true>)->Name("matmul/omp")->Arg(64)->Arg(256)->UseRealTime();
BENCHMARK(BM_Gradient<false>)->Name("gradient/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_Gradient<true>)->Name("gradient/omp")->Arg(256)->Arg(1024)->UseRealTime();
BENCHMARK(BM_Divergence<false>)->Name("divergence/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_Divergence<true>)->Name("divergence/omp")->Arg(256)->Arg(1024)->UseRealTime();
BENCHMARK(BM_BoxBlur<false>)->Name("box_blur/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_BoxBlur<true>)->Name("box_blur/omp")->Arg(256)->Arg(1024)->UseRealTime();

BENCHMARK_MAIN();

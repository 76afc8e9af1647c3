#include <gtest/gtest.h>

#include <vector>

#include "iafb/kernels.hpp"
#include "support/oracles.hpp"

namespace iafb {
namespace {

namespace k = kernels;

std::vector<double> data(std::size_t n, std::uint64_t seed) {
    const Vector v = testing::random_vector(n, seed);
    return {v.begin(), v.end()};
}

// Sizes straddle kParallelThreshold so both code paths run.
class KernelSizes : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KernelSizes, MatmulMatchesSerialBitForBit) {
    const std::size_t n = GetParam();
    const auto a = data(n * (n + 3), 1);
    const auto b = data((n + 3) * n, 2);
    std::vector<double> par(n * n), ser(n * n);
    k::matmul(a, b, par, n, n + 3, n);
    k::serial::matmul(a, b, ser, n, n + 3, n);
    EXPECT_EQ(par, ser);
}

TEST_P(KernelSizes, GradientMatchesSerialBitForBit) {
    const std::size_t n = GetParam();
    const auto x = data(n * (n + 1), 3);
    std::vector<double> gx(x.size()), gy(x.size()), sx(x.size()), sy(x.size());
    k::image_gradient(x, n, n + 1, gx, gy);
    k::serial::image_gradient(x, n, n + 1, sx, sy);
    EXPECT_EQ(gx, sx);
    EXPECT_EQ(gy, sy);
}

TEST_P(KernelSizes, DivergenceMatchesSerialBitForBit) {
    const std::size_t n = GetParam();
    const auto gx = data(n * n, 4);
    const auto gy = data(n * n, 5);
    std::vector<double> par(n * n), ser(n * n);
    k::image_divergence(gx, gy, n, n, par);
    k::serial::image_divergence(gx, gy, n, n, ser);
    EXPECT_EQ(par, ser);
}

TEST_P(KernelSizes, SeparableFilterMatchesSerialBitForBit) {
    const std::size_t n = GetParam();
    const auto x = data(n * n, 6);
    const auto s = k::box_stencil(n, 5);
    std::vector<double> par(n * n), ser(n * n);
    k::separable_filter(x, n, n, s, s, par);
    k::serial::separable_filter(x, n, n, s, s, ser);
    EXPECT_EQ(par, ser);
}

INSTANTIATE_TEST_SUITE_P(Sizes, KernelSizes, ::testing::Values(5, 33, 80, 130));

TEST(ReflectIndex, HalfSampleSymmetric) {
    EXPECT_EQ(k::reflect_index(-1, 5), 0u);
    EXPECT_EQ(k::reflect_index(-2, 5), 1u);
    EXPECT_EQ(k::reflect_index(5, 5), 4u);
    EXPECT_EQ(k::reflect_index(6, 5), 3u);
    EXPECT_EQ(k::reflect_index(2, 5), 2u);
    EXPECT_EQ(k::reflect_index(-1, 1), 0u);
    EXPECT_EQ(k::reflect_index(3, 1), 0u);
}

TEST(BoxStencil, RowsSumToOne) {
    const auto s = k::box_stencil(4, 5);
    for (std::size_t i = 0; i < s.length; ++i) {
        double sum = 0.0;
        for (std::size_t t = s.offsets[i]; t < s.offsets[i + 1]; ++t) sum += s.taps[t].weight;
        EXPECT_NEAR(sum, 1.0, 1e-15);
    }
}

TEST(BoxStencil, TransposeColumnsSumToOne) {
    // Reflect padding makes the filter doubly stochastic.
    const auto t = k::transpose_stencil(k::box_stencil(6, 5));
    for (std::size_t i = 0; i < t.length; ++i) {
        double sum = 0.0;
        for (std::size_t j = t.offsets[i]; j < t.offsets[i + 1]; ++j) sum += t.taps[j].weight;
        EXPECT_NEAR(sum, 1.0, 1e-15);
    }
}

TEST(BoxStencil, RejectsEvenOrEmpty) {
    EXPECT_THROW(k::box_stencil(4, 2), std::invalid_argument);
    EXPECT_THROW(k::box_stencil(0, 3), std::invalid_argument);
}

}  // namespace
}  // namespace iafb

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hir/engine.hpp"
#include "hir/error.hpp"

using namespace hir;

namespace {

FeatureMap random_map(std::size_t rows, std::size_t cols, unsigned seed, bool complex) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    FeatureMap m;
    m.data = Grid<cplx>(rows, cols);
    for (auto& z : m.data.values()) z = cplx(g(rng), complex ? g(rng) : 0.0);
    return m;
}

// out(i, j) = sum over kernel offsets of M(i - a, j - b) * H(h + b, h + a), zero outside.
Grid<cplx> naive_conv(const Grid<cplx>& m, const Grid<cplx>& h) {
    const long rows = static_cast<long>(m.rows()), cols = static_cast<long>(m.cols());
    const long half = static_cast<long>(h.rows() / 2);
    Grid<cplx> out(m.rows(), m.cols());
    for (long i = 0; i < rows; ++i) {
        for (long j = 0; j < cols; ++j) {
            cplx acc{};
            for (long a = -half; a <= half; ++a) {
                for (long b = -half; b <= half; ++b) {
                    const long si = i - a, sj = j - b;
                    if (si < 0 || sj < 0 || si >= rows || sj >= cols) continue;
                    acc += m(si, sj) * h(half + b, half + a);
                }
            }
            out(i, j) = acc;
        }
    }
    return out;
}

double max_diff(const Grid<cplx>& a, const Grid<cplx>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
    return d;
}

}  // namespace

TEST(Conv, DirectMatchesNaiveLoop) {
    const KernelTable k = build_kernel(RadialFamily::harmonic(2.0), {1, 2}, 3.0);
    for (bool complex : {false, true}) {
        const FeatureMap m = random_map(17, 23, 3, complex);
        EXPECT_LT(max_diff(conv_direct(m, k).data, naive_conv(m.data, k.values)), 1e-14);
    }
}

TEST(Conv, ImpulseResponseIsTransposedKernel) {
    const KernelTable k = build_kernel(RadialFamily::cosine(), {2, 1}, 2.5);
    FeatureMap m;
    m.data = Grid<cplx>(15, 15);
    m.data(7, 7) = 1.0;
    for (const auto& out : {conv_direct(m, k), conv_fft(m, k)}) {
        for (std::size_t i = 0; i < 7; ++i) {
            for (std::size_t j = 0; j < 7; ++j) {
                EXPECT_NEAR(std::abs(out.data(4 + i, 4 + j) - k.values(j, i)), 0.0, 1e-15);
            }
        }
        EXPECT_NEAR(std::abs(out.data(0, 0)), 0.0, 1e-15);
    }
}

TEST(Conv, FftMatchesDirect) {
    for (unsigned seed = 0; seed < 6; ++seed) {
        const KernelTable k = build_kernel(RadialFamily::jacobi(1.0, 2.0, 2.0), {static_cast<int>(seed % 3), 1}, 2.0 + seed);
        const FeatureMap m = random_map(20 + seed, 31 - seed, seed, seed % 2);
        const auto a = conv_direct(m, k), b = conv_fft(m, k);
        EXPECT_LT(max_diff(a.data, b.data), 1e-12) << seed;
    }
}

TEST(Conv, RejectsKernelLargerThanImage) {
    const KernelTable k = build_kernel(RadialFamily::cosine(), {0, 0}, 5.0);
    const FeatureMap m = random_map(10, 30, 1, false);
    EXPECT_THROW(conv_direct(m, k), DomainError);
    EXPECT_THROW(conv_fft(m, k), DomainError);
}

TEST(Fft, SizesAreThirteenSmooth) {
    EXPECT_EQ(fft_size(1), 1u);
    EXPECT_EQ(fft_size(17), 18u);
    EXPECT_EQ(fft_size(13), 13u);
    EXPECT_EQ(fft_size(289), 294u);
    EXPECT_EQ(fft_size(256), 256u);
}

TEST(Fft, MatchesDftDefinition) {
    const FeatureMap m = random_map(5, 6, 9, true);
    const Grid<cplx> f = fft2(m.data);
    for (std::size_t n = 0; n < 5; ++n) {
        for (std::size_t q = 0; q < 6; ++q) {
            cplx acc{};
            for (std::size_t i = 0; i < 5; ++i) {
                for (std::size_t j = 0; j < 6; ++j) {
                    acc += m.data(i, j) *
                           std::polar(1.0, -2.0 * std::numbers::pi * (double(n * i) / 5.0 + double(q * j) / 6.0));
                }
            }
            EXPECT_NEAR(std::abs(f(n, q) - acc), 0.0, 1e-12);
        }
    }
}

TEST(FftConvolver, SharedSpectrumServesSeveralKernels) {
    const FeatureMap m = random_map(40, 33, 4, false);
    FftConvolver conv(40, 33, 9, 9);
    const auto spectrum = conv.transform(m.data);
    for (int order = 0; order < 3; ++order) {
        auto k = std::make_shared<const KernelTable>(build_kernel(RadialFamily::cosine(), {order, 1}, 4.0));
        const Grid<cplx> once = conv.apply(*spectrum, k);
        const Grid<cplx> again = conv.apply(*spectrum, k);
        EXPECT_EQ(once, again);
        EXPECT_LT(max_diff(once, conv_direct(m, *k).data), 1e-12);
    }
    EXPECT_THROW(conv.transform(Grid<cplx>(10, 10)), DomainError);
}

TEST(Unit, MagnitudeAndPathTag) {
    EngineConfig cfg;
    const FeatureMap m = random_map(30, 30, 5, false);
    const UnitParams u{1, 1, 4.0};
    const FeatureMap out = unit_apply(m, u, cfg);
    EXPECT_EQ(out.domain_kind, DomainKind::RealNonNegative);
    ASSERT_EQ(out.path_tag.size(), 1u);
    EXPECT_EQ(out.path_tag[0], u);
    const FeatureMap ref = magnitude(conv_direct(m, *cfg.kernel(u)));
    EXPECT_LT(max_diff(out.data, ref.data), 1e-12);
    for (const auto& z : out.data.values()) {
        EXPECT_GE(z.real(), 0.0);
        EXPECT_EQ(z.imag(), 0.0);
    }

    cfg.path = ConvPath::Direct;
    cfg.max_normalize = true;
    const FeatureMap norm = unit_apply(m, u, cfg);
    double peak = 0.0;
    for (const auto& z : norm.data.values()) peak = std::max(peak, z.real());
    EXPECT_DOUBLE_EQ(peak, 1.0);
}

TEST(Unit, ConvPathNames) {
    EXPECT_EQ(conv_path_from_string(to_string(ConvPath::Direct)), ConvPath::Direct);
    EXPECT_EQ(conv_path_from_string("fft"), ConvPath::Fft);
    EXPECT_THROW(conv_path_from_string("winograd"), ConfigError);
}

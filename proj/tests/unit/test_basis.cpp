#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hir/basis.hpp"
#include "hir/error.hpp"

using namespace hir;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Radial, CosineValues) {
    const auto f = RadialFamily::cosine();
    EXPECT_NEAR(radial_value(f, 0, 0.3).real(), 0.5641895835477563, 1e-15);
    EXPECT_NEAR(radial_value(f, 0, 0.9).real(), 0.5641895835477563, 1e-15);
    // sqrt(2/pi) cos(pi r^2)
    EXPECT_NEAR(radial_value(f, 1, 0.0).real(), 0.7978845608028654, 1e-15);
    EXPECT_NEAR(radial_value(f, 1, std::sqrt(0.5)).real(), 0.0, 1e-15);
    EXPECT_NEAR(radial_value(f, 2, 1.0).real(), 0.7978845608028654, 1e-14);
    EXPECT_EQ(radial_value(f, 3, 0.4).imag(), 0.0);
}

TEST(Radial, HarmonicIsUnitPhaseTimesWeight) {
    const auto f = RadialFamily::harmonic(2.0);
    for (double r : {0.0, 0.2, 0.7, 1.0}) {
        const cplx v = radial_value(f, 3, r);
        EXPECT_NEAR(std::abs(v), 1.0 / std::sqrt(kPi), 1e-14);
        EXPECT_NEAR(std::arg(v), std::remainder(6.0 * kPi * r * r, 2.0 * kPi), 1e-12);
    }
    const auto h1 = RadialFamily::harmonic(1.0);
    EXPECT_NEAR(std::abs(radial_value(h1, 2, 0.25)), std::sqrt(1.0 / (0.25 * 2.0 * kPi)), 1e-14);
}

TEST(Radial, DomainChecks) {
    const auto f = RadialFamily::cosine();
    EXPECT_THROW(radial_value(f, 0, -0.01), DomainError);
    EXPECT_THROW(radial_value(f, 0, 1.01), DomainError);
    EXPECT_THROW(radial_value(f, -1, 0.5), DomainError);
    EXPECT_THROW(radial_value(RadialFamily::harmonic(1.0), 1, 0.0), DomainError);
    EXPECT_NO_THROW(radial_value(RadialFamily::harmonic(2.0), 1, 0.0));
    EXPECT_THROW(RadialFamily::harmonic(0.0), ConfigError);
    EXPECT_THROW(RadialFamily::jacobi(1.0, 1.0, 0.0), ConfigError);
    EXPECT_THROW(RadialFamily::jacobi(1.0, 0.0, 1.5), ConfigError);
    EXPECT_THROW(BasisOrder(-1, 0), DomainError);
    EXPECT_THROW(LocalFrame(0, 0, 0.0), DomainError);
    EXPECT_THROW(radial_kind_from_string("zernike"), ConfigError);
    EXPECT_EQ(radial_kind_from_string(to_string(RadialKind::Jacobi)), RadialKind::Jacobi);
}

TEST(Angular, UnitCircle) {
    EXPECT_NEAR(angular_value(2, kPi / 2).real(), -1.0, 1e-15);
    EXPECT_NEAR(angular_value(2, kPi / 2).imag(), 0.0, 1e-15);
    EXPECT_NEAR(angular_value(-1, kPi / 2).imag(), -1.0, 1e-15);
    EXPECT_EQ(angular_value(0, 1.234), cplx(1.0, 0.0));
}

TEST(BasisValue, ZeroOutsideDiskAndSeparable) {
    const auto f = RadialFamily::cosine();
    const LocalFrame frame(2.0, -1.0, 3.0);
    EXPECT_EQ(basis_value(f, {1, 1}, frame, 2.0 + 3.01, -1.0), cplx(0.0, 0.0));
    EXPECT_EQ(basis_value(f, {0, 0}, frame, 4.2, 1.2), cplx(0.0, 0.0));
    const double x = 3.0, y = 0.5;
    const double r = std::hypot(x - 2.0, y + 1.0) / 3.0, th = std::atan2(y + 1.0, x - 2.0);
    const cplx expect = radial_value(f, 2, r) * std::polar(1.0, 3 * th);
    const cplx got = basis_value(f, {2, 3}, frame, x, y);
    EXPECT_NEAR(std::abs(got - expect), 0.0, 1e-14);
}

// The Gram matrix below is checked against an independent Simpson integration.
TEST(Gram, CosineMatchesSimpsonAndIdentity) {
    const auto f = RadialFamily::cosine();
    const Grid<cplx> g = orthogonality_gram(f, 4, CompositeRule{});
    const int steps = 20000;
    for (int a = 0; a <= 4; ++a) {
        for (int b = 0; b <= 4; ++b) {
            double s = 0.0;
            for (int k = 0; k <= steps; ++k) {
                const double r = static_cast<double>(k) / steps;
                const double c = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
                s += c * radial_value(f, a, r).real() * radial_value(f, b, r).real() * r;
            }
            s /= 3.0 * steps;
            EXPECT_NEAR(g(a, b).real(), s, 1e-9);
            EXPECT_NEAR(g(a, b).real(), a == b ? 1.0 / (2.0 * kPi) : 0.0, 1e-10);
        }
    }
}

TEST(Gram, RefinementHelps) {
    const auto f = RadialFamily::jacobi(2.0, 3.0, 1.0);
    auto offdiag = [&](CompositeRule rule) {
        const Grid<cplx> g = orthogonality_gram(f, 8, rule);
        double worst = 0.0;
        for (std::size_t a = 0; a < g.rows(); ++a) {
            for (std::size_t b = 0; b < g.cols(); ++b) {
                worst = std::max(worst, std::abs(g(a, b) - cplx(a == b ? 0.5 / kPi : 0.0)));
            }
        }
        return worst;
    };
    const double coarse = offdiag({4, 1}), fine = offdiag(CompositeRule{});
    EXPECT_LT(fine, coarse);
    EXPECT_LT(fine, 1e-6);
}

TEST(Gram, HarmonicSingularWeightConverges) {
    const Grid<cplx> g = orthogonality_gram(RadialFamily::harmonic(1.0), 6, CompositeRule{});
    for (std::size_t a = 0; a < g.rows(); ++a) {
        EXPECT_NEAR(g(a, a).real(), 0.5 / kPi, 1e-8);
        for (std::size_t b = 0; b < a; ++b) EXPECT_LT(std::abs(g(a, b)), 1e-8);
    }
}

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "hir/error.hpp"
#include "hir/quadrature.hpp"

using namespace hir;

TEST(GaussLegendre, ThreePointRuleMatchesClosedForm) {
    const GaussLegendre g = gauss_legendre(3);
    ASSERT_EQ(g.nodes.size(), 3u);
    const double x = std::sqrt(3.0 / 5.0);
    EXPECT_NEAR(g.nodes[0], -x, 1e-14);
    EXPECT_NEAR(g.nodes[1], 0.0, 1e-14);
    EXPECT_NEAR(g.nodes[2], x, 1e-14);
    EXPECT_NEAR(g.weights[0], 5.0 / 9.0, 1e-14);
    EXPECT_NEAR(g.weights[1], 8.0 / 9.0, 1e-14);
}

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
    for (int n = 1; n <= 10; ++n) {
        const GaussLegendre g = gauss_legendre(n);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += g.weights[k] * std::pow(g.nodes[k], d);
            const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
            EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " d=" << d;
        }
    }
}

TEST(CompositeNodes, IntegratesOnUnitInterval) {
    const Nodes1D q = composite_nodes(CompositeRule{4, 3});
    ASSERT_EQ(q.x.size(), 12u);
    EXPECT_NEAR(std::accumulate(q.w.begin(), q.w.end(), 0.0), 1.0, 1e-14);
    double s = 0.0;
    for (std::size_t k = 0; k < q.x.size(); ++k) s += q.w[k] * std::exp(q.x[k]);
    EXPECT_NEAR(s, std::exp(1.0) - 1.0, 1e-9);
    for (double x : q.x) {
        EXPECT_GT(x, 0.0);
        EXPECT_LT(x, 1.0);
    }
}

TEST(QuadratureRule, WeightsSumToOneInsideThePixel) {
    for (const auto& rule : {QuadratureRule::midpoint(), QuadratureRule::tensor_gauss(2),
                             QuadratureRule::tensor_gauss(5)}) {
        double s = 0.0;
        for (const auto& n : rule.nodes) {
            s += n.weight;
            EXPECT_LE(std::abs(n.x), 0.5);
            EXPECT_LE(std::abs(n.y), 0.5);
        }
        EXPECT_NEAR(s, 1.0, 1e-14) << rule.label;
    }
    EXPECT_EQ(QuadratureRule::midpoint().size(), 1u);
    EXPECT_EQ(default_rule().size(), 4u);
    EXPECT_EQ(default_rule().label, "gauss2x2");
}

TEST(QuadratureRule, ParsesLabels) {
    EXPECT_EQ(QuadratureRule::from_label("midpoint").size(), 1u);
    EXPECT_EQ(QuadratureRule::from_label("gauss3x3").size(), 9u);
    EXPECT_EQ(QuadratureRule::from_label("gauss8x8").label, "gauss8x8");
    EXPECT_THROW(QuadratureRule::from_label("gauss2x3"), ConfigError);
    EXPECT_THROW(QuadratureRule::from_label("simpson"), ConfigError);
}

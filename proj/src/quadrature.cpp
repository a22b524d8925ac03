#include "hir/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <regex>
#include <utility>

#include "hir/error.hpp"

namespace hir {

namespace {

// Returns (P_n(x), P_n'(x)) via the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw ConfigError("Gauss-Legendre rule needs at least one node");
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

Nodes1D composite_nodes(const CompositeRule& rule) {
    if (rule.panels < 1 || rule.points < 1) {
        throw ConfigError("composite rule needs at least one panel and one point");
    }
    const auto base = gauss_legendre(rule.points);
    const double h = 1.0 / rule.panels;
    Nodes1D out;
    out.x.reserve(rule.node_count());
    out.w.reserve(rule.node_count());
    for (int panel = 0; panel < rule.panels; ++panel) {
        const double a = panel * h;
        for (int k = 0; k < rule.points; ++k) {
            out.x.push_back(a + 0.5 * h * (base.nodes[k] + 1.0));
            out.w.push_back(0.5 * h * base.weights[k]);
        }
    }
    return out;
}

QuadratureRule QuadratureRule::midpoint() {
    return QuadratureRule{{{0.0, 0.0, 1.0}}, "midpoint"};
}

QuadratureRule QuadratureRule::tensor_gauss(int points_per_axis) {
    const auto g = gauss_legendre(points_per_axis);
    QuadratureRule rule;
    rule.label = "gauss" + std::to_string(points_per_axis) + "x" + std::to_string(points_per_axis);
    for (int a = 0; a < points_per_axis; ++a) {
        for (int b = 0; b < points_per_axis; ++b) {
            // [-1,1] -> [-1/2,1/2]; weights 2*2 -> 1
            rule.nodes.push_back({0.5 * g.nodes[a], 0.5 * g.nodes[b], 0.25 * g.weights[a] * g.weights[b]});
        }
    }
    return rule;
}

QuadratureRule QuadratureRule::from_label(const std::string& label) {
    if (label == "midpoint") return midpoint();
    static const std::regex pattern(R"(gauss(\d+)x(\d+))");
    std::smatch match;
    if (std::regex_match(label, match, pattern) && match[1] == match[2]) {
        const int k = std::stoi(match[1]);
        if (k >= 1 && k <= 32) return tensor_gauss(k);
    }
    throw ConfigError("unknown quadrature rule '" + label + "' (expected midpoint or gaussKxK)");
}

QuadratureRule default_rule() { return QuadratureRule::tensor_gauss(2); }

}  // namespace hir

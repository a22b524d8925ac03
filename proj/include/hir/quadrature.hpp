#pragma once

#include <string>
#include <vector>

namespace hir {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Computes the n-point Gauss-Legendre rule (n >= 1) by Newton iteration on P_n.
GaussLegendre gauss_legendre(int n);

/// Composite Gauss-Legendre rule on [0, 1]: `panels` equal sub-intervals with
/// `points` nodes each.
struct CompositeRule {
    int panels = 16;
    int points = 8;

    int node_count() const noexcept { return panels * points; }
};

struct Nodes1D {
    std::vector<double> x;
    std::vector<double> w;
};

Nodes1D composite_nodes(const CompositeRule& rule);

/// Per-pixel 2-D quadrature rule. Node offsets are relative to a unit pixel
/// centred at the origin, i.e. inside [-1/2, 1/2]^2, and weights sum to one.
struct QuadratureRule {
    struct Node {
        double x;
        double y;
        double weight;
    };

    std::vector<Node> nodes;
    std::string label;

    /// Single node at the pixel centre (zero-order sampling).
    static QuadratureRule midpoint();
    /// Tensor product of two k-point Gauss-Legendre rules (k*k nodes).
    static QuadratureRule tensor_gauss(int points_per_axis);
    /// Parses "midpoint" or "gaussKxK" (tensor_gauss(K)).
    static QuadratureRule from_label(const std::string& label);

    std::size_t size() const noexcept { return nodes.size(); }
};

/// Default per-pixel rule: 2x2 tensor Gauss (four nodes).
QuadratureRule default_rule();

}  // namespace hir

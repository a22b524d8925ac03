#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hir/basis.hpp"
#include "hir/engine.hpp"

namespace hir {

inline constexpr int kMaxDepth = 8;

/// Ordered cascade of unit parameters along one root-to-node path.
struct PathSpec {
    std::vector<UnitParams> lambdas;

    /// L >= 1 and the l1 norm of (n, m) never decreases along the path.
    bool valid() const;
};

struct NetworkNode {
    int id = 0;
    int level = 1;
    bool skip = false;
    BasisOrder order;         // unused for skip nodes
    std::vector<int> parents;  // empty at level 1 (fed by the input image)
};

/// Tree-like network: level l holds a unit for every (n, m) with n + m = l and
/// one identity skip node. Node ids are stable across depths: level l starts
/// at (l - 1)(l + 4) / 2, units ordered by ascending n, skip node last.
///
/// A node's input is the elementwise mean of its parents' activations. With
/// fan_out_cap = 0 every node of level l feeds every node of level l + 1;
/// otherwise each node merges at most fan_out_cap parents (nearest radial
/// order first, skip node last; skip nodes prefer the previous skip node).
class NetworkSpec {
public:
    NetworkSpec(RadialFamily family, int max_level, std::vector<double> scales, int fan_out_cap = 0,
                std::set<int> pruned_node_ids = {});

    const RadialFamily& family() const noexcept { return family_; }
    int max_level() const noexcept { return max_level_; }
    const std::vector<double>& scales() const noexcept { return scales_; }
    int fan_out_cap() const noexcept { return fan_out_cap_; }
    const std::set<int>& pruned_node_ids() const noexcept { return pruned_; }
    bool multiscale() const noexcept { return scales_.size() > 1; }

    const std::vector<NetworkNode>& nodes() const noexcept { return nodes_; }
    const NetworkNode& node(int id) const;
    int unit_count() const;
    /// Nodes whose features are emitted, in id order.
    std::vector<int> emitted_nodes() const;
    /// Emitted nodes plus all of their ancestors, in id order.
    std::vector<int> required_nodes() const;
    /// Every root-to-node path as unit parameters at `scale` (skip nodes add nothing).
    std::vector<PathSpec> paths_to(int node_id, double scale) const;

    static int level_offset(int level) { return (level - 1) * (level + 4) / 2; }
    /// Total node count (units and skips) for depth L: L(L+3)/2 + L.
    static int node_count(int max_level) { return max_level * (max_level + 3) / 2 + max_level; }

    nlohmann::ordered_json to_json() const;
    static NetworkSpec from_json(const nlohmann::json& j);

    friend bool operator==(const NetworkSpec& a, const NetworkSpec& b) {
        return a.family_ == b.family_ && a.max_level_ == b.max_level_ && a.scales_ == b.scales_ &&
               a.fan_out_cap_ == b.fan_out_cap_ && a.pruned_ == b.pruned_;
    }

private:
    RadialFamily family_;
    int max_level_;
    std::vector<double> scales_;
    int fan_out_cap_;
    std::set<int> pruned_;
    std::vector<NetworkNode> nodes_;
};

/// Single-scale tree of depth L (1..8) at scale w.
NetworkSpec build_tree(int max_level, double w, const RadialFamily& family, int fan_out_cap = 0);

/// Bank of identical trees at scales 2^t, t in [t_min, t_max], t_min >= 0.
NetworkSpec build_multiscale(int max_level, int t_min, int t_max, const RadialFamily& family,
                             int fan_out_cap = 0);

using NodeActivationSet = std::map<int, FeatureMap>;

struct ActivationBank {
    std::vector<double> scales;
    std::vector<NodeActivationSet> per_scale;
};

/// Runs every required node at every scale. The network's family overrides
/// `config.family`.
ActivationBank forward(const FeatureMap& image, const NetworkSpec& net, const EngineConfig& config);

enum class ScaleReducer { Max, Mean };

/// Per node, elementwise reduction over the scales of the bank (>= 2 scales).
NodeActivationSet scale_pool(const std::vector<NodeActivationSet>& per_scale,
                             ScaleReducer reducer = ScaleReducer::Max);

}  // namespace hir

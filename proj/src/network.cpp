#include "hir/network.hpp"

#include <algorithm>
#include <cmath>

#include "hir/error.hpp"

namespace hir {

bool PathSpec::valid() const {
    if (lambdas.empty()) return false;
    for (std::size_t z = 0; z + 1 < lambdas.size(); ++z) {
        const int here = std::abs(lambdas[z].n) + std::abs(lambdas[z].m);
        const int next = std::abs(lambdas[z + 1].n) + std::abs(lambdas[z + 1].m);
        if (here > next) return false;
    }
    return std::all_of(lambdas.begin(), lambdas.end(), [](const UnitParams& u) { return u.w > 0.0; });
}

namespace {

std::vector<int> choose_parents(const NetworkNode& child, const std::vector<NetworkNode>& previous, int cap) {
    std::vector<const NetworkNode*> candidates;
    for (const auto& p : previous) candidates.push_back(&p);
    if (cap > 0 && static_cast<std::size_t>(cap) < candidates.size()) {
        auto rank = [&](const NetworkNode* p) {
            if (child.skip) return std::make_pair(p->skip ? -1 : 0, p->order.n);
            if (p->skip) return std::make_pair(1 << 20, 0);
            return std::make_pair(std::abs(p->order.n - child.order.n), p->order.n);
        };
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&](const NetworkNode* a, const NetworkNode* b) { return rank(a) < rank(b); });
        candidates.resize(cap);
    }
    std::vector<int> ids;
    for (const auto* p : candidates) ids.push_back(p->id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace

NetworkSpec::NetworkSpec(RadialFamily family, int max_level, std::vector<double> scales, int fan_out_cap,
                         std::set<int> pruned_node_ids)
    : family_(family),
      max_level_(max_level),
      scales_(std::move(scales)),
      fan_out_cap_(fan_out_cap),
      pruned_(std::move(pruned_node_ids)) {
    if (max_level_ < 1 || max_level_ > kMaxDepth) {
        throw ConfigError("network depth must be in [1, " + std::to_string(kMaxDepth) + "], got " +
                          std::to_string(max_level_));
    }
    if (scales_.empty()) throw ConfigError("network needs at least one scale");
    for (double w : scales_) {
        if (!(w >= 1.0)) throw ConfigError("network scale must be at least 1 pixel");
    }
    if (fan_out_cap_ < 0) throw ConfigError("fan_out_cap must be non-negative");

    std::vector<NetworkNode> previous;
    for (int level = 1; level <= max_level_; ++level) {
        std::vector<NetworkNode> current;
        int id = level_offset(level);
        for (int n = 0; n <= level; ++n) {
            NetworkNode node;
            node.id = id++;
            node.level = level;
            node.order = BasisOrder(n, level - n);
            current.push_back(node);
        }
        NetworkNode skip;
        skip.id = id;
        skip.level = level;
        skip.skip = true;
        current.push_back(skip);
        if (level > 1) {
            for (auto& node : current) node.parents = choose_parents(node, previous, fan_out_cap_);
        }
        nodes_.insert(nodes_.end(), current.begin(), current.end());
        previous = std::move(current);
    }
    for (int id : pruned_) {
        if (id < 0 || id >= static_cast<int>(nodes_.size())) {
            throw ConfigError("pruned node id " + std::to_string(id) + " is not part of the network");
        }
    }
}

const NetworkNode& NetworkSpec::node(int id) const {
    if (id < 0 || id >= static_cast<int>(nodes_.size())) {
        throw DomainError("unknown node id " + std::to_string(id));
    }
    return nodes_[id];
}

int NetworkSpec::unit_count() const {
    return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) { return !n.skip; }));
}

std::vector<int> NetworkSpec::emitted_nodes() const {
    std::vector<int> ids;
    for (const auto& n : nodes_) {
        if (!pruned_.contains(n.id)) ids.push_back(n.id);
    }
    return ids;
}

std::vector<int> NetworkSpec::required_nodes() const {
    std::vector<bool> needed(nodes_.size(), false);
    for (int id : emitted_nodes()) needed[id] = true;
    // parents always have smaller ids
    for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
        if (!needed[id]) continue;
        for (int p : nodes_[id].parents) needed[p] = true;
    }
    std::vector<int> ids;
    for (std::size_t id = 0; id < needed.size(); ++id) {
        if (needed[id]) ids.push_back(static_cast<int>(id));
    }
    return ids;
}

std::vector<PathSpec> NetworkSpec::paths_to(int node_id, double scale) const {
    const auto& target = node(node_id);
    std::vector<PathSpec> prefixes;
    if (target.parents.empty()) {
        prefixes.push_back({});
    } else {
        for (int p : target.parents) {
            auto sub = paths_to(p, scale);
            prefixes.insert(prefixes.end(), sub.begin(), sub.end());
        }
    }
    if (!target.skip) {
        for (auto& path : prefixes) path.lambdas.push_back({target.order.n, target.order.m, scale});
    }
    return prefixes;
}

nlohmann::ordered_json NetworkSpec::to_json() const {
    nlohmann::ordered_json j;
    j["family"] = to_string(family_.kind());
    j["alpha"] = family_.alpha();
    j["p"] = family_.p();
    j["q"] = family_.q();
    j["max_level"] = max_level_;
    j["scales"] = scales_;
    j["fan_out_cap"] = fan_out_cap_;
    j["pruned_node_ids"] = std::vector<int>(pruned_.begin(), pruned_.end());
    return j;
}

NetworkSpec NetworkSpec::from_json(const nlohmann::json& j) {
    try {
        const auto family = RadialFamily::make(radial_kind_from_string(j.at("family").get<std::string>()),
                                               j.value("alpha", 2.0), j.value("p", 0.0), j.value("q", 0.0));
        const auto pruned = j.value("pruned_node_ids", std::vector<int>{});
        return NetworkSpec(family, j.at("max_level").get<int>(), j.at("scales").get<std::vector<double>>(),
                           j.value("fan_out_cap", 0), std::set<int>(pruned.begin(), pruned.end()));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed network spec: ") + e.what());
    }
}

NetworkSpec build_tree(int max_level, double w, const RadialFamily& family, int fan_out_cap) {
    return NetworkSpec(family, max_level, {w}, fan_out_cap);
}

NetworkSpec build_multiscale(int max_level, int t_min, int t_max, const RadialFamily& family, int fan_out_cap) {
    if (t_min > t_max) throw ConfigError("scale range requires t_min <= t_max");
    if (t_min < 0) throw ConfigError("scale range requires 2^t_min >= 1");
    if (t_max > 10) throw ConfigError("scale range t_max is limited to 10");
    std::vector<double> scales;
    for (int t = t_min; t <= t_max; ++t) scales.push_back(std::ldexp(1.0, t));
    return NetworkSpec(family, max_level, std::move(scales), fan_out_cap);
}

namespace {

FeatureMap merge_parents(const std::vector<int>& parents, const NodeActivationSet& done) {
    FeatureMap merged = done.at(parents.front());
    if (parents.size() == 1) return merged;
    for (std::size_t k = 1; k < parents.size(); ++k) {
        const auto& other = done.at(parents[k]).data.values();
        auto values = merged.data.values();
        for (std::size_t t = 0; t < values.size(); ++t) values[t] += other[t];
    }
    const double inv = 1.0 / static_cast<double>(parents.size());
    for (auto& z : merged.data.values()) z *= inv;
    merged.path_tag.clear();
    return merged;
}

NodeActivationSet forward_scale(const FeatureMap& image, const NetworkSpec& net, double scale,
                                const EngineConfig& config) {
    NodeActivationSet done;
    const auto required = net.required_nodes();
    // group nodes by parent list so each distinct input is transformed once
    std::map<std::vector<int>, std::vector<int>> groups;
    for (int id : required) groups[net.node(id).parents].push_back(id);

    std::unique_ptr<FftConvolver> convolver;

    for (int level = 1; level <= net.max_level(); ++level) {
        for (const auto& [parents, members] : groups) {
            if (net.node(members.front()).level != level) continue;
            const FeatureMap input = parents.empty() ? image : merge_parents(parents, done);
            std::shared_ptr<const FftConvolver::Spectrum> spectrum;
            for (int id : members) {
                const auto& node = net.node(id);
                if (node.skip) {
                    done.emplace(id, input);
                    continue;
                }
                const UnitParams unit{node.order.n, node.order.m, scale};
                if (config.path == ConvPath::Fft) {
                    if (!convolver) {
                        const auto kernel = config.kernel(unit);
                        convolver = std::make_unique<FftConvolver>(image.rows(), image.cols(),
                                                                   kernel->values.rows(), kernel->values.cols());
                    }
                    if (!spectrum) spectrum = convolver->transform(input.data);
                    done.emplace(id, unit_apply(input, *spectrum, *convolver, unit, config));
                } else {
                    done.emplace(id, unit_apply(input, unit, config));
                }
            }
        }
    }
    // drop ancestors that are only needed for computation
    const auto emitted = net.emitted_nodes();
    for (auto it = done.begin(); it != done.end();) {
        it = std::binary_search(emitted.begin(), emitted.end(), it->first) ? std::next(it) : done.erase(it);
    }
    return done;
}

}  // namespace

ActivationBank forward(const FeatureMap& image, const NetworkSpec& net, const EngineConfig& config) {
    for (double w : net.scales()) {
        const auto side = 2 * static_cast<std::size_t>(std::ceil(w)) + 1;
        if (image.rows() < side || image.cols() < side) {
            throw DomainError("image " + std::to_string(image.rows()) + "x" + std::to_string(image.cols()) +
                              " is smaller than the kernel for scale w=" + std::to_string(w) + " (side " +
                              std::to_string(side) + ")");
        }
    }
    EngineConfig cfg = config;
    cfg.family = net.family();
    ActivationBank bank;
    bank.scales = net.scales();
    for (double w : net.scales()) bank.per_scale.push_back(forward_scale(image, net, w, cfg));
    return bank;
}

NodeActivationSet scale_pool(const std::vector<NodeActivationSet>& per_scale, ScaleReducer reducer) {
    if (per_scale.size() < 2) throw DomainError("scale pooling needs at least two scales");
    const auto& first = per_scale.front();
    for (const auto& set : per_scale) {
        if (set.size() != first.size()) throw DomainError("scale pooling over mismatched topologies");
        for (const auto& [id, map] : set) {
            auto it = first.find(id);
            if (it == first.end() || !it->second.data.same_shape(map.data)) {
                throw DomainError("scale pooling over mismatched topologies");
            }
        }
    }
    NodeActivationSet pooled;
    for (const auto& [id, map] : first) {
        FeatureMap out = map;
        auto values = out.data.values();
        for (std::size_t s = 1; s < per_scale.size(); ++s) {
            const auto other = per_scale[s].at(id).data.values();
            for (std::size_t t = 0; t < values.size(); ++t) {
                if (reducer == ScaleReducer::Max) {
                    if (other[t].real() > values[t].real()) values[t] = other[t];
                } else {
                    values[t] += other[t];
                }
            }
        }
        if (reducer == ScaleReducer::Mean) {
            const double inv = 1.0 / static_cast<double>(per_scale.size());
            for (auto& z : values) z *= inv;
        }
        out.path_tag.clear();
        pooled.emplace(id, std::move(out));
    }
    return pooled;
}

}  // namespace hir

#include "hir/adapt.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "hir/error.hpp"

namespace hir {

std::vector<std::size_t> SelectionResult::selected_columns() const {
    std::vector<std::size_t> out(ranked_indices.begin(),
                                 ranked_indices.begin() + static_cast<std::ptrdiff_t>(selected_k));
    std::sort(out.begin(), out.end());
    return out;
}

nlohmann::ordered_json SelectionResult::to_json() const {
    nlohmann::ordered_json j;
    j["ranked_indices"] = ranked_indices;
    j["scores"] = scores;
    j["selected_k"] = selected_k;
    j["surviving_node_ids"] = surviving_node_ids;
    return j;
}

double fisher_score(const std::vector<double>& column, const std::vector<int>& labels) {
    const double n = static_cast<double>(column.size());
    const double mean = std::accumulate(column.begin(), column.end(), 0.0) / n;

    std::map<int, std::pair<double, std::size_t>> sums;
    for (std::size_t i = 0; i < column.size(); ++i) {
        auto& [s, c] = sums[labels[i]];
        s += column[i];
        ++c;
    }
    std::map<int, double> class_mean;
    double between = 0.0;
    for (const auto& [label, sc] : sums) {
        const double mu = sc.first / static_cast<double>(sc.second);
        class_mean[label] = mu;
        between += static_cast<double>(sc.second) * (mu - mean) * (mu - mean);
    }
    double within = 0.0;
    for (std::size_t i = 0; i < column.size(); ++i) {
        const double d = column[i] - class_mean[labels[i]];
        within += d * d;
    }
    between /= n;
    within /= n;
    if (between == 0.0) return 0.0;
    return between / (within + kFisherEpsilon);
}

SelectionResult rank_features(const FeatureMatrix& data) {
    data.check();
    std::map<int, std::size_t> counts;
    for (int label : data.labels) ++counts[label];
    if (counts.size() < 2) throw ConfigError("rank_features needs at least two classes");
    for (const auto& [label, count] : counts) {
        if (count < 2) throw ConfigError("rank_features needs two samples of class " + std::to_string(label));
    }

    SelectionResult out;
    out.scores.resize(data.features());
    std::vector<double> column(data.samples());
    for (std::size_t c = 0; c < data.features(); ++c) {
        for (std::size_t r = 0; r < data.samples(); ++r) column[r] = data.values(r, c);
        out.scores[c] = fisher_score(column, data.labels);
    }
    out.ranked_indices.resize(data.features());
    std::iota(out.ranked_indices.begin(), out.ranked_indices.end(), std::size_t{0});
    std::stable_sort(out.ranked_indices.begin(), out.ranked_indices.end(),
                     [&](std::size_t a, std::size_t b) { return out.scores[a] > out.scores[b]; });
    for (const auto& col : data.columns) out.column_nodes.push_back(col.node_id);
    return out;
}

SelectionResult select_top_k(const SelectionResult& ranking, std::size_t k) {
    if (k < 1 || k > ranking.ranked_indices.size()) {
        throw ConfigError("select k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(ranking.ranked_indices.size()) + "]");
    }
    SelectionResult out = ranking;
    out.selected_k = k;
    out.surviving_node_ids.clear();
    if (!out.column_nodes.empty()) {
        for (std::size_t r = 0; r < k; ++r) out.surviving_node_ids.insert(out.column_nodes[ranking.ranked_indices[r]]);
    }
    return out;
}

NetworkSpec prune_network(const NetworkSpec& net, const SelectionResult& selection) {
    const auto emitted = net.emitted_nodes();
    if (selection.selected_k == 0) throw ConfigError("prune_network needs a selection (select_top_k)");
    if (selection.column_nodes.empty() || selection.column_nodes.size() % emitted.size() != 0) {
        throw ConfigError("selection does not match the network's feature layout");
    }
    const std::size_t bands = selection.column_nodes.size() / emitted.size();
    for (std::size_t c = 0; c < selection.column_nodes.size(); ++c) {
        if (selection.column_nodes[c] != emitted[c / bands]) {
            throw ConfigError("selection column " + std::to_string(c) + " belongs to node " +
                              std::to_string(selection.column_nodes[c]) + ", network emits node " +
                              std::to_string(emitted[c / bands]));
        }
    }

    const auto& keep = selection.surviving_node_ids;
    if (keep.size() == emitted.size()) return net;

    int depth = 1;
    for (int id : keep) depth = std::max(depth, net.node(id).level);
    std::set<int> pruned;
    for (const auto& node : net.nodes()) {
        if (node.level <= depth && !keep.count(node.id)) pruned.insert(node.id);
    }
    return NetworkSpec(net.family(), depth, net.scales(), net.fan_out_cap(), std::move(pruned));
}

std::vector<std::size_t> surviving_columns(const NetworkSpec& full, const NetworkSpec& pruned, int num_bands) {
    const auto all = full.emitted_nodes();
    const auto kept = pruned.emitted_nodes();
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!std::binary_search(kept.begin(), kept.end(), all[i])) continue;
        for (int b = 0; b < num_bands; ++b) out.push_back(i * static_cast<std::size_t>(num_bands) + b);
    }
    if (out.size() != kept.size() * static_cast<std::size_t>(num_bands)) {
        throw ConfigError("pruned network emits nodes missing from the full network");
    }
    return out;
}

}  // namespace hir

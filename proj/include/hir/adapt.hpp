#pragma once

#include <set>
#include <vector>

#include <json.hpp>

#include "hir/features.hpp"
#include "hir/network.hpp"

namespace hir {

inline constexpr double kFisherEpsilon = 1e-12;

struct SelectionResult {
    std::vector<std::size_t> ranked_indices;  // columns by descending score
    std::vector<double> scores;               // per column, in column order
    std::size_t selected_k = 0;               // 0 until select_top_k
    std::set<int> surviving_node_ids;
    std::vector<int> column_nodes;            // node id of every column

    /// The first selected_k ranked columns, ascending.
    std::vector<std::size_t> selected_columns() const;

    nlohmann::ordered_json to_json() const;
};

/// Fisher ratio of one column: between-class variance over within-class
/// variance plus kFisherEpsilon. Zero for a constant column.
double fisher_score(const std::vector<double>& column, const std::vector<int>& labels);

/// Scores every column and ranks them, ties by lower column index. Needs two
/// classes with at least two samples each.
SelectionResult rank_features(const FeatureMatrix& data);

/// Keeps the first k ranked columns, 1 <= k <= number of columns.
SelectionResult select_top_k(const SelectionResult& ranking, std::size_t k);

/// Drops emitted nodes that carry no selected feature and levels above the
/// deepest survivor. Ancestors of survivors are still computed.
NetworkSpec prune_network(const NetworkSpec& net, const SelectionResult& selection);

/// Columns of a full extraction with `full` that the pruned network emits.
std::vector<std::size_t> surviving_columns(const NetworkSpec& full, const NetworkSpec& pruned, int num_bands);

}  // namespace hir

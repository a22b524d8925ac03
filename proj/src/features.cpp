#include "hir/features.hpp"

#include <algorithm>
#include <cmath>

#include "hir/error.hpp"

namespace hir {

std::vector<int> FeatureMatrix::classes() const {
    std::vector<int> out(labels);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void FeatureMatrix::check() const {
    if (labels.size() != values.rows()) throw ConfigError("feature matrix: label count differs from row count");
    if (!ids.empty() && ids.size() != values.rows()) throw ConfigError("feature matrix: id count differs from row count");
    if (!columns.empty() && columns.size() != values.cols()) {
        throw ConfigError("feature matrix: column metadata differs from column count");
    }
    for (double v : values.values()) {
        if (!std::isfinite(v)) throw ConfigError("feature matrix: non-finite entry");
    }
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& rows) const {
    FeatureMatrix out;
    out.values = Grid<double>(rows.size(), values.cols());
    out.columns = columns;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= values.rows()) throw ConfigError("feature matrix: row index out of range");
        std::copy_n(&values(rows[r], 0), values.cols(), &out.values(r, 0));
        out.labels.push_back(labels[rows[r]]);
        if (!ids.empty()) out.ids.push_back(ids[rows[r]]);
    }
    return out;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::size_t>& cols) const {
    FeatureMatrix out;
    out.values = Grid<double>(values.rows(), cols.size());
    out.labels = labels;
    out.ids = ids;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c] >= values.cols()) throw ConfigError("feature matrix: column index out of range");
        for (std::size_t r = 0; r < values.rows(); ++r) out.values(r, c) = values(r, cols[c]);
        if (!columns.empty()) out.columns.push_back(columns[cols[c]]);
    }
    return out;
}

FeatureMatrix FeatureMatrix::from_vectors(const std::vector<InvariantVector>& rows, std::vector<int> labels,
                                          std::vector<std::string> ids) {
    FeatureMatrix out;
    const std::size_t width = rows.empty() ? 0 : rows.front().size();
    out.values = Grid<double>(rows.size(), width);
    if (!rows.empty()) out.columns = rows.front().meta;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width) throw ConfigError("feature matrix: rows of different length");
        std::copy(rows[r].values.begin(), rows[r].values.end(), &out.values(r, 0));
    }
    out.labels = std::move(labels);
    out.ids = std::move(ids);
    out.check();
    return out;
}

}  // namespace hir

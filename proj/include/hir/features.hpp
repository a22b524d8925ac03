#pragma once

#include <string>
#include <vector>

#include "hir/grid.hpp"
#include "hir/invariant.hpp"

namespace hir {

/// Images as rows, invariant features as columns. Column order follows
/// InvariantVector order.
struct FeatureMatrix {
    Grid<double> values;
    std::vector<int> labels;
    std::vector<std::string> ids;
    std::vector<InvariantVector::Entry> columns;

    std::size_t samples() const noexcept { return values.rows(); }
    std::size_t features() const noexcept { return values.cols(); }

    /// Distinct labels in ascending order.
    std::vector<int> classes() const;
    /// Throws ConfigError on shape mismatches or non-finite entries.
    void check() const;

    FeatureMatrix select_rows(const std::vector<std::size_t>& rows) const;
    FeatureMatrix select_columns(const std::vector<std::size_t>& cols) const;

    /// Stacks invariant vectors that share one layout.
    static FeatureMatrix from_vectors(const std::vector<InvariantVector>& rows, std::vector<int> labels,
                                      std::vector<std::string> ids = {});
};

}  // namespace hir

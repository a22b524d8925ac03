#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "hir/basis.hpp"
#include "hir/grid.hpp"
#include "hir/quadrature.hpp"

namespace hir {

/// Physical pixel size. Pixel (i, j) covers
/// [i*di - di/2, i*di + di/2] x [j*dj - dj/2, j*dj + dj/2].
struct PixelGrid {
    double delta_i = 1.0;
    double delta_j = 1.0;

    PixelGrid() = default;
    PixelGrid(double di, double dj);

    friend bool operator==(const PixelGrid&, const PixelGrid&) = default;
    friend auto operator<=>(const PixelGrid&, const PixelGrid&) = default;
};

/// Sampled kernel H_nm^w. The disk is centred on the middle sample; with unit
/// pixels the side length is 2*ceil(w) + 1.
struct KernelTable {
    Grid<cplx> values;
    RadialFamily family = RadialFamily::cosine();
    BasisOrder order;
    double scale = 1.0;
    PixelGrid grid;
    std::string rule_label;

    std::size_t half_rows() const noexcept { return values.rows() / 2; }
    std::size_t half_cols() const noexcept { return values.cols() / 2; }
};

/// Integral of conj(V_nm^{uvw}) over pixel (i, j), normalised by w^2, using `rule`.
/// Exactly zero when the pixel rectangle misses the disk.
cplx kernel_entry(const RadialFamily& family, BasisOrder order, const LocalFrame& frame, int i, int j,
                  const PixelGrid& grid, const QuadratureRule& rule);

/// Builds the full kernel table. Throws DomainError for w < 1.
KernelTable build_kernel(const RadialFamily& family, BasisOrder order, double w,
                         const PixelGrid& grid = {}, const QuadratureRule& rule = default_rule());

struct KernelKey {
    RadialFamily family = RadialFamily::cosine();
    BasisOrder order;
    double scale = 1.0;
    PixelGrid grid;
    std::string rule_label;

    friend bool operator==(const KernelKey&, const KernelKey&) = default;
    friend auto operator<=>(const KernelKey&, const KernelKey&) = default;
};

/// Memoised build_kernel. Readers share a lock; insertion is exclusive.
/// Rules are identified by their label.
class KernelCache {
public:
    std::shared_ptr<const KernelTable> get(const RadialFamily& family, BasisOrder order, double w,
                                           const PixelGrid& grid, const QuadratureRule& rule);

    void clear();
    std::size_t size() const;
    /// Cached tables in key order.
    std::vector<std::shared_ptr<const KernelTable>> snapshot() const;

    /// Fault injection for verification tooling: adds `delta` to entry (i, j) of
    /// the cached table for `key`, building it first if needed.
    void corrupt_entry(const KernelKey& key, const QuadratureRule& rule, std::size_t i, std::size_t j,
                       cplx delta);

private:
    mutable std::shared_mutex mutex_;
    std::map<KernelKey, std::shared_ptr<const KernelTable>> tables_;
};

/// Process-wide cache used by the engine.
KernelCache& default_kernel_cache();

/// Debug dump: CSV rows "i,j,re,im" plus a JSON descriptor at `<csv>.json`.
void write_kernel_dump(const KernelTable& table, const std::filesystem::path& csv_path);

}  // namespace hir

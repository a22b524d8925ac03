#pragma once

#include <vector>

#include "hir/engine.hpp"
#include "hir/grid.hpp"
#include "hir/network.hpp"

namespace hir {

/// Frequency sampling [-K, K]^2 split into num_bands annuli of the l2 radius.
struct BandConfig {
    int K = 0;
    int num_bands = 1;

    BandConfig() = default;
    BandConfig(int k, int bands);

    /// K = floor(min(rows, cols) / 2).
    static BandConfig nyquist(std::size_t rows, std::size_t cols, int bands);
};

/// Band-pooled invariants, ordered by (node id, band index).
struct InvariantVector {
    struct Entry {
        int node_id = -1;
        int band = 0;
        double radius_lo = 0.0;
        double radius_hi = 0.0;
    };

    std::vector<double> values;
    std::vector<Entry> meta;

    std::size_t size() const noexcept { return values.size(); }
};

/// <M, V_nm> = (1/N_ij) sum M(i,j) exp(-j 2 pi (n i / N_i + m j / N_j)) for
/// (n, m) in [-K, K]^2; entry (n + K, m + K). Throws DomainError when
/// K > floor(min(N_i, N_j) / 2).
Grid<cplx> global_fourier_moments(const FeatureMap& map, int K);

/// Band index of (n, m): band b covers radii [sqrt2 K b / B, sqrt2 K (b+1) / B),
/// the last band closed. Exact integer arithmetic.
int band_of(int n, int m, const BandConfig& config);

/// I_b = sum of |<M, V_nm>| over band b. `moments` is (2K+1) x (2K+1).
InvariantVector band_pool(const Grid<cplx>& moments, const BandConfig& config);

/// Invariant vector of an activation set, emitted nodes in id order.
InvariantVector pool_activations(const NodeActivationSet& activations, const BandConfig& config);

/// scale_pool (multi-scale) -> per-node moments -> band_pool -> concatenation.
InvariantVector pool_bank(const ActivationBank& bank, const BandConfig& config,
                          ScaleReducer reducer = ScaleReducer::Max);

/// forward -> scale_pool (multi-scale) -> per-node moments -> band_pool -> concatenation.
InvariantVector extract(const FeatureMap& image, const NetworkSpec& net, const BandConfig& config,
                        const EngineConfig& engine, ScaleReducer reducer = ScaleReducer::Max);

}  // namespace hir

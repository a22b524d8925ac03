#include "hir/invariant.hpp"

#include <cmath>
#include <numbers>

#include "hir/error.hpp"

namespace hir {

BandConfig::BandConfig(int k, int bands) : K(k), num_bands(bands) {
    if (K < 0) throw ConfigError("band config requires K >= 0");
    if (num_bands < 1) throw ConfigError("band config requires at least one band");
    if (K == 0 && num_bands != 1) throw ConfigError("K = 0 admits a single band only");
}

BandConfig BandConfig::nyquist(std::size_t rows, std::size_t cols, int bands) {
    return BandConfig(static_cast<int>(std::min(rows, cols) / 2), bands);
}

Grid<cplx> global_fourier_moments(const FeatureMap& map, int K) {
    const std::size_t limit = std::min(map.rows(), map.cols()) / 2;
    if (K < 0 || static_cast<std::size_t>(K) > limit) {
        throw DomainError("frequency range K=" + std::to_string(K) + " exceeds floor(min(N_i, N_j)/2)=" +
                          std::to_string(limit));
    }
    const auto spectrum = fft2(map.data);
    const double inv = 1.0 / static_cast<double>(map.data.size());
    const long rows = static_cast<long>(map.rows());
    const long cols = static_cast<long>(map.cols());
    Grid<cplx> moments(2 * K + 1, 2 * K + 1);
    for (int n = -K; n <= K; ++n) {
        for (int m = -K; m <= K; ++m) {
            const long i = ((n % rows) + rows) % rows;
            const long j = ((m % cols) + cols) % cols;
            moments(n + K, m + K) = spectrum(i, j) * inv;
        }
    }
    return moments;
}

int band_of(int n, int m, const BandConfig& config) {
    if (config.K == 0) return 0;
    const long long bands = config.num_bands;
    const long long rho2 = static_cast<long long>(n) * n + static_cast<long long>(m) * m;
    const long long k2 = static_cast<long long>(config.K) * config.K;
    // largest b with (sqrt2 K b / B)^2 <= rho^2, i.e. 2 K^2 b^2 <= rho^2 B^2
    int b = static_cast<int>(std::min<long long>(bands - 1, static_cast<long long>(
        std::floor(std::sqrt(static_cast<double>(rho2)) * bands / (std::numbers::sqrt2 * config.K)))));
    while (b + 1 < bands && 2 * k2 * (b + 1) * (b + 1) <= rho2 * bands * bands) ++b;
    while (b > 0 && 2 * k2 * b * b > rho2 * bands * bands) --b;
    return b;
}

InvariantVector band_pool(const Grid<cplx>& moments, const BandConfig& config) {
    const int K = config.K;
    if (moments.rows() != static_cast<std::size_t>(2 * K + 1) || moments.cols() != moments.rows()) {
        throw DomainError("moment grid does not span [-K, K]^2");
    }
    InvariantVector out;
    out.values.assign(config.num_bands, 0.0);
    for (int n = -K; n <= K; ++n) {
        for (int m = -K; m <= K; ++m) out.values[band_of(n, m, config)] += std::abs(moments(n + K, m + K));
    }
    const double step = std::numbers::sqrt2 * K / config.num_bands;
    for (int b = 0; b < config.num_bands; ++b) out.meta.push_back({-1, b, step * b, step * (b + 1)});
    return out;
}

InvariantVector pool_activations(const NodeActivationSet& activations, const BandConfig& config) {
    InvariantVector out;
    for (const auto& [id, map] : activations) {
        auto part = band_pool(global_fourier_moments(map, config.K), config);
        for (auto& e : part.meta) e.node_id = id;
        out.values.insert(out.values.end(), part.values.begin(), part.values.end());
        out.meta.insert(out.meta.end(), part.meta.begin(), part.meta.end());
    }
    return out;
}

InvariantVector extract(const FeatureMap& image, const NetworkSpec& net, const BandConfig& config,
                        const EngineConfig& engine, ScaleReducer reducer) {
    return pool_bank(forward(image, net, engine), config, reducer);
}

InvariantVector pool_bank(const ActivationBank& bank, const BandConfig& config, ScaleReducer reducer) {
    if (bank.per_scale.size() == 1) return pool_activations(bank.per_scale.front(), config);
    return pool_activations(scale_pool(bank.per_scale, reducer), config);
}

}  // namespace hir

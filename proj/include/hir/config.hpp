#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "hir/basis.hpp"
#include "hir/engine.hpp"
#include "hir/harness.hpp"
#include "hir/invariant.hpp"
#include "hir/network.hpp"

namespace hir {

/// Everything a command needs. Defaults follow the classification setting:
/// cosine family, w = 10, L = 6.
struct RunConfig {
    RadialFamily family = RadialFamily::cosine();
    int depth = 6;

    bool multiscale = false;
    double scale = 10.0;
    int t_min = 2;
    int t_max = 4;

    bool bands_nyquist = false;  // K = floor(min side / 2), resolved per image size
    int band_k = 0;
    int num_bands = 1;

    ConvPath conv = ConvPath::Fft;
    std::string quadrature = "gauss2x2";
    int fan_out_cap = 0;
    ScaleReducer reducer = ScaleReducer::Max;

    std::size_t select_k = 0;  // 0 keeps every feature
    ClassifierKind classifier = ClassifierKind::RidgeLinear;
    double ridge_lambda = 1.0;
    std::uint64_t seed = 0;
    double train_ratio = 0.8;

    std::size_t margin = 0;   // zero border added around every input image
    std::size_t workers = 0;  // 0: logical cores

    /// Throws ConfigError naming the first bad field.
    void validate() const;
    /// Size-dependent checks for input images of rows x cols (before margin).
    void validate_for_image(std::size_t rows, std::size_t cols) const;

    NetworkSpec network() const;
    EngineConfig engine() const;
    BandConfig bands(std::size_t rows, std::size_t cols) const;

    nlohmann::ordered_json to_json() const;
    /// Missing keys keep their defaults.
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// "TMIN:TMAX".
    void set_scales(const std::string& spec);
    /// "K:NB" or "nyquist:NB".
    void set_bands(const std::string& spec);
};

}  // namespace hir

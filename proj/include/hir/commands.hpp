#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "hir/config.hpp"
#include "hir/features.hpp"
#include "hir/image_io.hpp"

namespace hir {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvariant = 2;
inline constexpr int kExitIo = 3;

/// Zero border of config.margin pixels.
Grid<double> prepare_image(const Grid<double>& image, const RunConfig& config);

/// Invariant vectors of every image of the dataset, one row each, computed on
/// a worker pool. Row order follows the dataset.
FeatureMatrix extract_features(const Dataset& data, const RunConfig& config);

/// Writes the features CSV to `output` and the config to `<output>.config.json`.
void cmd_extract(const RunConfig& config, const std::filesystem::path& input, const std::filesystem::path& output);

struct VerifyOptions {
    std::size_t synthetic_images = 20;  // used when no input directory is given
    std::size_t synthetic_size = 32;    // content side before padding
    bool inject_kernel_fault = false;
};

/// Equivariance and invariance suite. Strict transforms are gated at 1e-6;
/// arbitrary rotation and dyadic scaling are reported against 5% without
/// gating. The report is written before any InvariantViolation is thrown.
nlohmann::ordered_json cmd_verify(const RunConfig& config, const std::optional<std::filesystem::path>& input,
                                  const std::filesystem::path& output, const VerifyOptions& options,
                                  std::ostream& log);

struct BenchRow {
    double w = 0.0;
    double direct_ms = 0.0;
    double fft_ms = 0.0;         // one-shot conv_fft, plans and kernel spectrum included
    double fft_reuse_ms = 0.0;   // prepared convolver, kernel spectrum cached
};

/// Best-of-`repeats` timings of direct and FFT convolution on a size x size
/// random image for every w.
std::vector<BenchRow> run_bench(std::size_t size, const std::vector<double>& scales, int repeats,
                                const EngineConfig& engine);

nlohmann::ordered_json cmd_bench(const RunConfig& config, const std::optional<std::filesystem::path>& output,
                                 std::ostream& log);

/// Features from a CSV written by extract, or extracted from an image directory.
FeatureMatrix load_features(const RunConfig& config, const std::filesystem::path& input);

nlohmann::ordered_json cmd_classify(const RunConfig& config, const std::filesystem::path& input,
                                    const std::optional<std::filesystem::path>& output, std::ostream& log);

/// Writes the selection JSON to `output`, the pruned network to
/// `<output>.network.json` and per-column scores to `<output>.scores.csv`.
nlohmann::ordered_json cmd_select(const RunConfig& config, const std::filesystem::path& input,
                                  const std::filesystem::path& output, std::ostream& log);

}  // namespace hir

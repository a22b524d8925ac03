#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "hir/basis.hpp"
#include "hir/grid.hpp"
#include "hir/kernels.hpp"

namespace hir {

/// Parameters lambda = (n, m, w) of one representation unit.
struct UnitParams {
    int n = 0;
    int m = 0;
    double w = 1.0;

    BasisOrder order() const { return {n, m}; }
    friend bool operator==(const UnitParams&, const UnitParams&) = default;
};

enum class DomainKind { ComplexValued, RealNonNegative };

/// One channel of a (possibly intermediate) feature map. Spatial size is
/// preserved by every unit.
struct FeatureMap {
    Grid<cplx> data;
    int channel_id = 0;
    std::vector<UnitParams> path_tag;
    DomainKind domain_kind = DomainKind::ComplexValued;

    static FeatureMap from_real(const Grid<double>& image, int channel_id = 0);

    std::size_t rows() const noexcept { return data.rows(); }
    std::size_t cols() const noexcept { return data.cols(); }
    /// Real parts as a plain grid.
    Grid<double> real() const;
};

enum class ConvPath { Direct, Fft };

std::string to_string(ConvPath path);
ConvPath conv_path_from_string(const std::string& name);

/// Same-size convolution of M with the transposed kernel table, zero padding
/// outside the image. The reference implementation for conv_fft.
FeatureMap conv_direct(const FeatureMap& input, const KernelTable& kernel);

/// Same result as conv_direct through the convolution theorem.
FeatureMap conv_fft(const FeatureMap& input, const KernelTable& kernel);

/// Elementwise modulus; the result is RealNonNegative.
FeatureMap magnitude(const FeatureMap& input);

/// Local pooling is the identity.
FeatureMap pool_identity(const FeatureMap& input);

/// Unnormalised forward 2-D DFT, sum M(i,j) exp(-j 2 pi (n i / rows + m j / cols)).
Grid<cplx> fft2(const Grid<cplx>& input);

/// Smallest size >= n whose prime factors are all <= 13.
std::size_t fft_size(std::size_t n);

/// Reusable FFT convolution for a fixed image size and kernel support.
/// Input spectra can be shared between several kernels; kernel spectra are
/// memoised per table instance. Thread-safe.
class FftConvolver {
public:
    FftConvolver(std::size_t rows, std::size_t cols, std::size_t kernel_rows, std::size_t kernel_cols);
    ~FftConvolver();
    FftConvolver(const FftConvolver&) = delete;
    FftConvolver& operator=(const FftConvolver&) = delete;

    struct Spectrum;

    std::shared_ptr<const Spectrum> transform(const Grid<cplx>& input) const;
    Grid<cplx> apply(const Spectrum& input, const KernelTable& kernel) const;
    Grid<cplx> apply(const Spectrum& input, const std::shared_ptr<const KernelTable>& kernel);

    std::size_t padded_rows() const noexcept { return pr_; }
    std::size_t padded_cols() const noexcept { return pc_; }

private:
    struct KernelSpectrum;
    std::shared_ptr<const KernelSpectrum> kernel_spectrum(const KernelTable& kernel) const;
    Grid<cplx> combine(const Spectrum& input, const KernelSpectrum& kernel) const;

    std::size_t rows_;
    std::size_t cols_;
    std::size_t kr_;
    std::size_t kc_;
    std::size_t pr_;
    std::size_t pc_;
    std::mutex mutex_;
    std::map<const KernelTable*, std::pair<std::shared_ptr<const KernelTable>,
                                           std::shared_ptr<const KernelSpectrum>>> kernels_;
};

/// Everything a unit needs besides lambda.
struct EngineConfig {
    RadialFamily family = RadialFamily::cosine();
    QuadratureRule rule = default_rule();
    PixelGrid grid;
    ConvPath path = ConvPath::Fft;
    /// Divide each unit output by its maximum. Off unless asked for.
    bool max_normalize = false;
    KernelCache* cache = &default_kernel_cache();

    std::shared_ptr<const KernelTable> kernel(const UnitParams& unit) const;
};

/// U = P o S o C for one lambda; appends lambda to the path tag.
FeatureMap unit_apply(const FeatureMap& input, const UnitParams& unit, const EngineConfig& config);

/// As unit_apply, reusing a prepared input spectrum (FFT path only).
FeatureMap unit_apply(const FeatureMap& input, const FftConvolver::Spectrum& spectrum,
                      FftConvolver& convolver, const UnitParams& unit, const EngineConfig& config);

}  // namespace hir

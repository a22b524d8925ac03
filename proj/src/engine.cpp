#include "hir/engine.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "hir/error.hpp"

namespace hir {

namespace {

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n) {
    RealBuffer b(fftw_alloc_real(n));
    std::fill_n(b.get(), n, 0.0);
    return b;
}

ComplexBuffer alloc_complex(std::size_t n) {
    ComplexBuffer b(fftw_alloc_complex(n));
    for (std::size_t k = 0; k < n; ++k) b[k][0] = b[k][1] = 0.0;
    return b;
}

// FFTW planning is not thread-safe; execution of an existing plan is.
// Plans are built with FFTW_ESTIMATE so they (and results) are reproducible.
class PlanRegistry {
public:
    enum class Kind { R2C, C2R, C2C };

    fftw_plan r2c(std::size_t p, std::size_t q) { return get(Kind::R2C, p, q); }
    fftw_plan c2r(std::size_t p, std::size_t q) { return get(Kind::C2R, p, q); }
    fftw_plan c2c(std::size_t p, std::size_t q) { return get(Kind::C2C, p, q); }

private:
    fftw_plan get(Kind kind, std::size_t p, std::size_t q) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(kind, p, q);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        auto real = alloc_real(p * q);
        auto half = alloc_complex(p * (q / 2 + 1));
        auto full = alloc_complex(p * q);
        const int pi = static_cast<int>(p);
        const int qi = static_cast<int>(q);
        fftw_plan plan = nullptr;
        switch (kind) {
            case Kind::R2C: plan = fftw_plan_dft_r2c_2d(pi, qi, real.get(), half.get(), FFTW_ESTIMATE); break;
            case Kind::C2R: plan = fftw_plan_dft_c2r_2d(pi, qi, half.get(), real.get(), FFTW_ESTIMATE); break;
            case Kind::C2C:
                plan = fftw_plan_dft_2d(pi, qi, full.get(), full.get(), FFTW_FORWARD, FFTW_ESTIMATE);
                break;
        }
        plans_.emplace(key, plan);
        return plan;
    }

    std::mutex mutex_;
    std::map<std::tuple<Kind, std::size_t, std::size_t>, fftw_plan> plans_;
};

PlanRegistry& plans() {
    static PlanRegistry registry;
    return registry;
}

Grid<cplx> transpose(const Grid<cplx>& g) {
    Grid<cplx> t(g.cols(), g.rows());
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) t(j, i) = g(i, j);
    }
    return t;
}

bool has_imaginary(const Grid<cplx>& g) {
    return std::any_of(g.values().begin(), g.values().end(), [](const cplx& z) { return z.imag() != 0.0; });
}

void check_sizes(const FeatureMap& input, const KernelTable& kernel) {
    const std::size_t side = std::max(kernel.values.rows(), kernel.values.cols());
    if (side > std::min(input.rows(), input.cols())) {
        throw DomainError("kernel side " + std::to_string(side) + " exceeds image size " +
                          std::to_string(input.rows()) + "x" + std::to_string(input.cols()));
    }
}

FeatureMap with_data(const FeatureMap& input, Grid<cplx> data) {
    FeatureMap out;
    out.data = std::move(data);
    out.channel_id = input.channel_id;
    out.path_tag = input.path_tag;
    out.domain_kind = DomainKind::ComplexValued;
    return out;
}

}  // namespace

FeatureMap FeatureMap::from_real(const Grid<double>& image, int channel_id) {
    FeatureMap map;
    map.data = Grid<cplx>(image.rows(), image.cols());
    std::transform(image.values().begin(), image.values().end(), map.data.values().begin(),
                   [](double v) { return cplx(v, 0.0); });
    map.channel_id = channel_id;
    return map;
}

Grid<double> FeatureMap::real() const {
    Grid<double> out(rows(), cols());
    std::transform(data.values().begin(), data.values().end(), out.values().begin(),
                   [](const cplx& z) { return z.real(); });
    return out;
}

std::string to_string(ConvPath path) { return path == ConvPath::Direct ? "direct" : "fft"; }

ConvPath conv_path_from_string(const std::string& name) {
    if (name == "direct") return ConvPath::Direct;
    if (name == "fft") return ConvPath::Fft;
    throw ConfigError("unknown convolution path '" + name + "' (expected direct or fft)");
}

FeatureMap conv_direct(const FeatureMap& input, const KernelTable& kernel) {
    check_sizes(input, kernel);
    const Grid<cplx> ht = transpose(kernel.values);
    const long rows = static_cast<long>(input.rows());
    const long cols = static_cast<long>(input.cols());
    const long hr = static_cast<long>(ht.rows() / 2);
    const long hc = static_cast<long>(ht.cols() / 2);
    const bool complex_input = has_imaginary(input.data);

    std::vector<double> in_re(input.data.size());
    std::vector<double> in_im(complex_input ? input.data.size() : 0);
    for (std::size_t k = 0; k < input.data.size(); ++k) {
        in_re[k] = input.data.values()[k].real();
        if (complex_input) in_im[k] = input.data.values()[k].imag();
    }
    std::vector<double> out_re(input.data.size(), 0.0);
    std::vector<double> out_im(input.data.size(), 0.0);

    // out(i, j) = sum_{a, b} M(i - a, j - b) * Ht(hr + a, hc + b)
    for (long a = -hr; a <= hr; ++a) {
        for (long b = -hc; b <= hc; ++b) {
            const cplx tap = ht(hr + a, hc + b);
            if (tap == cplx{}) continue;
            const double kr = tap.real();
            const double ki = tap.imag();
            const long i0 = std::max(0L, a);
            const long i1 = std::min(rows, rows + a);
            const long j0 = std::max(0L, b);
            const long j1 = std::min(cols, cols + b);
            for (long i = i0; i < i1; ++i) {
                const long src = (i - a) * cols - b;
                const long dst = i * cols;
                if (complex_input) {
                    for (long j = j0; j < j1; ++j) {
                        out_re[dst + j] += in_re[src + j] * kr - in_im[src + j] * ki;
                        out_im[dst + j] += in_re[src + j] * ki + in_im[src + j] * kr;
                    }
                } else {
                    for (long j = j0; j < j1; ++j) {
                        out_re[dst + j] += in_re[src + j] * kr;
                        out_im[dst + j] += in_re[src + j] * ki;
                    }
                }
            }
        }
    }
    Grid<cplx> out(input.rows(), input.cols());
    for (std::size_t k = 0; k < out.size(); ++k) out.values()[k] = {out_re[k], out_im[k]};
    return with_data(input, std::move(out));
}

Grid<cplx> fft2(const Grid<cplx>& input) {
    const std::size_t n = input.size();
    auto buffer = alloc_complex(n);
    for (std::size_t k = 0; k < n; ++k) {
        buffer[k][0] = input.values()[k].real();
        buffer[k][1] = input.values()[k].imag();
    }
    fftw_execute_dft(plans().c2c(input.rows(), input.cols()), buffer.get(), buffer.get());
    Grid<cplx> out(input.rows(), input.cols());
    for (std::size_t k = 0; k < n; ++k) out.values()[k] = {buffer[k][0], buffer[k][1]};
    return out;
}

std::size_t fft_size(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t f : {2, 3, 5, 7, 11, 13}) {
            while (r % f == 0) r /= f;
        }
        if (r == 1) return m;
    }
}

struct FftConvolver::Spectrum {
    ComplexBuffer re;
    ComplexBuffer im;  // null for real input
};

struct FftConvolver::KernelSpectrum {
    ComplexBuffer re;
    ComplexBuffer im;
};

FftConvolver::FftConvolver(std::size_t rows, std::size_t cols, std::size_t kernel_rows,
                           std::size_t kernel_cols)
    : rows_(rows), cols_(cols), kr_(kernel_cols), kc_(kernel_rows) {
    // kr_ x kc_ is the shape of the transposed table
    pr_ = fft_size(rows_ + kr_ - 1);
    pc_ = fft_size(cols_ + kc_ - 1);
}

FftConvolver::~FftConvolver() = default;

std::shared_ptr<const FftConvolver::Spectrum> FftConvolver::transform(const Grid<cplx>& input) const {
    if (input.rows() != rows_ || input.cols() != cols_) {
        throw DomainError("FFT convolver configured for a different image size");
    }
    const std::size_t half = pr_ * (pc_ / 2 + 1);
    auto spectrum = std::make_shared<Spectrum>();
    auto buffer = alloc_real(pr_ * pc_);
    auto run = [&](auto part) {
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) buffer[i * pc_ + j] = part(input(i, j));
        }
        auto out = alloc_complex(half);
        fftw_execute_dft_r2c(plans().r2c(pr_, pc_), buffer.get(), out.get());
        return out;
    };
    spectrum->re = run([](const cplx& z) { return z.real(); });
    if (has_imaginary(input)) spectrum->im = run([](const cplx& z) { return z.imag(); });
    return spectrum;
}

std::shared_ptr<const FftConvolver::KernelSpectrum> FftConvolver::kernel_spectrum(
    const KernelTable& kernel) const {
    if (kernel.values.cols() != kr_ || kernel.values.rows() != kc_) {
        throw DomainError("FFT convolver configured for a different kernel size");
    }
    const std::size_t half = pr_ * (pc_ / 2 + 1);
    auto spectrum = std::make_shared<KernelSpectrum>();
    auto buffer = alloc_real(pr_ * pc_);
    auto run = [&](auto part) {
        // transposed table at the top-left corner
        for (std::size_t a = 0; a < kr_; ++a) {
            for (std::size_t b = 0; b < kc_; ++b) buffer[a * pc_ + b] = part(kernel.values(b, a));
        }
        auto out = alloc_complex(half);
        fftw_execute_dft_r2c(plans().r2c(pr_, pc_), buffer.get(), out.get());
        return out;
    };
    spectrum->re = run([](const cplx& z) { return z.real(); });
    spectrum->im = run([](const cplx& z) { return z.imag(); });
    return spectrum;
}

Grid<cplx> FftConvolver::combine(const Spectrum& input, const KernelSpectrum& kernel) const {
    const std::size_t half = pr_ * (pc_ / 2 + 1);
    auto prod_re = alloc_complex(half);
    auto prod_im = alloc_complex(half);
    for (std::size_t k = 0; k < half; ++k) {
        const cplx mr(input.re[k][0], input.re[k][1]);
        const cplx hr(kernel.re[k][0], kernel.re[k][1]);
        const cplx hi(kernel.im[k][0], kernel.im[k][1]);
        cplx a = mr * hr;
        cplx b = mr * hi;
        if (input.im) {
            const cplx mi(input.im[k][0], input.im[k][1]);
            a -= mi * hi;
            b += mi * hr;
        }
        prod_re[k][0] = a.real();
        prod_re[k][1] = a.imag();
        prod_im[k][0] = b.real();
        prod_im[k][1] = b.imag();
    }
    auto out_re = alloc_real(pr_ * pc_);
    auto out_im = alloc_real(pr_ * pc_);
    const fftw_plan inverse = plans().c2r(pr_, pc_);
    fftw_execute_dft_c2r(inverse, prod_re.get(), out_re.get());
    fftw_execute_dft_c2r(inverse, prod_im.get(), out_im.get());

    const double scale = 1.0 / static_cast<double>(pr_ * pc_);
    const std::size_t off_r = kr_ / 2;
    const std::size_t off_c = kc_ / 2;
    Grid<cplx> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            const std::size_t k = (i + off_r) * pc_ + (j + off_c);
            out(i, j) = {out_re[k] * scale, out_im[k] * scale};
        }
    }
    return out;
}

Grid<cplx> FftConvolver::apply(const Spectrum& input, const KernelTable& kernel) const {
    return combine(input, *kernel_spectrum(kernel));
}

Grid<cplx> FftConvolver::apply(const Spectrum& input, const std::shared_ptr<const KernelTable>& kernel) {
    std::shared_ptr<const KernelSpectrum> spectrum;
    {
        std::lock_guard lock(mutex_);
        if (auto it = kernels_.find(kernel.get()); it != kernels_.end()) spectrum = it->second.second;
    }
    if (!spectrum) {
        spectrum = kernel_spectrum(*kernel);
        std::lock_guard lock(mutex_);
        kernels_.emplace(kernel.get(), std::make_pair(kernel, spectrum));
    }
    return combine(input, *spectrum);
}

FeatureMap conv_fft(const FeatureMap& input, const KernelTable& kernel) {
    check_sizes(input, kernel);
    FftConvolver convolver(input.rows(), input.cols(), kernel.values.rows(), kernel.values.cols());
    const auto spectrum = convolver.transform(input.data);
    return with_data(input, convolver.apply(*spectrum, kernel));
}

FeatureMap magnitude(const FeatureMap& input) {
    FeatureMap out;
    out.data = Grid<cplx>(input.rows(), input.cols());
    std::transform(input.data.values().begin(), input.data.values().end(), out.data.values().begin(),
                   [](const cplx& z) { return cplx(std::hypot(z.real(), z.imag()), 0.0); });
    out.channel_id = input.channel_id;
    out.path_tag = input.path_tag;
    out.domain_kind = DomainKind::RealNonNegative;
    return out;
}

FeatureMap pool_identity(const FeatureMap& input) { return input; }

std::shared_ptr<const KernelTable> EngineConfig::kernel(const UnitParams& unit) const {
    return cache->get(family, unit.order(), unit.w, grid, rule);
}

namespace {

FeatureMap finish_unit(FeatureMap conv, const UnitParams& unit, const EngineConfig& config) {
    FeatureMap out = pool_identity(magnitude(conv));
    if (config.max_normalize) {
        double peak = 0.0;
        for (const auto& z : out.data.values()) peak = std::max(peak, z.real());
        if (peak > 0.0) {
            for (auto& z : out.data.values()) z = {z.real() / peak, 0.0};
        }
    }
    out.path_tag.push_back(unit);
    return out;
}

}  // namespace

FeatureMap unit_apply(const FeatureMap& input, const UnitParams& unit, const EngineConfig& config) {
    const auto kernel = config.kernel(unit);
    FeatureMap conv = config.path == ConvPath::Direct ? conv_direct(input, *kernel) : conv_fft(input, *kernel);
    return finish_unit(std::move(conv), unit, config);
}

FeatureMap unit_apply(const FeatureMap& input, const FftConvolver::Spectrum& spectrum,
                      FftConvolver& convolver, const UnitParams& unit, const EngineConfig& config) {
    const auto kernel = config.kernel(unit);
    check_sizes(input, *kernel);
    FeatureMap conv = with_data(input, convolver.apply(spectrum, kernel));
    return finish_unit(std::move(conv), unit, config);
}

}  // namespace hir

#pragma once

#include <string>

#include "hir/basis.hpp"
#include "hir/engine.hpp"
#include "hir/grid.hpp"

namespace hir {

enum class TransformKind { Identity, Rotate90, RotateArbitrary, FlipH, FlipV, Translate, ScaleDyadic };
enum class Resampler { GridExact, Bicubic };

/// Geometric transform of an image about its centre.
///
/// Pixel conventions: row i, column j. Rotate90 with k quarter turns samples
/// out(i, j) = in(rows - 1 - j, i) k times; RotateArbitrary(phi) uses the same
/// sense, so phi = 90 degrees matches one quarter turn. FlipH mirrors columns,
/// FlipV mirrors rows. Translate(dx, dy) moves content dx columns right and dy
/// rows down with zero fill. ScaleDyadic(s) resizes to round(s * size),
/// keeping centres aligned.
struct TransformSpec {
    TransformKind kind = TransformKind::Identity;
    int quarter_turns = 0;
    double angle_deg = 0.0;
    int dx = 0;
    int dy = 0;
    double scale = 1.0;

    static TransformSpec identity() { return {}; }
    static TransformSpec rotate90(int k);
    static TransformSpec rotate(double degrees);
    static TransformSpec flip_h();
    static TransformSpec flip_v();
    static TransformSpec translate(int dx, int dy);
    static TransformSpec scale_dyadic(double s);

    Resampler resampler() const noexcept;
    bool grid_exact() const noexcept { return resampler() == Resampler::GridExact; }
    std::string describe() const;
};

Grid<double> apply_transform(const Grid<double>& image, const TransformSpec& t);
Grid<cplx> apply_transform(const Grid<cplx>& image, const TransformSpec& t);
FeatureMap apply_transform(const FeatureMap& map, const TransformSpec& t);

/// Keys cubic convolution (a = -0.5) sample at fractional (row, col); zero outside.
double bicubic_sample(const Grid<double>& image, double row, double col);

/// Surrounds the image with a zero border of `margin` pixels.
Grid<double> pad(const Grid<double>& image, std::size_t margin);

/// Peak signal-to-noise ratio in dB with the given peak value.
double psnr(const Grid<double>& reference, const Grid<double>& test, double peak);

}  // namespace hir

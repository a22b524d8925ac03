#include "hir/transforms.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hir/error.hpp"

namespace hir {

TransformSpec TransformSpec::rotate90(int k) {
    if (k < 1 || k > 3) throw ConfigError("quarter turns must be 1, 2 or 3");
    TransformSpec t;
    t.kind = TransformKind::Rotate90;
    t.quarter_turns = k;
    return t;
}

TransformSpec TransformSpec::rotate(double degrees) {
    TransformSpec t;
    t.kind = TransformKind::RotateArbitrary;
    t.angle_deg = degrees;
    return t;
}

TransformSpec TransformSpec::flip_h() {
    TransformSpec t;
    t.kind = TransformKind::FlipH;
    return t;
}

TransformSpec TransformSpec::flip_v() {
    TransformSpec t;
    t.kind = TransformKind::FlipV;
    return t;
}

TransformSpec TransformSpec::translate(int dx, int dy) {
    TransformSpec t;
    t.kind = TransformKind::Translate;
    t.dx = dx;
    t.dy = dy;
    return t;
}

TransformSpec TransformSpec::scale_dyadic(double s) {
    if (s != 2.0 && s != 0.5) throw ConfigError("dyadic scaling factor must be 2 or 1/2");
    TransformSpec t;
    t.kind = TransformKind::ScaleDyadic;
    t.scale = s;
    return t;
}

Resampler TransformSpec::resampler() const noexcept {
    return (kind == TransformKind::RotateArbitrary || kind == TransformKind::ScaleDyadic) ? Resampler::Bicubic
                                                                                          : Resampler::GridExact;
}

std::string TransformSpec::describe() const {
    std::ostringstream s;
    switch (kind) {
        case TransformKind::Identity: s << "identity"; break;
        case TransformKind::Rotate90: s << "rotate" << 90 * quarter_turns; break;
        case TransformKind::RotateArbitrary: s << "rotate(" << angle_deg << "deg,bicubic)"; break;
        case TransformKind::FlipH: s << "flip_h"; break;
        case TransformKind::FlipV: s << "flip_v"; break;
        case TransformKind::Translate: s << "translate(" << dx << "," << dy << ")"; break;
        case TransformKind::ScaleDyadic: s << "scale(" << scale << ",bicubic)"; break;
    }
    return s.str();
}

namespace {

double keys(double x) {
    constexpr double a = -0.5;
    x = std::abs(x);
    if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

template <typename T>
T cubic_at(const Grid<T>& image, double row, double col) {
    const long r0 = static_cast<long>(std::floor(row));
    const long c0 = static_cast<long>(std::floor(col));
    const long rows = static_cast<long>(image.rows());
    const long cols = static_cast<long>(image.cols());
    T acc{};
    for (long r = r0 - 1; r <= r0 + 2; ++r) {
        if (r < 0 || r >= rows) continue;
        const double wr = keys(row - r);
        if (wr == 0.0) continue;
        for (long c = c0 - 1; c <= c0 + 2; ++c) {
            if (c < 0 || c >= cols) continue;
            const double wc = keys(col - c);
            acc += image(r, c) * (wr * wc);
        }
    }
    return acc;
}

template <typename T>
Grid<T> quarter_turn(const Grid<T>& in) {
    Grid<T> out(in.cols(), in.rows());
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = in(in.rows() - 1 - j, i);
    }
    return out;
}

template <typename T>
Grid<T> transform_grid(const Grid<T>& in, const TransformSpec& t) {
    const std::size_t rows = in.rows();
    const std::size_t cols = in.cols();
    switch (t.kind) {
        case TransformKind::Identity: return in;
        case TransformKind::Rotate90: {
            Grid<T> out = in;
            for (int k = 0; k < t.quarter_turns; ++k) out = quarter_turn(out);
            return out;
        }
        case TransformKind::FlipH: {
            Grid<T> out(rows, cols);
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t j = 0; j < cols; ++j) out(i, j) = in(i, cols - 1 - j);
            }
            return out;
        }
        case TransformKind::FlipV: {
            Grid<T> out(rows, cols);
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t j = 0; j < cols; ++j) out(i, j) = in(rows - 1 - i, j);
            }
            return out;
        }
        case TransformKind::Translate: {
            if (std::abs(t.dx) >= static_cast<long>(cols) || std::abs(t.dy) >= static_cast<long>(rows)) {
                throw DomainError("translation must be smaller than the image");
            }
            Grid<T> out(rows, cols);
            for (long i = 0; i < static_cast<long>(rows); ++i) {
                const long si = i - t.dy;
                if (si < 0 || si >= static_cast<long>(rows)) continue;
                for (long j = 0; j < static_cast<long>(cols); ++j) {
                    const long sj = j - t.dx;
                    if (sj < 0 || sj >= static_cast<long>(cols)) continue;
                    out(i, j) = in(si, sj);
                }
            }
            return out;
        }
        case TransformKind::RotateArbitrary: {
            const double phi = t.angle_deg * std::numbers::pi / 180.0;
            const double cs = std::cos(phi);
            const double sn = std::sin(phi);
            const double ci = (rows - 1) / 2.0;
            const double cj = (cols - 1) / 2.0;
            Grid<T> out(rows, cols);
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t j = 0; j < cols; ++j) {
                    const double a = i - ci;
                    const double b = j - cj;
                    out(i, j) = cubic_at(in, ci + a * cs - b * sn, cj + a * sn + b * cs);
                }
            }
            return out;
        }
        case TransformKind::ScaleDyadic: {
            const auto out_rows = static_cast<std::size_t>(std::lround(rows * t.scale));
            const auto out_cols = static_cast<std::size_t>(std::lround(cols * t.scale));
            if (out_rows == 0 || out_cols == 0) throw DomainError("scaled image would be empty");
            const double ci = (rows - 1) / 2.0;
            const double cj = (cols - 1) / 2.0;
            const double oi = (out_rows - 1) / 2.0;
            const double oj = (out_cols - 1) / 2.0;
            Grid<T> out(out_rows, out_cols);
            for (std::size_t i = 0; i < out_rows; ++i) {
                for (std::size_t j = 0; j < out_cols; ++j) {
                    out(i, j) = cubic_at(in, ci + (i - oi) / t.scale, cj + (j - oj) / t.scale);
                }
            }
            return out;
        }
    }
    return in;
}

}  // namespace

Grid<double> apply_transform(const Grid<double>& image, const TransformSpec& t) { return transform_grid(image, t); }

Grid<cplx> apply_transform(const Grid<cplx>& image, const TransformSpec& t) { return transform_grid(image, t); }

FeatureMap apply_transform(const FeatureMap& map, const TransformSpec& t) {
    FeatureMap out = map;
    out.data = transform_grid(map.data, t);
    return out;
}

double bicubic_sample(const Grid<double>& image, double row, double col) { return cubic_at(image, row, col); }

Grid<double> pad(const Grid<double>& image, std::size_t margin) {
    Grid<double> out(image.rows() + 2 * margin, image.cols() + 2 * margin);
    for (std::size_t i = 0; i < image.rows(); ++i) {
        for (std::size_t j = 0; j < image.cols(); ++j) out(i + margin, j + margin) = image(i, j);
    }
    return out;
}

double psnr(const Grid<double>& reference, const Grid<double>& test, double peak) {
    if (!reference.same_shape(test)) throw DomainError("psnr of differently sized images");
    double sse = 0.0;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        const double d = reference.values()[k] - test.values()[k];
        sse += d * d;
    }
    const double mse = sse / static_cast<double>(reference.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace hir

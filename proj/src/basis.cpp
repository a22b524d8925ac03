#include "hir/basis.hpp"

#include <cmath>
#include <numbers>

#include "hir/error.hpp"

namespace hir {

namespace {

constexpr double kPi = std::numbers::pi;

// Jacobi-type radial polynomial. All log-gamma arguments are positive under the
// family constraints once n >= 1; n == 0 uses the closed form of the norm.
double jacobi_radial(const RadialFamily& f, int n, double r) {
    const double a = f.alpha();
    const double p = f.p();
    const double q = f.q();
    const double ra = std::pow(r, a);
    // weight part: alpha r^(alpha q - 2) (1 - r^alpha)^(p - q) / (2 pi)
    const double weight = a * std::pow(r, a * q - 2.0) * std::pow(1.0 - ra, p - q) / (2.0 * kPi);

    if (n == 0) {
        // p Gamma(p) folds into Gamma(p + 1), which stays finite as p -> 0
        const double log_norm = std::lgamma(p + 1.0) - std::lgamma(q) - std::lgamma(p - q + 1.0);
        return std::sqrt(weight * std::exp(log_norm));
    }

    const double log_norm2 = std::log(p + 2.0 * n) + std::lgamma(q + n) + std::lgamma(n + 1.0) -
                             std::lgamma(p + n) - std::lgamma(p - q + n + 1.0);
    const double half_log_norm = 0.5 * log_norm2;
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double log_term = std::lgamma(p + n + k) - std::lgamma(k + 1.0) -
                                std::lgamma(n - k + 1.0) - std::lgamma(q + k) + half_log_norm;
        const double magnitude = std::exp(log_term) * std::pow(ra, k);
        sum += (k % 2 == 0) ? magnitude : -magnitude;
    }
    return std::sqrt(weight) * sum;
}

}  // namespace

std::string to_string(RadialKind kind) {
    switch (kind) {
        case RadialKind::Harmonic: return "harmonic";
        case RadialKind::Jacobi: return "jacobi";
        case RadialKind::Cosine: return "cosine";
    }
    return "unknown";
}

RadialKind radial_kind_from_string(const std::string& name) {
    if (name == "harmonic") return RadialKind::Harmonic;
    if (name == "jacobi") return RadialKind::Jacobi;
    if (name == "cosine") return RadialKind::Cosine;
    throw ConfigError("unknown radial family '" + name + "'");
}

RadialFamily RadialFamily::cosine() { return RadialFamily(RadialKind::Cosine, 2.0, 0.0, 0.0); }

RadialFamily RadialFamily::harmonic(double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("harmonic family requires alpha > 0");
    return RadialFamily(RadialKind::Harmonic, alpha, 0.0, 0.0);
}

RadialFamily RadialFamily::jacobi(double alpha, double p, double q) {
    if (!(alpha > 0.0)) throw ConfigError("jacobi family requires alpha > 0");
    if (!(p - q > -1.0) || !(q > 0.0)) {
        throw ConfigError("jacobi family requires p - q > -1 and q > 0");
    }
    return RadialFamily(RadialKind::Jacobi, alpha, p, q);
}

RadialFamily RadialFamily::make(RadialKind kind, double alpha, double p, double q) {
    switch (kind) {
        case RadialKind::Harmonic: return harmonic(alpha);
        case RadialKind::Jacobi: return jacobi(alpha, p, q);
        case RadialKind::Cosine: return cosine();
    }
    throw ConfigError("unknown radial family");
}

BasisOrder::BasisOrder(int n_, int m_) : n(n_), m(m_) {
    if (n < 0) throw DomainError("radial order n must be non-negative");
}

LocalFrame::LocalFrame(double u_, double v_, double w_) : u(u_), v(v_), w(w_) {
    if (!(w > 0.0)) throw DomainError("frame radius w must be positive");
}

cplx radial_value(const RadialFamily& family, int n, double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("radial argument outside [0, 1]");
    if (n < 0) throw DomainError("radial order n must be non-negative");
    if (r == 0.0) {
        const double exponent = family.kind() == RadialKind::Harmonic ? family.alpha() - 2.0
                                : family.kind() == RadialKind::Jacobi ? family.alpha() * family.q() - 2.0
                                                                      : 0.0;
        if (exponent < 0.0) throw DomainError("radial function is singular at r = 0 for this family");
    }
    switch (family.kind()) {
        case RadialKind::Cosine:
            if (n == 0) return {1.0 / std::sqrt(kPi), 0.0};
            return {std::sqrt(2.0 / kPi) * std::cos(n * kPi * r * r), 0.0};
        case RadialKind::Harmonic: {
            const double a = family.alpha();
            const double ra = std::pow(r, a);
            const double amp = std::sqrt(a * std::pow(r, a - 2.0) / (2.0 * kPi));
            return std::polar(amp, 2.0 * n * kPi * ra);
        }
        case RadialKind::Jacobi:
            return {jacobi_radial(family, n, r), 0.0};
    }
    return {};
}

cplx angular_value(int m, double theta) { return std::polar(1.0, m * theta); }

cplx basis_value(const RadialFamily& family, BasisOrder order, const LocalFrame& frame,
                 double x, double y) {
    const double dx = x - frame.u;
    const double dy = y - frame.v;
    const double rr = dx * dx + dy * dy;
    if (rr > frame.w * frame.w) return {0.0, 0.0};
    const double r = std::min(std::sqrt(rr) / frame.w, 1.0);
    const double theta = (dx == 0.0 && dy == 0.0) ? 0.0 : std::atan2(dy, dx);
    return radial_value(family, order.n, r) * angular_value(order.m, theta);
}

Grid<cplx> orthogonality_gram(const RadialFamily& family, int n_max, const CompositeRule& rule) {
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    const auto nodes = composite_nodes(rule);
    const std::size_t count = static_cast<std::size_t>(n_max) + 1;
    Grid<cplx> values(count, nodes.x.size());
    for (std::size_t n = 0; n < count; ++n) {
        for (std::size_t k = 0; k < nodes.x.size(); ++k) {
            values(n, k) = radial_value(family, static_cast<int>(n), nodes.x[k]);
        }
    }
    Grid<cplx> gram(count, count);
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = 0; b < count; ++b) {
            cplx acc{};
            for (std::size_t k = 0; k < nodes.x.size(); ++k) {
                acc += nodes.w[k] * values(a, k) * std::conj(values(b, k)) * nodes.x[k];
            }
            gram(a, b) = acc;
        }
    }
    return gram;
}

}  // namespace hir

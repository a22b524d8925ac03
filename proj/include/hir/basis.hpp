#pragma once

#include <complex>
#include <string>

#include "hir/grid.hpp"
#include "hir/quadrature.hpp"

namespace hir {

using cplx = std::complex<double>;

enum class RadialKind { Harmonic, Jacobi, Cosine };

std::string to_string(RadialKind kind);
RadialKind radial_kind_from_string(const std::string& name);

/// Radial basis family R_n(r) on [0, 1]. Construct through the named factories;
/// they enforce alpha > 0 and, for Jacobi, p - q > -1 and q > 0.
class RadialFamily {
public:
    static RadialFamily cosine();
    static RadialFamily harmonic(double alpha);
    static RadialFamily jacobi(double alpha, double p, double q);
    static RadialFamily make(RadialKind kind, double alpha, double p, double q);

    RadialKind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    double p() const noexcept { return p_; }
    double q() const noexcept { return q_; }

    /// True when every R_n is real-valued (Cosine, Jacobi).
    bool is_real() const noexcept { return kind_ != RadialKind::Harmonic; }

    friend bool operator==(const RadialFamily&, const RadialFamily&) = default;
    friend auto operator<=>(const RadialFamily&, const RadialFamily&) = default;

private:
    RadialFamily(RadialKind kind, double alpha, double p, double q)
        : kind_(kind), alpha_(alpha), p_(p), q_(q) {}

    RadialKind kind_ = RadialKind::Cosine;
    double alpha_ = 2.0;
    double p_ = 0.0;
    double q_ = 0.0;
};

/// Order (n, m): radial order n >= 0, angular repetition m.
struct BasisOrder {
    int n = 0;
    int m = 0;

    BasisOrder() = default;
    BasisOrder(int n_, int m_);

    friend bool operator==(const BasisOrder&, const BasisOrder&) = default;
    friend auto operator<=>(const BasisOrder&, const BasisOrder&) = default;
};

/// Disk of radius w centred at (u, v), all in pixel units.
struct LocalFrame {
    double u = 0.0;
    double v = 0.0;
    double w = 1.0;

    LocalFrame() = default;
    LocalFrame(double u_, double v_, double w_);
};

/// R_n(r). Throws DomainError when r is outside [0, 1], n < 0, or r = 0 where
/// the radial weight is singular (harmonic alpha < 2, jacobi alpha q < 2).
cplx radial_value(const RadialFamily& family, int n, double r);

/// exp(j m theta).
cplx angular_value(int m, double theta);

/// V_nm^{uvw}(x, y); exactly zero outside the closed disk.
cplx basis_value(const RadialFamily& family, BasisOrder order, const LocalFrame& frame,
                 double x, double y);

/// Weighted inner products  integral_0^1 R_n(r) conj(R_n'(r)) r dr  for
/// n, n' in [0, n_max], by composite Gauss quadrature.
Grid<cplx> orthogonality_gram(const RadialFamily& family, int n_max, const CompositeRule& rule);

}  // namespace hir

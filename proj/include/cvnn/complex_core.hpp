#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvnn {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealRow = Eigen::RowVectorXd;

// ---------------------------------------------------------------------------
// Scalar arithmetic, Cartesian and polar.
// ---------------------------------------------------------------------------

/// (a+ib)(c+id) = (ac - bd) + i(ad + bc), expanded by hand so that no
/// library NaN/Inf recovery path is involved.
Complex cmul(Complex z1, Complex z2) noexcept;
Complex cadd(Complex z1, Complex z2) noexcept;

struct Polar {
    double r = 0.0;
    double phi = 0.0;  // in (-pi, pi]
};

/// Wraps an angle into (-pi, pi].
double wrap_phase(double phi) noexcept;

/// r = |z|, phi = atan2(im, re); phi is 0 for z == 0.
Polar to_polar(Complex z) noexcept;
Complex from_polar(Polar p) noexcept;

/// (r1, phi1)(r2, phi2) = (r1 r2, wrap(phi1 + phi2)).
Polar polar_mul(Polar p1, Polar p2) noexcept;

// ---------------------------------------------------------------------------
// Split-plane complex matrices.
// ---------------------------------------------------------------------------

/// A matrix of complex numbers stored as two real planes of identical shape.
/// Rows are samples when the tensor holds a batch.
class ComplexTensor {
public:
    ComplexTensor() = default;
    ComplexTensor(Eigen::Index rows, Eigen::Index cols);  // zero-filled
    ComplexTensor(RealMatrix re, RealMatrix im);           // throws DimensionError on shape mismatch

    static ComplexTensor zeros(Eigen::Index rows, Eigen::Index cols) { return {rows, cols}; }
    static ComplexTensor from_real(RealMatrix re);

    Eigen::Index rows() const noexcept { return re_.rows(); }
    Eigen::Index cols() const noexcept { return re_.cols(); }
    Eigen::Index size() const noexcept { return re_.size(); }

    const RealMatrix& re() const noexcept { return re_; }
    const RealMatrix& im() const noexcept { return im_; }
    RealMatrix& re() noexcept { return re_; }
    RealMatrix& im() noexcept { return im_; }

    Complex operator()(Eigen::Index r, Eigen::Index c) const { return {re_(r, c), im_(r, c)}; }
    void set(Eigen::Index r, Eigen::Index c, Complex z) {
        re_(r, c) = z.real();
        im_(r, c) = z.imag();
    }

    bool imag_is_zero() const { return (im_.array() == 0.0).all(); }
    bool all_finite() const { return re_.allFinite() && im_.allFinite(); }

    /// Selects a subset of rows, in the given order.
    ComplexTensor gather_rows(const std::vector<Eigen::Index>& rows) const;

    std::string shape_string() const;

    friend bool operator==(const ComplexTensor& a, const ComplexTensor& b) {
        return a.rows() == b.rows() && a.cols() == b.cols() && a.re_ == b.re_ && a.im_ == b.im_;
    }

private:
    RealMatrix re_;
    RealMatrix im_;
};

/// Complex product x * W by four real matrix products and two additions:
///   Re(xW) = Re(x)Re(W) - Im(x)Im(W)
///   Im(xW) = Im(x)Re(W) + Re(x)Im(W)
ComplexTensor cmatmul(const ComplexTensor& x, const ComplexTensor& w);

/// Triple-loop product built from cmul/cadd. Reference path for tests.
ComplexTensor cmatmul_naive(const ComplexTensor& x, const ComplexTensor& w);

/// Adds a 1 x cols row to every row of z.
ComplexTensor add_row_broadcast(const ComplexTensor& z, const ComplexTensor& row);

/// Real (2 rows x 2 cols) encoding with block [[a, -b], [b, a]] per entry.
struct AugmentedMatrix {
    RealMatrix data;
};

AugmentedMatrix to_augmented(const ComplexTensor& w);
ComplexTensor from_augmented(const AugmentedMatrix& m);

// ---------------------------------------------------------------------------
// Complex differentiability probe.
// ---------------------------------------------------------------------------

struct CauchyRiemannResult {
    bool holds = false;
    double residual_ux_vy = 0.0;  // |du/dx - dv/dy|
    double residual_uy_vx = 0.0;  // |du/dy + dv/dx|
};

using ComplexFunction = std::function<Complex(Complex)>;

/// Estimates the four partials of f = u + iv at z by central differences and
/// tests both Cauchy-Riemann equations against tol.
CauchyRiemannResult cauchy_riemann_check(const ComplexFunction& f, Complex z, double h = 1e-5,
                                         double tol = 1e-4);

}  // namespace cvnn

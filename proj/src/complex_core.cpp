#include "cvnn/complex_core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cvnn/errors.hpp"

namespace cvnn {

Complex cmul(Complex z1, Complex z2) noexcept {
    const double a = z1.real(), b = z1.imag();
    const double c = z2.real(), d = z2.imag();
    return {a * c - b * d, a * d + b * c};
}

Complex cadd(Complex z1, Complex z2) noexcept {
    return {z1.real() + z2.real(), z1.imag() + z2.imag()};
}

double wrap_phase(double phi) noexcept {
    constexpr double pi = std::numbers::pi;
    if (phi > -pi && phi <= pi) return phi;
    double wrapped = std::remainder(phi, 2.0 * pi);  // in [-pi, pi]
    if (wrapped <= -pi) wrapped += 2.0 * pi;
    return wrapped;
}

Polar to_polar(Complex z) noexcept {
    const double x = z.real(), y = z.imag();
    if (x == 0.0 && y == 0.0) return {0.0, 0.0};
    // atan2 returns -pi for (-0.0 imaginary, negative real); fold onto +pi.
    return {std::hypot(x, y), wrap_phase(std::atan2(y, x))};
}

Complex from_polar(Polar p) noexcept {
    return {p.r * std::cos(p.phi), p.r * std::sin(p.phi)};
}

Polar polar_mul(Polar p1, Polar p2) noexcept {
    return {p1.r * p2.r, wrap_phase(p1.phi + p2.phi)};
}

// ---------------------------------------------------------------------------

ComplexTensor::ComplexTensor(Eigen::Index rows, Eigen::Index cols)
    : re_(RealMatrix::Zero(rows, cols)), im_(RealMatrix::Zero(rows, cols)) {}

ComplexTensor::ComplexTensor(RealMatrix re, RealMatrix im) : re_(std::move(re)), im_(std::move(im)) {
    if (re_.rows() != im_.rows() || re_.cols() != im_.cols()) {
        std::ostringstream os;
        os << "real plane " << re_.rows() << "x" << re_.cols() << " and imaginary plane " << im_.rows()
           << "x" << im_.cols() << " differ in shape";
        throw DimensionError(os.str());
    }
}

ComplexTensor ComplexTensor::from_real(RealMatrix re) {
    RealMatrix im = RealMatrix::Zero(re.rows(), re.cols());
    return {std::move(re), std::move(im)};
}

ComplexTensor ComplexTensor::gather_rows(const std::vector<Eigen::Index>& rows) const {
    ComplexTensor out(static_cast<Eigen::Index>(rows.size()), cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.re_.row(static_cast<Eigen::Index>(i)) = re_.row(rows[i]);
        out.im_.row(static_cast<Eigen::Index>(i)) = im_.row(rows[i]);
    }
    return out;
}

std::string ComplexTensor::shape_string() const {
    return std::to_string(rows()) + "x" + std::to_string(cols());
}

namespace {

void require_inner(const ComplexTensor& x, const ComplexTensor& w) {
    if (x.cols() != w.rows()) {
        throw DimensionError("cmatmul: cannot multiply " + x.shape_string() + " by " + w.shape_string());
    }
}

}  // namespace

ComplexTensor cmatmul(const ComplexTensor& x, const ComplexTensor& w) {
    require_inner(x, w);
    RealMatrix re = x.re() * w.re();
    re.noalias() -= x.im() * w.im();
    RealMatrix im = x.im() * w.re();
    im.noalias() += x.re() * w.im();
    return {std::move(re), std::move(im)};
}

ComplexTensor cmatmul_naive(const ComplexTensor& x, const ComplexTensor& w) {
    require_inner(x, w);
    ComplexTensor out(x.rows(), w.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            Complex acc{0.0, 0.0};
            for (Eigen::Index k = 0; k < x.cols(); ++k) acc = cadd(acc, cmul(x(i, k), w(k, j)));
            out.set(i, j, acc);
        }
    }
    return out;
}

ComplexTensor add_row_broadcast(const ComplexTensor& z, const ComplexTensor& row) {
    if (row.rows() != 1 || row.cols() != z.cols()) {
        throw DimensionError("cannot broadcast " + row.shape_string() + " over " + z.shape_string());
    }
    RealMatrix re = z.re().rowwise() + row.re().row(0);
    RealMatrix im = z.im().rowwise() + row.im().row(0);
    return {std::move(re), std::move(im)};
}

AugmentedMatrix to_augmented(const ComplexTensor& w) {
    RealMatrix m(2 * w.rows(), 2 * w.cols());
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            const double a = w.re()(i, j), b = w.im()(i, j);
            m(2 * i, 2 * j) = a;
            m(2 * i, 2 * j + 1) = -b;
            m(2 * i + 1, 2 * j) = b;
            m(2 * i + 1, 2 * j + 1) = a;
        }
    }
    return {std::move(m)};
}

ComplexTensor from_augmented(const AugmentedMatrix& m) {
    if (m.data.rows() % 2 != 0 || m.data.cols() % 2 != 0) {
        throw DimensionError("augmented matrix must have even dimensions");
    }
    ComplexTensor out(m.data.rows() / 2, m.data.cols() / 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            const double a = m.data(2 * i, 2 * j), b = m.data(2 * i + 1, 2 * j);
            if (m.data(2 * i, 2 * j + 1) != -b || m.data(2 * i + 1, 2 * j + 1) != a) {
                throw ValidationError("block (" + std::to_string(i) + ", " + std::to_string(j) +
                                      ") is not of the form [[a, -b], [b, a]]");
            }
            out.set(i, j, {a, b});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

CauchyRiemannResult cauchy_riemann_check(const ComplexFunction& f, Complex z, double h, double tol) {
    if (!(h > 0.0)) throw ValidationError("cauchy_riemann_check: step h must be positive");

    auto eval = [&](Complex p) {
        const Complex v = f(p);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream os;
            os << "cauchy_riemann_check: non-finite value at " << p;
            throw EvaluationError(os.str());
        }
        return v;
    };

    const Complex fxp = eval(z + Complex{h, 0.0});
    const Complex fxm = eval(z - Complex{h, 0.0});
    const Complex fyp = eval(z + Complex{0.0, h});
    const Complex fym = eval(z - Complex{0.0, h});

    const double ux = (fxp.real() - fxm.real()) / (2.0 * h);
    const double vx = (fxp.imag() - fxm.imag()) / (2.0 * h);
    const double uy = (fyp.real() - fym.real()) / (2.0 * h);
    const double vy = (fyp.imag() - fym.imag()) / (2.0 * h);

    CauchyRiemannResult r;
    r.residual_ux_vy = std::abs(ux - vy);
    r.residual_uy_vx = std::abs(uy + vx);
    r.holds = r.residual_ux_vy <= tol && r.residual_uy_vx <= tol;
    return r;
}

}  // namespace cvnn

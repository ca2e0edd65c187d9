#include "cvnn/activations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvnn/errors.hpp"

namespace cvnn {

namespace {

constexpr double kPoleGuard = 1e-12;

double logistic(double s) noexcept {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

double relu(double v) noexcept { return v > 0.0 ? v : 0.0; }
double step(double v) noexcept { return v > 0.0 ? 1.0 : 0.0; }

}  // namespace

std::string_view activation_name(Activation a) noexcept {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::tanh: return "tanh";
        case Activation::split_relu: return "relu";
        case Activation::intensity: return "abs2";
        case Activation::magnitude: return "abs";
        case Activation::sigmoid_intensity: return "sigmoid_abs2";
        case Activation::softmax_intensity: return "softmax_abs2";
    }
    return "?";
}

Activation parse_activation(std::string_view name) {
    for (Activation a : {Activation::identity, Activation::tanh, Activation::split_relu, Activation::intensity,
                         Activation::magnitude, Activation::sigmoid_intensity, Activation::softmax_intensity}) {
        if (activation_name(a) == name) return a;
    }
    throw ValidationError("unknown activation '" + std::string(name) +
                          "' (expected identity, tanh, relu, abs2, abs, sigmoid_abs2 or softmax_abs2)");
}

bool is_output_head(Activation a) noexcept {
    return a == Activation::sigmoid_intensity || a == Activation::softmax_intensity;
}

bool is_real_valued(Activation a) noexcept {
    return a == Activation::intensity || a == Activation::magnitude || is_output_head(a);
}

// ---------------------------------------------------------------------------

Complex ctanh(Complex z) {
    const double x = z.real(), y = z.imag();
    if (y == 0.0) return {std::tanh(x), 0.0};
    // tanh(x+iy) = (sinh 2x + i sin 2y) / (cosh 2x + cos 2y)
    const double denom = std::cosh(2.0 * x) + std::cos(2.0 * y);
    if (std::abs(denom) < kPoleGuard) {
        std::ostringstream os;
        os.precision(17);
        os << "ctanh: argument " << z << " is at a pole of tanh (denominator " << denom << ")";
        throw PoleError(os.str());
    }
    return std::tanh(z);
}

Complex split_relu(Complex z) noexcept { return {relu(z.real()), relu(z.imag())}; }

double intensity(Complex z) noexcept { return z.real() * z.real() + z.imag() * z.imag(); }

double magnitude(Complex z) noexcept { return std::hypot(z.real(), z.imag()); }

double sigmoid_intensity(Complex z) noexcept { return logistic(intensity(z)); }

std::vector<double> softmax_intensity(std::span<const Complex> z) {
    if (z.empty()) throw ValidationError("softmax_intensity: empty input");
    std::vector<double> s(z.size());
    std::transform(z.begin(), z.end(), s.begin(), intensity);
    const double top = *std::max_element(s.begin(), s.end());
    double total = 0.0;
    for (double& v : s) {
        v = std::exp(v - top);
        total += v;
    }
    for (double& v : s) v /= total;
    return s;
}

RealJacobian activation_jacobian(Activation a, Complex z) {
    const double x = z.real(), y = z.imag();
    switch (a) {
        case Activation::identity: return {1.0, 0.0, 0.0, 1.0};
        case Activation::tanh: {
            // Holomorphic: f' = 1 - tanh^2 = a + ib gives [[a, -b], [b, a]].
            const Complex t = ctanh(z);
            const Complex d = 1.0 - t * t;
            return {d.real(), -d.imag(), d.imag(), d.real()};
        }
        case Activation::split_relu: return {step(x), 0.0, 0.0, step(y)};
        case Activation::intensity: return {2.0 * x, 2.0 * y, 0.0, 0.0};
        case Activation::magnitude: {
            const double r = magnitude(z);
            if (r == 0.0) return {0.0, 0.0, 0.0, 0.0};
            return {x / r, y / r, 0.0, 0.0};
        }
        case Activation::sigmoid_intensity:
        case Activation::softmax_intensity: break;
    }
    throw ValidationError("activation_jacobian: '" + std::string(activation_name(a)) + "' is not elementwise");
}

WirtingerPartials activation_wirtinger(Activation a, Complex z) {
    switch (a) {
        case Activation::identity: return {{1.0, 0.0}, {0.0, 0.0}};
        case Activation::tanh: {
            const Complex t = ctanh(z);
            return {1.0 - t * t, {0.0, 0.0}};
        }
        case Activation::split_relu: {
            // f = relu(x) + i relu(y); d/dz = (d/dx - i d/dy)/2, d/dzbar = (d/dx + i d/dy)/2
            const double px = step(z.real()), py = step(z.imag());
            return {{0.5 * (px + py), 0.0}, {0.5 * (px - py), 0.0}};
        }
        case Activation::intensity: return {std::conj(z), z};  // f = z * conj(z)
        case Activation::magnitude: {
            const double r = std::abs(z);
            if (r == 0.0) return {{0.0, 0.0}, {0.0, 0.0}};
            return {std::conj(z) / (2.0 * r), z / (2.0 * r)};
        }
        case Activation::sigmoid_intensity:
        case Activation::softmax_intensity: break;
    }
    throw ValidationError("activation_wirtinger: '" + std::string(activation_name(a)) + "' is not elementwise");
}

// ---------------------------------------------------------------------------

ComplexTensor activate(Activation a, const ComplexTensor& z) {
    const Eigen::Index rows = z.rows(), cols = z.cols();
    switch (a) {
        case Activation::identity: return z;
        case Activation::split_relu: {
            RealMatrix re = z.re().cwiseMax(0.0);
            RealMatrix im = z.im().cwiseMax(0.0);
            return {std::move(re), std::move(im)};
        }
        case Activation::intensity: {
            RealMatrix re = z.re().array().square() + z.im().array().square();
            return ComplexTensor::from_real(std::move(re));
        }
        case Activation::sigmoid_intensity: {
            RealMatrix re = (z.re().array().square() + z.im().array().square()).unaryExpr(&logistic);
            return ComplexTensor::from_real(std::move(re));
        }
        case Activation::softmax_intensity: {
            RealMatrix s = z.re().array().square() + z.im().array().square();
            for (Eigen::Index r = 0; r < rows; ++r) {
                auto row = s.row(r);
                row.array() = (row.array() - row.maxCoeff()).exp();
                row /= row.sum();
            }
            return ComplexTensor::from_real(std::move(s));
        }
        case Activation::tanh:
        case Activation::magnitude: break;
    }
    ComplexTensor out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const Complex v = z(r, c);
            if (a == Activation::tanh) {
                out.set(r, c, ctanh(v));
            } else {
                out.re()(r, c) = magnitude(v);
            }
        }
    }
    return out;
}

ComplexTensor activate_backward(Activation a, const ComplexTensor& z, const ComplexTensor& out,
                                const ComplexTensor& grad_out) {
    if (grad_out.rows() != z.rows() || grad_out.cols() != z.cols()) {
        throw DimensionError("activate_backward: gradient " + grad_out.shape_string() + " vs input " +
                             z.shape_string());
    }
    const Eigen::Index rows = z.rows(), cols = z.cols();
    switch (a) {
        case Activation::identity: return grad_out;
        case Activation::sigmoid_intensity: {
            // dL/ds = g p (1 - p), s = x^2 + y^2
            RealMatrix ds = grad_out.re().array() * out.re().array() * (1.0 - out.re().array());
            RealMatrix re = 2.0 * z.re().array() * ds.array();
            RealMatrix im = 2.0 * z.im().array() * ds.array();
            return {std::move(re), std::move(im)};
        }
        case Activation::softmax_intensity: {
            // dL/ds_j = p_j (g_j - sum_k g_k p_k)
            const auto& p = out.re();
            const auto& g = grad_out.re();
            Eigen::VectorXd dot = (g.array() * p.array()).rowwise().sum();
            RealMatrix ds = p.array() * (g.colwise() - dot).array();
            RealMatrix re = 2.0 * z.re().array() * ds.array();
            RealMatrix im = 2.0 * z.im().array() * ds.array();
            return {std::move(re), std::move(im)};
        }
        case Activation::split_relu: {
            RealMatrix re = (z.re().array() > 0.0).select(grad_out.re(), 0.0);
            RealMatrix im = (z.im().array() > 0.0).select(grad_out.im(), 0.0);
            return {std::move(re), std::move(im)};
        }
        case Activation::intensity: {
            RealMatrix re = 2.0 * z.re().array() * grad_out.re().array();
            RealMatrix im = 2.0 * z.im().array() * grad_out.re().array();
            return {std::move(re), std::move(im)};
        }
        case Activation::tanh: {
            // f' = 1 - out^2 = d_re + i d_im
            const auto a_ = out.re().array();
            const auto b_ = out.im().array();
            const Eigen::ArrayXXd d_re = 1.0 - a_.square() + b_.square();
            const Eigen::ArrayXXd d_im = -2.0 * a_ * b_;
            const auto gu = grad_out.re().array();
            const auto gv = grad_out.im().array();
            RealMatrix re = gu * d_re + gv * d_im;
            RealMatrix im = gv * d_re - gu * d_im;
            return {std::move(re), std::move(im)};
        }
        default: break;
    }
    ComplexTensor dz(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const RealJacobian j = activation_jacobian(a, z(r, c));
            const double gu = grad_out.re()(r, c), gv = grad_out.im()(r, c);
            dz.re()(r, c) = gu * j.ux + gv * j.vx;
            dz.im()(r, c) = gu * j.uy + gv * j.vy;
        }
    }
    return dz;
}

}  // namespace cvnn

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvnn/complex_core.hpp"

namespace cvnn {

enum class Activation {
    identity,
    tanh,
    split_relu,
    intensity,  // |z|^2
    magnitude,  // |z|
    sigmoid_intensity,
    softmax_intensity,
};

/// Config-file name: identity, tanh, relu, abs2, abs, sigmoid_abs2, softmax_abs2.
std::string_view activation_name(Activation a) noexcept;

/// Inverse of activation_name; throws ValidationError for unknown names.
Activation parse_activation(std::string_view name);

/// sigmoid_intensity and softmax_intensity may only close a network.
bool is_output_head(Activation a) noexcept;

/// True when the activation maps C -> R (imaginary plane of the result is zero).
bool is_real_valued(Activation a) noexcept;

// ---------------------------------------------------------------------------
// Scalar forms.
// ---------------------------------------------------------------------------

/// Complex hyperbolic tangent. Throws PoleError when |cosh 2x + cos 2y| < 1e-12,
/// i.e. z is within rounding distance of i(pi/2 + k pi). Real inputs return
/// the real tanh exactly.
Complex ctanh(Complex z);

/// max(0, Re z) + i max(0, Im z)
Complex split_relu(Complex z) noexcept;

double intensity(Complex z) noexcept;
double magnitude(Complex z) noexcept;
double sigmoid_intensity(Complex z) noexcept;

/// exp(|z_j|^2) / sum_i exp(|z_i|^2), with max subtraction.
std::vector<double> softmax_intensity(std::span<const Complex> z);

/// Real-pair Jacobian of an elementwise activation f = u + iv at z.
struct RealJacobian {
    double ux, uy, vx, vy;
};

/// Wirtinger partials (df/dz, df/dzbar) of an elementwise activation.
struct WirtingerPartials {
    Complex dz;
    Complex dzbar;
};

/// Valid for the elementwise activations (not for the two output heads).
/// Subgradient conventions: relu derivative at 0 is 0, magnitude at 0 is 0.
RealJacobian activation_jacobian(Activation a, Complex z);

/// Closed-form Wirtinger partials, derived independently of activation_jacobian.
WirtingerPartials activation_wirtinger(Activation a, Complex z);

// ---------------------------------------------------------------------------
// Tensor forms. Heads operate row-wise on a batch.
// ---------------------------------------------------------------------------

ComplexTensor activate(Activation a, const ComplexTensor& z);

/// Given dL/d(out) in split planes, returns dL/dz in split planes.
ComplexTensor activate_backward(Activation a, const ComplexTensor& z, const ComplexTensor& out,
                                const ComplexTensor& grad_out);

}  // namespace cvnn

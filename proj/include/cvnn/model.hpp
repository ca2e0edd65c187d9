#pragma once

#include <functional>
#include <vector>

#include "cvnn/activations.hpp"
#include "cvnn/capacity.hpp"
#include "cvnn/complex_core.hpp"
#include "cvnn/init.hpp"
#include "cvnn/loss.hpp"

namespace cvnn {

/// o = activation(x W + b), W is n_in x n_out, b is 1 x n_out.
struct DenseLayer {
    ComplexTensor weights;
    ComplexTensor bias;
    Activation activation = Activation::identity;
};

/// Ordered dense layers. In a real-domain model every imaginary plane is zero
/// and stays zero: forward and backward only touch the real planes.
struct Model {
    Domain domain = Domain::complex;
    std::vector<DenseLayer> layers;

    Eigen::Index input_dim() const { return layers.front().weights.rows(); }
    Eigen::Index output_dim() const { return layers.back().weights.cols(); }
    void validate() const;
};

/// Builds a model for a plan: hidden layers use `hidden`, the output layer uses
/// `head`. Weights follow `init` (real-domain plans draw from init_real,
/// complex plans from init_complex), each layer with its own derived seed.
/// Biases start at zero.
Model build_model(const NetworkPlan& plan, Activation hidden, Activation head, const InitSpec& init);

/// Copy of a real-domain model re-tagged as complex, imaginary planes zero.
Model to_complex_domain(const Model& real_model);

// ---------------------------------------------------------------------------
// Forward / backward in the real-pair basis.
// ---------------------------------------------------------------------------

struct LayerRecord {
    ComplexTensor input;
    ComplexTensor pre;   // z = x W + b
    ComplexTensor post;  // o = activation(z)
};

struct Tape {
    std::vector<LayerRecord> records;
    const ComplexTensor& output() const { return records.back().post; }
};

LayerRecord dense_forward(const ComplexTensor& x, const DenseLayer& layer, Domain domain = Domain::complex);

Tape forward(const Model& model, const ComplexTensor& x);

/// Output of the last layer without keeping intermediates.
ComplexTensor predict(const Model& model, const ComplexTensor& x);

/// Gradients of a real scalar loss. Each tensor holds dL/dRe in re() and
/// dL/dIm in im().
struct LayerGradient {
    ComplexTensor weights;
    ComplexTensor bias;
};

struct GradientSet {
    std::vector<LayerGradient> layers;
    ComplexTensor input;  // dL/dx for the batch fed to forward
};

/// Reverse accumulation through the real-pair graph. dL_dout has the shape of
/// the model output; its imaginary plane is ignored for real-valued heads.
GradientSet backward(const Tape& tape, const Model& model, const ComplexTensor& dL_dout);
GradientSet backward(const Tape& tape, const Model& model, const RealMatrix& dL_dout);

// ---------------------------------------------------------------------------
// Wirtinger calculus.
// ---------------------------------------------------------------------------

struct WirtingerGradient {
    Complex df_dz;
    Complex df_dzbar;
};

/// df/dz = (f_x - i f_y)/2, df/dzbar = (f_x + i f_y)/2 for real-valued f,
/// partials by central differences.
WirtingerGradient wirtinger_grads(const std::function<double(Complex)>& f, Complex z, double h = 1e-6);

using CMatrix = Eigen::MatrixXcd;

/// Cogradients dL/d(conj W) and dL/d(conj b) per layer.
struct LayerCogradient {
    CMatrix weights;
    CMatrix bias;
};

/// Backpropagation carried out on cogradients with the complex chain rule
///   dL/dzbar = conj(dL/dobar) * do/dzbar + dL/dobar * conj(do/dz),
///   dL/dWbar = x^H dL/dzbar,
/// independently of the real-pair engine. dL_dout is the real gradient of the
/// loss with respect to the (real-valued) model output.
std::vector<LayerCogradient> wirtinger_backward(const Tape& tape, const Model& model, const RealMatrix& dL_dout);

struct ConsistencyReport {
    double max_relative_deviation = 0.0;
    bool seam_hit = false;  // a pre-activation sat on a non-differentiable seam
    std::size_t compared = 0;
};

/// Compares real-pair gradients against 2 dL/dWbar read as (Re, Im) for every
/// parameter of the model on the batch (x, labels).
ConsistencyReport wirtinger_consistency(const Model& model, const ComplexTensor& x, const RealMatrix& labels,
                                        LossKind loss = LossKind::categorical_ce);

/// True when some pre-activation of `tape` lies within `margin` of a seam of
/// its activation (relu: either axis, magnitude: the origin).
bool touches_seam(const Tape& tape, const Model& model, double margin = 1e-3);

}  // namespace cvnn

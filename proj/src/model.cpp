#include "cvnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvnn/errors.hpp"

namespace cvnn {

void Model::validate() const {
    if (layers.empty()) throw ConsistencyError("model has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.bias.rows() != 1 || l.bias.cols() != l.weights.cols()) {
            throw ConsistencyError("layer " + std::to_string(i) + ": bias " + l.bias.shape_string() +
                                   " does not match weights " + l.weights.shape_string());
        }
        if (i > 0 && layers[i - 1].weights.cols() != l.weights.rows()) {
            throw ConsistencyError("layer " + std::to_string(i) + ": input width " + std::to_string(l.weights.rows()) +
                                   " does not chain from " + std::to_string(layers[i - 1].weights.cols()));
        }
        if (is_output_head(l.activation) && i + 1 != layers.size()) {
            throw ConsistencyError("layer " + std::to_string(i) + ": output head used in a hidden layer");
        }
    }
}

Model build_model(const NetworkPlan& plan, Activation hidden, Activation head, const InitSpec& init) {
    plan.validate();
    if (is_output_head(hidden)) throw ValidationError("build_model: output head used as hidden activation");

    std::vector<Count> dims;
    dims.push_back(plan.input_dim);
    dims.insert(dims.end(), plan.hidden_widths.begin(), plan.hidden_widths.end());
    dims.push_back(plan.output_dim);

    Model model;
    model.domain = plan.domain;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        InitSpec spec = init;
        spec.seed = layer_seed(init.seed, l);
        DenseLayer layer;
        if (plan.domain == Domain::complex) {
            layer.weights = init_complex(dims[l], dims[l + 1], spec);
        } else {
            layer.weights = ComplexTensor::from_real(init_real(dims[l], dims[l + 1], spec));
        }
        layer.bias = init_zeros(1, dims[l + 1]);
        layer.activation = (l + 2 == dims.size()) ? head : hidden;
        model.layers.push_back(std::move(layer));
    }
    return model;
}

Model to_complex_domain(const Model& real_model) {
    Model m = real_model;
    m.domain = Domain::complex;
    for (auto& l : m.layers) {
        l.weights.im().setZero();
        l.bias.im().setZero();
    }
    return m;
}

// ---------------------------------------------------------------------------

LayerRecord dense_forward(const ComplexTensor& x, const DenseLayer& layer, Domain domain) {
    if (x.cols() != layer.weights.rows()) {
        throw DimensionError("dense_forward: input " + x.shape_string() + " vs weights " + layer.weights.shape_string());
    }
    LayerRecord rec;
    rec.input = x;
    if (domain == Domain::real) {
        RealMatrix re = x.re() * layer.weights.re();
        re.rowwise() += layer.bias.re().row(0);
        rec.pre = ComplexTensor::from_real(std::move(re));
    } else {
        rec.pre = add_row_broadcast(cmatmul(x, layer.weights), layer.bias);
    }
    rec.post = activate(layer.activation, rec.pre);
    return rec;
}

Tape forward(const Model& model, const ComplexTensor& x) {
    Tape tape;
    tape.records.reserve(model.layers.size());
    const ComplexTensor* in = &x;
    for (const auto& layer : model.layers) {
        tape.records.push_back(dense_forward(*in, layer, model.domain));
        in = &tape.records.back().post;
    }
    return tape;
}

ComplexTensor predict(const Model& model, const ComplexTensor& x) {
    ComplexTensor h = x;
    for (const auto& layer : model.layers) h = dense_forward(h, layer, model.domain).post;
    return h;
}

namespace {

void check_tape(const Tape& tape, const Model& model) {
    if (tape.records.size() != model.layers.size()) {
        throw ConsistencyError("tape has " + std::to_string(tape.records.size()) + " records but model has " +
                               std::to_string(model.layers.size()) + " layers");
    }
    for (std::size_t i = 0; i < tape.records.size(); ++i) {
        const auto& r = tape.records[i];
        const auto& w = model.layers[i].weights;
        if (r.input.cols() != w.rows() || r.pre.cols() != w.cols()) {
            throw ConsistencyError("tape record " + std::to_string(i) + " does not match layer shape " +
                                   w.shape_string());
        }
    }
}

}  // namespace

GradientSet backward(const Tape& tape, const Model& model, const ComplexTensor& dL_dout) {
    check_tape(tape, model);
    const ComplexTensor& out = tape.output();
    if (dL_dout.rows() != out.rows() || dL_dout.cols() != out.cols()) {
        throw DimensionError("backward: gradient " + dL_dout.shape_string() + " vs output " + out.shape_string());
    }

    const bool real = model.domain == Domain::real;
    GradientSet grads;
    grads.layers.resize(model.layers.size());
    ComplexTensor g = dL_dout;
    if (real) g.im().setZero();

    for (std::size_t i = model.layers.size(); i-- > 0;) {
        const auto& rec = tape.records[i];
        const auto& layer = model.layers[i];
        ComplexTensor gz = activate_backward(layer.activation, rec.pre, rec.post, g);
        const auto& xr = rec.input.re();
        const auto& xi = rec.input.im();
        const auto& wr = layer.weights.re();
        const auto& wi = layer.weights.im();

        LayerGradient& lg = grads.layers[i];
        if (real) {
            gz.im().setZero();
            lg.weights = ComplexTensor::from_real(xr.transpose() * gz.re());
            lg.bias = ComplexTensor::from_real(gz.re().colwise().sum());
            g = ComplexTensor::from_real(gz.re() * wr.transpose());
        } else {
            // zr = xr wr - xi wi,  zi = xi wr + xr wi
            RealMatrix dwr = xr.transpose() * gz.re();
            dwr.noalias() += xi.transpose() * gz.im();
            RealMatrix dwi = xr.transpose() * gz.im();
            dwi.noalias() -= xi.transpose() * gz.re();
            lg.weights = ComplexTensor(std::move(dwr), std::move(dwi));
            lg.bias = ComplexTensor(gz.re().colwise().sum(), gz.im().colwise().sum());

            RealMatrix dxr = gz.re() * wr.transpose();
            dxr.noalias() += gz.im() * wi.transpose();
            RealMatrix dxi = gz.im() * wr.transpose();
            dxi.noalias() -= gz.re() * wi.transpose();
            g = ComplexTensor(std::move(dxr), std::move(dxi));
        }
    }
    grads.input = std::move(g);
    return grads;
}

GradientSet backward(const Tape& tape, const Model& model, const RealMatrix& dL_dout) {
    return backward(tape, model, ComplexTensor::from_real(dL_dout));
}

// ---------------------------------------------------------------------------

WirtingerGradient wirtinger_grads(const std::function<double(Complex)>& f, Complex z, double h) {
    if (!(h > 0.0)) throw ValidationError("wirtinger_grads: step h must be positive");
    auto eval = [&](Complex p) {
        const double v = f(p);
        if (!std::isfinite(v)) throw EvaluationError("wirtinger_grads: non-finite value near the probe point");
        return v;
    };
    const double fx = (eval(z + Complex{h, 0.0}) - eval(z - Complex{h, 0.0})) / (2.0 * h);
    const double fy = (eval(z + Complex{0.0, h}) - eval(z - Complex{0.0, h})) / (2.0 * h);
    return {Complex{0.5 * fx, -0.5 * fy}, Complex{0.5 * fx, 0.5 * fy}};
}

namespace {

CMatrix to_cmatrix(const ComplexTensor& t) {
    CMatrix m(t.rows(), t.cols());
    m.real() = t.re();
    m.imag() = t.im();
    return m;
}

}  // namespace

std::vector<LayerCogradient> wirtinger_backward(const Tape& tape, const Model& model, const RealMatrix& dL_dout) {
    check_tape(tape, model);
    const ComplexTensor& out = tape.output();
    if (dL_dout.rows() != out.rows() || dL_dout.cols() != out.cols()) {
        throw DimensionError("wirtinger_backward: gradient shape does not match model output");
    }

    std::vector<LayerCogradient> cograds(model.layers.size());
    // Cogradient of the output: dL/d(conj o) = (dL/dRe o + i dL/dIm o) / 2.
    CMatrix c_out = dL_dout.cast<Complex>() * 0.5;

    for (std::size_t i = model.layers.size(); i-- > 0;) {
        const auto& rec = tape.records[i];
        const Activation act = model.layers[i].activation;
        const CMatrix z = to_cmatrix(rec.pre);
        CMatrix c_z(z.rows(), z.cols());

        if (is_output_head(act)) {
            // Real output p over s = z conj(z): dL/dzbar_j = dL/ds_j * z_j.
            const RealMatrix p = rec.post.re();
            const RealMatrix dLdp = 2.0 * c_out.real();
            RealMatrix dLds;
            if (act == Activation::softmax_intensity) {
                dLds.resize(p.rows(), p.cols());
                for (Eigen::Index r = 0; r < p.rows(); ++r) {
                    for (Eigen::Index j = 0; j < p.cols(); ++j) {
                        double acc = 0.0;
                        for (Eigen::Index k = 0; k < p.cols(); ++k) {
                            const double jac = (k == j ? p(r, k) : 0.0) - p(r, k) * p(r, j);
                            acc += dLdp(r, k) * jac;
                        }
                        dLds(r, j) = acc;
                    }
                }
            } else {
                dLds = dLdp.array() * p.array() * (1.0 - p.array());
            }
            c_z = dLds.cast<Complex>().cwiseProduct(z);
        } else {
            for (Eigen::Index r = 0; r < z.rows(); ++r) {
                for (Eigen::Index c = 0; c < z.cols(); ++c) {
                    const WirtingerPartials w = activation_wirtinger(act, z(r, c));
                    const Complex co = c_out(r, c);
                    c_z(r, c) = std::conj(co) * w.dzbar + co * std::conj(w.dz);
                }
            }
        }

        const CMatrix x = to_cmatrix(rec.input);
        const CMatrix wmat = to_cmatrix(model.layers[i].weights);
        cograds[i].weights = x.adjoint() * c_z;
        cograds[i].bias = c_z.colwise().sum();
        c_out = c_z * wmat.adjoint();
    }
    return cograds;
}

bool touches_seam(const Tape& tape, const Model& model, double margin) {
    const bool real = model.domain == Domain::real;
    for (std::size_t i = 0; i < tape.records.size(); ++i) {
        const Activation act = model.layers[i].activation;
        const auto& z = tape.records[i].pre;
        if (act == Activation::split_relu) {
            if ((z.re().array().abs() < margin).any()) return true;
            if (!real && (z.im().array().abs() < margin).any()) return true;
        } else if (act == Activation::magnitude) {
            if (((z.re().array().square() + z.im().array().square()).sqrt() < margin).any()) return true;
        }
    }
    return false;
}

ConsistencyReport wirtinger_consistency(const Model& model, const ComplexTensor& x, const RealMatrix& labels,
                                        LossKind loss) {
    const Tape tape = forward(model, x);
    const RealMatrix probs = tape.output().re();
    const RealMatrix dL = loss_grad(loss, probs, labels);
    const GradientSet pair_grads = backward(tape, model, dL);
    const auto cograds = wirtinger_backward(tape, model, dL);

    ConsistencyReport report;
    report.seam_hit = touches_seam(tape, model);
    const bool real = model.domain == Domain::real;

    auto compare = [&](const RealMatrix& pair, const RealMatrix& wirt) {
        for (Eigen::Index k = 0; k < pair.size(); ++k) {
            const double a = pair.data()[k];
            const double b = wirt.data()[k];
            const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
            report.max_relative_deviation = std::max(report.max_relative_deviation, std::abs(a - b) / denom);
            ++report.compared;
        }
    };

    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        // Steepest-descent direction 2 dL/dWbar, read as (dL/dRe, dL/dIm).
        const CMatrix w2 = 2.0 * cograds[i].weights;
        const CMatrix b2 = 2.0 * cograds[i].bias;
        compare(pair_grads.layers[i].weights.re(), w2.real());
        compare(pair_grads.layers[i].bias.re(), b2.real());
        if (!real) {
            compare(pair_grads.layers[i].weights.im(), w2.imag());
            compare(pair_grads.layers[i].bias.im(), b2.imag());
        }
    }
    return report;
}

}  // namespace cvnn

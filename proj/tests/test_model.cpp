#include <cmath>

#include "doctest.h"
#include "cvnn/errors.hpp"
#include "cvnn/model.hpp"
#include "cvnn/training.hpp"
#include "gradcheck.hpp"

using namespace cvnn;
using namespace cvnn::testing;

namespace {

DenseLayer scalar_layer(Complex w, Activation a = Activation::identity) {
    DenseLayer l{ComplexTensor(1, 1), ComplexTensor(1, 1), a};
    l.weights.set(0, 0, w);
    return l;
}

ComplexTensor scalar(Complex z) {
    ComplexTensor t(1, 1);
    t.set(0, 0, z);
    return t;
}

// Draws inputs until the tape keeps every pre-activation off the seams.
ComplexTensor off_seam_input(const Model& model, Eigen::Index rows, Rng& rng) {
    for (;;) {
        ComplexTensor x = random_tensor(rows, model.input_dim(), rng, 1.0, model.domain == Domain::real);
        if (!touches_seam(forward(model, x), model)) return x;
    }
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("dense_forward scalar cases") {
    const LayerRecord rec = dense_forward(scalar({1, 0}), scalar_layer({1, 1}));
    CHECK(rec.post(0, 0) == Complex(1, 1));

    Rng rng(1);
    DenseLayer layer{random_tensor(3, 2, rng), random_tensor(1, 2, rng), Activation::identity};
    const LayerRecord zero = dense_forward(ComplexTensor(4, 3), layer);
    for (Eigen::Index r = 0; r < 4; ++r) {
        CHECK(zero.pre.re().row(r) == layer.bias.re());
        CHECK(zero.pre.im().row(r) == layer.bias.im());
    }

    const ComplexTensor x = random_tensor(5, 3, rng, 1.0, true);
    const LayerRecord real_in = dense_forward(x, layer);
    const RealMatrix expect = (x.re() * layer.weights.im()).rowwise() + layer.bias.im().row(0);
    CHECK((real_in.pre.im() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("backward hand-expanded cases") {
    // loss = Re(o), o = x w with x = 1: dRe(w) = 1, dIm(w) = 0
    Model id{Domain::complex, {scalar_layer({0.3, -0.7})}};
    const Tape t1 = forward(id, scalar({1, 0}));
    const GradientSet g1 = backward(t1, id, ComplexTensor(RealMatrix::Ones(1, 1), RealMatrix::Zero(1, 1)));
    CHECK(g1.layers[0].weights.re()(0, 0) == 1.0);
    CHECK(g1.layers[0].weights.im()(0, 0) == 0.0);

    // loss = |o|^2 with o = x w, x = 1, w = a + ib: gradient (2a, 2b)
    Model sq{Domain::complex, {scalar_layer({0.3, -0.7}, Activation::intensity)}};
    const Tape t2 = forward(sq, scalar({1, 0}));
    CHECK(t2.output()(0, 0).real() == doctest::Approx(0.58));
    const GradientSet g2 = backward(t2, sq, RealMatrix::Ones(1, 1));
    CHECK(g2.layers[0].weights.re()(0, 0) == doctest::Approx(0.6));
    CHECK(g2.layers[0].weights.im()(0, 0) == doctest::Approx(-1.4));
}

TEST_CASE("two-layer gradients match finite differences") {
    Rng rng(2);
    for (Activation hidden : {Activation::identity, Activation::tanh, Activation::split_relu, Activation::intensity,
                              Activation::magnitude}) {
        for (Domain d : {Domain::real, Domain::complex}) {
            Model model = build_model({d, 5, {8}, 3, true}, hidden, Activation::softmax_intensity,
                                      {d == Domain::real ? InitScheme::real_glorot : InitScheme::complex_variance_scaled,
                                       FanMode::fan_in, rng.next_u64()});
            randomize_biases(model, rng);
            const ComplexTensor x = off_seam_input(model, 4, rng);
            const RealMatrix y = random_one_hot(4, 3, rng);
            const GradCheck gc = finite_difference_check(model, x, y, LossKind::categorical_ce);
            CAPTURE(activation_name(hidden));
            CAPTURE(domain_name(d));
            CAPTURE(gc.worst);
            CHECK(gc.max_rel_error < 1e-5);
        }
    }
}

TEST_CASE("sigmoid head gradients") {
    Rng rng(3);
    Model model = build_model({Domain::complex, 4, {6}, 2, true}, Activation::tanh, Activation::sigmoid_intensity,
                              {InitScheme::complex_variance_scaled, FanMode::fan_in, 5});
    randomize_biases(model, rng);
    RealMatrix y = RealMatrix::Zero(3, 2);
    y(0, 0) = y(1, 1) = y(2, 0) = y(2, 1) = 1.0;
    const GradCheck gc = finite_difference_check(model, random_tensor(3, 4, rng), y, LossKind::binary_ce);
    CAPTURE(gc.worst);
    CHECK(gc.max_rel_error < 1e-5);
}

TEST_CASE("saturated heads are not generic points") {
    Model model = build_model({Domain::complex, 2, {1}, 1, true}, Activation::identity, Activation::sigmoid_intensity,
                              {InitScheme::zeros, FanMode::fan_in, 0});
    model.layers[0].weights.set(0, 0, {1.0, 0.0});
    model.layers[1].weights.set(0, 0, {1.0, 0.0});
    ComplexTensor x = ComplexTensor::zeros(1, 2);
    x.set(0, 0, {0.5, 0.0});
    CHECK(well_conditioned(model, x));
    x.set(0, 0, {10.0, 0.0});
    CHECK_FALSE(well_conditioned(model, x));
}

TEST_CASE("finite differences resolve smooth points and detect a perturbed gradient") {
    Rng rng(6);
    Model model = build_model({Domain::complex, 3, {4}, 2, true}, Activation::tanh, Activation::softmax_intensity,
                              {InitScheme::complex_variance_scaled, FanMode::fan_in, 11});
    randomize_biases(model, rng);
    const auto x = generic_input(model, 1, rng);
    REQUIRE(x.has_value());
    const RealMatrix y = random_one_hot(1, 2, rng);
    CHECK(difference_resolved(model, *x, y, LossKind::categorical_ce, 1e-5));
    const auto numeric = numeric_gradient(model, *x, y, LossKind::categorical_ce, 1e-6);
    const Tape tape = forward(model, *x);
    const GradientSet g = backward(tape, model, loss_grad(LossKind::categorical_ce, tape.output().re(), y));
    const double a = g.layers[0].weights.re()(0, 0);
    CHECK(relative_error(a, numeric[0], 1e-3) < 1e-5);
    CHECK(relative_error(1.001 * a + 1e-4, numeric[0], 1e-3) > 1e-5);
}

TEST_CASE("input gradient matches finite differences") {
    Rng rng(4);
    Model model = build_model({Domain::complex, 3, {4}, 2, false}, Activation::tanh, Activation::softmax_intensity,
                              {InitScheme::complex_variance_scaled, FanMode::fan_in, 9});
    ComplexTensor x = random_tensor(2, 3, rng);
    const RealMatrix y = random_one_hot(2, 2, rng);
    const Tape tape = forward(model, x);
    const GradientSet g = backward(tape, model, loss_grad(LossKind::categorical_ce, tape.output().re(), y));
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        for (RealMatrix* plane : {&x.re(), &x.im()}) {
            const double saved = plane->data()[i];
            plane->data()[i] = saved + h;
            const double up = model_loss(model, x, y, LossKind::categorical_ce);
            plane->data()[i] = saved - h;
            const double down = model_loss(model, x, y, LossKind::categorical_ce);
            plane->data()[i] = saved;
            const double analytic = plane == &x.re() ? g.input.re().data()[i] : g.input.im().data()[i];
            CHECK(analytic == doctest::Approx((up - down) / (2 * h)).epsilon(1e-5));
        }
    }
}

TEST_CASE("wirtinger_grads on known functions") {
    const auto abs2 = wirtinger_grads([](Complex z) { return std::norm(z); }, {3, 4});
    CHECK(abs2.df_dz.real() == doctest::Approx(3.0));
    CHECK(abs2.df_dz.imag() == doctest::Approx(-4.0));

    const auto re = wirtinger_grads([](Complex z) { return z.real(); }, {1.5, -2});
    CHECK(re.df_dz.real() == doctest::Approx(0.5));
    CHECK(re.df_dz.imag() == doctest::Approx(0.0));
    CHECK(re.df_dzbar.real() == doctest::Approx(0.5));

    const auto mag = wirtinger_grads([](Complex z) { return std::abs(z); }, {3, 4});
    CHECK(mag.df_dz.real() == doctest::Approx(0.3));
    CHECK(mag.df_dz.imag() == doctest::Approx(-0.4));
}

TEST_CASE("Wirtinger and real-pair engines agree") {
    Rng rng(5);
    {
        Model lin = build_model({Domain::complex, 4, {3}, 3, true}, Activation::identity, Activation::softmax_intensity,
                                {InitScheme::complex_variance_scaled, FanMode::fan_in, 1});
        const auto rep = wirtinger_consistency(lin, random_tensor(5, 4, rng), random_one_hot(5, 3, rng));
        CHECK(rep.max_relative_deviation < 1e-8);
        CHECK(rep.compared > 0);
    }
    {
        Model tanh2 = build_model({Domain::complex, 6, {16, 16}, 3, true}, Activation::tanh,
                                  Activation::softmax_intensity, {InitScheme::complex_variance_scaled, FanMode::fan_in, 2});
        randomize_biases(tanh2, rng);
        const auto rep = wirtinger_consistency(tanh2, random_tensor(5, 6, rng), random_one_hot(5, 3, rng));
        CHECK(rep.max_relative_deviation < 1e-5);
    }
    {
        Model head = build_model({Domain::complex, 6, {8}, 2, true}, Activation::intensity, Activation::sigmoid_intensity,
                                 {InitScheme::complex_variance_scaled, FanMode::fan_in, 3});
        RealMatrix y = RealMatrix::Zero(4, 2);
        y(0, 1) = y(2, 0) = 1.0;
        const auto rep = wirtinger_consistency(head, random_tensor(4, 6, rng), y, LossKind::binary_ce);
        CHECK(rep.max_relative_deviation < 1e-5);
    }
}

TEST_CASE("seam detection") {
    Model relu{Domain::complex, {scalar_layer({1, 0}, Activation::split_relu)}};
    CHECK(touches_seam(forward(relu, scalar({1e-5, 2})), relu));
    CHECK_FALSE(touches_seam(forward(relu, scalar({1, 2})), relu));
    Model mag{Domain::complex, {scalar_layer({1, 0}, Activation::magnitude)}};
    CHECK(touches_seam(forward(mag, scalar({1e-5, 1e-5})), mag));
    CHECK_FALSE(touches_seam(forward(mag, scalar({0, 1})), mag));
}

TEST_CASE("magnitude keeps a zero imaginary plane at zero") {
    // real data, real-valued weights, |z| activation, one regression-style step
    Rng rng(6);
    Model model{Domain::complex, {}};
    model.layers.push_back({ComplexTensor(random_tensor(3, 4, rng, 1.0, true)), ComplexTensor(1, 4),
                            Activation::magnitude});
    model.layers.push_back({ComplexTensor(random_tensor(4, 1, rng, 1.0, true)), ComplexTensor(1, 1),
                            Activation::identity});
    const ComplexTensor x = random_tensor(8, 3, rng, 1.0, true);
    const RealMatrix target = RealMatrix::Random(8, 1);
    const Tape tape = forward(model, x);
    const RealMatrix residual = (tape.output().re() - target) / 8.0;
    const GradientSet g = backward(tape, model, ComplexTensor(residual, RealMatrix::Zero(8, 1)));
    AdamState state = AdamState::for_model(model);
    adam_step(model, g, state, {});
    for (const auto& l : model.layers) CHECK(l.weights.im().isZero(0));
    CHECK_FALSE(g.layers[0].weights.re().isZero(0));
}

TEST_CASE("a zero-imaginary copy behaves like the real model") {
    Rng rng(7);
    const Model real = build_model({Domain::real, 4, {6, 6, 6}, 3, true}, Activation::split_relu,
                                   Activation::softmax_intensity, {InitScheme::real_glorot, FanMode::fan_in, 4});
    const Model cplx = to_complex_domain(real);
    CHECK(cplx.domain == Domain::complex);
    const ComplexTensor x = random_tensor(10, 4, rng, 1.0, true);
    CHECK(predict(real, x) == predict(cplx, x));
    const RealMatrix y = random_one_hot(10, 3, rng);
    const Tape tr = forward(real, x), tc = forward(cplx, x);
    const GradientSet gr = backward(tr, real, loss_grad(LossKind::categorical_ce, tr.output().re(), y));
    const GradientSet gc = backward(tc, cplx, loss_grad(LossKind::categorical_ce, tc.output().re(), y));
    for (std::size_t l = 0; l < gr.layers.size(); ++l) {
        CHECK(gr.layers[l].weights.re() == gc.layers[l].weights.re());
        CHECK(gc.layers[l].weights.im().isZero(0));
    }
}

TEST_CASE("model validation") {
    Model m = build_model({Domain::complex, 3, {4}, 2, false}, Activation::tanh, Activation::softmax_intensity, {});
    CHECK_NOTHROW(m.validate());
    m.layers[0].activation = Activation::softmax_intensity;
    CHECK_THROWS_AS(m.validate(), ConsistencyError);
    CHECK_THROWS_AS(build_model({Domain::complex, 3, {4}, 2, false}, Activation::softmax_intensity,
                                Activation::softmax_intensity, {}),
                    ValidationError);
    Model broken = build_model({Domain::complex, 3, {4}, 2, false}, Activation::tanh, Activation::softmax_intensity, {});
    broken.layers[1].weights = ComplexTensor(5, 2);
    CHECK_THROWS_AS(broken.validate(), ConsistencyError);
}

TEST_CASE("layers draw independent weights") {
    const Model m = build_model({Domain::complex, 4, {4, 4, 4}, 4, false}, Activation::tanh,
                                Activation::softmax_intensity, {InitScheme::complex_variance_scaled, FanMode::fan_in, 1});
    CHECK_FALSE(m.layers[1].weights == m.layers[2].weights);
    const Model again = build_model({Domain::complex, 4, {4, 4, 4}, 4, false}, Activation::tanh,
                                    Activation::softmax_intensity, {InitScheme::complex_variance_scaled, FanMode::fan_in, 1});
    CHECK(m.layers[2].weights == again.layers[2].weights);
}

}

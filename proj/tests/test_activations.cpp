#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "cvnn/activations.hpp"
#include "cvnn/errors.hpp"
#include "gradcheck.hpp"

using namespace cvnn;
using cvnn::testing::random_tensor;

namespace {

const Activation kElementwise[] = {Activation::identity, Activation::tanh, Activation::split_relu,
                                   Activation::intensity, Activation::magnitude};

Complex apply(Activation a, Complex z) {
    ComplexTensor t(1, 1);
    t.set(0, 0, z);
    return activate(a, t)(0, 0);
}

}  // namespace

TEST_SUITE("activations") {

TEST_CASE("names round-trip") {
    for (auto a : {Activation::identity, Activation::tanh, Activation::split_relu, Activation::intensity,
                   Activation::magnitude, Activation::sigmoid_intensity, Activation::softmax_intensity}) {
        CHECK(parse_activation(activation_name(a)) == a);
    }
    CHECK(parse_activation("relu") == Activation::split_relu);
    CHECK(parse_activation("abs2") == Activation::intensity);
    CHECK_THROWS_AS(parse_activation("gelu"), ValidationError);
    CHECK(is_output_head(Activation::softmax_intensity));
    CHECK_FALSE(is_output_head(Activation::magnitude));
    CHECK(is_real_valued(Activation::magnitude));
    CHECK_FALSE(is_real_valued(Activation::tanh));
}

TEST_CASE("identity") {
    CHECK(apply(Activation::identity, {3, 4}) == Complex(3, 4));
    CHECK(apply(Activation::identity, {0, 0}) == Complex(0, 0));
    const RealJacobian j = activation_jacobian(Activation::identity, {0.3, -1});
    CHECK(j.ux == 1.0);
    CHECK(j.vy == 1.0);
    CHECK(j.uy == 0.0);
    CHECK(j.vx == 0.0);
}

TEST_CASE("complex tanh") {
    CHECK(ctanh({0, 0}) == Complex(0, 0));
    const Complex t = ctanh({0, std::numbers::pi / 4});
    CHECK(t.real() == doctest::Approx(0.0));
    CHECK(t.imag() == doctest::Approx(1.0));
    CHECK(ctanh({1, 0}).real() == std::tanh(1.0));
    CHECK(ctanh({1, 0}).imag() == 0.0);
    CHECK(ctanh({1, 0}).real() == doctest::Approx(0.7615941559557649));
    CHECK_THROWS_AS(ctanh({0, std::numbers::pi / 2}), PoleError);

    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const Complex z(rng.uniform(-3, 3), rng.uniform(-1.4, 1.4));
        const Complex ref = std::tanh(z);
        CHECK(std::abs(ctanh(z) - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
    }
    CHECK(ctanh({400, 1}).real() == doctest::Approx(1.0));
}

TEST_CASE("split relu") {
    CHECK(split_relu({-1, 2}) == Complex(0, 2));
    CHECK(split_relu({3, 4}) == Complex(3, 4));
    CHECK(split_relu({-1, -1}) == Complex(0, 0));
    const RealJacobian at0 = activation_jacobian(Activation::split_relu, {0, 0});
    CHECK(at0.ux == 0.0);
    CHECK(at0.vy == 0.0);
}

TEST_CASE("intensity and magnitude") {
    CHECK(intensity({3, 4}) == 25.0);
    CHECK(intensity({0, 0}) == 0.0);
    CHECK(magnitude({3, 4}) == 5.0);
    CHECK(magnitude({-5, 0}) == 5.0);

    const RealJacobian jm = activation_jacobian(Activation::magnitude, {3, 4});
    CHECK(jm.ux == doctest::Approx(0.6));
    CHECK(jm.uy == doctest::Approx(0.8));
    const RealJacobian j0 = activation_jacobian(Activation::magnitude, {0, 0});
    CHECK(j0.ux == 0.0);
    CHECK(j0.uy == 0.0);

    Rng rng(2);
    const double h = 1e-6;
    for (int i = 0; i < 50; ++i) {
        const Complex z(rng.normal(), rng.normal());
        const RealJacobian j = activation_jacobian(Activation::intensity, z);
        CHECK(j.ux == doctest::Approx(2 * z.real()));
        CHECK(j.uy == doctest::Approx(2 * z.imag()));
        const double fx = (intensity(z + Complex(h, 0)) - intensity(z - Complex(h, 0))) / (2 * h);
        const double fy = (intensity(z + Complex(0, h)) - intensity(z - Complex(0, h))) / (2 * h);
        CHECK(std::abs(fx - j.ux) < 1e-6 * std::max(1.0, std::abs(j.ux)));
        CHECK(std::abs(fy - j.uy) < 1e-6 * std::max(1.0, std::abs(j.uy)));
    }
}

TEST_CASE("sigmoid of intensity") {
    CHECK(sigmoid_intensity({0, 0}) == 0.5);
    CHECK(sigmoid_intensity({3, 4}) == doctest::Approx(1.0 / (1.0 + std::exp(-25.0))));
    CHECK(1.0 - sigmoid_intensity({3, 4}) == doctest::Approx(1.3887943864771144e-11).epsilon(1e-6));
    Rng rng(4);
    for (int i = 0; i < 100; ++i) CHECK(sigmoid_intensity({rng.normal(), rng.normal()}) >= 0.5);
}

TEST_CASE("softmax of intensity") {
    const std::vector<Complex> equal = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (double p : softmax_intensity(equal)) CHECK(p == doctest::Approx(0.25));

    const std::vector<Complex> skewed = {{0, 0}, {3, 4}};
    const auto p = softmax_intensity(skewed);
    CHECK(p[0] == doctest::Approx(std::exp(-25.0)).epsilon(1e-9));
    CHECK(p[1] == doctest::Approx(1.0));

    // scaling z by a common unit phase leaves |z|^2 and hence the output unchanged
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Complex> z(7);
        for (auto& v : z) v = {3 * rng.normal(), 3 * rng.normal()};
        const auto q = softmax_intensity(z);
        double sum = 0.0;
        for (double v : q) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        const Complex rot = std::polar(1.0, rng.uniform(-3, 3));
        for (auto& v : z) v *= rot;
        const auto r = softmax_intensity(z);
        for (std::size_t j = 0; j < q.size(); ++j) CHECK(r[j] == doctest::Approx(q[j]).epsilon(1e-9));
    }
}

TEST_CASE("softmax is invariant to a common shift of the exponents") {
    // |z_j|^2 + c for every j: scale each z_j onto the circle of radius sqrt(|z_j|^2 + c)
    Rng rng(8);
    std::vector<Complex> z(5), shifted(5);
    const double c = 7.5;
    for (std::size_t j = 0; j < z.size(); ++j) {
        z[j] = {rng.normal(), rng.normal()};
        shifted[j] = std::polar(std::sqrt(std::norm(z[j]) + c), rng.uniform(-3, 3));
    }
    const auto a = softmax_intensity(z), b = softmax_intensity(shifted);
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-12));
}

TEST_CASE("head tensors are row-wise and real") {
    Rng rng(10);
    const ComplexTensor z = random_tensor(6, 4, rng, 2.0);
    const ComplexTensor p = activate(Activation::softmax_intensity, z);
    CHECK(p.imag_is_zero());
    for (Eigen::Index r = 0; r < 6; ++r) CHECK(p.re().row(r).sum() == doctest::Approx(1.0));
    const ComplexTensor s = activate(Activation::sigmoid_intensity, z);
    CHECK(s.imag_is_zero());
    CHECK(s.re()(2, 1) == doctest::Approx(sigmoid_intensity(z(2, 1))));
}

TEST_CASE("Jacobians match central differences") {
    Rng rng(12);
    const double h = 1e-6;
    for (Activation a : kElementwise) {
        for (int i = 0; i < 50; ++i) {
            Complex z(rng.uniform(-2, 2), rng.uniform(-1.2, 1.2));
            if (std::abs(z.real()) < 1e-3 || std::abs(z.imag()) < 1e-3) continue;
            const RealJacobian j = activation_jacobian(a, z);
            const Complex dx = (apply(a, z + Complex(h, 0)) - apply(a, z - Complex(h, 0))) / (2 * h);
            const Complex dy = (apply(a, z + Complex(0, h)) - apply(a, z - Complex(0, h))) / (2 * h);
            CAPTURE(activation_name(a));
            CHECK(std::abs(dx.real() - j.ux) < 1e-6);
            CHECK(std::abs(dy.real() - j.uy) < 1e-6);
            CHECK(std::abs(dx.imag() - j.vx) < 1e-6);
            CHECK(std::abs(dy.imag() - j.vy) < 1e-6);
        }
    }
}

TEST_CASE("Wirtinger partials agree with the real Jacobian") {
    Rng rng(13);
    for (Activation a : kElementwise) {
        for (int i = 0; i < 50; ++i) {
            const Complex z(rng.uniform(-2, 2), rng.uniform(-1.2, 1.2));
            const RealJacobian j = activation_jacobian(a, z);
            const WirtingerPartials w = activation_wirtinger(a, z);
            // df/dz = (f_x - i f_y) / 2, df/dzbar = (f_x + i f_y) / 2 with f_x = ux + i vx
            const Complex fx(j.ux, j.vx), fy(j.uy, j.vy);
            const Complex i1(0, 1);
            CAPTURE(activation_name(a));
            CHECK(std::abs(w.dz - 0.5 * (fx - i1 * fy)) < 1e-12);
            CHECK(std::abs(w.dzbar - 0.5 * (fx + i1 * fy)) < 1e-12);
        }
    }
}

TEST_CASE("tanh is holomorphic, the others are not") {
    Rng rng(14);
    for (int i = 0; i < 20; ++i) {
        const Complex z(rng.uniform(-1, 1), rng.uniform(-1, 1));
        CHECK(std::abs(activation_wirtinger(Activation::tanh, z).dzbar) == 0.0);
        CHECK(std::abs(activation_wirtinger(Activation::intensity, z).dzbar) > 0.0);
    }
}

TEST_CASE("activate_backward equals the Jacobian transpose product") {
    Rng rng(15);
    for (Activation a : kElementwise) {
        const ComplexTensor z = random_tensor(3, 4, rng);
        const ComplexTensor out = activate(a, z);
        const ComplexTensor g = random_tensor(3, 4, rng);
        const ComplexTensor back = activate_backward(a, z, out, g);
        for (Eigen::Index r = 0; r < 3; ++r) {
            for (Eigen::Index c = 0; c < 4; ++c) {
                const RealJacobian j = activation_jacobian(a, z(r, c));
                const double gu = g.re()(r, c), gv = is_real_valued(a) ? 0.0 : g.im()(r, c);
                CAPTURE(activation_name(a));
                CHECK(back.re()(r, c) == doctest::Approx(gu * j.ux + gv * j.vx));
                CHECK(back.im()(r, c) == doctest::Approx(gu * j.uy + gv * j.vy));
            }
        }
    }
}

}

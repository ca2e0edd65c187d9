#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "cvnn/errors.hpp"
#include "cvnn/init.hpp"
#include "cvnn/rng.hpp"

using namespace cvnn;

TEST_SUITE("init") {

TEST_CASE("rng is reproducible and unbiased in range") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(1);
    int counts[5] = {};
    for (int i = 0; i < 50000; ++i) {
        const auto v = c.below(5);
        REQUIRE(v < 5);
        ++counts[v];
    }
    for (int n : counts) CHECK(std::abs(n - 10000) < 400);
    CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(1, 1));
    CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(2, 0));
}

TEST_CASE("normal draws have unit variance") {
    Rng rng(3);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("complex init moments") {
    const Eigen::Index rows = 1000, cols = 1000;  // 1e6 samples
    const InitSpec spec{InitScheme::complex_variance_scaled, FanMode::fan_in, 17};
    const ComplexTensor w = init_complex(rows, cols, spec);
    const double s2 = 1.0 / static_cast<double>(rows);
    const double n = static_cast<double>(w.size());
    const double mean_re = w.re().mean(), mean_im = w.im().mean();
    const double var_re = (w.re().array() - mean_re).square().sum() / n;
    const double var_im = (w.im().array() - mean_im).square().sum() / n;
    CHECK(var_re + var_im == doctest::Approx(2.0 * s2).epsilon(0.05));

    // 16-bin chi-square on the phase; 30.58 is the 0.99 quantile with 15 dof
    int bins[16] = {};
    const double pi = std::numbers::pi;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double phi = std::atan2(w.im().data()[i], w.re().data()[i]);
        int b = static_cast<int>((phi + pi) / (2 * pi) * 16);
        ++bins[std::clamp(b, 0, 15)];
    }
    double chi2 = 0.0;
    const double expected = n / 16.0;
    for (int c : bins) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 30.58);
}

TEST_CASE("fan_avg uses the mean of both fans") {
    const ComplexTensor w = init_complex(400, 1600, {InitScheme::complex_variance_scaled, FanMode::fan_avg, 5});
    const double e_abs2 = (w.re().array().square() + w.im().array().square()).mean();
    CHECK(e_abs2 == doctest::Approx(2.0 / 1000.0).epsilon(0.05));
}

TEST_CASE("half-variance variant halves the second moment") {
    const ComplexTensor w = init_complex(500, 800, {InitScheme::complex_half_variance, FanMode::fan_in, 8});
    const double e_abs2 = (w.re().array().square() + w.im().array().square()).mean();
    CHECK(e_abs2 == doctest::Approx(1.0 / 500.0).epsilon(0.05));
}

TEST_CASE("init is deterministic per seed") {
    const InitSpec spec{InitScheme::complex_variance_scaled, FanMode::fan_in, 99};
    CHECK(init_complex(4, 4, spec) == init_complex(4, 4, spec));
    const InitSpec other{InitScheme::complex_variance_scaled, FanMode::fan_in, 100};
    CHECK_FALSE(init_complex(4, 4, spec) == init_complex(4, 4, other));
    const InitSpec rs{InitScheme::real_glorot, FanMode::fan_in, 99};
    CHECK(init_real(4, 4, rs) == init_real(4, 4, rs));
    CHECK(layer_seed(1, 0) != layer_seed(1, 1));
}

TEST_CASE("real init bounds and variance") {
    const Eigen::Index rows = 1000, cols = 1000;
    const RealMatrix w = init_real(rows, cols, {InitScheme::real_glorot, FanMode::fan_in, 23});
    const double limit = std::sqrt(6.0 / (rows + cols));
    CHECK(w.cwiseAbs().maxCoeff() <= limit);
    const double mean = w.mean();
    const double var = (w.array() - mean).square().mean();
    CHECK(var == doctest::Approx(2.0 / (rows + cols)).epsilon(0.05));
}

TEST_CASE("zeros") {
    const ComplexTensor z = init_zeros(3, 5);
    CHECK(z.re().isZero(0));
    CHECK(z.im().isZero(0));
    CHECK(z.rows() == 3);
}

TEST_CASE("scheme names") {
    for (InitScheme s : {InitScheme::complex_variance_scaled, InitScheme::complex_half_variance, InitScheme::real_glorot,
                         InitScheme::zeros}) {
        CHECK(parse_init_scheme(init_scheme_name(s)) == s);
    }
    CHECK(parse_fan_mode("fan_avg") == FanMode::fan_avg);
    CHECK_THROWS_AS(parse_init_scheme("he"), ValidationError);
}

}

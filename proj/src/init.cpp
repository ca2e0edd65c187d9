#include "cvnn/init.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cvnn/errors.hpp"
#include "cvnn/rng.hpp"

namespace cvnn {

std::string_view init_scheme_name(InitScheme s) noexcept {
    switch (s) {
        case InitScheme::complex_variance_scaled: return "complex_variance_scaled";
        case InitScheme::complex_half_variance: return "complex_half_variance";
        case InitScheme::real_glorot: return "real_glorot";
        case InitScheme::zeros: return "zeros";
    }
    return "?";
}

InitScheme parse_init_scheme(std::string_view name) {
    if (name == "complex_variance_scaled") return InitScheme::complex_variance_scaled;
    if (name == "complex_half_variance") return InitScheme::complex_half_variance;
    if (name == "real_glorot") return InitScheme::real_glorot;
    if (name == "zeros") return InitScheme::zeros;
    throw ValidationError("unknown init scheme '" + std::string(name) + "'");
}

std::string_view fan_mode_name(FanMode f) noexcept { return f == FanMode::fan_in ? "fan_in" : "fan_avg"; }

FanMode parse_fan_mode(std::string_view name) {
    if (name == "fan_in") return FanMode::fan_in;
    if (name == "fan_avg") return FanMode::fan_avg;
    throw ValidationError("unknown fan mode '" + std::string(name) + "'");
}

std::uint64_t layer_seed(std::uint64_t run_seed, std::size_t layer_index) noexcept {
    return Rng::derive_seed(run_seed, layer_index);
}

ComplexTensor init_complex(Eigen::Index rows, Eigen::Index cols, const InitSpec& spec) {
    if (spec.scheme == InitScheme::zeros) return init_zeros(rows, cols);
    if (spec.scheme != InitScheme::complex_variance_scaled && spec.scheme != InitScheme::complex_half_variance) {
        throw ValidationError("init_complex: scheme must be complex_variance_scaled, complex_half_variance or zeros");
    }
    const double fan = spec.fan_mode == FanMode::fan_in ? static_cast<double>(rows)
                                                        : 0.5 * static_cast<double>(rows + cols);
    const double mode = std::sqrt(spec.scheme == InitScheme::complex_half_variance ? 0.5 / fan : 1.0 / fan);

    Rng rng(spec.seed);
    ComplexTensor w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double r = mode * std::sqrt(-2.0 * std::log(1.0 - rng.uniform01()));
            const double phi = std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform01();
            w.re()(i, j) = r * std::cos(phi);
            w.im()(i, j) = r * std::sin(phi);
        }
    }
    return w;
}

RealMatrix init_real(Eigen::Index rows, Eigen::Index cols, const InitSpec& spec) {
    if (spec.scheme == InitScheme::zeros) return RealMatrix::Zero(rows, cols);
    if (spec.scheme != InitScheme::real_glorot) {
        throw ValidationError("init_real: scheme must be real_glorot or zeros");
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Rng rng(spec.seed);
    RealMatrix w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = rng.uniform(-limit, limit);
    }
    return w;
}

ComplexTensor init_zeros(Eigen::Index rows, Eigen::Index cols) { return ComplexTensor::zeros(rows, cols); }

}  // namespace cvnn

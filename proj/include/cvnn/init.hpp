#pragma once

#include <cstdint>
#include <string_view>

#include "cvnn/complex_core.hpp"

namespace cvnn {

enum class InitScheme { complex_variance_scaled, complex_half_variance, real_glorot, zeros };
enum class FanMode { fan_in, fan_avg };

std::string_view init_scheme_name(InitScheme s) noexcept;
InitScheme parse_init_scheme(std::string_view name);
std::string_view fan_mode_name(FanMode f) noexcept;
FanMode parse_fan_mode(std::string_view name);

struct InitSpec {
    InitScheme scheme = InitScheme::complex_variance_scaled;
    FanMode fan_mode = FanMode::fan_in;
    std::uint64_t seed = 0;
};

/// Seed for layer `layer_index` of a run.
std::uint64_t layer_seed(std::uint64_t run_seed, std::size_t layer_index) noexcept;

/// Rayleigh magnitude with uniform phase on (-pi, pi]. The mode is
/// s = sqrt(1 / fan) for complex_variance_scaled and s = sqrt(1 / (2 fan)) for
/// complex_half_variance, where fan is n (fan_in) or (n + m) / 2 (fan_avg) for an
/// n x m matrix. E|w|^2 = 2 s^2.
ComplexTensor init_complex(Eigen::Index rows, Eigen::Index cols, const InitSpec& spec);

/// Uniform on +-sqrt(6 / (fan_in + fan_out)).
RealMatrix init_real(Eigen::Index rows, Eigen::Index cols, const InitSpec& spec);

ComplexTensor init_zeros(Eigen::Index rows, Eigen::Index cols);

}  // namespace cvnn

#pragma once

#include <string_view>

#include "cvnn/complex_core.hpp"

namespace cvnn {

enum class LossKind { categorical_ce, binary_ce };

std::string_view loss_name(LossKind k) noexcept;

inline constexpr double kLogFloor = 1e-12;

/// Mean over the batch of -sum_j y_j log(p_j + 1e-12). Rows of probs must
/// sum to 1 within 1e-6.
double categorical_ce(const RealMatrix& probs, const RealMatrix& labels);
RealMatrix categorical_ce_grad(const RealMatrix& probs, const RealMatrix& labels);

/// Mean over the batch of -sum_j [y log(p + eps) + (1 - y) log(1 - p + eps)].
double binary_ce(const RealMatrix& probs, const RealMatrix& labels);
RealMatrix binary_ce_grad(const RealMatrix& probs, const RealMatrix& labels);

double loss_value(LossKind k, const RealMatrix& probs, const RealMatrix& labels);
RealMatrix loss_grad(LossKind k, const RealMatrix& probs, const RealMatrix& labels);

}  // namespace cvnn

#include "cvnn/loss.hpp"

#include <cmath>
#include <string>

#include "cvnn/errors.hpp"

namespace cvnn {

std::string_view loss_name(LossKind k) noexcept {
    return k == LossKind::categorical_ce ? "categorical_ce" : "binary_ce";
}

namespace {

void check_shapes(const RealMatrix& probs, const RealMatrix& labels) {
    if (probs.rows() != labels.rows() || probs.cols() != labels.cols()) {
        throw DimensionError("loss: probabilities " + std::to_string(probs.rows()) + "x" +
                             std::to_string(probs.cols()) + " vs labels " + std::to_string(labels.rows()) + "x" +
                             std::to_string(labels.cols()));
    }
    if (probs.rows() == 0) throw DimensionError("loss: empty batch");
}

void check_normalized(const RealMatrix& probs) {
    const Eigen::VectorXd sums = probs.rowwise().sum();
    for (Eigen::Index r = 0; r < sums.size(); ++r) {
        if (!(std::abs(sums(r) - 1.0) <= 1e-6)) {
            throw ValidationError("categorical_ce: row " + std::to_string(r) + " sums to " + std::to_string(sums(r)));
        }
    }
}

}  // namespace

double categorical_ce(const RealMatrix& probs, const RealMatrix& labels) {
    check_shapes(probs, labels);
    check_normalized(probs);
    const double total = -(labels.array() * (probs.array() + kLogFloor).log()).sum();
    return total / static_cast<double>(probs.rows());
}

RealMatrix categorical_ce_grad(const RealMatrix& probs, const RealMatrix& labels) {
    check_shapes(probs, labels);
    return -(labels.array() / (probs.array() + kLogFloor)) / static_cast<double>(probs.rows());
}

double binary_ce(const RealMatrix& probs, const RealMatrix& labels) {
    check_shapes(probs, labels);
    const auto p = probs.array();
    const auto y = labels.array();
    const double total = -(y * (p + kLogFloor).log() + (1.0 - y) * (1.0 - p + kLogFloor).log()).sum();
    return total / static_cast<double>(probs.rows());
}

RealMatrix binary_ce_grad(const RealMatrix& probs, const RealMatrix& labels) {
    check_shapes(probs, labels);
    const auto p = probs.array();
    const auto y = labels.array();
    return (-(y / (p + kLogFloor)) + (1.0 - y) / (1.0 - p + kLogFloor)) / static_cast<double>(probs.rows());
}

double loss_value(LossKind k, const RealMatrix& probs, const RealMatrix& labels) {
    return k == LossKind::categorical_ce ? categorical_ce(probs, labels) : binary_ce(probs, labels);
}

RealMatrix loss_grad(LossKind k, const RealMatrix& probs, const RealMatrix& labels) {
    return k == LossKind::categorical_ce ? categorical_ce_grad(probs, labels) : binary_ce_grad(probs, labels);
}

}  // namespace cvnn

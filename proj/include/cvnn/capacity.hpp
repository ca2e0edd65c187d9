#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace cvnn {

using Count = std::int64_t;

enum class Domain { real, complex };

std::string_view domain_name(Domain d) noexcept;
Domain parse_domain(std::string_view name);

/// Layer widths of a dense MLP: input_dim -> hidden_widths[0] -> ... -> output_dim.
/// hidden_widths holds the input layer plus the k hidden layers (k + 1 entries).
struct NetworkPlan {
    Domain domain = Domain::real;
    Count input_dim = 0;
    std::vector<Count> hidden_widths;
    Count output_dim = 0;
    bool include_bias = false;

    int depth() const noexcept { return static_cast<int>(hidden_widths.size()) - 1; }  // k
    void validate() const;

    friend bool operator==(const NetworkPlan&, const NetworkPlan&) = default;
};

/// Real-valued parameter count of one n -> m dense layer. Complex layers count
/// two reals per weight and bias.
Count count_dense_params(Count n, Count m, Domain domain, bool bias);

Count count_mlp_params(const NetworkPlan& plan);

/// Real: [m] * (k + 1). Complex: m/2, m, m/2, ... (k + 1 entries), which gives
/// the same real parameter count as the real plan in every layer.
std::vector<Count> alternating_widths(Count m, int k, Domain domain);

/// Unrounded roots of the total-parameter equation for a constant width m:
///   real:    n m + k m^2 + m c = p
///   complex: 2 (n m + k m^2 + m c) = p
double budget_width_real_exact(Count p, Count n, Count c, int k);
double budget_width_complex_exact(Count p, Count n, Count c, int k);

/// Rounded half-up to the nearest integer. Throws ValidationError when the
/// budget cannot fund a width of at least one unit.
Count budget_width_real(Count p, Count n, Count c, int k);
Count budget_width_complex(Count p, Count n, Count c, int k);

Count round_half_up(double v);

struct MatchedPair {
    NetworkPlan real;
    NetworkPlan complex;
};

/// Constant real width m against alternating complex widths.
MatchedPair build_fixed_pair(Count n, Count c, Count m, int k);

/// Constant widths solved from a shared parameter budget.
MatchedPair build_budget_pair(Count n, Count c, Count budget, int k);

/// Parameter totals reported for a plan, with and without biases.
struct PlanCounts {
    Count without_bias = 0;
    Count with_bias = 0;
};

PlanCounts plan_counts(const NetworkPlan& plan);

}  // namespace cvnn

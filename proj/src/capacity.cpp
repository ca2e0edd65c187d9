#include "cvnn/capacity.hpp"

#include <cmath>
#include <string>

#include "cvnn/errors.hpp"

namespace cvnn {

std::string_view domain_name(Domain d) noexcept { return d == Domain::real ? "real" : "complex"; }

Domain parse_domain(std::string_view name) {
    if (name == "real") return Domain::real;
    if (name == "complex") return Domain::complex;
    throw ValidationError("unknown domain '" + std::string(name) + "' (expected real or complex)");
}

void NetworkPlan::validate() const {
    if (input_dim < 1) throw ValidationError("plan: input_dim must be >= 1");
    if (output_dim < 1) throw ValidationError("plan: output_dim must be >= 1");
    if (hidden_widths.empty()) throw ValidationError("plan: needs at least the input layer width");
    for (Count w : hidden_widths) {
        if (w < 1) throw ValidationError("plan: every width must be >= 1, got " + std::to_string(w));
    }
}

Count count_dense_params(Count n, Count m, Domain domain, bool bias) {
    if (n < 1 || m < 1) {
        throw ValidationError("count_dense_params: dimensions must be >= 1, got n=" + std::to_string(n) +
                              " m=" + std::to_string(m));
    }
    const Count reals = n * m + (bias ? m : 0);
    return domain == Domain::complex ? 2 * reals : reals;
}

Count count_mlp_params(const NetworkPlan& plan) {
    plan.validate();
    Count total = 0;
    Count fan_in = plan.input_dim;
    for (Count w : plan.hidden_widths) {
        total += count_dense_params(fan_in, w, plan.domain, plan.include_bias);
        fan_in = w;
    }
    total += count_dense_params(fan_in, plan.output_dim, plan.domain, plan.include_bias);
    return total;
}

std::vector<Count> alternating_widths(Count m, int k, Domain domain) {
    if (m < 2 || m % 2 != 0) throw ValidationError("alternating_widths: m must be even and >= 2, got " + std::to_string(m));
    if (k < 0 || k % 2 != 0) throw ValidationError("alternating_widths: k must be even and >= 0, got " + std::to_string(k));
    std::vector<Count> widths(static_cast<std::size_t>(k) + 1, m);
    if (domain == Domain::complex) {
        for (std::size_t i = 0; i < widths.size(); i += 2) widths[i] = m / 2;
    }
    return widths;
}

namespace {

void check_budget_args(Count p, Count n, Count c, int k) {
    if (n < 1 || c < 1) throw ValidationError("budget: n and c must be >= 1");
    if (k < 0 || k % 2 != 0) throw ValidationError("budget: k must be even and >= 0, got " + std::to_string(k));
    if (p < n + c) {
        throw ValidationError("budget too small: p=" + std::to_string(p) + " is below n + c = " +
                              std::to_string(n + c));
    }
}

// Positive root of k m^2 + (n + c) m - p_eff = 0.
double solve_width(double p_eff, Count n, Count c, int k) {
    const double nc = static_cast<double>(n + c);
    if (k == 0) return p_eff / nc;
    const double half = nc / (2.0 * k);
    return -half + std::sqrt(half * half + p_eff / k);
}

Count checked_width(double exact, Count p) {
    const Count m = round_half_up(exact);
    if (m < 1) throw ValidationError("budget too small: p=" + std::to_string(p) + " yields width < 1");
    return m;
}

}  // namespace

Count round_half_up(double v) { return static_cast<Count>(std::floor(v + 0.5)); }

double budget_width_real_exact(Count p, Count n, Count c, int k) {
    check_budget_args(p, n, c, k);
    return solve_width(static_cast<double>(p), n, c, k);
}

double budget_width_complex_exact(Count p, Count n, Count c, int k) {
    check_budget_args(p, n, c, k);
    return solve_width(static_cast<double>(p) / 2.0, n, c, k);
}

Count budget_width_real(Count p, Count n, Count c, int k) {
    return checked_width(budget_width_real_exact(p, n, c, k), p);
}

Count budget_width_complex(Count p, Count n, Count c, int k) {
    return checked_width(budget_width_complex_exact(p, n, c, k), p);
}

MatchedPair build_fixed_pair(Count n, Count c, Count m, int k) {
    MatchedPair pair;
    pair.real = {Domain::real, n, alternating_widths(m, k, Domain::real), c, false};
    pair.complex = {Domain::complex, n, alternating_widths(m, k, Domain::complex), c, false};
    pair.real.validate();
    pair.complex.validate();
    return pair;
}

MatchedPair build_budget_pair(Count n, Count c, Count budget, int k) {
    const auto layers = static_cast<std::size_t>(k) + 1;
    MatchedPair pair;
    pair.real = {Domain::real, n, std::vector<Count>(layers, budget_width_real(budget, n, c, k)), c, false};
    pair.complex = {Domain::complex, n, std::vector<Count>(layers, budget_width_complex(budget, n, c, k)), c, false};
    return pair;
}

PlanCounts plan_counts(const NetworkPlan& plan) {
    NetworkPlan p = plan;
    p.include_bias = false;
    PlanCounts counts;
    counts.without_bias = count_mlp_params(p);
    p.include_bias = true;
    counts.with_bias = count_mlp_params(p);
    return counts;
}

}  // namespace cvnn

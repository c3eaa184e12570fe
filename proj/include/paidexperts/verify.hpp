#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace paidexperts::verify {

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;  // summary on success, first counterexample on failure
    double seconds = 0.0;
};

struct Options {
    bool quick = false;
    std::uint64_t seed = 20240601;
    /// Replaces the cutoff scale in the simulated run of the optimism check.
    std::optional<double> beta_override;
};

/// Margin rule's conditional mistake probability against 1/2 e^{-y x}.
CheckResult margin_rule_bound(const Options& opts);
/// 2^K enumeration of E[exp(-y sum w(q) Z)] against the closed-form product.
CheckResult surrogate_product_identity(const Options& opts);
/// prod 2 sqrt(p(1-p)) <= exp(-2 sum (1/2 - p)^2).
CheckResult surrogate_chain(const Options& opts);
/// Empirical-Bernstein interval coverage at delta = 0.05.
CheckResult bernstein_coverage(const Options& opts);
/// opt_pareto against opt_bruteforce on random small models.
CheckResult opt_equivalence(const Options& opts);
/// objective(brute) <= objective(local from selfish) <= objective(selfish).
CheckResult optimizer_chain(const Options& opts);
/// Simulated run: optimism pushes away from 1/2, cutoff alpha in (0, 1/2],
/// and the margin rule never sees an estimate of 0 or 1.
CheckResult optimism_geometry(const Options& opts);

std::vector<CheckResult> run_all(const Options& opts);

}  // namespace paidexperts::verify

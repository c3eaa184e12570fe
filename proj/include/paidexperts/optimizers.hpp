#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "paidexperts/env.hpp"

namespace paidexperts {

/**
 * Instance of the payment-selection problem
 *
 *     minimize  exp(-2 sum_j (1/2 - P[j][i_j])^2) + lambda sum_j grid[i_j]
 *
 * over one grid index i_j per expert. P holds optimistic estimates during a
 * run and true probabilities when computing the comparator.
 */
struct ObjectiveInput {
    std::size_t experts;
    const CostGrid* grid;
    std::vector<double> probs;  // row-major K x N
    double lambda;

    ObjectiveInput(std::size_t experts, const CostGrid& grid, std::vector<double> probs, double lambda);

    std::size_t points() const noexcept { return grid->size(); }
    double p(std::size_t j, std::size_t i) const { return probs[j * points() + i]; }
};

/// Squared gap (1/2 - p)^2.
inline double squared_gap(double p) noexcept {
    const double g = 0.5 - p;
    return g * g;
}

/// exp(-2 S) + lambda C. Every optimizer and oracle scores candidates through
/// this function, with S and C accumulated expert 0..K-1 left to right, so
/// values from different routes compare exactly.
inline double surrogate_cost(double gap_sum, double payment_sum, double lambda) noexcept {
    return std::exp(-2.0 * gap_sum) + lambda * payment_sum;
}

double objective(const ObjectiveInput& in, std::span<const std::size_t> idx);
double objective(const ObjectiveInput& in, const PaymentVector& payments);

inline constexpr std::uint64_t kDefaultBruteBudget = 1'000'000;

/// N^K, saturating at UINT64_MAX.
std::uint64_t enumeration_size(std::size_t points, std::size_t experts) noexcept;

/// Exact minimizer over all N^K assignments; ties go to the lexicographically
/// smallest index vector. Throws BudgetExceeded when N^K > budget.
PaymentVector brute(const ObjectiveInput& in, std::uint64_t budget = kDefaultBruteBudget);

/// Each expert minimizes exp(-2 (1/2 - P)^2) + lambda c on its own row.
PaymentVector selfish(const ObjectiveInput& in);

struct LocalOptions {
    std::size_t max_sweeps = 10;
    double tol = 0.0;
};

/// Round-robin exact coordinate descent on the joint objective from `start`.
PaymentVector local(const ObjectiveInput& in, const PaymentVector& start, LocalOptions opts = {});

enum class OptimizerKind { Brute, Selfish, Local };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(const std::string& name);

}  // namespace paidexperts

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "paidexperts/env.hpp"
#include "paidexperts/optimizers.hpp"

namespace paidexperts {

inline constexpr std::size_t kMaxEnumeratedExperts = 20;

/// Mistake probability conditional on the learner's state, integrated over
/// the advice draw.
struct MistakeProbability {
    double randomized;     // the randomized margin rule
    double deterministic;  // predicting sign(x), sign(0) = +1
};

/// Probability that the randomized rule errs when the label-relative margin
/// is u = y x: 1/2 e^{-|u|} if u > 0, 1 - 1/2 e^{-|u|} if u < 0, 1/2 at u = 0.
double randomized_mistake_given_margin(double label_margin) noexcept;

/**
 * Exact mistake probability of margin aggregation with the given weights when
 * expert j is correct independently with probability true_p[j]. Sums over all
 * 2^K advice vectors. Throws InvalidParameter when K > 20.
 *
 * The randomized value does not depend on the label; the deterministic one
 * does through the sign(0) tie rule, so the label is a parameter.
 */
MistakeProbability exact_mistake_prob(std::span<const double> true_p, std::span<const double> weights,
                                      Label label = 1);

/// Same randomized value as exact_mistake_prob, computed by splitting the
/// experts into two halves and merging sorted half-margins: O(2^{K/2} K).
double randomized_mistake_prob(std::span<const double> true_p, std::span<const double> weights);

/// E_Z[exp(-y sum_j w_j Z_j)] by enumerating all 2^K advice vectors.
double exponential_surrogate_enumerated(std::span<const double> true_p, std::span<const double> weights);

/// Closed form prod_j (p_j sqrt((1-q_j)/q_j) + (1-p_j) sqrt(q_j/(1-q_j))) of
/// the same expectation when w_j = w(q_j).
double exponential_surrogate_product(std::span<const double> true_p, std::span<const double> estimated_p);

/// How a round's label is produced: margin aggregation, or following a single
/// expert's advice multiplied by sign.
struct PredictionRule {
    enum class Kind { Aggregate, FollowExpert };
    Kind kind = Kind::Aggregate;
    std::vector<double> weights;  // Aggregate only
    std::size_t expert = 0;       // FollowExpert only
    int sign = 1;                 // FollowExpert only

    static PredictionRule aggregate(std::vector<double> w) { return {Kind::Aggregate, std::move(w), 0, 1}; }
    static PredictionRule follow(std::size_t j, int sign) { return {Kind::FollowExpert, {}, j, sign}; }
};

/// Pr(mistake) under the true model plus lambda * sum of payments. Aggregate
/// rules use the randomized margin rule. Only the paid experts' rows matter.
double expected_round_cost(const ProductivityModel& model, const PaymentVector& payments,
                           const PredictionRule& rule, double lambda);

struct OptResult {
    double value;
    PaymentVector payments;
};

/// min over the grid of exp(-2 sum_j (1/2 - p_j(c_j))^2) + lambda sum_j c_j by
/// enumeration. Throws BudgetExceeded when N^K exceeds the budget.
OptResult opt_bruteforce(const ProductivityModel& model, double lambda,
                         std::uint64_t budget = kDefaultBruteBudget);

inline constexpr std::size_t kDefaultFrontierCap = 2'000'000;

/// A point of the (squared-gap sum, payment sum) frontier.
struct ParetoPoint {
    double gap_sum;
    double payment_sum;
    std::vector<std::size_t> choice;
};

/**
 * Nondominated (max gap_sum, min payment_sum) points of the Minkowski sum of
 * the experts' (gap^2, c) sets, built one expert at a time. Equal gap sums
 * keep the smaller payment sum; exact duplicates keep the lexicographically
 * smallest choice. Sorted by payment sum. Throws BudgetExceeded when an
 * intermediate frontier grows past `cap`.
 */
std::vector<ParetoPoint> pareto_frontier(const ProductivityModel& model, std::size_t cap = kDefaultFrontierCap);

/// Same optimum as opt_bruteforce, via pareto_frontier.
OptResult opt_pareto(const ProductivityModel& model, double lambda, std::size_t cap = kDefaultFrontierCap);

/// Interval containing the continuum comparator when the true productivity
/// functions are L-Lipschitz on [0,1]: [grid_opt - (4L + lambda) K eps, grid_opt].
struct OptInterval {
    double lower;
    double upper;
};

OptInterval continuum_opt_interval(double grid_opt, double lipschitz, double lambda, std::size_t experts,
                                   double epsilon);

}  // namespace paidexperts

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "paidexperts/env.hpp"
#include "paidexperts/estimator.hpp"
#include "paidexperts/optimizers.hpp"
#include "paidexperts/oracle.hpp"
#include "paidexperts/record.hpp"
#include "paidexperts/rng.hpp"

namespace paidexperts {

/// w(p) = 1/2 ln(p / (1 - p)). Throws GuardViolation for p outside (0,1).
double weight(double p_hat);

/// w(s/n) evaluated as 1/2 (ln s - ln(n - s)), so that mirrored counts give
/// exactly opposite weights.
double weight_from_counts(std::uint64_t successes, std::uint64_t n);

struct PolicyConfig {
    double lambda = 0.0;
    OptimizerKind optimizer = OptimizerKind::Local;
    EstimatorParams params{};
    CostGrid grid{std::vector<double>{0.0}};
    std::size_t horizon = 1;
    std::uint64_t brute_budget = kDefaultBruteBudget;
    LocalOptions local{};
    /// Record the true-model expected cost each round (K <= 20 only).
    bool expected_cost = true;

    /// Parameters from default_parameters(K, horizon, lambda).
    static PolicyConfig with_defaults(std::size_t experts, CostGrid grid, std::size_t horizon, double lambda,
                                      OptimizerKind optimizer);
};

struct PredictionOutcome {
    Label label = 1;
    Branch branch = Branch::Aggregate;
    std::size_t expert = 0;       // Cutoff
    int cutoff_sign = 1;          // Cutoff: sign(p_hat - 1/2)
    double margin = 0.0;          // Aggregate
    double prob_sign = 1.0;       // Aggregate: 1 - 1/2 e^{-|margin|}
    std::vector<double> weights;  // Aggregate

    PredictionRule rule() const;
};

/**
 * Payments for round t (1-based). Rounds t <= N pay every expert grid[t-1],
 * which visits each (expert, payment) cell once before the optimizer runs.
 * Later rounds minimize the surrogate objective over the optimistic table.
 * `previous` warm-starts Local; without it Local starts from the Selfish point.
 */
PaymentVector select_payments(const EstimatorState& state, std::size_t t, const PolicyConfig& cfg,
                              const PaymentVector* previous = nullptr);

/**
 * Cutoff if any paid cell has p_hat outside [alpha, 1 - alpha] (smallest such
 * expert wins); otherwise the randomized margin rule. Draws one uniform from
 * `rng` in the Aggregate branch and none otherwise.
 */
PredictionOutcome predict(const EstimatorState& state, const PaymentVector& payments, const AdviceVector& advice,
                          RngStream& rng);

/// LCB-GAPTRON run state: the estimator plus the last optimizer payments.
class GaptronPolicy {
public:
    GaptronPolicy(std::size_t experts, PolicyConfig cfg);

    /// Play round t; t must be consecutive from 1.
    RoundRecord step(std::size_t t, const ProductivityModel& model, Label label, RngStream& advice_rng,
                     RngStream& predictor_rng);

    const EstimatorState& state() const noexcept { return state_; }
    const PolicyConfig& config() const noexcept { return cfg_; }

private:
    PolicyConfig cfg_;
    EstimatorState state_;
    std::size_t next_round_ = 1;
    std::optional<PaymentVector> last_optimized_;
};

}  // namespace paidexperts

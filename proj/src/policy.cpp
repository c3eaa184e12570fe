#include "paidexperts/policy.hpp"

#include <cmath>
#include <limits>

#include "paidexperts/errors.hpp"

namespace paidexperts {

double weight(double p_hat) {
    if (!(p_hat > 0.0 && p_hat < 1.0)) {
        throw GuardViolation("weight is only defined for estimates in (0,1); such cells must take the cutoff branch");
    }
    return 0.5 * std::log(p_hat / (1.0 - p_hat));
}

double weight_from_counts(std::uint64_t successes, std::uint64_t n) {
    if (successes == 0 || successes >= n) {
        throw GuardViolation("weight is only defined for estimates in (0,1); such cells must take the cutoff branch");
    }
    return 0.5 * (std::log(static_cast<double>(successes)) - std::log(static_cast<double>(n - successes)));
}

PolicyConfig PolicyConfig::with_defaults(std::size_t experts, CostGrid grid, std::size_t horizon, double lambda,
                                         OptimizerKind optimizer) {
    PolicyConfig cfg;
    cfg.lambda = lambda;
    cfg.optimizer = optimizer;
    cfg.params = default_parameters(experts, horizon, lambda);
    cfg.grid = std::move(grid);
    cfg.horizon = horizon;
    return cfg;
}

PredictionRule PredictionOutcome::rule() const {
    if (branch == Branch::Aggregate) return PredictionRule::aggregate(weights);
    return PredictionRule::follow(expert, cutoff_sign);
}

PaymentVector select_payments(const EstimatorState& state, std::size_t t, const PolicyConfig& cfg,
                              const PaymentVector* previous) {
    if (t == 0 || t > cfg.horizon) throw InvalidParameter("round index outside [1, T]");
    const CostGrid& grid = state.grid();
    const std::size_t k = state.experts();
    if (t <= grid.size()) {
        return PaymentVector::from_indices(grid, std::vector<std::size_t>(k, t - 1));
    }
    const ObjectiveInput in(k, grid, state.optimistic_table(), cfg.lambda);
    switch (cfg.optimizer) {
        case OptimizerKind::Brute: return brute(in, cfg.brute_budget);
        case OptimizerKind::Selfish: return selfish(in);
        case OptimizerKind::Local: return local(in, previous ? *previous : selfish(in), cfg.local);
    }
    throw InvalidParameter("unknown optimizer");
}

PredictionOutcome predict(const EstimatorState& state, const PaymentVector& payments, const AdviceVector& advice,
                          RngStream& rng) {
    const std::size_t k = state.experts();
    if (payments.size() != k || advice.size() != k) throw InvalidParameter("payments/advice length differs from K");

    PredictionOutcome out;
    for (std::size_t j = 0; j < k; ++j) {
        const CellStats& c = state.cell(j, payments.idx[j]);
        if (c.outside_cutoff(state.beta())) {
            out.branch = Branch::Cutoff;
            out.expert = j;
            out.cutoff_sign = c.p_hat - 0.5 >= 0.0 ? 1 : -1;
            out.label = out.cutoff_sign * advice.z[j];
            return out;
        }
    }

    out.branch = Branch::Aggregate;
    out.weights.resize(k);
    double x = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const CellStats& c = state.cell(j, payments.idx[j]);
        out.weights[j] = weight_from_counts(c.sum_correct, c.n);
        x += out.weights[j] * advice.z[j];
    }
    out.margin = x;
    out.prob_sign = 1.0 - 0.5 * std::exp(-std::abs(x));
    // At x = 0 both labels have probability 1/2. Anchoring that coin to the
    // first expert's advice instead of a fixed +1 leaves the distribution
    // unchanged and makes mistakes depend only on which experts were correct.
    const Label reference = x > 0.0 ? 1 : (x < 0.0 ? -1 : advice.z[0]);
    out.label = rng.uniform() < out.prob_sign ? reference : -reference;
    return out;
}

GaptronPolicy::GaptronPolicy(std::size_t experts, PolicyConfig cfg)
    : cfg_(std::move(cfg)), state_(experts, cfg_.grid, cfg_.params) {
    if (!(cfg_.lambda >= 0.0)) throw InvalidParameter("lambda must be >= 0");
}

RoundRecord GaptronPolicy::step(std::size_t t, const ProductivityModel& model, Label label, RngStream& advice_rng,
                                RngStream& predictor_rng) {
    if (t != next_round_) throw InvalidParameter("rounds must be played consecutively from 1");
    if (model.experts() != state_.experts() || !(model.grid() == state_.grid())) {
        throw InvalidParameter("model does not match the policy's experts and grid");
    }
    PaymentVector payments =
        select_payments(state_, t, cfg_, last_optimized_ ? &*last_optimized_ : nullptr);
    if (t > state_.points()) last_optimized_ = payments;

    const AdviceVector advice = sample_advice(model, payments, label, advice_rng);
    const PredictionOutcome outcome = predict(state_, payments, advice, predictor_rng);

    for (std::size_t j = 0; j < state_.experts(); ++j) state_.observe(j, payments.idx[j], advice.z[j] == label);
    ++next_round_;

    RoundRecord r;
    r.round = t;
    r.advice = advice.z;
    r.branch = outcome.branch;
    r.expert = outcome.expert;
    r.margin = outcome.margin;
    r.prob_sign = outcome.prob_sign;
    r.weights = outcome.weights;
    r.prediction = outcome.label;
    r.label = label;
    r.mistake = outcome.label != label;
    r.payment_sum = payments.sum();
    r.realized_cost = (r.mistake ? 1.0 : 0.0) + cfg_.lambda * r.payment_sum;
    r.expected_cost = cfg_.expected_cost && model.experts() <= kMaxEnumeratedExperts
                          ? expected_round_cost(model, payments, outcome.rule(), cfg_.lambda)
                          : std::numeric_limits<double>::quiet_NaN();
    r.payments = std::move(payments);
    return r;
}

}  // namespace paidexperts

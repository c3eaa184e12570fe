#include "paidexperts/baseline.hpp"

#include <cmath>
#include <limits>

#include "paidexperts/errors.hpp"

namespace paidexperts {

Arm lcb_select(const std::vector<ArmStats>& arms, std::size_t points, std::size_t t, double radius) {
    if (t == 0) throw InvalidParameter("round index must be >= 1");
    if (points == 0 || arms.empty() || arms.size() % points != 0) throw InvalidParameter("arm table has wrong shape");
    for (std::size_t a = 0; a < arms.size(); ++a) {
        if (arms[a].n == 0) return {a / points, a % points};
    }
    const double log_t = std::log(static_cast<double>(t));
    std::size_t best = 0;
    double best_index = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < arms.size(); ++a) {
        const double index = arms[a].mean_loss - std::sqrt(radius * log_t / static_cast<double>(arms[a].n));
        if (index < best_index) {
            best_index = index;
            best = a;
        }
    }
    return {best / points, best % points};
}

LcbBandit::LcbBandit(std::size_t experts, std::size_t points, double lambda, double radius, bool expected_cost)
    : experts_(experts), points_(points), lambda_(lambda), radius_(radius), expected_cost_(expected_cost),
      arms_(experts * points) {
    if (experts == 0 || points == 0) throw InvalidParameter("bandit needs K >= 1 and N >= 1");
    if (!(lambda >= 0.0)) throw InvalidParameter("lambda must be >= 0");
    if (!(radius >= 0.0)) throw InvalidParameter("confidence radius constant must be >= 0");
}

RoundRecord LcbBandit::step(std::size_t t, const ProductivityModel& model, Label label, RngStream& advice_rng) {
    if (model.experts() != experts_ || model.points() != points_) {
        throw InvalidParameter("model does not match the bandit's arm table");
    }
    if (label != 1 && label != -1) throw InvalidParameter("label must be -1 or +1");
    const Arm arm = lcb_select(arms_, points_, t, radius_);
    const double p = model.p(arm.expert, arm.point);
    const bool correct = advice_rng.bernoulli(p);
    const Label advice = correct ? label : -label;

    RoundRecord r;
    r.round = t;
    r.payments = PaymentVector::from_indices(model.grid(), {arm.point});
    r.advice = {advice};
    r.branch = Branch::SingleExpert;
    r.expert = arm.expert;
    r.prediction = advice;
    r.label = label;
    r.mistake = !correct;
    r.payment_sum = r.payments.values[0];
    r.realized_cost = (r.mistake ? 1.0 : 0.0) + lambda_ * r.payment_sum;
    r.expected_cost = expected_cost_ ? (1.0 - p) + lambda_ * r.payment_sum : std::numeric_limits<double>::quiet_NaN();
    arms_[arm.expert * points_ + arm.point].update(r.realized_cost);
    return r;
}

}  // namespace paidexperts

#include "paidexperts/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "paidexperts/errors.hpp"

namespace paidexperts {

namespace {

void check_rates(std::span<const double> true_p, std::span<const double> weights) {
    if (true_p.size() != weights.size()) throw InvalidParameter("probability and weight vectors differ in length");
    if (true_p.size() > kMaxEnumeratedExperts) {
        throw InvalidParameter("exact enumeration supports at most 20 experts");
    }
    for (double p : true_p) {
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("probabilities must lie in [0,1]");
    }
}

}  // namespace

double randomized_mistake_given_margin(double label_margin) noexcept {
    if (label_margin >= 0.0) return 0.5 * std::exp(-label_margin);
    return 1.0 - 0.5 * std::exp(label_margin);
}

MistakeProbability exact_mistake_prob(std::span<const double> true_p, std::span<const double> weights, Label label) {
    check_rates(true_p, weights);
    if (label != 1 && label != -1) throw InvalidParameter("label must be -1 or +1");
    const std::size_t k = true_p.size();
    MistakeProbability out{0.0, 0.0};
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        double prob = 1.0;
        double x = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const bool correct = (mask >> j) & 1U;
            prob *= correct ? true_p[j] : 1.0 - true_p[j];
            x += weights[j] * (correct ? label : -label);
        }
        if (prob == 0.0) continue;
        out.randomized += prob * randomized_mistake_given_margin(label * x);
        const Label predicted = x >= 0.0 ? 1 : -1;
        if (predicted != label) out.deterministic += prob;
    }
    return out;
}

namespace {

struct HalfOutcome {
    double margin;  // label-relative
    double prob;
};

std::vector<HalfOutcome> enumerate_half(std::span<const double> p, std::span<const double> w) {
    std::vector<HalfOutcome> out;
    out.reserve(std::size_t{1} << p.size());
    out.push_back({0.0, 1.0});
    for (std::size_t j = 0; j < p.size(); ++j) {
        const std::size_t n = out.size();
        for (std::size_t s = 0; s < n; ++s) {
            const HalfOutcome base = out[s];
            out[s] = {base.margin + w[j], base.prob * p[j]};
            out.push_back({base.margin - w[j], base.prob * (1.0 - p[j])});
        }
    }
    return out;
}

}  // namespace

double randomized_mistake_prob(std::span<const double> true_p, std::span<const double> weights) {
    check_rates(true_p, weights);
    const std::size_t k = true_p.size();
    const std::size_t h = k / 2;
    const auto left = enumerate_half(true_p.first(h), weights.first(h));
    auto right = enumerate_half(true_p.subspan(h), weights.subspan(h));
    std::sort(right.begin(), right.end(), [](const HalfOutcome& a, const HalfOutcome& b) { return a.margin < b.margin; });

    // For a left margin a, right outcomes with b >= -a give a nonnegative total
    // and contribute 1/2 e^{-a} P_b e^{-b}; the rest contribute
    // P_b (1 - 1/2 e^{a} e^{b}). Prefix/suffix sums make each a O(log n).
    const std::size_t m = right.size();
    std::vector<double> prefix_prob(m + 1, 0.0), prefix_up(m + 1, 0.0), suffix_down(m + 1, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        prefix_prob[r + 1] = prefix_prob[r] + right[r].prob;
        prefix_up[r + 1] = prefix_up[r] + right[r].prob * std::exp(right[r].margin);
    }
    for (std::size_t r = m; r-- > 0;) suffix_down[r] = suffix_down[r + 1] + right[r].prob * std::exp(-right[r].margin);

    double total = 0.0;
    for (const HalfOutcome& a : left) {
        if (a.prob == 0.0) continue;
        const auto split = std::lower_bound(right.begin(), right.end(), -a.margin,
                                            [](const HalfOutcome& o, double v) { return o.margin < v; });
        const auto r = static_cast<std::size_t>(split - right.begin());
        const double nonneg = 0.5 * std::exp(-a.margin) * suffix_down[r];
        const double neg = prefix_prob[r] - 0.5 * std::exp(a.margin) * prefix_up[r];
        total += a.prob * (nonneg + neg);
    }
    return std::clamp(total, 0.0, 1.0);
}

double exponential_surrogate_enumerated(std::span<const double> true_p, std::span<const double> weights) {
    check_rates(true_p, weights);
    const std::size_t k = true_p.size();
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        double prob = 1.0;
        double u = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const bool correct = (mask >> j) & 1U;
            prob *= correct ? true_p[j] : 1.0 - true_p[j];
            u += correct ? weights[j] : -weights[j];
        }
        total += prob * std::exp(-u);
    }
    return total;
}

double exponential_surrogate_product(std::span<const double> true_p, std::span<const double> estimated_p) {
    if (true_p.size() != estimated_p.size()) throw InvalidParameter("probability vectors differ in length");
    double prod = 1.0;
    for (std::size_t j = 0; j < true_p.size(); ++j) {
        const double q = estimated_p[j];
        if (!(q > 0.0 && q < 1.0)) throw GuardViolation("surrogate product needs estimates in (0,1)");
        const double p = true_p[j];
        prod *= p * std::sqrt((1.0 - q) / q) + (1.0 - p) * std::sqrt(q / (1.0 - q));
    }
    return prod;
}

double expected_round_cost(const ProductivityModel& model, const PaymentVector& payments, const PredictionRule& rule,
                           double lambda) {
    if (payments.size() != model.experts()) throw InvalidParameter("payment vector length differs from K");
    double mistake = 0.0;
    if (rule.kind == PredictionRule::Kind::FollowExpert) {
        if (rule.expert >= model.experts()) throw InvalidParameter("followed expert out of range");
        const double p = model.p(rule.expert, payments.idx[rule.expert]);
        mistake = rule.sign >= 0 ? 1.0 - p : p;
    } else {
        std::vector<double> p(model.experts());
        for (std::size_t j = 0; j < model.experts(); ++j) p[j] = model.p(j, payments.idx[j]);
        mistake = randomized_mistake_prob(p, rule.weights);
    }
    return mistake + lambda * payments.sum();
}

OptResult opt_bruteforce(const ProductivityModel& model, double lambda, std::uint64_t budget) {
    std::vector<double> probs;
    probs.reserve(model.experts() * model.points());
    for (std::size_t j = 0; j < model.experts(); ++j) probs.insert(probs.end(), model.row(j).begin(), model.row(j).end());
    const ObjectiveInput in(model.experts(), model.grid(), std::move(probs), lambda);
    PaymentVector best = brute(in, budget);
    const double value = objective(in, best);
    return {value, std::move(best)};
}

namespace {

struct FrontierNode {
    double gap_sum;
    double payment_sum;
    std::uint32_t parent;  // index in the previous stage
    std::uint32_t choice;  // grid index for this stage's expert
    std::uint64_t rank;    // lexicographic rank of the full choice prefix
};

}  // namespace

std::vector<ParetoPoint> pareto_frontier(const ProductivityModel& model, std::size_t cap) {
    const std::size_t k = model.experts();
    const std::size_t n = model.points();
    const auto& grid = model.grid();
    std::vector<std::vector<FrontierNode>> stages;
    stages.reserve(k);

    std::vector<FrontierNode> previous{{0.0, 0.0, 0, 0, 0}};
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<FrontierNode> cand;
        cand.reserve(previous.size() * n);
        for (std::size_t a = 0; a < previous.size(); ++a) {
            for (std::size_t i = 0; i < n; ++i) {
                cand.push_back({previous[a].gap_sum + squared_gap(model.p(j, i)), previous[a].payment_sum + grid[i],
                                static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(i),
                                previous[a].rank * n + i});
            }
        }
        std::sort(cand.begin(), cand.end(), [](const FrontierNode& x, const FrontierNode& y) {
            if (x.payment_sum != y.payment_sum) return x.payment_sum < y.payment_sum;
            if (x.gap_sum != y.gap_sum) return x.gap_sum > y.gap_sum;
            return x.rank < y.rank;
        });
        std::vector<FrontierNode> kept;
        double best_gap = -std::numeric_limits<double>::infinity();
        for (const FrontierNode& c : cand) {
            if (c.gap_sum > best_gap) {
                kept.push_back(c);
                best_gap = c.gap_sum;
            }
        }
        if (kept.size() > cap) {
            throw BudgetExceeded("Pareto frontier reached " + std::to_string(kept.size()) +
                                 " points, above the cap of " + std::to_string(cap));
        }
        // Re-rank so that the next stage's (rank * n + i) keys stay small and
        // still order choice prefixes lexicographically.
        std::vector<std::size_t> order(kept.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return kept[x].rank < kept[y].rank; });
        for (std::size_t r = 0; r < order.size(); ++r) kept[order[r]].rank = r;
        stages.push_back(kept);
        previous = std::move(kept);
    }

    std::vector<ParetoPoint> out;
    out.reserve(previous.size());
    for (std::size_t f = 0; f < previous.size(); ++f) {
        std::vector<std::size_t> choice(k);
        std::size_t at = f;
        for (std::size_t j = k; j-- > 0;) {
            const FrontierNode& node = stages[j][at];
            choice[j] = node.choice;
            at = node.parent;
        }
        out.push_back({previous[f].gap_sum, previous[f].payment_sum, std::move(choice)});
    }
    return out;
}

OptResult opt_pareto(const ProductivityModel& model, double lambda, std::size_t cap) {
    if (!(lambda >= 0.0)) throw InvalidParameter("lambda must be >= 0");
    const auto frontier = pareto_frontier(model, cap);
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < frontier.size(); ++f) {
        const double v = surrogate_cost(frontier[f].gap_sum, frontier[f].payment_sum, lambda);
        if (v < best_value || (v == best_value && frontier[f].choice < frontier[best].choice)) {
            best_value = v;
            best = f;
        }
    }
    return {best_value, PaymentVector::from_indices(model.grid(), frontier[best].choice)};
}

OptInterval continuum_opt_interval(double grid_opt, double lipschitz, double lambda, std::size_t experts,
                                   double epsilon) {
    const double slack = (4.0 * lipschitz + lambda) * static_cast<double>(experts) * epsilon;
    return {grid_opt - slack, grid_opt};
}

}  // namespace paidexperts

#include "paidexperts/optimizers.hpp"

#include <limits>

#include "paidexperts/errors.hpp"

namespace paidexperts {

ObjectiveInput::ObjectiveInput(std::size_t k, const CostGrid& g, std::vector<double> p, double lam)
    : experts(k), grid(&g), probs(std::move(p)), lambda(lam) {
    if (experts == 0) throw InvalidParameter("objective needs K >= 1");
    if (probs.size() != experts * grid->size()) throw InvalidParameter("probability table has wrong shape");
    if (!(lambda >= 0.0)) throw InvalidParameter("lambda must be >= 0");
    for (double v : probs) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidParameter("objective probabilities must lie in [0,1]");
    }
}

double objective(const ObjectiveInput& in, std::span<const std::size_t> idx) {
    if (idx.size() != in.experts) throw InvalidParameter("payment vector length differs from K");
    double gaps = 0.0;
    double pay = 0.0;
    for (std::size_t j = 0; j < in.experts; ++j) {
        if (idx[j] >= in.points()) throw InvalidParameter("payment index out of range");
        gaps += squared_gap(in.p(j, idx[j]));
        pay += (*in.grid)[idx[j]];
    }
    return surrogate_cost(gaps, pay, in.lambda);
}

double objective(const ObjectiveInput& in, const PaymentVector& payments) {
    return objective(in, std::span<const std::size_t>(payments.idx));
}

std::uint64_t enumeration_size(std::size_t points, std::size_t experts) noexcept {
    std::uint64_t total = 1;
    for (std::size_t j = 0; j < experts; ++j) {
        if (points != 0 && total > std::numeric_limits<std::uint64_t>::max() / points) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        total *= points;
    }
    return total;
}

PaymentVector brute(const ObjectiveInput& in, std::uint64_t budget) {
    const std::size_t k = in.experts;
    const std::size_t n = in.points();
    const std::uint64_t total = enumeration_size(n, k);
    if (total > budget) {
        throw BudgetExceeded("brute-force payment search needs N^K = " + std::to_string(n) + "^" +
                             std::to_string(k) + " evaluations, above the budget of " + std::to_string(budget));
    }
    std::vector<double> gap(k * n);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < n; ++i) gap[j * n + i] = squared_gap(in.p(j, i));
    }
    const auto& grid = *in.grid;

    // Odometer in lexicographic order, last coordinate fastest. prefix_*[d]
    // holds the left-to-right partial sums over coordinates < d, so only the
    // suffix after the highest changed coordinate is re-accumulated.
    std::vector<std::size_t> idx(k, 0);
    std::vector<double> prefix_gap(k + 1, 0.0), prefix_pay(k + 1, 0.0);
    auto rebuild_from = [&](std::size_t d) {
        for (std::size_t j = d; j < k; ++j) {
            prefix_gap[j + 1] = prefix_gap[j] + gap[j * n + idx[j]];
            prefix_pay[j + 1] = prefix_pay[j] + grid[idx[j]];
        }
    };
    rebuild_from(0);

    std::vector<std::size_t> best = idx;
    double best_value = std::numeric_limits<double>::infinity();
    for (;;) {
        const double v = surrogate_cost(prefix_gap[k], prefix_pay[k], in.lambda);
        if (v < best_value) {
            best_value = v;
            best = idx;
        }
        std::size_t d = k;
        while (d > 0) {
            --d;
            if (++idx[d] < n) break;
            idx[d] = 0;
            if (d == 0) return PaymentVector::from_indices(grid, std::move(best));
        }
        rebuild_from(d);
    }
}

PaymentVector selfish(const ObjectiveInput& in) {
    std::vector<std::size_t> idx(in.experts, 0);
    for (std::size_t j = 0; j < in.experts; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < in.points(); ++i) {
            const double v = surrogate_cost(squared_gap(in.p(j, i)), (*in.grid)[i], in.lambda);
            if (v < best) {
                best = v;
                idx[j] = i;
            }
        }
    }
    return PaymentVector::from_indices(*in.grid, std::move(idx));
}

PaymentVector local(const ObjectiveInput& in, const PaymentVector& start, LocalOptions opts) {
    if (opts.max_sweeps == 0) throw InvalidParameter("local search needs max_sweeps >= 1");
    if (!(opts.tol >= 0.0)) throw InvalidParameter("local search tolerance must be >= 0");
    const std::size_t k = in.experts;
    const auto& grid = *in.grid;
    std::vector<std::size_t> idx = start.idx;
    double current = objective(in, std::span<const std::size_t>(idx));

    for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        const double sweep_start = current;
        for (std::size_t j = 0; j < k; ++j) {
            double other_gap = 0.0, other_pay = 0.0;
            for (std::size_t o = 0; o < k; ++o) {
                if (o == j) continue;
                other_gap += squared_gap(in.p(o, idx[o]));
                other_pay += grid[idx[o]];
            }
            std::size_t best_i = idx[j];
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < in.points(); ++i) {
                const double v = surrogate_cost(other_gap + squared_gap(in.p(j, i)), other_pay + grid[i], in.lambda);
                if (v < best) {
                    best = v;
                    best_i = i;
                }
            }
            if (best_i == idx[j]) continue;
            // The incremental scores above sum in a different order than
            // objective(); accept the move only if the canonical value does not
            // increase, which keeps the descent exact.
            const std::size_t previous = idx[j];
            idx[j] = best_i;
            const double trial = objective(in, std::span<const std::size_t>(idx));
            if (trial <= current) {
                current = trial;
            } else {
                idx[j] = previous;
            }
        }
        if (sweep_start - current <= opts.tol) break;
    }
    return PaymentVector::from_indices(grid, std::move(idx));
}

std::string to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::Brute: return "brute";
        case OptimizerKind::Selfish: return "selfish";
        case OptimizerKind::Local: return "local";
    }
    return "unknown";
}

OptimizerKind parse_optimizer_kind(const std::string& name) {
    if (name == "brute") return OptimizerKind::Brute;
    if (name == "selfish") return OptimizerKind::Selfish;
    if (name == "local") return OptimizerKind::Local;
    throw InvalidParameter("unknown optimizer '" + name + "'");
}

}  // namespace paidexperts

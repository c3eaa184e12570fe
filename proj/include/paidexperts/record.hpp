#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "paidexperts/env.hpp"

namespace paidexperts {

enum class Branch {
    Cutoff,        // followed (or flipped) one expert whose estimate left [alpha, 1 - alpha]
    Aggregate,     // randomized weighted margin
    SingleExpert,  // bandit baseline: the one paid expert's advice
};

std::string to_string(Branch branch);
Branch parse_branch(const std::string& name);

/// Everything decided and observed in one round.
struct RoundRecord {
    std::size_t round = 0;  // 1-based
    /// Gaptron rounds: one entry per expert. SingleExpert rounds: one entry,
    /// the payment of `expert`.
    PaymentVector payments;
    std::vector<Label> advice;
    Branch branch = Branch::Aggregate;
    std::size_t expert = 0;     // Cutoff / SingleExpert
    double margin = 0.0;        // Aggregate
    double prob_sign = 1.0;     // probability of emitting sign(margin); 1 for deterministic branches
    std::vector<double> weights;  // Aggregate
    Label prediction = 1;
    Label label = 1;
    bool mistake = false;
    double payment_sum = 0.0;
    double realized_cost = 0.0;
    double expected_cost = 0.0;  // NaN when the diagnostic is disabled

    friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

nlohmann::json record_to_json(const RoundRecord& r);
RoundRecord record_from_json(const nlohmann::json& j);

}  // namespace paidexperts

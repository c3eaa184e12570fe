#include "paidexperts/record.hpp"

#include <cmath>
#include <limits>

#include "paidexperts/errors.hpp"

namespace paidexperts {

std::string to_string(Branch branch) {
    switch (branch) {
        case Branch::Cutoff: return "cutoff";
        case Branch::Aggregate: return "aggregate";
        case Branch::SingleExpert: return "single-expert";
    }
    return "unknown";
}

Branch parse_branch(const std::string& name) {
    if (name == "cutoff") return Branch::Cutoff;
    if (name == "aggregate") return Branch::Aggregate;
    if (name == "single-expert") return Branch::SingleExpert;
    throw InvalidParameter("unknown branch '" + name + "'");
}

nlohmann::json record_to_json(const RoundRecord& r) {
    nlohmann::json j;
    j["round"] = r.round;
    j["payment_idx"] = r.payments.idx;
    j["payments"] = r.payments.values;
    j["advice"] = r.advice;
    j["branch"] = to_string(r.branch);
    j["expert"] = r.expert;
    j["margin"] = r.margin;
    j["prob_sign"] = r.prob_sign;
    j["weights"] = r.weights;
    j["prediction"] = r.prediction;
    j["label"] = r.label;
    j["mistake"] = r.mistake;
    j["payment_sum"] = r.payment_sum;
    j["realized_cost"] = r.realized_cost;
    if (std::isnan(r.expected_cost)) {
        j["expected_cost"] = nullptr;
    } else {
        j["expected_cost"] = r.expected_cost;
    }
    return j;
}

RoundRecord record_from_json(const nlohmann::json& j) {
    RoundRecord r;
    r.round = j.at("round").get<std::size_t>();
    r.payments.idx = j.at("payment_idx").get<std::vector<std::size_t>>();
    r.payments.values = j.at("payments").get<std::vector<double>>();
    r.advice = j.at("advice").get<std::vector<Label>>();
    r.branch = parse_branch(j.at("branch").get<std::string>());
    r.expert = j.at("expert").get<std::size_t>();
    r.margin = j.at("margin").get<double>();
    r.prob_sign = j.at("prob_sign").get<double>();
    r.weights = j.at("weights").get<std::vector<double>>();
    r.prediction = j.at("prediction").get<Label>();
    r.label = j.at("label").get<Label>();
    r.mistake = j.at("mistake").get<bool>();
    r.payment_sum = j.at("payment_sum").get<double>();
    r.realized_cost = j.at("realized_cost").get<double>();
    const auto& e = j.at("expected_cost");
    r.expected_cost = e.is_null() ? std::numeric_limits<double>::quiet_NaN() : e.get<double>();
    return r;
}

}  // namespace paidexperts

#include "paidexperts/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "paidexperts/errors.hpp"

namespace paidexperts {

EstimatorParams default_parameters(std::size_t experts, std::size_t horizon, double lambda) {
    if (experts == 0 || horizon == 0) throw InvalidParameter("default_parameters needs K >= 1 and T >= 1");
    if (!(lambda >= 0.0)) throw InvalidParameter("lambda must be >= 0");
    const double k = static_cast<double>(experts);
    const double t = static_cast<double>(horizon);
    const double delta = 1.0 / ((1.0 + lambda * k) * t * t * k);
    const double beta = 18.0 * std::log(3.0 / delta) * k * k;
    return {beta, delta};
}

double bernstein_width(double p_hat, std::uint64_t n, double delta) {
    if (n == 0) throw GuardViolation("Bernstein width is undefined for n = 0");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameter("delta must lie in (0,1)");
    const double log_term = std::log(3.0 / delta);
    const double nn = static_cast<double>(n);
    return 3.0 * log_term / nn + std::sqrt(2.0 * p_hat * (1.0 - p_hat) * log_term / nn);
}

bool CellStats::outside_cutoff(double beta) const noexcept {
    if (n == 0) return true;  // p_hat = 1, alpha = 1/2
    const double nn = static_cast<double>(n);
    if (beta / nn >= 0.5) return 2 * sum_correct != n;
    // p_hat < beta/n  <=>  sum_correct < beta, and symmetrically for 1 - p_hat.
    return static_cast<double>(sum_correct) < beta || static_cast<double>(n - sum_correct) < beta;
}

EstimatorState::EstimatorState(std::size_t experts, CostGrid grid, EstimatorParams params)
    : experts_(experts), grid_(std::move(grid)), params_(params), log_term_(0.0),
      cells_(experts * grid_.size()) {
    if (experts_ == 0) throw InvalidParameter("estimator needs K >= 1");
    if (!(params_.beta >= 0.0)) throw InvalidParameter("beta must be >= 0");
    // delta = 1 only arises from the K = T = 1 default; ln(3/delta) stays finite.
    if (!(params_.delta > 0.0 && params_.delta <= 1.0)) throw InvalidParameter("delta must lie in (0,1]");
    log_term_ = std::log(3.0 / params_.delta);
}

const CellStats& EstimatorState::cell(std::size_t expert, std::size_t point) const {
    if (expert >= experts_ || point >= points()) throw std::out_of_range("estimator cell index out of range");
    return cells_[expert * points() + point];
}

void EstimatorState::refresh(CellStats& c) const {
    if (c.n == 0) {
        c = CellStats{};
        return;
    }
    const double nn = static_cast<double>(c.n);
    c.p_hat = static_cast<double>(c.sum_correct) / nn;
    c.alpha = std::min(params_.beta / nn, 0.5);
    const double width = 3.0 * log_term_ / nn + std::sqrt(2.0 * c.p_hat * (1.0 - c.p_hat) * log_term_ / nn);
    c.q = std::min({1.0 - c.p_hat, c.p_hat, width});
    c.s = (0.5 - c.p_hat) >= 0.0 ? 1 : -1;
    c.p_opt = c.p_hat - c.s * c.q;
}

void EstimatorState::observe(std::size_t expert, std::size_t point, bool correct) {
    if (expert >= experts_ || point >= points()) throw std::out_of_range("estimator cell index out of range");
    CellStats& c = cells_[expert * points() + point];
    ++c.n;
    if (correct) ++c.sum_correct;
    refresh(c);
}

std::vector<double> EstimatorState::optimistic_table() const {
    std::vector<double> out(cells_.size());
    std::transform(cells_.begin(), cells_.end(), out.begin(), [](const CellStats& c) { return c.p_opt; });
    return out;
}

std::uint64_t EstimatorState::rounds_observed(std::size_t expert) const {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < points(); ++i) total += cell(expert, i).n;
    return total;
}

nlohmann::json EstimatorState::snapshot() const {
    nlohmann::json j;
    j["K"] = experts_;
    j["grid"] = std::vector<double>(grid_.values().begin(), grid_.values().end());
    j["beta"] = params_.beta;
    j["delta"] = params_.delta;
    auto n = nlohmann::json::array();
    auto correct = nlohmann::json::array();
    for (std::size_t e = 0; e < experts_; ++e) {
        std::vector<std::uint64_t> nr, cr;
        for (std::size_t i = 0; i < points(); ++i) {
            nr.push_back(cell(e, i).n);
            cr.push_back(cell(e, i).sum_correct);
        }
        n.push_back(nr);
        correct.push_back(cr);
    }
    j["n"] = std::move(n);
    j["sum_correct"] = std::move(correct);
    return j;
}

EstimatorState EstimatorState::from_snapshot(const nlohmann::json& j) {
    try {
        EstimatorState st(j.at("K").get<std::size_t>(), CostGrid(j.at("grid").get<std::vector<double>>()),
                          {j.at("beta").get<double>(), j.at("delta").get<double>()});
        const auto n = j.at("n").get<std::vector<std::vector<std::uint64_t>>>();
        const auto correct = j.at("sum_correct").get<std::vector<std::vector<std::uint64_t>>>();
        if (n.size() != st.experts_ || correct.size() != st.experts_) {
            throw InvalidParameter("snapshot count tables have wrong number of rows");
        }
        for (std::size_t e = 0; e < st.experts_; ++e) {
            if (n[e].size() != st.points() || correct[e].size() != st.points()) {
                throw InvalidParameter("snapshot count row has wrong length");
            }
            for (std::size_t i = 0; i < st.points(); ++i) {
                if (correct[e][i] > n[e][i]) throw InvalidParameter("snapshot has more successes than observations");
                CellStats& c = st.cells_[e * st.points() + i];
                c.n = n[e][i];
                c.sum_correct = correct[e][i];
                st.refresh(c);
            }
        }
        return st;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParameter(std::string("malformed estimator snapshot: ") + e.what());
    }
}

}  // namespace paidexperts

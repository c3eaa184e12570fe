#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"

#include "paidexperts/env.hpp"

namespace paidexperts {

/// Cutoff scale and confidence level of the optimistic estimator.
struct EstimatorParams {
    double beta;
    double delta;

    friend bool operator==(const EstimatorParams&, const EstimatorParams&) = default;
};

/// delta = 1/((1 + lambda K) T^2 K) and beta = 18 ln(3/delta) K^2.
EstimatorParams default_parameters(std::size_t experts, std::size_t horizon, double lambda);

/// Empirical-Bernstein half-width 3 ln(3/delta)/n + sqrt(2 p(1-p) ln(3/delta)/n).
double bernstein_width(double p_hat, std::uint64_t n, double delta);

/// Statistics of one (expert, payment) cell. Counts are authoritative, the
/// floating fields are derived from them.
struct CellStats {
    std::uint64_t n = 0;
    std::uint64_t sum_correct = 0;
    double p_hat = 1.0;
    double alpha = 0.5;
    double q = 0.0;
    int s = -1;
    double p_opt = 1.0;

    /// p_hat lies outside [alpha, 1 - alpha]. Evaluated on the counts so that
    /// boundary cases do not depend on rounding.
    bool outside_cutoff(double beta) const noexcept;

    friend bool operator==(const CellStats&, const CellStats&) = default;
};

class EstimatorState {
public:
    EstimatorState(std::size_t experts, CostGrid grid, EstimatorParams params);

    std::size_t experts() const noexcept { return experts_; }
    std::size_t points() const noexcept { return grid_.size(); }
    const CostGrid& grid() const noexcept { return grid_; }
    double beta() const noexcept { return params_.beta; }
    double delta() const noexcept { return params_.delta; }

    /// Throws std::out_of_range on bad indices.
    const CellStats& cell(std::size_t expert, std::size_t point) const;

    /// Record whether expert j, paid grid[i], agreed with the revealed label.
    void observe(std::size_t expert, std::size_t point, bool correct);

    /// Optimistic estimates, row-major K x N.
    std::vector<double> optimistic_table() const;

    /// Total observations of one expert across payments.
    std::uint64_t rounds_observed(std::size_t expert) const;

    /// Counts plus parameters; derived fields are recomputed on load.
    nlohmann::json snapshot() const;
    static EstimatorState from_snapshot(const nlohmann::json& j);

    friend bool operator==(const EstimatorState&, const EstimatorState&) = default;

private:
    void refresh(CellStats& c) const;

    std::size_t experts_;
    CostGrid grid_;
    EstimatorParams params_;
    double log_term_;  // ln(3/delta)
    std::vector<CellStats> cells_;
};

}  // namespace paidexperts

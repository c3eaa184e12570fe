#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "paidexperts/env.hpp"
#include "paidexperts/record.hpp"
#include "paidexperts/rng.hpp"

namespace paidexperts {

struct ArmStats {
    std::uint64_t n = 0;
    double mean_loss = 0.0;

    void update(double loss) noexcept {
        ++n;
        mean_loss += (loss - mean_loss) / static_cast<double>(n);
    }
};

/// (expert, grid index) of a bandit arm.
struct Arm {
    std::size_t expert;
    std::size_t point;

    friend bool operator==(const Arm&, const Arm&) = default;
};

inline constexpr double kDefaultLcbRadius = 2.0;

/**
 * Lower-confidence-bound arm choice over a row-major K x N table. Unpulled
 * arms are taken first in row-major order; afterwards the arm minimizing
 * mean_loss - sqrt(radius * ln t / n), ties to the smallest (j, i).
 */
Arm lcb_select(const std::vector<ArmStats>& arms, std::size_t points, std::size_t t,
               double radius = kDefaultLcbRadius);

/// Bandit over (expert, payment) pairs that pays one expert per round and
/// predicts with that expert's advice.
class LcbBandit {
public:
    LcbBandit(std::size_t experts, std::size_t points, double lambda, double radius = kDefaultLcbRadius,
              bool expected_cost = true);

    RoundRecord step(std::size_t t, const ProductivityModel& model, Label label, RngStream& advice_rng);

    const std::vector<ArmStats>& arms() const noexcept { return arms_; }
    const ArmStats& arm(std::size_t expert, std::size_t point) const { return arms_.at(expert * points_ + point); }

private:
    std::size_t experts_;
    std::size_t points_;
    double lambda_;
    double radius_;
    bool expected_cost_;
    std::vector<ArmStats> arms_;
};

}  // namespace paidexperts

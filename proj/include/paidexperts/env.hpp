#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "paidexperts/rng.hpp"

namespace paidexperts {

/// Sorted set of allowed payments, as fractions of the maximum payment.
class CostGrid {
public:
    /// Throws InvalidParameter unless values are strictly increasing, in [0,1], non-empty.
    explicit CostGrid(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double at(std::size_t i) const { return values_.at(i); }
    double max() const noexcept { return values_.back(); }
    std::span<const double> values() const noexcept { return values_; }

    /// Largest distance from a point of [0,1] to its nearest grid point.
    double covering_radius() const noexcept;

    friend bool operator==(const CostGrid&, const CostGrid&) = default;

private:
    std::vector<double> values_;
};

/// {0, eps, 2 eps, ..., 1}; the last point is clamped to 1.
CostGrid make_uniform_grid(double epsilon);

enum class ModelFamily { Linear, Sigmoid, Tabular };

std::string to_string(ModelFamily family);
ModelFamily parse_model_family(const std::string& name);

/**
 * Success probabilities p[j][i]: chance that expert j predicts the label
 * correctly when paid grid[i].
 */
class ProductivityModel {
public:
    ProductivityModel(ModelFamily family, CostGrid grid, std::size_t experts,
                      std::vector<double> probs, std::vector<int> thetas = {},
                      std::optional<double> lipschitz_hint = std::nullopt);

    std::size_t experts() const noexcept { return experts_; }
    std::size_t points() const noexcept { return grid_.size(); }
    const CostGrid& grid() const noexcept { return grid_; }
    ModelFamily family() const noexcept { return family_; }
    const std::vector<int>& thetas() const noexcept { return thetas_; }
    std::optional<double> lipschitz_hint() const noexcept { return lipschitz_hint_; }

    double p(std::size_t expert, std::size_t point) const { return probs_[expert * points() + point]; }
    std::span<const double> row(std::size_t expert) const {
        return std::span<const double>(probs_).subspan(expert * points(), points());
    }

    friend bool operator==(const ProductivityModel&, const ProductivityModel&) = default;

private:
    ModelFamily family_;
    CostGrid grid_;
    std::size_t experts_;
    std::vector<double> probs_;
    std::vector<int> thetas_;
    std::optional<double> lipschitz_hint_;
};

double sigmoid_productivity(int theta, double c);

/// N uniform payments on [1/2, 1], sorted; every expert has p(c) = c.
ProductivityModel make_linear_model(std::size_t points, std::size_t experts, RngStream& rng);
/// N uniform payments on [0, 1], sorted; slopes theta_j uniform on {1..10}.
ProductivityModel make_sigmoid_model(std::size_t points, std::size_t experts, RngStream& rng);

/// p(c) = c on an explicit grid.
ProductivityModel linear_model_on_grid(CostGrid grid, std::size_t experts);
/// Sigmoid family on an explicit grid; slopes drawn from rng.
ProductivityModel sigmoid_model_on_grid(CostGrid grid, std::size_t experts, RngStream& rng);
/// Tabular model; lipschitz hint defaults to the largest adjacent slope.
ProductivityModel make_tabular_model(CostGrid grid, std::vector<std::vector<double>> probs);

nlohmann::json model_to_json(const ProductivityModel& model);
ProductivityModel model_from_json(const nlohmann::json& j);
void save_model(const ProductivityModel& model, const std::string& path);
ProductivityModel load_model(const std::string& path);
/// Accepts either a bare JSON array of payments or an object with a "grid" array.
CostGrid load_grid(const std::string& path);

using Label = int;  // -1 or +1

/// One grid index per expert, plus the matching payments.
struct PaymentVector {
    std::vector<std::size_t> idx;
    std::vector<double> values;

    static PaymentVector from_indices(const CostGrid& grid, std::vector<std::size_t> idx);
    double sum() const noexcept;
    std::size_t size() const noexcept { return idx.size(); }

    friend bool operator==(const PaymentVector&, const PaymentVector&) = default;
};

struct AdviceVector {
    std::vector<Label> z;

    std::size_t size() const noexcept { return z.size(); }
    friend bool operator==(const AdviceVector&, const AdviceVector&) = default;
};

/// One Bernoulli(p[j][idx_j]) "expert j is correct" draw per expert, in order.
std::vector<bool> sample_correctness(const ProductivityModel& model, const PaymentVector& payments,
                                     RngStream& rng);

AdviceVector advice_from_correctness(const std::vector<bool>& correct, Label label);

AdviceVector sample_advice(const ProductivityModel& model, const PaymentVector& payments, Label label,
                           RngStream& rng);

enum class LabelMode { AllPlus, Alternating, Rademacher };

std::string to_string(LabelMode mode);
LabelMode parse_label_mode(const std::string& name);

std::vector<Label> make_labels(std::size_t rounds, LabelMode mode, RngStream& rng);

}  // namespace paidexperts

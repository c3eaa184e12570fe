#include "paidexperts/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "paidexperts/errors.hpp"

namespace paidexperts {

CostGrid::CostGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidParameter("cost grid must contain at least one payment");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidParameter("cost grid values must lie in [0,1]");
        if (i > 0 && !(values_[i - 1] < v)) throw InvalidParameter("cost grid must be strictly increasing");
    }
}

double CostGrid::covering_radius() const noexcept {
    double r = std::max(values_.front(), 1.0 - values_.back());
    for (std::size_t i = 1; i < values_.size(); ++i) r = std::max(r, 0.5 * (values_[i] - values_[i - 1]));
    return r;
}

CostGrid make_uniform_grid(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidParameter("grid spacing must lie in (0,1]");
    std::vector<double> v;
    for (std::size_t k = 0;; ++k) {
        const double c = static_cast<double>(k) * epsilon;
        // Points within rounding noise of 1 collapse onto the clamped endpoint.
        if (c >= 1.0 - 1e-12) break;
        v.push_back(c);
    }
    v.push_back(1.0);
    return CostGrid(std::move(v));
}

std::string to_string(ModelFamily family) {
    switch (family) {
        case ModelFamily::Linear: return "linear";
        case ModelFamily::Sigmoid: return "sigmoid";
        case ModelFamily::Tabular: return "tabular";
    }
    return "unknown";
}

ModelFamily parse_model_family(const std::string& name) {
    if (name == "linear") return ModelFamily::Linear;
    if (name == "sigmoid") return ModelFamily::Sigmoid;
    if (name == "tabular") return ModelFamily::Tabular;
    throw InvalidParameter("unknown productivity family '" + name + "'");
}

ProductivityModel::ProductivityModel(ModelFamily family, CostGrid grid, std::size_t experts,
                                     std::vector<double> probs, std::vector<int> thetas,
                                     std::optional<double> lipschitz_hint)
    : family_(family), grid_(std::move(grid)), experts_(experts), probs_(std::move(probs)),
      thetas_(std::move(thetas)), lipschitz_hint_(lipschitz_hint) {
    if (experts_ == 0) throw InvalidParameter("model needs at least one expert");
    if (probs_.size() != experts_ * grid_.size()) throw InvalidParameter("probability table has wrong shape");
    for (double p : probs_) {
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("success probabilities must lie in [0,1]");
    }
    if (family_ == ModelFamily::Sigmoid && thetas_.size() != experts_) {
        throw InvalidParameter("sigmoid model needs one slope per expert");
    }
    if (lipschitz_hint_ && !(*lipschitz_hint_ >= 0.0)) throw InvalidParameter("lipschitz hint must be >= 0");
}

double sigmoid_productivity(int theta, double c) {
    const double e = std::exp(static_cast<double>(theta) * c);
    return e / (1.0 + e);
}

namespace {

CostGrid sorted_uniform_grid(std::size_t points, double lo, double hi, RngStream& rng) {
    std::vector<double> v(points);
    for (double& c : v) c = rng.uniform(lo, hi);
    std::sort(v.begin(), v.end());
    // Duplicate draws have probability ~N^2 2^-53; reject rather than silently merge.
    if (std::adjacent_find(v.begin(), v.end()) != v.end()) {
        throw InvalidParameter("sampled grid contains duplicate payments; use another seed");
    }
    return CostGrid(std::move(v));
}

void require_sizes(std::size_t points, std::size_t experts) {
    if (points == 0) throw InvalidParameter("grid size N must be >= 1");
    if (experts == 0) throw InvalidParameter("expert count K must be >= 1");
}

}  // namespace

ProductivityModel linear_model_on_grid(CostGrid grid, std::size_t experts) {
    require_sizes(grid.size(), experts);
    std::vector<double> probs;
    probs.reserve(experts * grid.size());
    for (std::size_t j = 0; j < experts; ++j) probs.insert(probs.end(), grid.values().begin(), grid.values().end());
    return ProductivityModel(ModelFamily::Linear, std::move(grid), experts, std::move(probs), {}, 1.0);
}

ProductivityModel make_linear_model(std::size_t points, std::size_t experts, RngStream& rng) {
    require_sizes(points, experts);
    return linear_model_on_grid(sorted_uniform_grid(points, 0.5, 1.0, rng), experts);
}

ProductivityModel sigmoid_model_on_grid(CostGrid grid, std::size_t experts, RngStream& rng) {
    require_sizes(grid.size(), experts);
    std::vector<int> thetas(experts);
    for (int& th : thetas) th = static_cast<int>(rng.uniform_int(1, 10));
    std::vector<double> probs;
    probs.reserve(experts * grid.size());
    int max_theta = 0;
    for (int th : thetas) {
        max_theta = std::max(max_theta, th);
        for (double c : grid.values()) probs.push_back(sigmoid_productivity(th, c));
    }
    // The logistic derivative peaks at theta/4.
    return ProductivityModel(ModelFamily::Sigmoid, std::move(grid), experts, std::move(probs), std::move(thetas),
                             max_theta / 4.0);
}

ProductivityModel make_sigmoid_model(std::size_t points, std::size_t experts, RngStream& rng) {
    require_sizes(points, experts);
    CostGrid grid = sorted_uniform_grid(points, 0.0, 1.0, rng);
    return sigmoid_model_on_grid(std::move(grid), experts, rng);
}

ProductivityModel make_tabular_model(CostGrid grid, std::vector<std::vector<double>> probs) {
    if (probs.empty()) throw InvalidParameter("tabular model needs at least one expert");
    std::vector<double> flat;
    double slope = 0.0;
    for (const auto& row : probs) {
        if (row.size() != grid.size()) throw InvalidParameter("tabular row length differs from grid size");
        for (std::size_t i = 1; i < row.size(); ++i) {
            slope = std::max(slope, std::abs(row[i] - row[i - 1]) / (grid[i] - grid[i - 1]));
        }
        flat.insert(flat.end(), row.begin(), row.end());
    }
    const std::size_t k = probs.size();
    return ProductivityModel(ModelFamily::Tabular, std::move(grid), k, std::move(flat), {}, slope);
}

nlohmann::json model_to_json(const ProductivityModel& model) {
    nlohmann::json j;
    j["K"] = model.experts();
    j["N"] = model.points();
    j["family"] = to_string(model.family());
    j["grid"] = std::vector<double>(model.grid().values().begin(), model.grid().values().end());
    if (model.family() == ModelFamily::Sigmoid) j["thetas"] = model.thetas();
    if (model.lipschitz_hint()) j["lipschitz_hint"] = *model.lipschitz_hint();
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < model.experts(); ++r) {
        rows.push_back(std::vector<double>(model.row(r).begin(), model.row(r).end()));
    }
    j["p"] = std::move(rows);
    return j;
}

ProductivityModel model_from_json(const nlohmann::json& j) {
    try {
        CostGrid grid(j.at("grid").get<std::vector<double>>());
        auto rows = j.at("p").get<std::vector<std::vector<double>>>();
        if (j.contains("N") && j.at("N").get<std::size_t>() != grid.size()) {
            throw InvalidParameter("model N does not match grid length");
        }
        if (j.contains("K") && j.at("K").get<std::size_t>() != rows.size()) {
            throw InvalidParameter("model K does not match number of probability rows");
        }
        const ModelFamily family = j.contains("family") ? parse_model_family(j.at("family").get<std::string>())
                                                        : ModelFamily::Tabular;
        if (family == ModelFamily::Tabular && !j.contains("lipschitz_hint")) {
            return make_tabular_model(std::move(grid), std::move(rows));
        }
        std::vector<double> flat;
        for (const auto& row : rows) {
            if (row.size() != grid.size()) throw InvalidParameter("probability row length differs from grid size");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        std::vector<int> thetas;
        if (j.contains("thetas")) thetas = j.at("thetas").get<std::vector<int>>();
        std::optional<double> hint;
        if (j.contains("lipschitz_hint")) hint = j.at("lipschitz_hint").get<double>();
        return ProductivityModel(family, std::move(grid), rows.size(), std::move(flat), std::move(thetas), hint);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParameter(std::string("malformed model JSON: ") + e.what());
    }
}

namespace {

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open for reading");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path, e.what());
    }
}

}  // namespace

void save_model(const ProductivityModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << model_to_json(model).dump(2) << '\n';
    if (!out) throw IoError(path, "write failed");
}

ProductivityModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

CostGrid load_grid(const std::string& path) {
    const auto j = read_json_file(path);
    try {
        if (j.is_array()) return CostGrid(j.get<std::vector<double>>());
        return CostGrid(j.at("grid").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path, std::string("malformed grid: ") + e.what());
    }
}

PaymentVector PaymentVector::from_indices(const CostGrid& grid, std::vector<std::size_t> idx) {
    PaymentVector pv;
    pv.values.reserve(idx.size());
    for (std::size_t i : idx) {
        if (i >= grid.size()) throw InvalidParameter("payment index out of range");
        pv.values.push_back(grid[i]);
    }
    pv.idx = std::move(idx);
    return pv;
}

double PaymentVector::sum() const noexcept {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

std::vector<bool> sample_correctness(const ProductivityModel& model, const PaymentVector& payments,
                                     RngStream& rng) {
    if (payments.size() != model.experts()) throw InvalidParameter("payment vector length differs from K");
    std::vector<bool> correct(model.experts());
    for (std::size_t j = 0; j < model.experts(); ++j) {
        if (payments.idx[j] >= model.points()) throw InvalidParameter("payment index out of range");
        correct[j] = rng.bernoulli(model.p(j, payments.idx[j]));
    }
    return correct;
}

AdviceVector advice_from_correctness(const std::vector<bool>& correct, Label label) {
    AdviceVector a;
    a.z.reserve(correct.size());
    for (bool c : correct) a.z.push_back(c ? label : -label);
    return a;
}

AdviceVector sample_advice(const ProductivityModel& model, const PaymentVector& payments, Label label,
                           RngStream& rng) {
    if (label != 1 && label != -1) throw InvalidParameter("label must be -1 or +1");
    return advice_from_correctness(sample_correctness(model, payments, rng), label);
}

std::string to_string(LabelMode mode) {
    switch (mode) {
        case LabelMode::AllPlus: return "all-plus";
        case LabelMode::Alternating: return "alternating";
        case LabelMode::Rademacher: return "rademacher";
    }
    return "unknown";
}

LabelMode parse_label_mode(const std::string& name) {
    if (name == "all-plus") return LabelMode::AllPlus;
    if (name == "alternating") return LabelMode::Alternating;
    if (name == "rademacher") return LabelMode::Rademacher;
    throw InvalidParameter("unknown label mode '" + name + "'");
}

std::vector<Label> make_labels(std::size_t rounds, LabelMode mode, RngStream& rng) {
    if (rounds == 0) throw InvalidParameter("label sequence length must be >= 1");
    std::vector<Label> y(rounds);
    for (std::size_t t = 0; t < rounds; ++t) {
        switch (mode) {
            case LabelMode::AllPlus: y[t] = 1; break;
            case LabelMode::Alternating: y[t] = (t % 2 == 0) ? 1 : -1; break;
            case LabelMode::Rademacher: y[t] = rng.bernoulli(0.5) ? 1 : -1; break;
        }
    }
    return y;
}

}  // namespace paidexperts

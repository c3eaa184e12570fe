#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "paidexperts/baseline.hpp"
#include "paidexperts/env.hpp"
#include "paidexperts/optimizers.hpp"
#include "paidexperts/oracle.hpp"

namespace paidexperts {

enum class Algorithm { GaptronBrute, GaptronSelfish, GaptronLocal, Lcb };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

/// How each replication's payment grid is obtained.
struct GridSpec {
    enum class Mode { RandomPerRep, UniformEpsilon, FromFile };
    Mode mode = Mode::RandomPerRep;
    double epsilon = 0.0;
    std::string path;

    /// "random", "uniform:<eps>" or "file:<path>".
    static GridSpec parse(const std::string& text);
    std::string to_string() const;
};

struct ExperimentConfig {
    Algorithm algorithm = Algorithm::GaptronLocal;
    ModelFamily family = ModelFamily::Linear;
    std::string tabular_path;  // family == Tabular
    std::size_t K = 5;
    std::size_t N = 5;
    std::size_t T = 10'000;
    double lambda = 1e-2;
    std::size_t replications = 20;
    std::uint64_t seed = 0;
    GridSpec grid;
    std::optional<double> beta_override;
    std::optional<double> delta_override;
    double lcb_radius = kDefaultLcbRadius;
    LabelMode labels = LabelMode::AllPlus;
    std::uint64_t brute_budget = kDefaultBruteBudget;
    std::size_t local_max_sweeps = 10;
    double local_tol = 0.0;
    std::size_t frontier_cap = kDefaultFrontierCap;
    std::string output;
    std::string format = "csv";
    std::size_t jobs = 0;  // 0: hardware concurrency

    /// "linear", "sigmoid" or "tabular:<path>".
    std::string family_string() const;
    void set_family(const std::string& text);

    /// Throws InvalidParameter naming the offending field.
    void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Fields missing from `j` keep their values in `base`. Unknown fields are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

/// Cumulative series of one replication, index t-1 holding the value after round t.
struct Trajectory {
    std::vector<double> cum_cost;           // mistakes + lambda * payments
    std::vector<double> cum_mistakes;
    std::vector<double> cum_payments;       // unweighted payment sum
    std::vector<double> cum_expected_cost;  // NaN when disabled (K > 20)
    double opt_value = 0.0;                 // per-round grid comparator

    std::size_t rounds() const noexcept { return cum_cost.size(); }
    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct AggregateSeries {
    std::vector<double> cum_cost;
    std::vector<double> cum_mistakes;
    std::vector<double> cum_payments;
    std::vector<double> cum_expected_cost;
    std::vector<double> cost_std;  // sample std (R - 1 denominator); 0 when R = 1
    double opt_value = 0.0;        // mean over replications

    friend bool operator==(const AggregateSeries&, const AggregateSeries&) = default;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<Trajectory> replications;
    AggregateSeries aggregate;
    std::string code_version;
    double wall_seconds = 0.0;
};

AggregateSeries aggregate_trajectories(const std::vector<Trajectory>& reps);

/// The replication's productivity model; depends only on (config, replication).
ProductivityModel model_for_replication(const ExperimentConfig& cfg, std::size_t replication);

/// One replication, independent of every other.
Trajectory run_replication(const ExperimentConfig& cfg, std::size_t replication);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// All replications on a pool of cfg.jobs threads, then aggregation.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

enum class RegretMode { ExpectedCost, RealizedCost };

/// Cumulative cost minus t * opt, for t = 0..T (entry 0 is 0).
std::vector<double> regret_series(const Trajectory& traj, RegretMode mode);
std::vector<double> regret_series(const ExperimentResult& result, RegretMode mode);

enum class ResultFormat { Csv, Json };

ResultFormat parse_result_format(const std::string& name);

/// Column order of the CSV output.
const std::vector<std::string>& csv_columns();

void write_results(const ExperimentResult& result, ResultFormat format, const std::string& path);
/// Reads a file written by write_results. Per-replication rows become
/// trajectories, aggregate rows (replication = -1) the aggregate series.
ExperimentResult read_results(const std::string& path, ResultFormat format);

std::string format_double(double v);

}  // namespace paidexperts

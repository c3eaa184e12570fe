#include "paidexperts/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "paidexperts/errors.hpp"
#include "paidexperts/policy.hpp"

#ifndef PAIDEXPERTS_VERSION
#define PAIDEXPERTS_VERSION "unknown"
#endif

namespace paidexperts {

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::GaptronBrute: return "gaptron-brute";
        case Algorithm::GaptronSelfish: return "gaptron-selfish";
        case Algorithm::GaptronLocal: return "gaptron-local";
        case Algorithm::Lcb: return "lcb";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "gaptron-brute") return Algorithm::GaptronBrute;
    if (name == "gaptron-selfish") return Algorithm::GaptronSelfish;
    if (name == "gaptron-local") return Algorithm::GaptronLocal;
    if (name == "lcb") return Algorithm::Lcb;
    throw InvalidParameter("unknown algorithm '" + name + "'");
}

GridSpec GridSpec::parse(const std::string& text) {
    GridSpec g;
    if (text == "random") return g;
    if (text.rfind("uniform:", 0) == 0) {
        g.mode = Mode::UniformEpsilon;
        const std::string num = text.substr(8);
        std::size_t used = 0;
        try {
            g.epsilon = std::stod(num, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != num.size()) throw InvalidParameter("grid: cannot parse spacing in '" + text + "'");
        if (!(g.epsilon > 0.0 && g.epsilon <= 1.0)) throw InvalidParameter("grid: spacing must lie in (0,1]");
        return g;
    }
    if (text.rfind("file:", 0) == 0 && text.size() > 5) {
        g.mode = Mode::FromFile;
        g.path = text.substr(5);
        return g;
    }
    throw InvalidParameter("grid must be 'random', 'uniform:<eps>' or 'file:<path>', got '" + text + "'");
}

std::string GridSpec::to_string() const {
    switch (mode) {
        case Mode::RandomPerRep: return "random";
        case Mode::UniformEpsilon: return "uniform:" + format_double(epsilon);
        case Mode::FromFile: return "file:" + path;
    }
    return "random";
}

std::string ExperimentConfig::family_string() const {
    if (family == ModelFamily::Tabular) return "tabular:" + tabular_path;
    return paidexperts::to_string(family);
}

void ExperimentConfig::set_family(const std::string& text) {
    if (text.rfind("tabular:", 0) == 0 && text.size() > 8) {
        family = ModelFamily::Tabular;
        tabular_path = text.substr(8);
        return;
    }
    if (text == "linear" || text == "sigmoid") {
        family = parse_model_family(text);
        tabular_path.clear();
        return;
    }
    throw InvalidParameter("family must be 'linear', 'sigmoid' or 'tabular:<path>', got '" + text + "'");
}

void ExperimentConfig::validate() const {
    if (T < 1) throw InvalidParameter("T must be >= 1");
    if (replications < 1) throw InvalidParameter("replications must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidParameter("lambda must be a finite value >= 0");
    if (family != ModelFamily::Tabular) {
        if (K < 1) throw InvalidParameter("K must be >= 1");
        if (grid.mode == GridSpec::Mode::RandomPerRep && N < 1) throw InvalidParameter("N must be >= 1");
    } else if (tabular_path.empty()) {
        throw InvalidParameter("tabular family needs a model path");
    }
    if (beta_override && !(*beta_override >= 0.0)) throw InvalidParameter("beta override must be >= 0");
    if (delta_override && !(*delta_override > 0.0 && *delta_override < 1.0)) {
        throw InvalidParameter("delta override must lie in (0,1)");
    }
    if (!(lcb_radius >= 0.0)) throw InvalidParameter("LCB radius constant must be >= 0");
    if (local_max_sweeps < 1) throw InvalidParameter("local_max_sweeps must be >= 1");
    if (!(local_tol >= 0.0)) throw InvalidParameter("local_tol must be >= 0");
    if (format != "csv" && format != "json") throw InvalidParameter("format must be 'csv' or 'json'");
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["algorithm"] = to_string(cfg.algorithm);
    j["family"] = cfg.family_string();
    j["K"] = cfg.K;
    j["N"] = cfg.N;
    j["T"] = cfg.T;
    j["lambda"] = cfg.lambda;
    j["replications"] = cfg.replications;
    j["seed"] = cfg.seed;
    j["grid"] = cfg.grid.to_string();
    j["beta_override"] = cfg.beta_override ? nlohmann::json(*cfg.beta_override) : nlohmann::json(nullptr);
    j["delta_override"] = cfg.delta_override ? nlohmann::json(*cfg.delta_override) : nlohmann::json(nullptr);
    j["lcb_radius"] = cfg.lcb_radius;
    j["labels"] = to_string(cfg.labels);
    j["brute_budget"] = cfg.brute_budget;
    j["local_max_sweeps"] = cfg.local_max_sweeps;
    j["local_tol"] = cfg.local_tol;
    j["frontier_cap"] = cfg.frontier_cap;
    j["output"] = cfg.output;
    j["format"] = cfg.format;
    j["jobs"] = cfg.jobs;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig cfg) {
    if (!j.is_object()) throw InvalidParameter("experiment config must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "algorithm") cfg.algorithm = parse_algorithm(value.get<std::string>());
            else if (key == "family") cfg.set_family(value.get<std::string>());
            else if (key == "K") cfg.K = value.get<std::size_t>();
            else if (key == "N") cfg.N = value.get<std::size_t>();
            else if (key == "T") cfg.T = value.get<std::size_t>();
            else if (key == "lambda") cfg.lambda = value.get<double>();
            else if (key == "replications") cfg.replications = value.get<std::size_t>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "grid") cfg.grid = GridSpec::parse(value.get<std::string>());
            else if (key == "beta_override") {
                cfg.beta_override = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
            } else if (key == "delta_override") {
                cfg.delta_override = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
            } else if (key == "lcb_radius") cfg.lcb_radius = value.get<double>();
            else if (key == "labels") cfg.labels = parse_label_mode(value.get<std::string>());
            else if (key == "brute_budget") cfg.brute_budget = value.get<std::uint64_t>();
            else if (key == "local_max_sweeps") cfg.local_max_sweeps = value.get<std::size_t>();
            else if (key == "local_tol") cfg.local_tol = value.get<double>();
            else if (key == "frontier_cap") cfg.frontier_cap = value.get<std::size_t>();
            else if (key == "output") cfg.output = value.get<std::string>();
            else if (key == "format") cfg.format = value.get<std::string>();
            else if (key == "jobs") cfg.jobs = value.get<std::size_t>();
            else throw InvalidParameter("unknown config field '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParameter(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

ProductivityModel model_for_replication(const ExperimentConfig& cfg, std::size_t replication) {
    if (cfg.family == ModelFamily::Tabular) return load_model(cfg.tabular_path);
    RngStream rng(cfg.seed, replication, StreamRole::ModelGen);
    if (cfg.grid.mode == GridSpec::Mode::RandomPerRep) {
        return cfg.family == ModelFamily::Linear ? make_linear_model(cfg.N, cfg.K, rng)
                                                 : make_sigmoid_model(cfg.N, cfg.K, rng);
    }
    CostGrid grid = cfg.grid.mode == GridSpec::Mode::UniformEpsilon ? make_uniform_grid(cfg.grid.epsilon)
                                                                    : load_grid(cfg.grid.path);
    return cfg.family == ModelFamily::Linear ? linear_model_on_grid(std::move(grid), cfg.K)
                                             : sigmoid_model_on_grid(std::move(grid), cfg.K, rng);
}

namespace {

OptimizerKind optimizer_for(Algorithm a) {
    switch (a) {
        case Algorithm::GaptronBrute: return OptimizerKind::Brute;
        case Algorithm::GaptronSelfish: return OptimizerKind::Selfish;
        default: return OptimizerKind::Local;
    }
}

void check_brute_budget(const ExperimentConfig& cfg, const ProductivityModel& model) {
    if (cfg.algorithm != Algorithm::GaptronBrute) return;
    if (enumeration_size(model.points(), model.experts()) > cfg.brute_budget) {
        throw InvalidParameter("gaptron-brute enumerates N^K = " + std::to_string(model.points()) + "^" +
                               std::to_string(model.experts()) + " payment vectors per round, above the limit of " +
                               std::to_string(cfg.brute_budget) +
                               "; lower K or N, raise brute_budget, or use gaptron-local");
    }
}

}  // namespace

Trajectory run_replication(const ExperimentConfig& cfg, std::size_t replication) {
    const ProductivityModel model = model_for_replication(cfg, replication);
    check_brute_budget(cfg, model);
    const std::size_t k = model.experts();
    const bool with_expected = k <= kMaxEnumeratedExperts;

    RngStream advice_rng(cfg.seed, replication, StreamRole::Advice);
    RngStream predictor_rng(cfg.seed, replication, StreamRole::Predictor);
    RngStream label_rng(cfg.seed, replication, StreamRole::Labels);
    const std::vector<Label> labels = make_labels(cfg.T, cfg.labels, label_rng);

    Trajectory traj;
    traj.cum_cost.reserve(cfg.T);
    traj.cum_mistakes.reserve(cfg.T);
    traj.cum_payments.reserve(cfg.T);
    traj.cum_expected_cost.reserve(cfg.T);
    try {
        traj.opt_value = opt_pareto(model, cfg.lambda, cfg.frontier_cap).value;
    } catch (const BudgetExceeded&) {
        traj.opt_value = std::numeric_limits<double>::quiet_NaN();
    }

    double mistakes = 0.0, payments = 0.0, expected = 0.0;
    auto record = [&](const RoundRecord& r) {
        mistakes += r.mistake ? 1.0 : 0.0;
        payments += r.payment_sum;
        expected += r.expected_cost;
        traj.cum_mistakes.push_back(mistakes);
        traj.cum_payments.push_back(payments);
        traj.cum_cost.push_back(mistakes + cfg.lambda * payments);
        traj.cum_expected_cost.push_back(expected);
    };

    if (cfg.algorithm == Algorithm::Lcb) {
        LcbBandit bandit(k, model.points(), cfg.lambda, cfg.lcb_radius, with_expected);
        for (std::size_t t = 1; t <= cfg.T; ++t) record(bandit.step(t, model, labels[t - 1], advice_rng));
        return traj;
    }

    PolicyConfig pc = PolicyConfig::with_defaults(k, model.grid(), cfg.T, cfg.lambda, optimizer_for(cfg.algorithm));
    if (cfg.delta_override) {
        pc.params.delta = *cfg.delta_override;
        pc.params.beta = 18.0 * std::log(3.0 / pc.params.delta) * static_cast<double>(k * k);
    }
    if (cfg.beta_override) pc.params.beta = *cfg.beta_override;
    pc.brute_budget = cfg.brute_budget;
    pc.local = {cfg.local_max_sweeps, cfg.local_tol};
    pc.expected_cost = with_expected;
    GaptronPolicy policy(k, std::move(pc));
    for (std::size_t t = 1; t <= cfg.T; ++t) {
        record(policy.step(t, model, labels[t - 1], advice_rng, predictor_rng));
    }
    return traj;
}

AggregateSeries aggregate_trajectories(const std::vector<Trajectory>& reps) {
    AggregateSeries agg;
    if (reps.empty()) return agg;
    const std::size_t t_len = reps.front().rounds();
    const double r = static_cast<double>(reps.size());
    for (const auto& tr : reps) {
        if (tr.rounds() != t_len) throw InvalidParameter("replications have different lengths");
    }
    auto mean_of = [&](auto member) {
        std::vector<double> out(t_len, 0.0);
        for (const auto& tr : reps) {
            const auto& s = tr.*member;
            for (std::size_t t = 0; t < t_len; ++t) out[t] += s[t];
        }
        for (double& v : out) v /= r;
        return out;
    };
    agg.cum_cost = mean_of(&Trajectory::cum_cost);
    agg.cum_mistakes = mean_of(&Trajectory::cum_mistakes);
    agg.cum_payments = mean_of(&Trajectory::cum_payments);
    agg.cum_expected_cost = mean_of(&Trajectory::cum_expected_cost);
    agg.cost_std.assign(t_len, 0.0);
    if (reps.size() > 1) {
        for (std::size_t t = 0; t < t_len; ++t) {
            double ss = 0.0;
            for (const auto& tr : reps) {
                const double d = tr.cum_cost[t] - agg.cum_cost[t];
                ss += d * d;
            }
            agg.cost_std[t] = std::sqrt(ss / (r - 1.0));
        }
    }
    double opt = 0.0;
    for (const auto& tr : reps) opt += tr.opt_value;
    agg.opt_value = opt / r;
    return agg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    // Fail fast on configs every replication would reject.
    const ProductivityModel first = model_for_replication(cfg, 0);
    check_brute_budget(cfg, first);

    ExperimentResult result;
    result.config = cfg;
    // Tabular models and fixed grids determine the dimensions themselves.
    result.config.K = first.experts();
    result.config.N = first.points();
    result.code_version = PAIDEXPERTS_VERSION;
    result.replications.resize(cfg.replications);

    std::size_t jobs = cfg.jobs != 0 ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, cfg.replications);
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex mu;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= cfg.replications) return;
            {
                std::lock_guard lock(mu);
                if (failure) return;
            }
            try {
                Trajectory tr = run_replication(cfg, r);
                std::lock_guard lock(mu);
                result.replications[r] = std::move(tr);
                ++done;
                if (progress) progress(done, cfg.replications);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    result.aggregate = aggregate_trajectories(result.replications);
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

namespace {

std::vector<double> regret_from(const std::vector<double>& cum, double opt) {
    std::vector<double> out(cum.size() + 1, 0.0);
    for (std::size_t t = 0; t < cum.size(); ++t) out[t + 1] = cum[t] - static_cast<double>(t + 1) * opt;
    return out;
}

}  // namespace

std::vector<double> regret_series(const Trajectory& traj, RegretMode mode) {
    return regret_from(mode == RegretMode::ExpectedCost ? traj.cum_expected_cost : traj.cum_cost, traj.opt_value);
}

std::vector<double> regret_series(const ExperimentResult& result, RegretMode mode) {
    const auto& a = result.aggregate;
    return regret_from(mode == RegretMode::ExpectedCost ? a.cum_expected_cost : a.cum_cost, a.opt_value);
}

ResultFormat parse_result_format(const std::string& name) {
    if (name == "csv") return ResultFormat::Csv;
    if (name == "json") return ResultFormat::Json;
    throw InvalidParameter("format must be 'csv' or 'json', got '" + name + "'");
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "algorithm", "family",       "K",            "N",           "T",
        "lambda",    "replication",  "round",        "cum_cost",    "cum_mistakes",
        "cum_payments", "cum_expected_cost", "opt_value", "cost_std"};
    return cols;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string family_label(const ExperimentConfig& cfg) { return to_string(cfg.family); }

struct Row {
    long replication;
    std::size_t round;
    double cum_cost, cum_mistakes, cum_payments, cum_expected_cost, opt_value;
    std::optional<double> cost_std;
};

template <class Emit>
void for_each_row(const ExperimentResult& result, Emit&& emit) {
    for (std::size_t r = 0; r < result.replications.size(); ++r) {
        const Trajectory& tr = result.replications[r];
        for (std::size_t t = 0; t < tr.rounds(); ++t) {
            emit(Row{static_cast<long>(r), t + 1, tr.cum_cost[t], tr.cum_mistakes[t], tr.cum_payments[t],
                     tr.cum_expected_cost[t], tr.opt_value, std::nullopt});
        }
    }
    const AggregateSeries& a = result.aggregate;
    for (std::size_t t = 0; t < a.cum_cost.size(); ++t) {
        emit(Row{-1, t + 1, a.cum_cost[t], a.cum_mistakes[t], a.cum_payments[t], a.cum_expected_cost[t], a.opt_value,
                 a.cost_std[t]});
    }
}

void commit(const std::string& tmp, const std::string& path) {
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(path, "cannot move finished file into place: " + ec.message());
}

double parse_double(const std::string& s, const std::string& path) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError(path, "bad number '" + s + "'");
    }
}

double json_double(const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

nlohmann::json json_number(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

void assemble(ExperimentResult& res, const std::vector<Row>& rows, const std::string& path) {
    std::map<long, std::vector<const Row*>> by_rep;
    for (const Row& row : rows) by_rep[row.replication].push_back(&row);
    for (const auto& [rep, list] : by_rep) {
        if (rep < -1) throw IoError(path, "negative replication index");
    }
    long expected_rep = 0;
    for (const auto& [rep, list] : by_rep) {
        if (rep == -1) continue;
        if (rep != expected_rep++) throw IoError(path, "replication indices are not contiguous");
        Trajectory tr;
        for (std::size_t t = 0; t < list.size(); ++t) {
            if (list[t]->round != t + 1) throw IoError(path, "rounds are not consecutive");
            tr.cum_cost.push_back(list[t]->cum_cost);
            tr.cum_mistakes.push_back(list[t]->cum_mistakes);
            tr.cum_payments.push_back(list[t]->cum_payments);
            tr.cum_expected_cost.push_back(list[t]->cum_expected_cost);
            tr.opt_value = list[t]->opt_value;
        }
        res.replications.push_back(std::move(tr));
    }
    if (auto it = by_rep.find(-1); it != by_rep.end()) {
        AggregateSeries& a = res.aggregate;
        for (const Row* row : it->second) {
            a.cum_cost.push_back(row->cum_cost);
            a.cum_mistakes.push_back(row->cum_mistakes);
            a.cum_payments.push_back(row->cum_payments);
            a.cum_expected_cost.push_back(row->cum_expected_cost);
            a.cost_std.push_back(row->cost_std.value_or(0.0));
            a.opt_value = row->opt_value;
        }
    }
    res.config.replications = res.replications.size();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

void write_results(const ExperimentResult& result, ResultFormat format, const std::string& path) {
    const std::string tmp = path + ".tmp";
    const ExperimentConfig& cfg = result.config;
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError(path, "cannot open for writing");
        if (format == ResultFormat::Csv) {
            const auto& cols = csv_columns();
            for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
            out << '\n';
            const std::string prefix = to_string(cfg.algorithm) + "," + family_label(cfg) + "," +
                                       std::to_string(cfg.K) + "," + std::to_string(cfg.N) + "," +
                                       std::to_string(cfg.T) + "," + format_double(cfg.lambda) + ",";
            for_each_row(result, [&](const Row& row) {
                out << prefix << row.replication << ',' << row.round << ',' << format_double(row.cum_cost) << ','
                    << format_double(row.cum_mistakes) << ',' << format_double(row.cum_payments) << ','
                    << format_double(row.cum_expected_cost) << ',' << format_double(row.opt_value) << ','
                    << (row.cost_std ? format_double(*row.cost_std) : std::string()) << '\n';
            });
        } else {
            nlohmann::json meta = config_to_json(cfg);
            meta["code_version"] = result.code_version;
            meta["wall_seconds"] = result.wall_seconds;
            auto rows = nlohmann::json::array();
            for_each_row(result, [&](const Row& row) {
                nlohmann::json j;
                j["algorithm"] = to_string(cfg.algorithm);
                j["family"] = family_label(cfg);
                j["K"] = cfg.K;
                j["N"] = cfg.N;
                j["T"] = cfg.T;
                j["lambda"] = cfg.lambda;
                j["replication"] = row.replication;
                j["round"] = row.round;
                j["cum_cost"] = json_number(row.cum_cost);
                j["cum_mistakes"] = json_number(row.cum_mistakes);
                j["cum_payments"] = json_number(row.cum_payments);
                j["cum_expected_cost"] = json_number(row.cum_expected_cost);
                j["opt_value"] = json_number(row.opt_value);
                if (row.cost_std) j["cost_std"] = json_number(*row.cost_std);
                rows.push_back(std::move(j));
            });
            out << nlohmann::json{{"meta", std::move(meta)}, {"rows", std::move(rows)}}.dump() << '\n';
        }
        out.flush();
        if (!out) throw IoError(path, "write failed");
    }
    commit(tmp, path);
}

ExperimentResult read_results(const std::string& path, ResultFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    ExperimentResult res;
    std::vector<Row> rows;
    bool have_meta = false;

    if (format == ResultFormat::Csv) {
        std::string line;
        if (!std::getline(in, line)) throw IoError(path, "missing CSV header");
        if (split_csv_line(line) != csv_columns()) throw IoError(path, "unexpected CSV header");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            if (f.size() != csv_columns().size()) throw IoError(path, "row has wrong number of fields");
            if (!have_meta) {
                res.config.algorithm = parse_algorithm(f[0]);
                res.config.family = parse_model_family(f[1]);
                res.config.K = std::stoul(f[2]);
                res.config.N = std::stoul(f[3]);
                res.config.T = std::stoul(f[4]);
                res.config.lambda = parse_double(f[5], path);
                have_meta = true;
            }
            rows.push_back(Row{std::stol(f[6]), std::stoul(f[7]), parse_double(f[8], path), parse_double(f[9], path),
                               parse_double(f[10], path), parse_double(f[11], path), parse_double(f[12], path),
                               f[13].empty() ? std::nullopt : std::optional<double>(parse_double(f[13], path))});
        }
    } else {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
            const auto& meta = doc.at("meta");
            nlohmann::json cfg_fields = meta;
            cfg_fields.erase("code_version");
            cfg_fields.erase("wall_seconds");
            res.config = config_from_json(cfg_fields);
            res.code_version = meta.value("code_version", "");
            res.wall_seconds = meta.value("wall_seconds", 0.0);
            for (const auto& j : doc.at("rows")) {
                rows.push_back(Row{j.at("replication").get<long>(), j.at("round").get<std::size_t>(),
                                   json_double(j.at("cum_cost")), json_double(j.at("cum_mistakes")),
                                   json_double(j.at("cum_payments")), json_double(j.at("cum_expected_cost")),
                                   json_double(j.at("opt_value")),
                                   j.contains("cost_std") ? std::optional<double>(json_double(j.at("cost_std")))
                                                          : std::nullopt});
            }
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path, e.what());
        }
    }
    assemble(res, rows, path);
    return res;
}

}  // namespace paidexperts

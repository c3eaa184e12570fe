#include "paidexperts/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "paidexperts/errors.hpp"
#include "paidexperts/harness.hpp"
#include "paidexperts/oracle.hpp"
#include "paidexperts/verify.hpp"

namespace paidexperts {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        if (item.empty()) throw InvalidParameter("empty entry in list '" + text + "'");
        out.push_back(item);
    }
    if (out.empty()) throw InvalidParameter("empty list");
    return out;
}

std::size_t to_size(const std::string& s, const std::string& flag) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size() || v < 0) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw InvalidParameter(flag + ": expected a non-negative integer, got '" + s + "'");
    }
}

double to_double(const std::string& s, const std::string& flag) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidParameter(flag + ": expected a number, got '" + s + "'");
    }
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open config");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParameter("config " + path + ": " + e.what());
    }
}

void write_json_atomic(const nlohmann::json& j, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError(tmp, "cannot open for writing");
        out << j.dump(2) << '\n';
        if (!out) throw IoError(tmp, "write failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError(path, "rename failed: " + ec.message());
}

// Flags shared by `run` and `sweep`. List-valued in sweep, scalar in run.
struct ExperimentFlags {
    std::string algo = "gaptron-local";
    std::string family = "linear";
    std::string k = "5";
    std::string n = "5";
    std::string lambda = "0.01";
    std::size_t t = 10'000;
    std::size_t reps = 20;
    std::uint64_t seed = 0;
    std::string grid = "random";
    double beta = 0.0;
    double delta = 0.0;
    double lcb_radius = kDefaultLcbRadius;
    std::string labels = "all-plus";
    std::uint64_t brute_budget = kDefaultBruteBudget;
    std::string format = "csv";
    std::size_t jobs = 0;
    std::string config;

    CLI::Option* o_algo = nullptr;
    CLI::Option* o_family = nullptr;
    CLI::Option* o_k = nullptr;
    CLI::Option* o_n = nullptr;
    CLI::Option* o_lambda = nullptr;
    CLI::Option* o_t = nullptr;
    CLI::Option* o_reps = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_grid = nullptr;
    CLI::Option* o_beta = nullptr;
    CLI::Option* o_delta = nullptr;
    CLI::Option* o_radius = nullptr;
    CLI::Option* o_labels = nullptr;
    CLI::Option* o_budget = nullptr;
    CLI::Option* o_format = nullptr;
    CLI::Option* o_jobs = nullptr;
    CLI::Option* o_config = nullptr;

    void attach(CLI::App* app, bool lists) {
        const std::string many = lists ? " (comma-separated list)" : "";
        o_algo = app->add_option("--algo", algo, "gaptron-brute, gaptron-selfish, gaptron-local or lcb" + many)
                     ->capture_default_str();
        o_family = app->add_option("--family", family, "linear, sigmoid or tabular:<model.json>" + many)
                       ->capture_default_str();
        o_k = app->add_option("--k", k, "number of experts" + many)->capture_default_str();
        o_n = app->add_option("--n", n, "grid size for random grids" + many)->capture_default_str();
        o_lambda = app->add_option("--lambda", lambda, "payment weight" + many)->capture_default_str();
        o_t = app->add_option("--t", t, "horizon")->capture_default_str();
        o_reps = app->add_option("--reps", reps, "replications")->capture_default_str();
        o_seed = app->add_option("--seed", seed, "master seed");
        o_grid = app->add_option("--grid", grid, "random, uniform:<eps> or file:<grid.json>")->capture_default_str();
        o_beta = app->add_option("--beta-override", beta, "cutoff scale instead of the default");
        o_delta = app->add_option("--delta-override", delta, "confidence level instead of the default");
        o_radius = app->add_option("--lcb-radius", lcb_radius, "LCB exploration constant")->capture_default_str();
        o_labels = app->add_option("--labels", labels, "all-plus, alternating or rademacher")->capture_default_str();
        o_budget = app->add_option("--brute-budget", brute_budget, "largest N^K gaptron-brute may enumerate")
                       ->capture_default_str();
        o_format = app->add_option("--format", format, "csv or json")->capture_default_str();
        o_jobs = app->add_option("--jobs", jobs, "worker threads (0: all cores; env PAIDEXPERTS_JOBS)");
        o_config = app->add_option("--config", config, "JSON experiment config; flags override its fields");
    }

    bool given(const CLI::Option* o) const { return o != nullptr && o->count() > 0; }

    void check_conflicts() const {
        const bool tabular = family.find("tabular:") != std::string::npos;
        if (tabular) {
            if (given(o_k)) throw InvalidParameter("--family tabular:... conflicts with --k (the model file fixes K)");
            if (given(o_n)) throw InvalidParameter("--family tabular:... conflicts with --n (the model file fixes N)");
            if (given(o_grid)) throw InvalidParameter("--family tabular:... conflicts with --grid (the model file fixes the grid)");
        }
        if (given(o_grid) && grid != "random" && given(o_n)) {
            throw InvalidParameter("--grid " + grid + " conflicts with --n (the grid fixes N)");
        }
    }

    // Config file first, then every flag given on the command line.
    ExperimentConfig base(bool& seed_known) const {
        ExperimentConfig cfg;
        seed_known = false;
        if (given(o_config)) {
            const auto j = read_json_file(config);
            cfg = config_from_json(j, cfg);
            seed_known = j.is_object() && j.contains("seed");
        }
        if (given(o_t)) cfg.T = t;
        if (given(o_reps)) cfg.replications = reps;
        if (given(o_seed)) {
            cfg.seed = seed;
            seed_known = true;
        }
        if (given(o_grid)) cfg.grid = GridSpec::parse(grid);
        if (given(o_beta)) cfg.beta_override = beta;
        if (given(o_delta)) cfg.delta_override = delta;
        if (given(o_radius)) cfg.lcb_radius = lcb_radius;
        if (given(o_labels)) cfg.labels = parse_label_mode(labels);
        if (given(o_budget)) cfg.brute_budget = brute_budget;
        if (given(o_format)) cfg.format = format;
        if (given(o_jobs)) {
            cfg.jobs = jobs;
        } else if (const char* env = std::getenv("PAIDEXPERTS_JOBS"); env != nullptr && *env != '\0') {
            cfg.jobs = to_size(env, "PAIDEXPERTS_JOBS");
        }
        return cfg;
    }
};

ProgressFn progress_printer(std::ostream& err, const std::string& label) {
    return [&err, label](std::size_t done, std::size_t total) {
        err << label << "replication " << done << "/" << total << " done\n" << std::flush;
    };
}

std::string default_output(const ExperimentConfig& cfg) {
    return "results." + cfg.format;
}

std::string describe_final(const ExperimentResult& res) {
    const auto& agg = res.aggregate;
    std::ostringstream os;
    os << to_string(res.config.algorithm) << " family=" << res.config.family_string() << " K=" << res.config.K
       << " N=" << res.config.N << " T=" << res.config.T << " lambda=" << format_double(res.config.lambda)
       << " R=" << res.replications.size();
    if (!agg.cum_cost.empty()) {
        const double T = static_cast<double>(agg.cum_cost.size());
        os << std::setprecision(6) << ": final cost " << agg.cum_cost.back() << " +/- " << agg.cost_std.back()
           << ", mistakes " << agg.cum_mistakes.back() << ", payments " << agg.cum_payments.back();
        if (!std::isnan(agg.cum_expected_cost.back())) os << ", expected cost " << agg.cum_expected_cost.back();
        if (!std::isnan(agg.opt_value)) {
            os << ", T*OPT " << T * agg.opt_value;
            if (!std::isnan(agg.cum_expected_cost.back())) {
                os << ", expected regret " << agg.cum_expected_cost.back() - T * agg.opt_value;
            }
        }
    }
    return os.str();
}

int cmd_run(const ExperimentFlags& f, const std::string& out_path, bool out_given, std::ostream& out,
            std::ostream& err) {
    f.check_conflicts();
    for (const auto* o : {f.o_algo, f.o_family, f.o_k, f.o_n, f.o_lambda}) {
        if (f.given(o) && o->as<std::string>().find(',') != std::string::npos) {
            throw InvalidParameter(o->get_name() + " takes a single value in `run`; use `sweep` for lists");
        }
    }
    bool seed_known = false;
    ExperimentConfig cfg = f.base(seed_known);
    if (!seed_known) throw InvalidParameter("--seed is required (or a \"seed\" field in --config)");
    if (f.given(f.o_algo)) cfg.algorithm = parse_algorithm(f.algo);
    if (f.given(f.o_family)) cfg.set_family(f.family);
    if (f.given(f.o_k)) cfg.K = to_size(f.k, "--k");
    if (f.given(f.o_n)) cfg.N = to_size(f.n, "--n");
    if (f.given(f.o_lambda)) cfg.lambda = to_double(f.lambda, "--lambda");
    if (out_given) cfg.output = out_path;
    if (cfg.output.empty()) cfg.output = default_output(cfg);
    cfg.validate();

    const auto result = run_experiment(cfg, progress_printer(err, ""));
    write_results(result, parse_result_format(cfg.format), cfg.output);
    out << describe_final(result) << "\n";
    out << "wrote " << cfg.output << "\n";
    return kExitOk;
}

std::string cell_name(const ExperimentConfig& c) {
    std::string fam = c.family == ModelFamily::Tabular ? "tabular-" + fs::path(c.tabular_path).stem().string()
                                                       : to_string(c.family);
    std::ostringstream os;
    os << to_string(c.algorithm) << "_" << fam << "_K" << c.K << "_N" << c.N << "_lambda" << format_double(c.lambda)
       << "." << c.format;
    return os.str();
}

int cmd_sweep(const ExperimentFlags& f, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    f.check_conflicts();
    bool seed_known = false;
    const ExperimentConfig base = f.base(seed_known);
    if (!seed_known) throw InvalidParameter("--seed is required (or a \"seed\" field in --config)");

    const auto algos = f.given(f.o_algo) ? split_list(f.algo) : std::vector<std::string>{to_string(base.algorithm)};
    const auto fams = f.given(f.o_family) ? split_list(f.family) : std::vector<std::string>{base.family_string()};
    const auto ks = f.given(f.o_k) ? split_list(f.k) : std::vector<std::string>{std::to_string(base.K)};
    const auto ns = f.given(f.o_n) ? split_list(f.n) : std::vector<std::string>{std::to_string(base.N)};
    const auto lams = f.given(f.o_lambda) ? split_list(f.lambda) : std::vector<std::string>{format_double(base.lambda)};

    // Build and validate every cell before running any.
    std::vector<ExperimentConfig> cells;
    for (const auto& a : algos)
        for (const auto& fam : fams)
            for (const auto& k : ks)
                for (const auto& n : ns)
                    for (const auto& l : lams) {
                        ExperimentConfig c = base;
                        c.algorithm = parse_algorithm(a);
                        c.set_family(fam);
                        c.K = to_size(k, "--k");
                        c.N = to_size(n, "--n");
                        c.lambda = to_double(l, "--lambda");
                        c.validate();
                        cells.push_back(c);
                    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError(out_dir, "cannot create output directory: " + ec.message());
    const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();

    nlohmann::json manifest;
    manifest["status"] = "partial";
    manifest["code_version"] = PAIDEXPERTS_VERSION;
    manifest["base_config"] = config_to_json(base);
    manifest["cells"] = nlohmann::json::array();
    for (auto& c : cells) {
        c.output = (fs::path(out_dir) / cell_name(c)).string();
        manifest["cells"].push_back({{"algorithm", to_string(c.algorithm)},
                                     {"family", c.family_string()},
                                     {"K", c.K},
                                     {"N", c.N},
                                     {"lambda", c.lambda},
                                     {"path", fs::path(c.output).filename().string()},
                                     {"status", "pending"}});
    }
    write_json_atomic(manifest, manifest_path);

    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        const std::string label = "[" + std::to_string(i + 1) + "/" + std::to_string(cells.size()) + "] ";
        const auto result = run_experiment(c, progress_printer(err, label));
        write_results(result, parse_result_format(c.format), c.output);
        manifest["cells"][i]["status"] = "done";
        manifest["cells"][i]["wall_seconds"] = result.wall_seconds;
        if (i + 1 == cells.size()) manifest["status"] = "complete";
        write_json_atomic(manifest, manifest_path);
        out << label << describe_final(result) << "\n";
    }
    out << "wrote " << cells.size() << " result files and " << manifest_path << "\n";
    return kExitOk;
}

struct OptFlags {
    std::string model;
    std::string family = "linear";
    std::size_t k = 5;
    std::size_t n = 5;
    std::string grid = "random";
    std::uint64_t seed = 0;
    std::size_t rep = 0;
    double lambda = 1e-2;
    std::string method = "pareto";
    std::uint64_t budget = kDefaultBruteBudget;
    std::size_t cap = kDefaultFrontierCap;
    CLI::Option* o_model = nullptr;
    CLI::Option* o_family = nullptr;
    CLI::Option* o_k = nullptr;
    CLI::Option* o_n = nullptr;
    CLI::Option* o_grid = nullptr;
    CLI::Option* o_seed = nullptr;
};

int cmd_opt(const OptFlags& f, std::ostream& out) {
    ProductivityModel model = [&] {
        if (f.o_model->count() > 0) {
            for (const auto* o : {f.o_family, f.o_k, f.o_n, f.o_grid, f.o_seed}) {
                if (o->count() > 0) throw InvalidParameter("--model conflicts with " + o->get_name());
            }
            return load_model(f.model);
        }
        ExperimentConfig c;
        c.set_family(f.family);
        if (c.family == ModelFamily::Tabular) {
            if (f.o_k->count() > 0 || f.o_n->count() > 0 || f.o_grid->count() > 0) {
                throw InvalidParameter("--family tabular:... conflicts with --k/--n/--grid");
            }
        }
        c.K = f.k;
        c.N = f.n;
        c.grid = GridSpec::parse(f.grid);
        c.seed = f.seed;
        c.validate();
        return model_for_replication(c, f.rep);
    }();
    if (!(f.lambda >= 0.0)) throw InvalidParameter("--lambda must be >= 0");

    OptResult res;
    if (f.method == "pareto") res = opt_pareto(model, f.lambda, f.cap);
    else if (f.method == "brute") res = opt_bruteforce(model, f.lambda, f.budget);
    else throw InvalidParameter("--method must be 'pareto' or 'brute'");

    nlohmann::json j;
    j["K"] = model.experts();
    j["N"] = model.points();
    j["lambda"] = f.lambda;
    j["method"] = f.method;
    j["value"] = res.value;
    j["payment_indices"] = res.payments.idx;
    j["payments"] = res.payments.values;
    if (const auto hint = model.lipschitz_hint()) j["lipschitz_hint"] = *hint;
    out << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_verify(const verify::Options& opts, std::ostream& out) {
    const auto results = verify::run_all(opts);
    std::size_t width = 5;
    for (const auto& r : results) width = std::max(width, r.name.size());
    out << std::left << std::setw(static_cast<int>(width)) << "check" << "  result  seconds  detail\n";
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        out << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << (r.passed ? "PASS  " : "FAIL  ")
            << "  " << std::right << std::setw(7) << std::fixed << std::setprecision(2) << r.seconds << "  "
            << std::defaultfloat << r.detail << "\n";
    }
    out << (all ? "all checks passed" : "some checks FAILED") << "\n";
    return all ? kExitOk : kExitRuntime;
}

ResultFormat format_from_path(const std::string& path) {
    const auto ext = fs::path(path).extension().string();
    if (ext == ".json") return ResultFormat::Json;
    if (ext == ".csv") return ResultFormat::Csv;
    throw InvalidParameter("cannot tell the format of '" + path + "'; use --format");
}

int cmd_summarize(const std::vector<std::string>& files, const std::string& format, bool format_given,
                  std::ostream& out) {
    for (const auto& path : files) {
        const ResultFormat fmt = format_given ? parse_result_format(format) : format_from_path(path);
        const auto res = read_results(path, fmt);
        out << path << ": " << describe_final(res) << "\n";
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Online classification with paid stochastic experts", "paidexperts"};
    app.set_version_flag("--version", std::string(PAIDEXPERTS_VERSION));
    app.require_subcommand(1);

    ExperimentFlags run_flags;
    std::string run_out;
    auto* run = app.add_subcommand("run", "run one experiment and write its results");
    run_flags.attach(run, false);
    auto* run_out_opt = run->add_option("--out", run_out, "output file (default results.<format>)");

    ExperimentFlags sweep_flags;
    std::string sweep_dir = "sweep";
    auto* sweep = app.add_subcommand("sweep", "run the cartesian product of list-valued flags");
    sweep_flags.attach(sweep, true);
    sweep->add_option("--out", sweep_dir, "output directory")->capture_default_str();

    OptFlags opt_flags;
    auto* opt = app.add_subcommand("opt", "compute the grid comparator OPT of a model");
    opt_flags.o_model = opt->add_option("--model", opt_flags.model, "model JSON file");
    opt_flags.o_family = opt->add_option("--family", opt_flags.family, "family of a generated model")->capture_default_str();
    opt_flags.o_k = opt->add_option("--k", opt_flags.k, "experts")->capture_default_str();
    opt_flags.o_n = opt->add_option("--n", opt_flags.n, "grid size")->capture_default_str();
    opt_flags.o_grid = opt->add_option("--grid", opt_flags.grid, "grid spec")->capture_default_str();
    opt_flags.o_seed = opt->add_option("--seed", opt_flags.seed, "master seed")->capture_default_str();
    opt->add_option("--rep", opt_flags.rep, "replication whose model is generated")->capture_default_str();
    opt->add_option("--lambda", opt_flags.lambda, "payment weight")->capture_default_str();
    opt->add_option("--method", opt_flags.method, "pareto or brute")->capture_default_str();
    opt->add_option("--brute-budget", opt_flags.budget, "largest N^K for brute")->capture_default_str();
    opt->add_option("--frontier-cap", opt_flags.cap, "largest frontier for pareto")->capture_default_str();

    verify::Options verify_opts;
    double verify_beta = 0.0;
    auto* ver = app.add_subcommand("verify", "self-check of the numerical identities and invariants");
    ver->add_flag("--quick", verify_opts.quick, "smaller sample sizes");
    ver->add_option("--seed", verify_opts.seed, "seed of the checks")->capture_default_str();
    auto* ver_beta = ver->add_option("--beta-override", verify_beta, "cutoff scale for the simulated run");

    std::vector<std::string> files;
    std::string sum_format;
    auto* sum = app.add_subcommand("summarize", "print final statistics of result files");
    sum->add_option("files", files, "result files")->required();
    auto* sum_fmt = sum->add_option("--format", sum_format, "csv or json (default: from extension)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << PAIDEXPERTS_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << "run '" << sub->get_name() << " --help' for usage\n";
        return kExitInvalid;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags, run_out, run_out_opt->count() > 0, out, err);
        if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_dir, out, err);
        if (opt->parsed()) return cmd_opt(opt_flags, out);
        if (ver->parsed()) {
            if (ver_beta->count() > 0) verify_opts.beta_override = verify_beta;
            return cmd_verify(verify_opts, out);
        }
        if (sum->parsed()) return cmd_summarize(files, sum_format, sum_fmt->count() > 0, out);
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitInvalid;
}

}  // namespace paidexperts

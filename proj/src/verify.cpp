#include "paidexperts/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "paidexperts/errors.hpp"
#include "paidexperts/estimator.hpp"
#include "paidexperts/oracle.hpp"
#include "paidexperts/policy.hpp"
#include "paidexperts/rng.hpp"

namespace paidexperts::verify {

namespace {

CheckResult timed(const std::string& name, const std::function<void(CheckResult&)>& body) {
    CheckResult r;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

void fail(CheckResult& r, const std::string& msg) {
    if (r.passed) {
        r.passed = false;
        r.detail = msg;
    }
}

std::vector<double> random_rates(RngStream& rng, std::size_t k, double lo, double hi) {
    std::vector<double> v(k);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

CheckResult margin_rule_bound(const Options& opts) {
    return timed("margin-rule-bound", [&](CheckResult& r) {
        RngStream rng(opts.seed, 0, StreamRole::Predictor);
        const std::size_t trials = opts.quick ? 1000 : 10000;
        for (std::size_t i = 0; i < trials && r.passed; ++i) {
            const double x = rng.uniform(-10.0, 10.0);
            const Label y = rng.bernoulli(0.5) ? 1 : -1;
            const double keep = 1.0 - 0.5 * std::exp(-std::abs(x));
            const Label sx = x >= 0.0 ? 1 : -1;
            const double mistake = sx == y ? 1.0 - keep : keep;
            const double bound = 0.5 * std::exp(-y * x);
            if (mistake > bound + 1e-12 || (sx == y && std::abs(mistake - bound) > 1e-12)) {
                std::ostringstream os;
                os << "x=" << x << " y=" << y << " mistake=" << mistake << " bound=" << bound;
                fail(r, os.str());
            }
        }
        if (r.passed) r.detail = std::to_string(trials) + " margins";
    });
}

CheckResult surrogate_product_identity(const Options& opts) {
    return timed("surrogate-product-identity", [&](CheckResult& r) {
        RngStream rng(opts.seed, 1, StreamRole::Predictor);
        const std::size_t instances = opts.quick ? 50 : 200;
        const std::int64_t max_k = opts.quick ? 8 : 10;
        double worst = 0.0;
        for (std::size_t i = 0; i < instances && r.passed; ++i) {
            const auto k = static_cast<std::size_t>(rng.uniform_int(1, max_k));
            const auto p = random_rates(rng, k, 0.01, 0.99);
            const auto q = random_rates(rng, k, 0.01, 0.99);
            std::vector<double> w(k);
            for (std::size_t j = 0; j < k; ++j) w[j] = weight(q[j]);
            const double lhs = exponential_surrogate_enumerated(p, w);
            const double rhs = exponential_surrogate_product(p, q);
            const double rel = std::abs(lhs - rhs) / std::abs(rhs);
            worst = std::max(worst, rel);
            if (rel > 1e-10) fail(r, "K=" + std::to_string(k) + " relative error " + std::to_string(rel));
        }
        if (r.passed) {
            std::ostringstream os;
            os << instances << " instances, max rel err " << worst;
            r.detail = os.str();
        }
    });
}

CheckResult surrogate_chain(const Options& opts) {
    return timed("surrogate-chain", [&](CheckResult& r) {
        RngStream rng(opts.seed, 2, StreamRole::Predictor);
        const std::size_t trials = opts.quick ? 1000 : 10000;
        for (std::size_t i = 0; i < trials && r.passed; ++i) {
            const auto k = static_cast<std::size_t>(rng.uniform_int(1, 20));
            const auto p = random_rates(rng, k, 0.0, 1.0);
            double prod = 1.0, gaps = 0.0;
            for (double x : p) {
                prod *= 2.0 * std::sqrt(x * (1.0 - x));
                gaps += squared_gap(x);
            }
            if (!(prod <= std::exp(-2.0 * gaps))) fail(r, "product exceeds exp bound at K=" + std::to_string(k));
        }
        if (r.passed) r.detail = std::to_string(trials) + " vectors";
    });
}

CheckResult bernstein_coverage(const Options& opts) {
    return timed("bernstein-coverage", [&](CheckResult& r) {
        const double delta = 0.05;
        const std::size_t trials = opts.quick ? 2000 : 10000;
        const double limit = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
        RngStream rng(opts.seed, 3, StreamRole::Advice);
        std::ostringstream summary;
        for (double p : {0.1, 0.5, 0.9}) {
            for (std::uint64_t n : {10u, 100u}) {
                std::size_t violations = 0;
                for (std::size_t s = 0; s < trials; ++s) {
                    std::uint64_t hits = 0;
                    for (std::uint64_t i = 0; i < n; ++i) hits += rng.bernoulli(p) ? 1 : 0;
                    const double p_hat = static_cast<double>(hits) / static_cast<double>(n);
                    if (std::abs(p_hat - p) > bernstein_width(p_hat, n, delta)) ++violations;
                }
                const double freq = static_cast<double>(violations) / static_cast<double>(trials);
                summary << "p=" << p << ",n=" << n << ":" << freq << " ";
                if (freq > limit) {
                    std::ostringstream os;
                    os << "p=" << p << " n=" << n << " violation frequency " << freq << " > " << limit;
                    fail(r, os.str());
                }
            }
        }
        if (r.passed) r.detail = summary.str();
    });
}

CheckResult opt_equivalence(const Options& opts) {
    return timed("opt-equivalence", [&](CheckResult& r) {
        RngStream rng(opts.seed, 4, StreamRole::ModelGen);
        const std::size_t instances = opts.quick ? 20 : 100;
        const double lambdas[] = {0.0, 1e-3, 1e-2, 1.0};
        for (std::size_t i = 0; i < instances && r.passed; ++i) {
            const auto k = static_cast<std::size_t>(rng.uniform_int(1, 4));
            const auto n = static_cast<std::size_t>(rng.uniform_int(1, 6));
            std::vector<double> g(n);
            for (std::size_t c = 0; c < n; ++c) g[c] = static_cast<double>(c) / static_cast<double>(n);
            std::vector<std::vector<double>> rows(k);
            for (auto& row : rows) row = random_rates(rng, n, 0.0, 1.0);
            const auto model = make_tabular_model(CostGrid(g), rows);
            const double lambda = lambdas[i % 4];
            const auto a = opt_bruteforce(model, lambda);
            const auto b = opt_pareto(model, lambda);
            if (a.value != b.value) {
                fail(r, "instance " + std::to_string(i) + ": brute " + std::to_string(a.value) + " vs pareto " +
                            std::to_string(b.value));
            }
        }
        if (r.passed) r.detail = std::to_string(instances) + " instances";
    });
}

CheckResult optimizer_chain(const Options& opts) {
    return timed("optimizer-chain", [&](CheckResult& r) {
        RngStream rng(opts.seed, 5, StreamRole::ModelGen);
        const std::size_t instances = opts.quick ? 100 : 500;
        for (std::size_t i = 0; i < instances && r.passed; ++i) {
            const auto k = static_cast<std::size_t>(rng.uniform_int(1, 3));
            const auto n = static_cast<std::size_t>(rng.uniform_int(1, 5));
            std::vector<double> g(n);
            for (std::size_t c = 0; c < n; ++c) g[c] = static_cast<double>(c + 1) / static_cast<double>(n);
            const CostGrid grid(g);
            const ObjectiveInput in(k, grid, random_rates(rng, k * n, 0.0, 1.0), rng.uniform(0.0, 0.5));
            const auto s = selfish(in);
            const double vb = objective(in, brute(in));
            const double vl = objective(in, local(in, s));
            const double vs = objective(in, s);
            if (!(vb <= vl && vl <= vs)) fail(r, "instance " + std::to_string(i) + " breaks brute <= local <= selfish");
        }
        if (r.passed) r.detail = std::to_string(instances) + " instances";
    });
}

CheckResult optimism_geometry(const Options& opts) {
    return timed("optimism-geometry", [&](CheckResult& r) {
        const auto model = make_tabular_model(CostGrid({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}),
                                              {{0.55, 0.7, 0.8, 0.9}, {0.6, 0.65, 0.75, 0.85}, {0.5, 0.6, 0.7, 0.95}});
        const std::size_t horizon = opts.quick ? 500 : 3000;
        PolicyConfig cfg = PolicyConfig::with_defaults(3, model.grid(), horizon, 0.01, OptimizerKind::Local);
        // A small cutoff scale lets the run reach the aggregation branch.
        cfg.params.beta = opts.beta_override.value_or(2.0);
        GaptronPolicy policy(3, cfg);
        RngStream advice(opts.seed, 6, StreamRole::Advice);
        RngStream pred(opts.seed, 6, StreamRole::Predictor);
        std::size_t aggregate_rounds = 0;
        for (std::size_t t = 1; t <= horizon && r.passed; ++t) {
            try {
                const auto rec = policy.step(t, model, 1, advice, pred);
                if (rec.branch == Branch::Aggregate) ++aggregate_rounds;
            } catch (const GuardViolation& e) {
                fail(r, "round " + std::to_string(t) + ": " + e.what());
                break;
            }
            const auto& st = policy.state();
            for (std::size_t j = 0; j < 3 && r.passed; ++j) {
                for (std::size_t i = 0; i < 4 && r.passed; ++i) {
                    const auto& c = st.cell(j, i);
                    if (c.n == 0) continue;
                    std::ostringstream os;
                    os << "round " << t << " cell (" << j << "," << i << "): ";
                    if (!(c.alpha > 0.0 && c.alpha <= 0.5)) {
                        os << "alpha=" << c.alpha << " outside (0, 1/2]";
                        fail(r, os.str());
                    } else if (!(c.p_opt >= 0.0 && c.p_opt <= 1.0) ||
                               squared_gap(c.p_opt) < squared_gap(c.p_hat)) {
                        os << "p_opt=" << c.p_opt << " not optimistic for p_hat=" << c.p_hat;
                        fail(r, os.str());
                    }
                }
            }
        }
        if (r.passed) r.detail = std::to_string(horizon) + " rounds, " + std::to_string(aggregate_rounds) + " aggregated";
    });
}

std::vector<CheckResult> run_all(const Options& opts) {
    return {margin_rule_bound(opts), surrogate_product_identity(opts), surrogate_chain(opts), bernstein_coverage(opts),
            opt_equivalence(opts),   optimizer_chain(opts),            optimism_geometry(opts)};
}

}  // namespace paidexperts::verify

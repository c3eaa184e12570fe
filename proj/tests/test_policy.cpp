#include <cmath>

#include "doctest.h"
#include "paidexperts/errors.hpp"
#include "paidexperts/policy.hpp"
#include "paidexperts/record.hpp"
#include "test_util.hpp"

using namespace paidexperts;

namespace {

std::vector<RoundRecord> play(const ProductivityModel& m, PolicyConfig cfg, std::uint64_t seed,
                              const std::vector<Label>& labels) {
    GaptronPolicy pol(m.experts(), std::move(cfg));
    RngStream adv(seed, 0, StreamRole::Advice), pred(seed, 0, StreamRole::Predictor);
    std::vector<RoundRecord> out;
    for (std::size_t t = 1; t <= labels.size(); ++t) out.push_back(pol.step(t, m, labels[t - 1], adv, pred));
    return out;
}

ProductivityModel small_model() {
    return make_tabular_model(CostGrid({0.0, 0.4, 1.0}), {{0.55, 0.7, 0.9}, {0.6, 0.6, 0.8}, {0.3, 0.5, 0.95}});
}

}  // namespace

TEST_SUITE("policy") {

TEST_CASE("weights") {
    CHECK(weight(0.5) == 0.0);
    CHECK(weight(0.75) == doctest::Approx(0.5 * std::log(3.0)));
    CHECK(weight(0.75) == doctest::Approx(0.54931).epsilon(1e-5));
    for (double p : {0.01, 0.2, 0.37, 0.9}) CHECK(weight(1 - p) == doctest::Approx(-weight(p)).epsilon(1e-13));
    for (std::uint64_t n = 2; n < 30; ++n)
        for (std::uint64_t s = 1; s < n; ++s) CHECK(weight_from_counts(n - s, n) == -weight_from_counts(s, n));
    CHECK_THROWS_AS(weight(0.0), GuardViolation);
    CHECK_THROWS_AS(weight(1.0), GuardViolation);
    CHECK_THROWS_AS(weight_from_counts(0, 4), GuardViolation);
    CHECK_THROWS_AS(weight_from_counts(4, 4), GuardViolation);
}

TEST_CASE("exploration schedule") {
    const CostGrid g({0.0, 0.5, 1.0});
    auto cfg = PolicyConfig::with_defaults(4, g, 100, 0.1, OptimizerKind::Brute);
    EstimatorState st(4, g, cfg.params);
    const auto p = select_payments(st, 2, cfg);
    CHECK(p.values == std::vector<double>(4, 0.5));
    CHECK_THROWS_AS(select_payments(st, 0, cfg), InvalidParameter);
    CHECK_THROWS_AS(select_payments(st, 101, cfg), InvalidParameter);
}

TEST_CASE("first optimized round pays nothing when every estimate is 0 or 1") {
    const CostGrid g({0.0, 0.5, 1.0});
    for (auto kind : {OptimizerKind::Brute, OptimizerKind::Selfish, OptimizerKind::Local}) {
        auto cfg = PolicyConfig::with_defaults(2, g, 100, 0.01, kind);
        EstimatorState st(2, g, cfg.params);
        RngStream rng(1, 0, StreamRole::Advice);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 2; ++j) st.observe(j, i, rng.bernoulli(0.5));
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t i = 0; i < 3; ++i) CHECK(st.cell(j, i).n == 1);
        CHECK(select_payments(st, 4, cfg).idx == std::vector<std::size_t>{0, 0});
    }
}

TEST_CASE("prediction branches") {
    const CostGrid g({0.0});
    SUBCASE("fresh state follows expert 1") {
        EstimatorState st(3, g, {1.0, 0.1});
        RngStream rng(1, 0, StreamRole::Predictor);
        const auto pay = PaymentVector::from_indices(g, {0, 0, 0});
        const auto o = predict(st, pay, AdviceVector{{-1, 1, 1}}, rng);
        CHECK(o.branch == Branch::Cutoff);
        CHECK(o.expert == 0);
        CHECK(o.label == -1);
    }
    SUBCASE("low estimate flips the expert") {
        EstimatorState st(2, g, {2.0, 0.1});
        for (int i = 0; i < 10; ++i) st.observe(0, 0, true);
        for (int i = 0; i < 10; ++i) st.observe(1, 0, i == 0);  // 1 of 10 correct
        RngStream rng(1, 0, StreamRole::Predictor);
        const auto o = predict(st, PaymentVector::from_indices(g, {0, 0}), AdviceVector{{1, 1}}, rng);
        // expert 0 has p_hat = 1 > 1 - alpha, so it is the first out-of-interval cell
        CHECK(o.branch == Branch::Cutoff);
        CHECK(o.expert == 0);
        CHECK(o.label == 1);
        EstimatorState only_low(1, g, {2.0, 0.1});
        for (int i = 0; i < 10; ++i) only_low.observe(0, 0, i == 0);
        const auto f = predict(only_low, PaymentVector::from_indices(g, {0}), AdviceVector{{1}}, rng);
        CHECK(f.branch == Branch::Cutoff);
        CHECK(f.label == -1);
    }
    SUBCASE("margin ln 2") {
        EstimatorState st(1, g, {0.5, 0.1});
        for (int i = 0; i < 5; ++i) st.observe(0, 0, i != 0);  // 4 of 5
        RngStream rng(3, 0, StreamRole::Predictor);
        int same = 0;
        const int n = 40000;
        for (int i = 0; i < n; ++i) {
            const auto o = predict(st, PaymentVector::from_indices(g, {0}), AdviceVector{{-1}}, rng);
            REQUIRE(o.branch == Branch::Aggregate);
            CHECK(o.margin == doctest::Approx(-std::log(2.0)));
            CHECK(o.prob_sign == doctest::Approx(0.75));
            same += o.label == -1;
        }
        CHECK(std::abs(same / double(n) - 0.75) < 3 * std::sqrt(0.75 * 0.25 / n));
    }
    SUBCASE("zero margin is a fair coin") {
        EstimatorState st(2, g, {0.5, 0.1});
        for (int i = 0; i < 4; ++i) {
            st.observe(0, 0, i != 0);  // 3 of 4
            st.observe(1, 0, i == 0);  // 1 of 4
        }
        RngStream rng(4, 0, StreamRole::Predictor);
        int plus = 0;
        const int n = 40000;
        for (int i = 0; i < n; ++i) {
            const auto o = predict(st, PaymentVector::from_indices(g, {0, 0}), AdviceVector{{1, 1}}, rng);
            REQUIRE(o.branch == Branch::Aggregate);
            CHECK(o.margin == 0.0);
            CHECK(o.prob_sign == 0.5);
            plus += o.label == 1;
        }
        CHECK(std::abs(plus / double(n) - 0.5) < 3 * std::sqrt(0.25 / n));
    }
}

TEST_CASE("golden trajectory") {
    const auto gold = testutil::load_json("gaptron_golden.json");
    const auto m = make_tabular_model(CostGrid(gold["grid"].get<std::vector<double>>()),
                                      gold["p"].get<std::vector<std::vector<double>>>());
    const std::size_t T = gold["T"].get<std::size_t>();
    auto cfg = PolicyConfig::with_defaults(2, m.grid(), T, gold["lambda"].get<double>(), OptimizerKind::Brute);
    CHECK(cfg.params.delta == gold["delta"].get<double>());
    cfg.params.beta = gold["beta"].get<double>();
    const auto recs = play(m, cfg, gold["seed"].get<std::uint64_t>(), std::vector<Label>(T, 1));
    REQUIRE(recs.size() == gold["rounds"].size());
    for (std::size_t t = 0; t < T; ++t) {
        const auto& g = gold["rounds"][t];
        CAPTURE(t);
        CHECK(recs[t].payments.idx == g["idx"].get<std::vector<std::size_t>>());
        CHECK(recs[t].advice == g["advice"].get<std::vector<Label>>());
        CHECK(to_string(recs[t].branch) == g["branch"].get<std::string>());
        if (recs[t].branch == Branch::Cutoff) CHECK(recs[t].expert == g["expert"].get<std::size_t>());
        CHECK(recs[t].margin == doctest::Approx(g["margin"].get<double>()).epsilon(1e-12));
        CHECK(recs[t].prediction == g["prediction"].get<Label>());
    }
    // Final counts.
    GaptronPolicy pol(2, cfg);
    RngStream adv(7, 0, StreamRole::Advice), pred(7, 0, StreamRole::Predictor);
    for (std::size_t t = 1; t <= T; ++t) pol.step(t, m, 1, adv, pred);
    const auto n = gold["final_n"].get<std::vector<std::vector<std::uint64_t>>>();
    const auto s = gold["final_sum_correct"].get<std::vector<std::vector<std::uint64_t>>>();
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(pol.state().cell(j, i).n == n[j][i]);
            CHECK(pol.state().cell(j, i).sum_correct == s[j][i]);
        }
}

TEST_CASE("round accounting and record contents") {
    const auto m = small_model();
    for (auto kind : {OptimizerKind::Brute, OptimizerKind::Selfish, OptimizerKind::Local}) {
        auto cfg = PolicyConfig::with_defaults(3, m.grid(), 300, 0.05, kind);
        cfg.params.beta = 1.0;
        GaptronPolicy pol(3, cfg);
        RngStream adv(2, 0, StreamRole::Advice), pred(2, 0, StreamRole::Predictor);
        for (std::size_t t = 1; t <= 300; ++t) {
            const auto r = pol.step(t, m, t % 2 ? 1 : -1, adv, pred);
            CHECK(r.round == t);
            for (std::size_t j = 0; j < 3; ++j) CHECK(pol.state().rounds_observed(j) == t);
            CHECK(r.mistake == (r.prediction != r.label));
            CHECK(r.realized_cost == doctest::Approx((r.mistake ? 1.0 : 0.0) + 0.05 * r.payment_sum));
            CHECK(r.payment_sum == doctest::Approx(r.payments.sum()));
            CHECK(r.expected_cost >= 0.05 * r.payment_sum);
            CHECK(r.expected_cost <= 1.0 + 0.05 * r.payment_sum);
            if (r.branch == Branch::Aggregate) {
                CHECK((r.prob_sign >= 0.5 && r.prob_sign <= 1.0));
                CHECK(r.weights.size() == 3);
            }
        }
    }
}

TEST_CASE("aggregation never sees a degenerate estimate") {
    const auto m = make_tabular_model(CostGrid({0.0, 1.0}), {{0.0, 1.0}, {0.5, 0.99}, {0.2, 0.9}});
    for (double beta : {1e-9, 0.5, 1.0, 3.0}) {
        auto cfg = PolicyConfig::with_defaults(3, m.grid(), 500, 0.01, OptimizerKind::Local);
        cfg.params.beta = beta;
        GaptronPolicy pol(3, cfg);
        RngStream adv(5, 0, StreamRole::Advice), pred(5, 0, StreamRole::Predictor);
        for (std::size_t t = 1; t <= 500; ++t) CHECK_NOTHROW(pol.step(t, m, 1, adv, pred));
    }
}

TEST_CASE("zero beta reaches the guard") {
    const auto m = make_tabular_model(CostGrid({0.0}), {{1.0}, {0.5}});
    auto cfg = PolicyConfig::with_defaults(2, m.grid(), 50, 0.01, OptimizerKind::Selfish);
    cfg.params.beta = 0.0;
    GaptronPolicy pol(2, cfg);
    RngStream adv(5, 0, StreamRole::Advice), pred(5, 0, StreamRole::Predictor);
    bool thrown = false;
    for (std::size_t t = 1; t <= 50 && !thrown; ++t) {
        try {
            pol.step(t, m, 1, adv, pred);
        } catch (const GuardViolation&) {
            thrown = true;
        }
    }
    CHECK(thrown);
}

TEST_CASE("perfect experts make no mistakes") {
    const auto m = make_tabular_model(CostGrid({0.0, 0.5}), {{1.0, 1.0}, {1.0, 1.0}});
    auto cfg = PolicyConfig::with_defaults(2, m.grid(), 200, 0.01, OptimizerKind::Brute);
    const auto recs = play(m, cfg, 3, std::vector<Label>(200, -1));
    for (const auto& r : recs) CHECK_FALSE(r.mistake);
    CHECK(recs.back().payments.idx == std::vector<std::size_t>{0, 0});
}

TEST_CASE("label indifference") {
    const auto m = small_model();
    for (auto kind : {OptimizerKind::Brute, OptimizerKind::Selfish, OptimizerKind::Local}) {
        for (double beta : {1.0, 1e4}) {
            auto cfg = PolicyConfig::with_defaults(3, m.grid(), 400, 0.02, kind);
            cfg.params.beta = beta;
            std::vector<Label> plus(400, 1), alt(400);
            RngStream lab(9, 0, StreamRole::Labels);
            alt = make_labels(400, LabelMode::Rademacher, lab);
            const auto a = play(m, cfg, 11, plus);
            const auto b = play(m, cfg, 11, alt);
            double ca = 0, cb = 0;
            for (std::size_t t = 0; t < 400; ++t) {
                CHECK(a[t].mistake == b[t].mistake);
                CHECK(a[t].payments == b[t].payments);
                CHECK(a[t].branch == b[t].branch);
                ca += a[t].realized_cost;
                cb += b[t].realized_cost;
                CHECK(ca == cb);
            }
        }
    }
}

TEST_CASE("seed determinism") {
    const auto m = small_model();
    auto cfg = PolicyConfig::with_defaults(3, m.grid(), 200, 0.02, OptimizerKind::Local);
    cfg.params.beta = 1.0;
    const auto a = play(m, cfg, 4, std::vector<Label>(200, 1));
    const auto b = play(m, cfg, 4, std::vector<Label>(200, 1));
    CHECK(a.size() == b.size());
    for (std::size_t t = 0; t < a.size(); ++t) {
        CHECK(a[t] == b[t]);
    }
}

TEST_CASE("step contract") {
    const auto m = small_model();
    auto cfg = PolicyConfig::with_defaults(3, m.grid(), 10, 0.02, OptimizerKind::Local);
    GaptronPolicy pol(3, cfg);
    RngStream adv(1, 0, StreamRole::Advice), pred(1, 0, StreamRole::Predictor);
    CHECK_THROWS_AS(pol.step(2, m, 1, adv, pred), InvalidParameter);
    const auto other = make_tabular_model(CostGrid({0.0, 0.5, 1.0}), {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}});
    CHECK_THROWS_AS(pol.step(1, other, 1, adv, pred), InvalidParameter);
    CHECK_NOTHROW(pol.step(1, m, 1, adv, pred));
    auto bad = cfg;
    bad.lambda = -1;
    CHECK_THROWS_AS(GaptronPolicy(3, bad), InvalidParameter);
}

TEST_CASE("record JSON round trip") {
    const auto m = small_model();
    auto cfg = PolicyConfig::with_defaults(3, m.grid(), 50, 0.02, OptimizerKind::Local);
    cfg.params.beta = 1.0;
    for (const auto& r : play(m, cfg, 6, std::vector<Label>(50, 1))) CHECK(record_from_json(record_to_json(r)) == r);
    CHECK(parse_branch("single-expert") == Branch::SingleExpert);
}

}

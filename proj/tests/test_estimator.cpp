#include <cmath>

#include "doctest.h"
#include "paidexperts/errors.hpp"
#include "paidexperts/estimator.hpp"
#include "paidexperts/optimizers.hpp"
#include "paidexperts/rng.hpp"
#include "test_util.hpp"

using namespace paidexperts;

TEST_SUITE("estimator") {

TEST_CASE("default parameters") {
    const auto g = testutil::load_json("rng_golden.json")["default_parameters"];
    for (const auto& row : g) {
        const auto p = default_parameters(row[0].get<std::size_t>(), row[1].get<std::size_t>(), row[2].get<double>());
        CHECK(p.beta == doctest::Approx(row[3].get<double>()).epsilon(1e-14));
        CHECK(p.delta == doctest::Approx(row[4].get<double>()).epsilon(1e-14));
    }
    const auto one = default_parameters(1, 1, 0.0);
    CHECK(one.delta == 1.0);
    CHECK(one.beta == doctest::Approx(18.0 * std::log(3.0)));
    CHECK(one.beta == doctest::Approx(19.775).epsilon(1e-4));
    const auto fig1 = default_parameters(5, 10000, 0.01);
    CHECK(fig1.delta == doctest::Approx(1.0 / (1.05e8 * 5)));
    for (std::size_t k = 1; k < 30; k += 4)
        for (std::size_t t : {1u, 10u, 100000u}) CHECK(default_parameters(k, t, 0.1).beta > 0.5);
    CHECK_THROWS_AS(default_parameters(0, 1, 0.0), InvalidParameter);
    CHECK_THROWS_AS(default_parameters(1, 0, 0.0), InvalidParameter);
    CHECK_THROWS_AS(default_parameters(1, 1, -1.0), InvalidParameter);
}

TEST_CASE("Bernstein width") {
    CHECK(bernstein_width(0.0, 5, 0.1) == doctest::Approx(3.0 * std::log(30.0) / 5.0));
    CHECK(bernstein_width(0.0, 5, 0.1) == doctest::Approx(2.0407).epsilon(1e-4));
    CHECK(bernstein_width(1.0, 17, 0.1) == 3.0 * std::log(30.0) / 17.0);
    CHECK(bernstein_width(0.5, 100, 0.1) == doctest::Approx(0.23244).epsilon(1e-4));
    CHECK_THROWS_AS(bernstein_width(0.5, 0, 0.1), GuardViolation);
    CHECK_THROWS_AS(bernstein_width(0.5, 3, 0.0), InvalidParameter);
}

TEST_CASE("fresh state and first observations") {
    EstimatorState st(2, CostGrid({0.0, 0.5}), {10.0, 0.1});
    const auto& fresh = st.cell(1, 1);
    CHECK(fresh.n == 0);
    CHECK(fresh.p_hat == 1.0);
    CHECK(fresh.p_opt == 1.0);
    CHECK(fresh.alpha == 0.5);
    st.observe(0, 1, true);
    const auto c1 = st.cell(0, 1);
    CHECK(c1.n == 1);
    CHECK(c1.p_hat == 1.0);
    CHECK(c1.q == 0.0);
    CHECK(c1.p_opt == 1.0);
    CHECK(c1.alpha == 0.5);
    st.observe(0, 1, false);
    const auto c2 = st.cell(0, 1);
    CHECK(c2.n == 2);
    CHECK(c2.p_hat == 0.5);
    CHECK(c2.s == 1);
    CHECK(c2.p_opt == 0.0);  // clamped width: q = min(1/2, 1/2, w)
    CHECK_THROWS_AS(st.cell(2, 0), std::out_of_range);
    CHECK_THROWS_AS(st.observe(0, 2, true), std::out_of_range);
}

TEST_CASE("cutoff alpha follows min(beta / n, 1/2)") {
    EstimatorState st(1, CostGrid({0.0}), {3.0, 0.1});
    for (int i = 1; i <= 20; ++i) {
        st.observe(0, 0, i % 4 != 0);
        CHECK(st.cell(0, 0).alpha == doctest::Approx(std::min(3.0 / i, 0.5)));
    }
}

TEST_CASE("cutoff membership on counts matches the interval test") {
    for (double beta : {0.5, 1.0, 2.5, 7.0}) {
        for (std::uint64_t n = 1; n < 40; ++n) {
            for (std::uint64_t s = 0; s <= n; ++s) {
                CellStats c;
                c.n = n;
                c.sum_correct = s;
                const double ph = double(s) / double(n);
                const double alpha = std::min(beta / double(n), 0.5);
                // Rationals; compare with a small slack away from the edges.
                const bool outside = ph < alpha - 1e-12 || ph > 1.0 - alpha + 1e-12;
                const bool edge = std::abs(ph - alpha) < 1e-12 || std::abs(ph - (1.0 - alpha)) < 1e-12;
                if (!edge) CHECK(c.outside_cutoff(beta) == outside);
            }
        }
    }
    CellStats fresh;
    CHECK(fresh.outside_cutoff(100.0));
}

TEST_CASE("invariants under random observation streams") {
    RngStream rng(4, 0, StreamRole::Advice);
    EstimatorState st(3, CostGrid({0.0, 0.3, 0.9}), default_parameters(3, 1000, 0.01));
    std::vector<CellStats> prev(9);
    for (int t = 1; t <= 3000; ++t) {
        for (std::size_t j = 0; j < 3; ++j) {
            const auto i = static_cast<std::size_t>(rng.uniform_int(0, 2));
            st.observe(j, i, rng.bernoulli(0.2 + 0.3 * double(j)));
        }
        for (std::size_t j = 0; j < 3; ++j) {
            for (std::size_t i = 0; i < 3; ++i) {
                const auto& c = st.cell(j, i);
                const auto& p = prev[j * 3 + i];
                CHECK(c.n >= p.n);
                if (p.n >= 1) CHECK(c.alpha <= p.alpha);
                if (c.n == 0) continue;
                CHECK(c.p_hat == double(c.sum_correct) / double(c.n));
                CHECK(c.q <= std::min(c.p_hat, 1.0 - c.p_hat));
                CHECK(c.q >= 0.0);
                CHECK((c.p_opt >= 0.0 && c.p_opt <= 1.0));
                CHECK(squared_gap(c.p_opt) >= squared_gap(c.p_hat));
                if (c.q > 0.0) CHECK(squared_gap(c.p_opt) > squared_gap(c.p_hat));
                prev[j * 3 + i] = c;
            }
            CHECK(st.rounds_observed(j) == static_cast<std::uint64_t>(t));
        }
    }
}

TEST_CASE("coverage of the Bernstein interval") {
    const double delta = 0.05;
    const int trials = 10000;
    const double limit = delta + 3.0 * std::sqrt(delta * (1 - delta) / trials);
    RngStream rng(77, 0, StreamRole::Advice);
    for (double p : {0.1, 0.5, 0.9}) {
        for (std::uint64_t n : {10u, 100u}) {
            int bad = 0;
            for (int s = 0; s < trials; ++s) {
                std::uint64_t k = 0;
                for (std::uint64_t i = 0; i < n; ++i) k += rng.bernoulli(p);
                const double ph = double(k) / double(n);
                bad += std::abs(ph - p) > bernstein_width(ph, n, delta);
            }
            CHECK(bad / double(trials) <= limit);
        }
    }
}

TEST_CASE("determinism and snapshots") {
    auto run = [] {
        EstimatorState st(2, CostGrid({0.0, 1.0}), {2.0, 0.05});
        RngStream rng(8, 0, StreamRole::Advice);
        for (int t = 0; t < 200; ++t) st.observe(t % 2, (t / 2) % 2, rng.bernoulli(0.6));
        return st;
    };
    const auto a = run();
    CHECK(a == run());
    const auto back = EstimatorState::from_snapshot(a.snapshot());
    CHECK(back == a);
    auto bad = a.snapshot();
    bad["sum_correct"][0][0] = 1000;
    CHECK_THROWS_AS(EstimatorState::from_snapshot(bad), InvalidParameter);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(EstimatorState(0, CostGrid({0.0}), {1.0, 0.1}), InvalidParameter);
    CHECK_THROWS_AS(EstimatorState(1, CostGrid({0.0}), {-1.0, 0.1}), InvalidParameter);
    CHECK_THROWS_AS(EstimatorState(1, CostGrid({0.0}), {1.0, 0.0}), InvalidParameter);
    CHECK_NOTHROW(EstimatorState(1, CostGrid({0.0}), {1.0, 1.0}));
}

}

#include <cmath>
#include <functional>

#include "doctest.h"
#include "paidexperts/errors.hpp"
#include "paidexperts/optimizers.hpp"
#include "paidexperts/rng.hpp"

using namespace paidexperts;

namespace {

// Plain recursive enumeration, first minimum in lexicographic order.
std::pair<double, std::vector<std::size_t>> enumerate(const ObjectiveInput& in) {
    std::vector<std::size_t> cur(in.experts), best;
    double best_v = INFINITY;
    std::function<void(std::size_t)> rec = [&](std::size_t j) {
        if (j == in.experts) {
            double s = 0, c = 0;
            for (std::size_t e = 0; e < in.experts; ++e) {
                const double g = in.p(e, cur[e]) - 0.5;
                s += g * g;
                c += (*in.grid)[cur[e]];
            }
            const double v = std::exp(-2 * s) + in.lambda * c;
            if (v < best_v) {
                best_v = v;
                best = cur;
            }
            return;
        }
        for (std::size_t i = 0; i < in.points(); ++i) {
            cur[j] = i;
            rec(j + 1);
        }
    };
    rec(0);
    return {best_v, best};
}

CostGrid random_grid(RngStream& rng, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (double(i) + rng.uniform(0.0, 0.9)) / double(n);
    return CostGrid(v);
}

std::vector<double> random_table(RngStream& rng, std::size_t size) {
    std::vector<double> p(size);
    for (double& x : p) x = rng.uniform();
    return p;
}

}  // namespace

TEST_SUITE("optimizers") {

TEST_CASE("objective closed forms") {
    const CostGrid g({0.0, 0.5, 1.0});
    CHECK(objective(ObjectiveInput(2, g, std::vector<double>(6, 0.5), 0.3), PaymentVector::from_indices(g, {0, 0})) ==
          1.0);
    CHECK(objective(ObjectiveInput(1, g, {1.0, 1.0, 1.0}, 0.01), PaymentVector::from_indices(g, {1})) ==
          doctest::Approx(std::exp(-0.5) + 0.005));
    CHECK(objective(ObjectiveInput(1, g, {1.0, 1.0, 1.0}, 0.01), PaymentVector::from_indices(g, {1})) ==
          doctest::Approx(0.61153).epsilon(1e-5));
    CHECK(objective(ObjectiveInput(2, g, std::vector<double>(6, 1.0), 0.01), PaymentVector::from_indices(g, {0, 0})) ==
          doctest::Approx(0.36788).epsilon(1e-5));
    CHECK_THROWS_AS(ObjectiveInput(1, g, {0.5, 0.5}, 0.0), InvalidParameter);
    CHECK_THROWS_AS(ObjectiveInput(1, g, {0.5, 0.5, 1.5}, 0.0), InvalidParameter);
    CHECK_THROWS_AS(ObjectiveInput(1, g, {0.5, 0.5, 0.5}, -1.0), InvalidParameter);
}

TEST_CASE("brute on the two-point examples") {
    const CostGrid g({0.0, 1.0});
    CHECK(brute(ObjectiveInput(1, g, {0.5, 1.0}, 0.01)).idx == std::vector<std::size_t>{1});
    CHECK(brute(ObjectiveInput(1, g, {0.5, 1.0}, 10.0)).idx == std::vector<std::size_t>{0});
}

TEST_CASE("brute matches exhaustive enumeration") {
    RngStream rng(21, 0, StreamRole::ModelGen);
    for (int rep = 0; rep < 200; ++rep) {
        const auto k = static_cast<std::size_t>(rng.uniform_int(1, 4));
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, 6));
        const CostGrid g = random_grid(rng, n);
        const ObjectiveInput in(k, g, random_table(rng, k * n), rep % 3 == 0 ? 0.0 : rng.uniform(0.0, 0.3));
        const auto [v, idx] = enumerate(in);
        const auto b = brute(in);
        CHECK(b.idx == idx);
        CHECK(objective(in, b) == doctest::Approx(v).epsilon(1e-14));
        CHECK(brute(in) == b);
    }
}

TEST_CASE("brute budget") {
    const CostGrid g({0.0, 0.5, 1.0});
    const ObjectiveInput in(3, g, std::vector<double>(9, 0.7), 0.1);
    CHECK_THROWS_AS(brute(in, 26), BudgetExceeded);
    CHECK_NOTHROW(brute(in, 27));
    try {
        brute(in, 10);
    } catch (const BudgetExceeded& e) {
        CHECK(std::string(e.what()).find("3^3") != std::string::npos);
    }
    CHECK(enumeration_size(10, 30) == std::numeric_limits<std::uint64_t>::max());
    CHECK(enumeration_size(5, 5) == 3125);
}

TEST_CASE("selfish") {
    RngStream rng(5, 0, StreamRole::ModelGen);
    for (int rep = 0; rep < 50; ++rep) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, 6));
        const CostGrid g = random_grid(rng, n);
        const ObjectiveInput one(1, g, random_table(rng, n), rng.uniform(0.0, 0.5));
        CHECK(selfish(one) == brute(one));
        const ObjectiveInput zero(3, g, random_table(rng, 3 * n), 0.0);
        const auto s = selfish(zero);
        for (std::size_t j = 0; j < 3; ++j) {
            double best = 0.0;
            for (std::size_t i = 0; i < n; ++i) best = std::max(best, squared_gap(zero.p(j, i)));
            CHECK(squared_gap(zero.p(j, s.idx[j])) == best);
        }
    }
    // Ties go to the cheapest payment.
    const CostGrid g({0.0, 0.5, 1.0});
    CHECK(selfish(ObjectiveInput(2, g, std::vector<double>(6, 0.9), 0.0)).idx == std::vector<std::size_t>{0, 0});
}

TEST_CASE("selfish can be beaten jointly") {
    // Each expert alone is worth paying, both together are not.
    const CostGrid g({0.0, 1.0});
    const ObjectiveInput in(2, g, {0.5, 1.0, 0.5, 1.0}, 0.3);
    const auto s = selfish(in);
    const auto b = brute(in);
    CHECK(s.idx == std::vector<std::size_t>{1, 1});
    CHECK(b.idx == std::vector<std::size_t>{0, 1});
    CHECK(objective(in, s) == doctest::Approx(std::exp(-1.0) + 0.6));
    CHECK(objective(in, b) == doctest::Approx(std::exp(-0.5) + 0.3));
    CHECK(objective(in, s) > objective(in, b));
}

TEST_CASE("local descent") {
    RngStream rng(13, 0, StreamRole::ModelGen);
    for (int rep = 0; rep < 300; ++rep) {
        const auto k = static_cast<std::size_t>(rng.uniform_int(1, 4));
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, 5));
        const CostGrid g = random_grid(rng, n);
        const ObjectiveInput in(k, g, random_table(rng, k * n), rng.uniform(0.0, 0.5));
        const auto s = selfish(in);
        const auto l = local(in, s);
        const auto b = brute(in);
        CHECK(objective(in, b) <= objective(in, l));
        CHECK(objective(in, l) <= objective(in, s));
        if (k == 1) CHECK(local(in, s, {1, 0.0}) == b);
        CHECK(local(in, s) == l);
        // Any start descends.
        std::vector<std::size_t> start(k);
        for (auto& i : start) i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        const auto ps = PaymentVector::from_indices(g, start);
        CHECK(objective(in, local(in, ps)) <= objective(in, ps));
    }
}

TEST_CASE("local: a converged point is a coordinate-wise minimum") {
    RngStream rng(17, 0, StreamRole::ModelGen);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t k = 3, n = 4;
        const CostGrid g = random_grid(rng, n);
        const ObjectiveInput in(k, g, random_table(rng, k * n), rng.uniform(0.0, 0.3));
        const auto l = local(in, selfish(in), {50, 0.0});
        const double v = objective(in, l);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                auto idx = l.idx;
                idx[j] = i;
                CHECK(objective(in, std::span<const std::size_t>(idx)) >= v);
            }
        }
    }
}

TEST_CASE("objective bounds") {
    RngStream rng(2, 0, StreamRole::ModelGen);
    for (int rep = 0; rep < 100; ++rep) {
        const CostGrid g = random_grid(rng, 4);
        const double lam = rng.uniform(0.0, 2.0);
        const ObjectiveInput in(3, g, random_table(rng, 12), lam);
        const auto v = objective(in, brute(in));
        CHECK(v > 0.0);
        CHECK(v <= 1.0 + lam * 3 * g.max());
    }
}

TEST_CASE("optimizer names") {
    CHECK(parse_optimizer_kind("local") == OptimizerKind::Local);
    CHECK(to_string(OptimizerKind::Brute) == "brute");
    CHECK_THROWS_AS(parse_optimizer_kind("greedy"), InvalidParameter);
}

}

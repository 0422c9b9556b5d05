#include <doctest.h>

#include <cmath>
#include <random>

#include "frictional/scenario.hpp"

using namespace frictional;

namespace {

// Independent ES oracle: midpoint Riemann sum over the quantile level. The
// quantile function is piecewise constant, so a fine midpoint grid that
// avoids the finitely many jump levels reproduces the integral to h.
double es_oracle(const ScenarioSpace& s, const Position& x, double alpha, int n = 40001) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        double beta = alpha * (k + 0.5) / n;
        sum += upper_quantile(s, x, beta);
    }
    return -sum / n;
}

}  // namespace

TEST_CASE("expectation examples") {
    ScenarioSpace s2 = ScenarioSpace::uniform(2);
    CHECK(expectation(s2, {-1.0, 3.0}) == doctest::Approx(1.0));
    ScenarioSpace s1({"w1"}, {1.0});
    CHECK(expectation(s1, {7.0}) == doctest::Approx(7.0));
    ScenarioSpace sq({"a", "b"}, {0.25, 0.75});
    CHECK(expectation(sq, {4.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("order is a partial order") {
    ScenarioSpace s = ScenarioSpace::uniform(2);
    CHECK(order_geq(s, {1.0, 1.0}, {0.0, 1.0}));
    CHECK_FALSE(order_geq(s, {1.0, -1.0}, {0.0, 0.0}));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        Position x = {unif(rng), unif(rng)}, y = {unif(rng), unif(rng)},
                 z = {unif(rng), unif(rng)};
        CHECK(order_geq(s, x, x));  // reflexive
        if (order_geq(s, x, y) && order_geq(s, y, x))
            for (int j = 0; j < 2; ++j) CHECK(x[j] == doctest::Approx(y[j]));
        if (order_geq(s, x, y) && order_geq(s, y, z)) CHECK(order_geq(s, x, z));
    }
}

TEST_CASE("upper quantile on two atoms") {
    ScenarioSpace s = ScenarioSpace::uniform(2);
    Position x = {-1.0, 3.0};
    CHECK(upper_quantile(s, x, 0.25) == doctest::Approx(-1.0));
    CHECK(upper_quantile(s, x, 0.75) == doctest::Approx(3.0));
    // constant position
    for (double a : {0.1, 0.5, 0.9})
        CHECK(upper_quantile(s, {2.5, 2.5}, a) == doctest::Approx(2.5));
}

TEST_CASE("quantile is nondecreasing in alpha and translation equivariant") {
    ScenarioSpace s({"a", "b", "c"}, {0.2, 0.5, 0.3});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int t = 0; t < 200; ++t) {
        Position x = {unif(rng), unif(rng), unif(rng)};
        double prev = -1e18;
        for (double a : {0.05, 0.2, 0.45, 0.6, 0.85}) {
            double q = upper_quantile(s, x, a);
            CHECK(q >= prev - 1e-12);
            prev = q;
            double c = unif(rng);
            Position xc = {x[0] + c, x[1] + c, x[2] + c};
            CHECK(upper_quantile(s, xc, a) == doctest::Approx(q + c).epsilon(1e-12));
        }
    }
}

TEST_CASE("expectation is linear") {
    ScenarioSpace s({"a", "b", "c"}, {0.2, 0.5, 0.3});
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int t = 0; t < 300; ++t) {
        Position x = {unif(rng), unif(rng), unif(rng)}, y = {unif(rng), unif(rng), unif(rng)};
        double a = unif(rng), b = unif(rng);
        Position z = {a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]};
        CHECK(expectation(s, z) ==
              doctest::Approx(a * expectation(s, x) + b * expectation(s, y)).epsilon(1e-12));
    }
}

TEST_CASE("expected shortfall matches atoms and the quantile-grid oracle") {
    ScenarioSpace s = ScenarioSpace::uniform(2);
    CHECK(expected_shortfall(s, {-1.0, 3.0}, 0.5) == doctest::Approx(1.0));
    CHECK(expected_shortfall(s, {1.0, 3.0}, 0.5) == doctest::Approx(-1.0));
    ScenarioSpace s3({"a", "b", "c"}, {0.2, 0.5, 0.3});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int t = 0; t < 25; ++t) {
        Position x = {unif(rng), unif(rng), unif(rng)};
        for (double a : {0.15, 0.35, 0.62, 0.8})
            CHECK(expected_shortfall(s3, x, a) ==
                  doctest::Approx(es_oracle(s3, x, a)).epsilon(5e-4));
    }
}

TEST_CASE("range value at risk on two atoms") {
    ScenarioSpace s = ScenarioSpace::uniform(2);
    CHECK(range_value_at_risk(s, {-1.0, 3.0}, 0.25, 0.75) == doctest::Approx(-1.0));
}

TEST_CASE("es sandwich: -E[X] <= ES_a(X) <= -min X") {
    ScenarioSpace s({"a", "b", "c"}, {0.25, 0.35, 0.4});
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int t = 0; t < 300; ++t) {
        Position x = {unif(rng), unif(rng), unif(rng)};
        double alpha = 0.05 + 0.9 * (t % 10) / 10.0;
        double es = expected_shortfall(s, x, alpha);
        CHECK(es >= -expectation(s, x) - 1e-10);
        CHECK(es <= -*std::min_element(x.begin(), x.end()) + 1e-10);
    }
}

TEST_CASE("probability breakpoints are the subset sums") {
    ScenarioSpace s({"a", "b"}, {0.25, 0.75});
    auto bp = probability_breakpoints(s);
    REQUIRE(bp.size() == 2);
    CHECK(bp[0] == doctest::Approx(0.25));
    CHECK(bp[1] == doctest::Approx(0.75));
}

TEST_CASE("scenario space validation") {
    CHECK_THROWS(ScenarioSpace({"a"}, {0.5}));
    CHECK_THROWS(ScenarioSpace({"a", "b"}, {1.0, 0.0}));
    CHECK_THROWS(ScenarioSpace({}, {}));
}

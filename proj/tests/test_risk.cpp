#include <doctest.h>

#include <cmath>
#include <random>

#include "frictional/risk.hpp"
#include "support/fixtures.hpp"

using namespace frictional;

namespace {

double f7_v0(double c) {
    if (c >= 0.0) return c;
    if (c >= -1.0) return 0.5 * c;
    return c + 0.5;
}

}  // namespace

TEST_CASE("f1: rho(X) = -X1 - 1 on the polyhedral path") {
    auto f1 = testing::load_fixture("f1");
    SearchConfig cfg;
    for (double a : {-2.0, -0.75, 0.0, 1.25, 2.0})
        for (double b : {-2.0, 0.0, 1.5}) {
            SolveReport r = rho(f1.instance, {a, b}, cfg);
            REQUIRE(r.status == SolveStatus::Optimal);
            CHECK(r.path == "polyhedral");
            CHECK(r.value.value() == doctest::Approx(-a - 1.0).epsilon(1e-9));
            REQUIRE(r.minimizer.has_value());
            CHECK(r.feasible_point_verified);
        }
}

TEST_CASE("f1: oracle sandwich against the brute-force grid") {
    auto f1 = testing::load_fixture("f1");
    SearchConfig cfg;
    double h = 1.0 / 64;
    double lip = f1.instance.v0.lipschitz_bound();
    for (double a : {-1.0, 0.0, 0.8})
        for (double b : {-0.6, 0.4}) {
            Position x = {a, b};
            SolveReport r = rho(f1.instance, x, cfg);
            XReal bf = rho_bruteforce(f1.instance, x, {-4.0, -4.0}, {4.0, 4.0}, h);
            REQUIRE(bf.finite());
            CHECK(std::abs(r.value.value() - bf.value()) <= (1.0 + lip) * h);
        }
}

TEST_CASE("f7: rho(X) = V0(max(-X1, -X2))") {
    auto f7 = testing::load_fixture("f7");
    SearchConfig cfg;
    for (double a : {-2.0, -1.0, -0.4, 0.0, 0.6, 1.0, 2.0})
        for (double b : {-1.7, -0.3, 0.9, 2.0}) {
            SolveReport r = rho(f7.instance, {a, b}, cfg);
            REQUIRE(r.status == SolveStatus::Optimal);
            double want = f7_v0(std::max(-a, -b));
            CHECK(r.value.value() == doctest::Approx(want).epsilon(1e-9));
            REQUIRE(r.minimizer.has_value());
            CHECK((*r.minimizer)[0] == doctest::Approx(std::max(-a, -b)).epsilon(1e-7));
        }
    // worked value from the quasiconvex example
    SolveReport r = rho(f7.instance, {1.0, 2.0}, cfg);
    CHECK(r.value.value() == doctest::Approx(-0.5));
}

TEST_CASE("f7: oracle sandwich") {
    auto f7 = testing::load_fixture("f7");
    SearchConfig cfg;
    double h = 1.0 / 64;
    double lip = f7.instance.v0.lipschitz_bound();
    for (double a : {-1.3, 0.55, 1.05})
        for (double b : {-0.35, 1.2}) {
            Position x = {a, b};
            SolveReport r = rho(f7.instance, x, cfg);
            XReal bf = rho_bruteforce(f7.instance, x, {-4.0}, {4.0}, h);
            REQUIRE(bf.finite());
            CHECK(std::abs(r.value.value() - bf.value()) <= (1.0 + lip) * h);
        }
}

TEST_CASE("f5: open cell gives -X1 - 1 when X2 > 0 and +inf otherwise") {
    auto f5 = testing::load_fixture("f5");
    SearchConfig cfg;
    SolveReport fin = rho(f5.instance, {0.5, 1.0}, cfg);
    REQUIRE(fin.status == SolveStatus::Optimal);
    CHECK(fin.value.value() == doctest::Approx(-1.5));
    CHECK_FALSE(fin.minimizer.has_value());  // infimum not attained on the open face

    SolveReport inf1 = rho(f5.instance, {1.0, 0.0}, cfg);
    CHECK(inf1.status == SolveStatus::Infeasible);
    CHECK(inf1.value.is_pos_inf());
    SolveReport inf2 = rho(f5.instance, {1.0, -0.5}, cfg);
    CHECK(inf2.value.is_pos_inf());
}

TEST_CASE("f5: epigraph point (U, -2) is outside C") {
    auto f5 = testing::load_fixture("f5");
    SearchConfig cfg;
    Position u = {1.0, 1.0};
    SolveReport r = rho(f5.instance, u, cfg);
    CHECK(r.value.value() == doctest::Approx(-2.0));  // (U, -2) in epi(rho)
    CHECK_FALSE(c_membership(f5.instance, u, -2.0, cfg));
    CHECK(c_membership(f5.instance, u, -1.9, cfg));
    CHECK(c_membership(f5.instance, u, 0.0, cfg));
}

TEST_CASE("f6: rays (-lambda X, 0) stay in C and (0,1) is always in C") {
    auto f6 = testing::load_fixture("f6");
    SearchConfig cfg;
    for (double lam : {1.0, 2.0, 5.0})
        CHECK(c_membership(f6.instance, {lam, -lam}, 0.0, cfg));
    CHECK(c_membership(f6.instance, {0.0, 0.0}, 1.0, cfg));
}

TEST_CASE("rho(0) <= 0 on instances with 0 acceptable") {
    SearchConfig cfg;
    for (const char* name :
         {"f1", "f2", "f3", "f4", "f6", "f7", "f8", "box", "battery_worstcase_complete",
          "battery_es_bidask", "battery_dominance_linear", "battery_expectile_linear",
          "battery_utility_convex", "battery_adjusted_es"}) {
        auto li = testing::load_fixture(name);
        Position zero(li.instance.space.size(), 0.0);
        SolveReport r = rho(li.instance, zero, cfg);
        CHECK(r.value.raw() <= 1e-7);
    }
}

TEST_CASE("monotonicity: X >= Y implies rho(X) <= rho(Y)") {
    SearchConfig cfg;
    std::mt19937_64 rng(0x5EED);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.0, 2.0);
    for (const char* name : {"f1", "f7", "battery_es_bidask", "battery_worstcase_complete"}) {
        auto li = testing::load_fixture(name);
        const std::size_t d = li.instance.space.size();
        for (int t = 0; t < 40; ++t) {
            Position y(d), x(d);
            for (std::size_t j = 0; j < d; ++j) {
                y[j] = unif(rng);
                x[j] = y[j] + pos(rng);
            }
            SolveReport rx = rho(li.instance, x, cfg), ry = rho(li.instance, y, cfg);
            CHECK(rx.value.raw() <= ry.value.raw() + 1e-7);
        }
    }
}

TEST_CASE("attainment holds under the theorem flags") {
    SearchConfig cfg;
    for (const char* name : {"f7", "box", "battery_worstcase_complete", "battery_es_bidask"}) {
        auto li = testing::load_fixture(name);
        AttainmentFlags flags = attainment_flags(li.instance, cfg);
        if (!flags.any()) continue;
        std::mt19937_64 rng(0xACE);
        std::uniform_real_distribution<double> unif(-1.5, 1.5);
        for (int t = 0; t < 25; ++t) {
            Position x(li.instance.space.size());
            for (auto& v : x) v = unif(rng);
            SolveReport r = rho(li.instance, x, cfg);
            if (r.value.finite() && r.path == "polyhedral") {
                REQUIRE(r.minimizer.has_value());
                CHECK(r.feasible_point_verified);
            }
        }
    }
}

TEST_CASE("lsc spot check passes on closed fixtures and fails along the f5 sequence") {
    SearchConfig cfg;
    // f1, f6, f7: rho(X) <= rho(X_n) + C/n along deterministic sequences,
    // with C the instance's Lipschitz budget (liminf form of the lsc claim)
    for (const char* name : {"f1", "f6", "f7"}) {
        auto li = testing::load_fixture(name);
        const std::size_t d = li.instance.space.size();
        double c_lip = (1.0 + li.instance.v0.lipschitz_bound()) *
                       (1.0 + li.instance.v1.lipschitz_bound());
        Position x(d, 0.25), dir(d);
        for (std::size_t j = 0; j < d; ++j) dir[j] = (j % 2 == 0) ? 1.0 : -1.0;
        SolveReport rx = rho(li.instance, x, cfg);
        for (int n = 5; n <= 20; ++n) {
            Position xn(d);
            for (std::size_t j = 0; j < d; ++j) xn[j] = x[j] + dir[j] / n;
            double rn = rho(li.instance, xn, cfg).value.raw();
            CHECK(rx.value.raw() <= rn + c_lip / n + 1e-7);
        }
    }
    // f5: X_n = (1/n) U - S converges to -S but rho(-S) = +inf
    auto f5 = testing::load_fixture("f5");
    Position limit = {-1.0, 0.0};
    CHECK(rho(f5.instance, limit, cfg).value.is_pos_inf());
    double tail = std::numeric_limits<double>::infinity();
    for (int n = 5; n <= 20; ++n) {
        Position xn = {1.0 / n - 1.0, 1.0 / n};
        SolveReport rn = rho(f5.instance, xn, cfg);
        CHECK(rn.value.value() == doctest::Approx(-1.0 / n));
        CHECK(c_membership(f5.instance, xn, 0.0, cfg));  // (X_n, 0) in C
        tail = std::min(tail, rn.value.raw());
    }
    CHECK(tail < 1.0);  // the limit is +inf: lower semicontinuity fails here
}

TEST_CASE("rho_cash_additive closed forms and bisection agree") {
    ScenarioSpace s = ScenarioSpace::uniform(2);
    auto wc = AcceptanceSet::worst_case(s);
    CHECK(rho_cash_additive(wc, {2.0, -3.0}).value() == doctest::Approx(3.0));
    auto es = AcceptanceSet::expected_shortfall(s, 0.5);
    CHECK(rho_cash_additive(es, {-1.0, 3.0}).value() == doctest::Approx(1.0));

    // cash additivity: rho_A(X + c 1) = rho_A(X) - c
    std::mt19937_64 rng(0xCAFE);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    auto ex = AcceptanceSet::expectile(s, 0.3);
    PiecewiseLinear u({0.0}, {0.0}, 2.0, 0.5);
    auto ut = AcceptanceSet::utility(s, u);
    for (int t = 0; t < 60; ++t) {
        Position x = {unif(rng), unif(rng)};
        double c = unif(rng);
        Position xc = {x[0] + c, x[1] + c};
        for (const AcceptanceSet* a : {&wc, &es, &ex, &ut}) {
            XReal r0 = rho_cash_additive(*a, x), rc = rho_cash_additive(*a, xc);
            REQUIRE(r0.finite());
            CHECK(rc.value() == doctest::Approx(r0.value() - c).epsilon(1e-8));
        }
    }

    // bisection-free closed form for VaR agrees with the quantile
    auto var = AcceptanceSet::value_at_risk(s, 0.6);
    for (int t = 0; t < 40; ++t) {
        Position x = {unif(rng), unif(rng)};
        XReal r = rho_cash_additive(var, x);
        CHECK(r.value() == doctest::Approx(-upper_quantile(s, x, 0.6)).epsilon(1e-8));
    }
}

TEST_CASE("convex path tracks the exact polyhedral value") {
    SearchConfig exact, convex;
    convex.path = SearchConfig::Path::Convex;
    for (const char* name : {"battery_es_bidask", "battery_utility_convex"}) {
        auto li = testing::load_fixture(name);
        std::mt19937_64 rng(0xC0);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int t = 0; t < 4; ++t) {
            Position x(li.instance.space.size());
            for (auto& v : x) v = unif(rng);
            SolveReport re = rho(li.instance, x, exact);
            SolveReport rc = rho(li.instance, x, convex);
            REQUIRE(re.value.finite());
            REQUIRE(rc.value.finite());
            CHECK(rc.value.value() >= re.value.value() - 1e-6);  // upper bound by construction
            CHECK(std::abs(rc.value.value() - re.value.value()) < 5e-3);
        }
    }
}

TEST_CASE("global path tracks the exact value on f7") {
    auto f7 = testing::load_fixture("f7");
    SearchConfig global;
    global.path = SearchConfig::Path::Global;
    for (double a : {-1.25, 0.5})
        for (double b : {0.75, -0.5}) {
            SolveReport rg = rho(f7.instance, {a, b}, global);
            double want = f7_v0(std::max(-a, -b));
            REQUIRE(rg.value.finite());
            CHECK(rg.value.value() == doctest::Approx(want).epsilon(1e-5));
        }
}

TEST_CASE("unbounded instance is certified with a ray") {
    // Acceptance half-space the payoff satisfies at arbitrarily negative cost.
    ScenarioSpace s = ScenarioSpace::uniform(2);
    std::vector<UnionCell> cells = {{{{{1.0, 0.0}, 0.0, false}}}};
    auto acc = AcceptanceSet::fixture_union(s, cells, cells, true, true, true);
    MarketInstance inst(s, acc, PortfolioSet::full(1), AcquisitionRule::linear({1.0}),
                        LiquidationRule::linear(s, {{0.0, 1.0}}), "unbounded");
    SolveReport r = rho(inst, {1.0, 0.0}, SearchConfig{});
    CHECK(r.status == SolveStatus::Unbounded);
    CHECK(r.value.is_neg_inf());
    REQUIRE(r.ray.has_value());
    CHECK((*r.ray)[0] < -1e-12);
    CHECK(r.ray_in_l);
}

TEST_CASE("min-of-convex decomposition") {
    SearchConfig cfg;
    auto f1 = testing::load_fixture("f1");
    CHECK(convex_min_decomposition_check(f1.instance, {0.0, 0.0}, cfg) == CheckOutcome::Holds);
    auto dom = testing::load_fixture("battery_dominance_linear");
    CHECK(convex_min_decomposition_check(dom.instance, {0.2, -0.4, 0.6}, cfg) ==
          CheckOutcome::Holds);
    auto es = testing::load_fixture("battery_es_bidask");
    CHECK(convex_min_decomposition_check(es.instance, {0.5, -0.25, 0.75, -1.0}, cfg) ==
          CheckOutcome::Holds);
}

TEST_CASE("price additivity along the cash asset") {
    SearchConfig cfg;
    auto b1 = testing::load_fixture("battery_worstcase_complete");
    Portfolio cash = {1.0, 0.0, 0.0};
    CHECK(price_additivity_check(b1.instance, cash, {0.4, -0.6, 1.0}, {-1.0, 0.0, 2.0}, cfg) ==
          CheckOutcome::Holds);

    // f7: the kinked V0 violates the additivity premises
    auto f7 = testing::load_fixture("f7");
    CHECK(price_additivity_check(f7.instance, {1.0}, {1.0, 2.0}, {1.0}, cfg) ==
          CheckOutcome::PremiseViolation);
}

TEST_CASE("reduction through the zero-cost hyperplane") {
    SearchConfig cfg;
    auto b1 = testing::load_fixture("battery_worstcase_complete");
    Portfolio cash = {1.0, 0.0, 0.0};
    CHECK(reduction_check(b1.instance, cash, {0.4, -0.6, 1.0}, cfg) == CheckOutcome::Holds);

    // single-asset market: V = {0} and the reduction is rho = V0(z) rho_A
    ScenarioSpace s = ScenarioSpace::uniform(2);
    MarketInstance single(s, AcceptanceSet::expected_shortfall(s, 0.5), PortfolioSet::full(1),
                          AcquisitionRule::linear({1.0}),
                          LiquidationRule::linear(s, {{1.0, 1.0}}), "single");
    CHECK(reduction_check(single, {1.0}, {-1.0, 3.0}, cfg) == CheckOutcome::Holds);
    SolveReport r = rho(single, {-1.0, 3.0}, cfg);
    XReal ra = rho_cash_additive(single.acceptance, {-1.0, 3.0});
    CHECK(r.value.value() == doctest::Approx(ra.value()).epsilon(1e-8));
}

TEST_CASE("f1 reduction with z = (1,0)") {
    SearchConfig cfg;
    auto f1 = testing::load_fixture("f1");
    Portfolio z = {1.0, 0.0};  // V1(z) = 1 on both outcomes, V0(z) = 1
    CHECK(reduction_check(f1.instance, z, {0.0, 0.0}, cfg) == CheckOutcome::Holds);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "frictional/market.hpp"
#include "support/fixtures.hpp"

using namespace frictional;

namespace {

BidAskMatrix pi2() { return {{{1.0, 2.0}, {0.6, 1.0}}}; }

BidAskMatrix pi3() {
    return {{{1.0, 2.0, 3.0}, {0.6, 1.0, 1.7}, {0.4, 0.7, 1.0}}};
}

}  // namespace

TEST_CASE("kabanov vertex enumeration") {
    auto v = kabanov_build(pi2());
    REQUIRE(v.size() == 2);
    CHECK(v[0][0] == doctest::Approx(1.0));
    CHECK(v[0][1] == doctest::Approx(5.0 / 3.0));
    CHECK(v[1][1] == doctest::Approx(2.0));

    auto v1 = kabanov_build({{{1.0}}});
    REQUIRE(v1.size() == 1);
    CHECK(v1[0][0] == doctest::Approx(1.0));

    auto vf = kabanov_build({{{1.0, 1.0}, {1.0, 1.0}}});  // frictionless
    REQUIRE(vf.size() == 1);
    CHECK(vf[0][1] == doctest::Approx(1.0));

    // triangle violation: pi12 * pi21 < 1
    CHECK_THROWS(kabanov_build({{{1.0, 2.0}, {0.4, 1.0}}}));
}

TEST_CASE("kabanov acquisition value") {
    auto v0 = AcquisitionRule::kabanov(pi2());
    CHECK(v0.eval({1.0, -1.0}) == doctest::Approx(1.0 - 5.0 / 3.0));
    CHECK(v0.eval({0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(v0.is_positively_homogeneous());
}

TEST_CASE("kabanov bid-ask bound |V_t(x)| <= |x1| + sum |xi| pi^{1i}") {
    std::mt19937_64 rng(0x5EED);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (auto& m : {pi2(), pi3()}) {
        const int n = m.size();
        auto v0 = AcquisitionRule::kabanov(m);
        ScenarioSpace s = ScenarioSpace::uniform(2);
        auto v1 = LiquidationRule::kabanov(s, {m, m});
        for (int t = 0; t < 1000; ++t) {
            Portfolio x(static_cast<std::size_t>(n));
            for (auto& c : x) c = unif(rng);
            double bound = std::abs(x[0]);
            for (int i = 1; i < n; ++i)
                bound += std::abs(x[static_cast<std::size_t>(i)]) * m.pi[0][static_cast<std::size_t>(i)];
            CHECK(std::abs(v0.eval(x)) <= bound + 1e-9);
            for (double v : v1.eval(x)) CHECK(std::abs(v) <= bound + 1e-9);
        }
    }
}

TEST_CASE("kabanov sublinearity and superlinearity") {
    std::mt19937_64 rng(0xA11CE);
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    std::uniform_real_distribution<double> pos(0.1, 3.0);
    auto v0 = AcquisitionRule::kabanov(pi3());
    ScenarioSpace s = ScenarioSpace::uniform(2);
    auto v1 = LiquidationRule::kabanov(s, {pi3(), pi3()});
    for (int t = 0; t < 500; ++t) {
        Portfolio x = {unif(rng), unif(rng), unif(rng)}, y = {unif(rng), unif(rng), unif(rng)};
        Portfolio xy = {x[0] + y[0], x[1] + y[1], x[2] + y[2]};
        CHECK(v0.eval(xy) <= v0.eval(x) + v0.eval(y) + 1e-9);
        double lam = pos(rng);
        Portfolio lx = {lam * x[0], lam * x[1], lam * x[2]};
        CHECK(v0.eval(lx) == doctest::Approx(lam * v0.eval(x)).epsilon(1e-9));
        Position a = v1.eval(xy), b = v1.eval(x), c = v1.eval(y);
        for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] >= b[j] + c[j] - 1e-9);
    }
}

TEST_CASE("f7 acquisition curve") {
    auto f7 = testing::load_fixture("f7");
    const auto& v0 = f7.instance.v0;
    CHECK(v0.eval({-0.5}) == doctest::Approx(-0.25));
    CHECK(v0.eval({0.0}) == doctest::Approx(0.0));
    CHECK(v0.eval({-2.0}) == doctest::Approx(-1.5));
    CHECK(v0.eval({1.5}) == doctest::Approx(1.5));

    // Exact asymptotic slopes against the doubling-limit oracle.
    CHECK(v0.asymptotic({-1.0}) == doctest::Approx(-1.0));
    CHECK(v0.asymptotic({1.0}) == doctest::Approx(1.0));
    const auto& curve = v0.curves()[0];
    CHECK(asymptotic_by_doubling(curve, -1.0) == doctest::Approx(-1.0));
    CHECK(asymptotic_by_doubling(curve, 1.0) == doctest::Approx(1.0));
    CHECK_FALSE(v0.is_convex());
}

TEST_CASE("linear asymptotics are the map itself") {
    auto v0 = AcquisitionRule::linear({1.0, 1.0});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int t = 0; t < 100; ++t) {
        Portfolio x = {unif(rng), unif(rng)};
        CHECK(v0.asymptotic(x) == doctest::Approx(v0.eval(x)));
    }
}

TEST_CASE("f4 liquidation expression") {
    auto f4 = testing::load_fixture("f4");
    Position z = f4.instance.v1.eval({2.0, -1.0});
    CHECK(z[0] == doctest::Approx(0.0));  // min(0, 3) = 0
    CHECK(z[1] == doctest::Approx(0.0));
    Position z0 = f4.instance.v1.eval({0.0, 0.0});
    CHECK(z0[0] == doctest::Approx(0.0));
    CHECK(z0[1] == doctest::Approx(0.0));
    CHECK(f4.instance.v1.is_concave());
    CHECK(f4.instance.v1.is_positively_homogeneous());
}

TEST_CASE("f1 liquidation payoffs") {
    auto f1 = testing::load_fixture("f1");
    Position z = f1.instance.v1.eval({1.0, 1.0});
    CHECK(z[0] == doctest::Approx(2.0));
    CHECK(z[1] == doctest::Approx(1.0));
}

TEST_CASE("bid-ask spread invariants on random points") {
    std::mt19937_64 rng(0xBEEF);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (const char* name : {"f1", "f7", "f8", "battery_es_bidask", "battery_utility_convex"}) {
        auto li = testing::load_fixture(name);
        const auto& inst = li.instance;
        for (int t = 0; t < 1000; ++t) {
            Portfolio x(static_cast<std::size_t>(inst.nassets));
            for (auto& c : x) c = unif(rng);
            Portfolio nx(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) nx[i] = -x[i];
            CHECK(inst.v0.eval(x) >= -inst.v0.eval(nx) - 1e-9);
            Position up = inst.v1.eval(x), dn = inst.v1.eval(nx);
            for (std::size_t j = 0; j < up.size(); ++j) CHECK(up[j] <= -dn[j] + 1e-9);
        }
    }
}

TEST_CASE("positively homogeneous separable curves scale") {
    auto li = testing::load_fixture("battery_es_bidask");
    const auto& v0 = li.instance.v0;
    CHECK(v0.is_positively_homogeneous());
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    std::uniform_real_distribution<double> pos(0.1, 4.0);
    for (int t = 0; t < 300; ++t) {
        Portfolio x = {unif(rng), unif(rng)};
        double lam = pos(rng);
        Portfolio lx = {lam * x[0], lam * x[1]};
        CHECK(v0.eval(lx) == doctest::Approx(lam * v0.eval(x)).epsilon(1e-10));
    }
}

TEST_CASE("portfolio set membership and recession") {
    auto box = PortfolioSet::box({-1.0, -1.0}, {1.0, 1.0});
    CHECK(box.contains({1.0, 0.0}));
    CHECK_FALSE(box.asymptotic_contains({1.0, 0.0}));
    CHECK(box.asymptotic_contains({0.0, 0.0}));
    CHECK(box.is_bounded());

    auto full = PortfolioSet::full(2);
    CHECK(full.asymptotic_contains({13.0, -7.0}));

    auto poly = PortfolioSet::polyhedral(2, {{{1.0, 1.0}, -1.0}});
    CHECK(poly.contains({0.0, -0.5}));
    CHECK(poly.asymptotic_contains({1.0, -1.0}));   // recession row: x1 + x2 >= 0
    CHECK_FALSE(poly.asymptotic_contains({-1.0, -0.5}));

    auto nn = PortfolioSet::nonneg(2);
    CHECK(nn.asymptotic_contains({2.0, 0.0}));
    CHECK_FALSE(nn.asymptotic_contains({-0.1, 1.0}));
}

TEST_CASE("margin and collateral sets need the acquisition rule") {
    auto v0 = AcquisitionRule::linear({1.0, 2.0});
    auto margin = PortfolioSet::margin({0.5, 0.5});
    CHECK(margin.contains({1.0, 1.0}, &v0));
    CHECK_THROWS(margin.contains({1.0, 1.0}, nullptr));
    auto coll = PortfolioSet::collateral(2, 0.8);
    // gamma V0(x+) + V0(x-) = 0.8*1 - 2 < 0
    CHECK_FALSE(coll.contains({1.0, -1.0}, &v0));
    CHECK(coll.contains({1.0, 0.0}, &v0));
}

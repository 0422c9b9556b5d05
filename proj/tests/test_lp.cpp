#include <doctest.h>

#include <cmath>
#include <random>

#include "frictional/linear_program.hpp"

using namespace frictional;

TEST_CASE("basic bounded lp") {
    LinearProgram lp(2);
    lp.c = {1.0, 1.0};
    lp.lo = {0.0, 0.0};
    lp.hi = {LinearProgram::inf, LinearProgram::inf};
    lp.add_row_geq({1.0, 2.0}, 2.0);
    LpSolution s = solve_lp(lp);
    REQUIRE(s.optimal());
    CHECK(s.value == doctest::Approx(1.0).epsilon(1e-9));  // x = (0, 1)
    CHECK(s.x[0] == doctest::Approx(0.0));
    CHECK(s.x[1] == doctest::Approx(1.0));
}

TEST_CASE("free variables and equality rows") {
    LinearProgram lp(2);
    lp.c = {1.0, 0.0};
    lp.add_row_eq({1.0, 1.0}, 3.0);
    lp.add_row_geq({0.0, 1.0}, 1.0);
    lp.add_row_leq({0.0, 1.0}, 2.0);
    LpSolution s = solve_lp(lp);
    REQUIRE(s.optimal());
    CHECK(s.value == doctest::Approx(1.0));  // x1 = 3 - x2, x2 max = 2
    CHECK(s.x[1] == doctest::Approx(2.0));
}

TEST_CASE("infeasible") {
    LinearProgram lp(1);
    lp.c = {1.0};
    lp.add_row_geq({1.0}, 2.0);
    lp.add_row_leq({1.0}, 1.0);
    CHECK(solve_lp(lp).infeasible());
}

TEST_CASE("unbounded with improving ray") {
    LinearProgram lp(2);
    lp.c = {1.0, 1.0};
    lp.add_row_geq({1.0, -1.0}, 0.0);
    LpSolution s = solve_lp(lp);
    REQUIRE(s.unbounded());
    double cr = lp.c[0] * s.ray[0] + lp.c[1] * s.ray[1];
    CHECK(cr < -1e-9);
    double ar = s.ray[0] - s.ray[1];
    CHECK(ar >= -1e-9);  // ray stays feasible for the row
}

TEST_CASE("variable upper bounds") {
    LinearProgram lp(1);
    lp.c = {-1.0};
    lp.lo = {-2.0};
    lp.hi = {5.0};
    LpSolution s = solve_lp(lp);
    REQUIRE(s.optimal());
    CHECK(s.x[0] == doctest::Approx(5.0));
    CHECK(s.value == doctest::Approx(-5.0));
}

namespace {

// Independent 2-d oracle: enumerate intersections of active-constraint pairs
// (including box edges), filter feasible, take the best vertex.
double vertex_oracle(const LinearProgram& lp) {
    struct Line {
        double a0, a1, b;  // a.x = b candidate activity
    };
    std::vector<Line> lines;
    for (const auto& r : lp.rows) {
        if (r.lo > -LinearProgram::inf) lines.push_back({r.a[0], r.a[1], r.lo});
        if (r.hi < LinearProgram::inf) lines.push_back({r.a[0], r.a[1], r.hi});
    }
    for (int i = 0; i < 2; ++i) {
        if (lp.lo[i] > -LinearProgram::inf)
            lines.push_back({i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, lp.lo[i]});
        if (lp.hi[i] < LinearProgram::inf)
            lines.push_back({i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, lp.hi[i]});
    }
    auto feasible = [&](double x, double y) {
        for (const auto& r : lp.rows) {
            double v = r.a[0] * x + r.a[1] * y;
            if (v < r.lo - 1e-7 || v > r.hi + 1e-7) return false;
        }
        if (x < lp.lo[0] - 1e-7 || x > lp.hi[0] + 1e-7) return false;
        if (y < lp.lo[1] - 1e-7 || y > lp.hi[1] + 1e-7) return false;
        return true;
    };
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            double det = lines[i].a0 * lines[j].a1 - lines[i].a1 * lines[j].a0;
            if (std::abs(det) < 1e-10) continue;
            double x = (lines[i].b * lines[j].a1 - lines[i].a1 * lines[j].b) / det;
            double y = (lines[i].a0 * lines[j].b - lines[i].b * lines[j].a0) / det;
            if (feasible(x, y)) best = std::min(best, lp.c[0] * x + lp.c[1] * y + lp.c0);
        }
    return best;
}

}  // namespace

TEST_CASE("randomized 2-d lps agree with the vertex oracle") {
    std::mt19937_64 rng(0x5EED);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    int solved = 0;
    for (int t = 0; t < 400; ++t) {
        LinearProgram lp(2);
        lp.c = {unif(rng), unif(rng)};
        lp.lo = {-4.0, -4.0};
        lp.hi = {4.0, 4.0};
        int rows = 1 + static_cast<int>(std::abs(unif(rng)) * 2);
        for (int r = 0; r < rows; ++r)
            lp.add_row_geq({unif(rng), unif(rng)}, unif(rng));
        LpSolution s = solve_lp(lp);
        double oracle = vertex_oracle(lp);
        if (!std::isfinite(oracle)) {
            CHECK(s.infeasible());
            continue;
        }
        REQUIRE(s.optimal());
        CHECK(s.value == doctest::Approx(oracle).epsilon(1e-7));
        ++solved;
    }
    CHECK(solved > 200);  // the generator must exercise the optimal branch
}

TEST_CASE("duals satisfy stationarity on free variables") {
    std::mt19937_64 rng(0xD0A1);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    int checked = 0;
    for (int t = 0; t < 200; ++t) {
        LinearProgram lp(3);
        lp.c = {unif(rng), unif(rng), unif(rng)};
        // keep it bounded via a strong convex-cone of rows
        lp.add_row_geq({1.0, 0.0, 0.0}, unif(rng) - 3.0);
        lp.add_row_geq({0.0, 1.0, 0.0}, unif(rng) - 3.0);
        lp.add_row_geq({0.0, 0.0, 1.0}, unif(rng) - 3.0);
        lp.add_row_leq({1.0, 1.0, 1.0}, 5.0 + std::abs(unif(rng)));
        lp.add_row_leq({1.0, -1.0, 2.0}, 6.0 + std::abs(unif(rng)));
        lp.add_row_leq({2.0, 1.0, -1.0}, 6.0 + std::abs(unif(rng)));
        LpSolution s = solve_lp(lp);
        if (!s.optimal()) continue;
        // c = sum_r lambda_r a_r on free variables (all variables are free here)
        for (int i = 0; i < 3; ++i) {
            double resid = lp.c[static_cast<std::size_t>(i)];
            for (std::size_t r = 0; r < lp.rows.size(); ++r)
                resid -= s.row_dual[r] * lp.rows[r].a[static_cast<std::size_t>(i)];
            CHECK(std::abs(resid) < 1e-6);
        }
        // weak duality through the Lagrangian at the reported multipliers
        double lagr = 0.0;
        for (std::size_t r = 0; r < lp.rows.size(); ++r) {
            const auto& row = lp.rows[r];
            if (std::abs(s.row_dual[r]) < 1e-12) continue;
            lagr += s.row_dual[r] * (s.row_dual[r] >= 0.0 ? row.lo : row.hi);
        }
        CHECK(lagr <= s.value + 1e-6);
        ++checked;
    }
    CHECK(checked > 100);
}

#pragma once

#include <limits>
#include <vector>

namespace frictional {

/// Dense linear program:  minimize c.x + c0  subject to
///   row_lo <= A x <= row_hi   and   lo <= x <= hi  (any bound may be infinite).
struct LinearProgram {
    int nvars = 0;
    std::vector<double> c;
    double c0 = 0.0;

    struct Row {
        std::vector<double> a;
        double lo, hi;
    };
    std::vector<Row> rows;
    std::vector<double> lo, hi;  // variable bounds, sized nvars

    static constexpr double inf = std::numeric_limits<double>::infinity();

    explicit LinearProgram(int n = 0)
        : nvars(n), c(n, 0.0), lo(n, -inf), hi(n, inf) {}

    void add_row(std::vector<double> a, double row_lo, double row_hi) {
        rows.push_back({std::move(a), row_lo, row_hi});
    }
    void add_row_geq(std::vector<double> a, double b) { add_row(std::move(a), b, inf); }
    void add_row_leq(std::vector<double> a, double b) { add_row(std::move(a), -inf, b); }
    void add_row_eq(std::vector<double> a, double b) { add_row(std::move(a), b, b); }
};

struct LpSolution {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    double value = 0.0;
    std::vector<double> x;        // optimal point (Optimal) or feasible base point (Unbounded)
    std::vector<double> ray;      // improving feasible direction, set when Unbounded
    std::vector<double> row_dual; // per-row multiplier: >=0 on binding lower bounds,
                                  // <=0 on binding upper bounds, 0 when slack (Optimal only)
    bool optimal() const { return status == Status::Optimal; }
    bool infeasible() const { return status == Status::Infeasible; }
    bool unbounded() const { return status == Status::Unbounded; }
};

/// Two-phase dense primal simplex with Bland fallback. Exact on the small
/// problems this library generates (tens of variables and rows).
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace frictional

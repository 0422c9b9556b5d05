#include "frictional/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace frictional {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-8;
constexpr double kZeroTol = 1e-11;

// Standard form: minimize c.y over {A y = b, y >= 0, b >= 0}, built from the
// user problem by shifting/splitting variables and adding slack columns.
struct Standard {
    int n = 0;  // structural + slack columns
    std::vector<std::vector<double>> arow;  // row-major A
    std::vector<double> b;
    std::vector<double> c;
    std::vector<double> flip;  // +1 / -1 applied per row to make b >= 0

    // Mapping back to the user's variables.
    // kind 0: x_i = shift + y[col1]
    // kind 1: x_i = shift - y[col1]
    // kind 2: x_i = y[col1] - y[col2]
    struct VarMap {
        int kind;
        int col1, col2;
        double shift;
    };
    std::vector<VarMap> vmap;

    // Per user row: standard row carrying its lower / upper bound (-1: absent).
    std::vector<int> row_lo_idx, row_hi_idx;
};

Standard build_standard(const LinearProgram& lp) {
    const double inf = LinearProgram::inf;
    Standard s;

    struct PendingRow {
        std::vector<double> a;  // over user variables
        double rhs;
        int slack_sign;  // +1: a.x + s = rhs ; -1: a.x - s = rhs ; 0: equality
    };
    std::vector<PendingRow> pend;

    s.row_lo_idx.assign(lp.rows.size(), -1);
    s.row_hi_idx.assign(lp.rows.size(), -1);

    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        const auto& row = lp.rows[r];
        if (static_cast<int>(row.a.size()) != lp.nvars)
            throw std::invalid_argument("lp row dimension mismatch");
        bool has_lo = row.lo > -inf, has_hi = row.hi < inf;
        if (!has_lo && !has_hi) continue;
        if (has_lo && has_hi && row.hi - row.lo <= 1e-14) {
            s.row_lo_idx[r] = static_cast<int>(pend.size());
            pend.push_back({row.a, row.lo, 0});
            continue;
        }
        if (has_lo) {
            s.row_lo_idx[r] = static_cast<int>(pend.size());
            pend.push_back({row.a, row.lo, -1});
        }
        if (has_hi) {
            s.row_hi_idx[r] = static_cast<int>(pend.size());
            pend.push_back({row.a, row.hi, +1});
        }
    }

    // Variable substitutions; finite upper bounds of lower-bounded variables
    // become synthetic rows.
    s.vmap.resize(lp.nvars);
    for (int i = 0; i < lp.nvars; ++i) {
        double vlo = lp.lo[i], vhi = lp.hi[i];
        if (vlo > -inf) {
            s.vmap[i] = {0, -1, -1, vlo};
            if (vhi < inf) {
                PendingRow pr;
                pr.a.assign(lp.nvars, 0.0);
                pr.a[i] = 1.0;
                pr.rhs = vhi;
                pr.slack_sign = +1;
                pend.push_back(std::move(pr));
            }
        } else if (vhi < inf) {
            s.vmap[i] = {1, -1, -1, vhi};
        } else {
            s.vmap[i] = {2, -1, -1, 0.0};
        }
    }

    // Assign structural columns.
    for (int i = 0; i < lp.nvars; ++i) {
        auto& m = s.vmap[i];
        m.col1 = s.n++;
        if (m.kind == 2) m.col2 = s.n++;
    }
    std::vector<int> slack_col(pend.size(), -1);
    for (std::size_t k = 0; k < pend.size(); ++k)
        if (pend[k].slack_sign != 0) slack_col[k] = s.n++;

    const std::size_t m = pend.size();
    s.arow.assign(m, std::vector<double>(s.n, 0.0));
    s.b.assign(m, 0.0);
    s.c.assign(s.n, 0.0);
    s.flip.assign(m, 1.0);

    for (std::size_t k = 0; k < m; ++k) {
        double rhs = pend[k].rhs;
        auto& out = s.arow[k];
        for (int i = 0; i < lp.nvars; ++i) {
            double a = pend[k].a[i];
            if (a == 0.0) continue;
            const auto& vm = s.vmap[i];
            if (vm.kind == 0) {
                rhs -= a * vm.shift;
                out[vm.col1] += a;
            } else if (vm.kind == 1) {
                rhs -= a * vm.shift;
                out[vm.col1] -= a;
            } else {
                out[vm.col1] += a;
                out[vm.col2] -= a;
            }
        }
        if (slack_col[k] >= 0) out[slack_col[k]] = static_cast<double>(pend[k].slack_sign);
        s.b[k] = rhs;
        if (rhs < 0.0) {
            s.flip[k] = -1.0;
            s.b[k] = -rhs;
            for (double& v : out) v = -v;
        }
    }

    for (int i = 0; i < lp.nvars; ++i) {
        double ci = lp.c[i];
        if (ci == 0.0) continue;
        const auto& vm = s.vmap[i];
        if (vm.kind == 0) {
            s.c[vm.col1] += ci;
        } else if (vm.kind == 1) {
            s.c[vm.col1] -= ci;
        } else {
            s.c[vm.col1] += ci;
            s.c[vm.col2] -= ci;
        }
    }
    return s;
}

struct Tableau {
    int m, n;  // rows, total columns (structural+slack+artificial)
    std::vector<std::vector<double>> t;
    std::vector<double> rhs;
    std::vector<int> basis;
};

// One simplex phase minimizing `cost`; pricing restricted to the first
// `col_limit` columns. Returns false when unbounded.
bool run_simplex(Tableau& tb, const std::vector<double>& cost, int col_limit,
                 int* unbounded_col) {
    const int m = tb.m;
    std::vector<double> red(tb.n, 0.0);
    int degenerate_streak = 0;
    for (long iter = 0; iter < 50000; ++iter) {
        for (int j = 0; j < col_limit; ++j) {
            double r = cost[j];
            for (int i = 0; i < m; ++i) {
                double cb = cost[tb.basis[i]];
                if (cb != 0.0) r -= cb * tb.t[i][j];
            }
            red[j] = r;
        }
        for (int i = 0; i < m; ++i)
            if (tb.basis[i] < col_limit) red[tb.basis[i]] = 0.0;

        int e = -1;
        if (degenerate_streak > 40) {  // Bland: first improving column
            for (int j = 0; j < col_limit; ++j)
                if (red[j] < -kPivotTol) { e = j; break; }
        } else {  // Dantzig: most negative reduced cost
            double best = -kPivotTol;
            for (int j = 0; j < col_limit; ++j)
                if (red[j] < best) { best = red[j]; e = j; }
        }
        if (e < 0) return true;

        int leave = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m; ++i) {
            if (tb.t[i][e] > kPivotTol) {
                double ratio = tb.rhs[i] / tb.t[i][e];
                if (leave < 0 || ratio < best_ratio - kZeroTol ||
                    (std::abs(ratio - best_ratio) <= kZeroTol &&
                     tb.basis[i] < tb.basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
        }
        if (leave < 0) {
            if (unbounded_col) *unbounded_col = e;
            return false;
        }
        degenerate_streak = (best_ratio <= kZeroTol) ? degenerate_streak + 1 : 0;

        double piv = tb.t[leave][e];
        auto& prow = tb.t[leave];
        for (int j = 0; j < tb.n; ++j) prow[j] /= piv;
        tb.rhs[leave] /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            double f = tb.t[i][e];
            if (f == 0.0) continue;
            for (int j = 0; j < tb.n; ++j) tb.t[i][j] -= f * prow[j];
            tb.rhs[i] -= f * tb.rhs[leave];
        }
        tb.basis[leave] = e;
    }
    throw std::runtime_error("simplex: iteration limit exceeded");
}

// Solve B^T lambda = c_B for the final basis from the original standard data.
std::vector<double> recover_duals(const Standard& s, const std::vector<double>& cost,
                                  const Tableau& tb) {
    int m = tb.m;
    std::vector<std::vector<double>> M(m, std::vector<double>(m + 1, 0.0));
    for (int i = 0; i < m; ++i) {  // row i of B^T is column basis[i] of A
        int col = tb.basis[i];
        for (int r = 0; r < m; ++r)
            M[i][r] = (col < s.n) ? s.arow[r][col] : (r == col - s.n ? 1.0 : 0.0);
        M[i][m] = cost[col];
    }
    for (int k = 0; k < m; ++k) {
        int p = k;
        for (int i = k + 1; i < m; ++i)
            if (std::abs(M[i][k]) > std::abs(M[p][k])) p = i;
        std::swap(M[k], M[p]);
        if (std::abs(M[k][k]) < 1e-13) continue;
        for (int i = 0; i < m; ++i) {
            if (i == k || M[i][k] == 0.0) continue;
            double f = M[i][k] / M[k][k];
            for (int j = k; j <= m; ++j) M[i][j] -= f * M[k][j];
        }
    }
    std::vector<double> lambda(m, 0.0);
    for (int k = 0; k < m; ++k)
        lambda[k] = (std::abs(M[k][k]) < 1e-13) ? 0.0 : M[k][m] / M[k][k];
    return lambda;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    LpSolution out;
    if (static_cast<int>(lp.c.size()) != lp.nvars ||
        static_cast<int>(lp.lo.size()) != lp.nvars ||
        static_cast<int>(lp.hi.size()) != lp.nvars)
        throw std::invalid_argument("lp: field sizes inconsistent with nvars");
    for (int i = 0; i < lp.nvars; ++i)
        if (lp.lo[i] > lp.hi[i]) return out;  // Infeasible

    Standard s = build_standard(lp);
    const int m = static_cast<int>(s.b.size());

    Tableau tb;
    tb.m = m;
    tb.n = s.n + m;
    tb.t.assign(m, std::vector<double>(tb.n, 0.0));
    tb.rhs = s.b;
    tb.basis.resize(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < s.n; ++j) tb.t[i][j] = s.arow[i][j];
        tb.t[i][s.n + i] = 1.0;
        tb.basis[i] = s.n + i;
    }

    // Phase 1: drive the artificial basis out.
    std::vector<double> cost1(tb.n, 0.0);
    for (int i = 0; i < m; ++i) cost1[s.n + i] = 1.0;
    run_simplex(tb, cost1, tb.n, nullptr);
    double art_sum = 0.0;
    for (int i = 0; i < m; ++i)
        if (tb.basis[i] >= s.n) art_sum += tb.rhs[i];
    if (art_sum > kFeasTol) return out;  // Infeasible

    for (int i = 0; i < m; ++i) {
        if (tb.basis[i] < s.n) continue;
        int e = -1;
        for (int j = 0; j < s.n; ++j)
            if (std::abs(tb.t[i][j]) > kPivotTol) { e = j; break; }
        if (e < 0) continue;  // redundant row, artificial stays basic at zero
        double piv = tb.t[i][e];
        for (int j = 0; j < tb.n; ++j) tb.t[i][j] /= piv;
        tb.rhs[i] /= piv;
        for (int r = 0; r < m; ++r) {
            if (r == i) continue;
            double f = tb.t[r][e];
            if (f == 0.0) continue;
            for (int j = 0; j < tb.n; ++j) tb.t[r][j] -= f * tb.t[i][j];
            tb.rhs[r] -= f * tb.rhs[i];
        }
        tb.basis[i] = e;
    }

    // Phase 2.
    std::vector<double> cost2(tb.n, 0.0);
    for (int j = 0; j < s.n; ++j) cost2[j] = s.c[j];
    double big = 1.0;
    for (double cj : s.c) big = std::max(big, std::abs(cj));
    for (int i = 0; i < m; ++i) cost2[s.n + i] = 1e6 * big;

    int ub_col = -1;
    bool bounded = run_simplex(tb, cost2, s.n, &ub_col);

    std::vector<double> y(tb.n, 0.0);
    for (int i = 0; i < m; ++i) y[tb.basis[i]] = tb.rhs[i];

    auto map_back = [&](const std::vector<double>& yv, bool as_direction) {
        std::vector<double> x(lp.nvars, 0.0);
        for (int i = 0; i < lp.nvars; ++i) {
            const auto& vm = s.vmap[i];
            double base = as_direction ? 0.0 : vm.shift;
            if (vm.kind == 0) x[i] = base + yv[vm.col1];
            else if (vm.kind == 1) x[i] = base - yv[vm.col1];
            else x[i] = yv[vm.col1] - yv[vm.col2];
        }
        return x;
    };

    out.x = map_back(y, false);

    if (!bounded) {
        out.status = LpSolution::Status::Unbounded;
        std::vector<double> dir(tb.n, 0.0);
        dir[ub_col] = 1.0;
        for (int i = 0; i < m; ++i) dir[tb.basis[i]] = -tb.t[i][ub_col];
        out.ray = map_back(dir, true);
        out.value = -LinearProgram::inf;
        return out;
    }

    out.status = LpSolution::Status::Optimal;
    double v = lp.c0;
    for (int i = 0; i < lp.nvars; ++i) v += lp.c[i] * out.x[i];
    out.value = v;

    std::vector<double> lambda = recover_duals(s, cost2, tb);
    for (int i = 0; i < m; ++i) lambda[i] *= s.flip[i];
    out.row_dual.assign(lp.rows.size(), 0.0);
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        double d = 0.0;
        if (s.row_lo_idx[r] >= 0) d += lambda[s.row_lo_idx[r]];
        if (s.row_hi_idx[r] >= 0) d += lambda[s.row_hi_idx[r]];
        out.row_dual[r] = d;
    }
    return out;
}

}  // namespace frictional

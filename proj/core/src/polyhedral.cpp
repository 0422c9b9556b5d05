#include "frictional/polyhedral.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace frictional {

void CompiledCell::add(std::vector<double> z, std::vector<double> aux, double b, bool strict) {
    aux.resize(static_cast<std::size_t>(aux_dim), 0.0);
    for (double c : z)
        if (c < 0.0) monotone = false;
    rows.push_back({std::move(z), std::move(aux), b, strict});
}

namespace {

std::vector<double> unit(std::size_t d, std::size_t j, double v = 1.0) {
    std::vector<double> e(d, 0.0);
    e[j] = v;
    return e;
}

// Rockafellar-Uryasev block for ES_level(Z) <= bound: aux (tau, u_1..u_d)
// with u_j >= 0, u_j >= -Z_j - tau, tau + (1/level) sum p_j u_j <= bound.
void append_es_block(CompiledCell& cell, const ScenarioSpace& space, double level,
                     double bound) {
    const std::size_t d = space.size();
    int base = cell.aux_dim;
    cell.aux_dim += static_cast<int>(d) + 1;  // tau at base, u_j at base+1+j
    for (auto& r : cell.rows) r.aux.resize(static_cast<std::size_t>(cell.aux_dim), 0.0);

    const std::size_t A = static_cast<std::size_t>(cell.aux_dim);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> au(A, 0.0);
        au[static_cast<std::size_t>(base) + 1 + j] = 1.0;
        cell.add(std::vector<double>(d, 0.0), au, 0.0);  // u_j >= 0
        std::vector<double> au2(A, 0.0);
        au2[static_cast<std::size_t>(base)] = 1.0;
        au2[static_cast<std::size_t>(base) + 1 + j] = 1.0;
        cell.add(unit(d, j), au2, 0.0);  // Z_j + tau + u_j >= 0
    }
    std::vector<double> au(A, 0.0);
    au[static_cast<std::size_t>(base)] = -1.0;
    for (std::size_t j = 0; j < d; ++j)
        au[static_cast<std::size_t>(base) + 1 + j] = -space.probs[j] / level;
    cell.add(std::vector<double>(d, 0.0), au, -bound);  // tau + avg <= bound
}

}  // namespace

std::optional<std::vector<CompiledCell>> compile_acceptance(const AcceptanceSet& a,
                                                            int max_cells) {
    const ScenarioSpace& space = a.space();
    const std::size_t d = space.size();
    std::vector<CompiledCell> cells;

    switch (a.family()) {
        case AcceptanceFamily::WorstCase: {
            CompiledCell c;
            for (std::size_t j = 0; j < d; ++j) c.add(unit(d, j), {}, 0.0);
            cells.push_back(std::move(c));
            return cells;
        }
        case AcceptanceFamily::Dominance: {
            CompiledCell c;
            for (std::size_t j = 0; j < d; ++j)
                c.add(unit(d, j), {}, a.dominance_floor()[j]);
            cells.push_back(std::move(c));
            return cells;
        }
        case AcceptanceFamily::ExpectedShortfall: {
            CompiledCell c;
            append_es_block(c, space, a.alpha(), 0.0);
            cells.push_back(std::move(c));
            return cells;
        }
        case AcceptanceFamily::Expectile: {
            // Hypograph of sum_j p_j g(Z_j), g(t) = alpha t+ - (1-alpha) t-.
            CompiledCell c;
            c.aux_dim = static_cast<int>(d);
            const double al = a.alpha();
            for (std::size_t j = 0; j < d; ++j) {
                c.add(unit(d, j, al), unit(d, j, -1.0), 0.0);        // s_j <= alpha Z_j
                c.add(unit(d, j, 1.0 - al), unit(d, j, -1.0), 0.0);  // s_j <= (1-a) Z_j
            }
            std::vector<double> au(d);
            for (std::size_t j = 0; j < d; ++j) au[j] = space.probs[j];
            c.add(std::vector<double>(d, 0.0), au, 0.0);  // sum p_j s_j >= 0
            cells.push_back(std::move(c));
            return cells;
        }
        case AcceptanceFamily::Utility: {
            const auto& u = a.utility_fn();
            const auto segs = u.segments();
            if (u.is_concave()) {
                CompiledCell c;
                c.aux_dim = static_cast<int>(d);
                for (std::size_t j = 0; j < d; ++j)
                    for (const auto& sg : segs)
                        c.add(unit(d, j, sg.slope), unit(d, j, -1.0), -sg.intercept);
                std::vector<double> au(d);
                for (std::size_t j = 0; j < d; ++j) au[j] = space.probs[j];
                c.add(std::vector<double>(d, 0.0), au, 0.0);
                cells.push_back(std::move(c));
                return cells;
            }
            // Non-concave utility: one cell per assignment of outcomes to segments.
            double count = 1.0;
            for (std::size_t j = 0; j < d; ++j) count *= static_cast<double>(segs.size());
            if (count > static_cast<double>(max_cells)) return std::nullopt;
            std::vector<std::size_t> pick(d, 0);
            while (true) {
                CompiledCell c;
                std::vector<double> lin(d);
                double rhs = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const auto& sg = segs[pick[j]];
                    if (std::isfinite(sg.lo)) c.add(unit(d, j), {}, sg.lo);
                    if (std::isfinite(sg.hi)) c.add(unit(d, j, -1.0), {}, -sg.hi);
                    lin[j] = space.probs[j] * sg.slope;
                    rhs -= space.probs[j] * sg.intercept;
                }
                c.add(lin, {}, rhs);  // E[u(Z)] >= 0 expanded on the segments
                cells.push_back(std::move(c));
                std::size_t k = 0;
                while (k < d && ++pick[k] == segs.size()) pick[k++] = 0;
                if (k == d) break;
            }
            return cells;
        }
        case AcceptanceFamily::AdjustedES: {
            if (d > 8) return std::nullopt;
            std::vector<double> levels = probability_breakpoints(space);
            for (double g : a.adjusted_alphas()) levels.push_back(g);
            std::sort(levels.begin(), levels.end());
            levels.erase(std::unique(levels.begin(), levels.end(),
                                     [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                         levels.end());
            const double lo = a.adjusted_alphas().front(), hi = a.adjusted_alphas().back();
            int blocks = 0;
            for (double lev : levels)
                if (lev >= lo - 1e-12 && lev <= hi + 1e-12) ++blocks;
            if (blocks * static_cast<int>(d + 1) > 240) return std::nullopt;
            CompiledCell c;
            for (double lev : levels) {
                if (lev < lo - 1e-12 || lev > hi + 1e-12) continue;
                double g;
                {
                    const auto& xs = a.adjusted_alphas();
                    const auto& ys = a.adjusted_values();
                    if (lev <= xs.front()) g = ys.front();
                    else if (lev >= xs.back()) g = ys.back();
                    else {
                        auto it = std::upper_bound(xs.begin(), xs.end(), lev);
                        std::size_t i = static_cast<std::size_t>(it - xs.begin());
                        double t = (lev - xs[i - 1]) / (xs[i] - xs[i - 1]);
                        g = ys[i - 1] + t * (ys[i] - ys[i - 1]);
                    }
                }
                append_es_block(c, space, lev, g);
            }
            cells.push_back(std::move(c));
            return cells;
        }
        case AcceptanceFamily::ValueAtRisk: {
            // Cells indexed by the maximal "bad" sets B with P(B) <= alpha:
            // Z_j >= 0 off B.
            if (d > 16) return std::nullopt;
            const std::size_t nsub = static_cast<std::size_t>(1) << d;
            for (std::size_t mask = 0; mask < nsub; ++mask) {
                double pb = 0.0;
                for (std::size_t j = 0; j < d; ++j)
                    if (mask & (static_cast<std::size_t>(1) << j)) pb += space.probs[j];
                if (pb > a.alpha() + 1e-15) continue;
                bool maximal = true;
                for (std::size_t j = 0; j < d && maximal; ++j) {
                    if (mask & (static_cast<std::size_t>(1) << j)) continue;
                    if (pb + space.probs[j] <= a.alpha() + 1e-15) maximal = false;
                }
                if (!maximal) continue;
                CompiledCell c;
                for (std::size_t j = 0; j < d; ++j)
                    if (!(mask & (static_cast<std::size_t>(1) << j)))
                        c.add(unit(d, j), {}, 0.0);
                if (c.rows.empty()) c.add(std::vector<double>(d, 0.0), {}, 0.0);
                cells.push_back(std::move(c));
                if (static_cast<int>(cells.size()) > max_cells) return std::nullopt;
            }
            return cells;
        }
        case AcceptanceFamily::FixtureUnion: {
            for (const auto& uc : a.cells()) {
                CompiledCell c;
                for (const auto& f : uc.faces) c.add(f.a, {}, f.b, f.strict);
                cells.push_back(std::move(c));
            }
            return cells;
        }
        case AcceptanceFamily::RangeValueAtRisk:
            return std::nullopt;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Subproblem assembly

void Subproblem::add_budget_row(double m) {
    std::vector<double> a = lp.c;
    lp.add_row_leq(std::move(a), m - lp.c0);
}

std::vector<Subproblem> build_support_subproblems(const std::vector<CompiledCell>& cells,
                                                  const std::vector<double>& w) {
    std::vector<Subproblem> subs;
    const std::size_t d = w.size();
    for (const auto& cell : cells) {
        Subproblem sp;
        sp.nx = 0;
        sp.lp = LinearProgram(static_cast<int>(d) + cell.aux_dim);
        for (std::size_t j = 0; j < d; ++j) sp.lp.c[j] = w[j];
        for (const auto& row : cell.rows) {
            std::vector<double> a(static_cast<std::size_t>(sp.lp.nvars), 0.0);
            for (std::size_t j = 0; j < d; ++j) a[j] = row.z[j];
            for (int k = 0; k < cell.aux_dim; ++k)
                a[d + static_cast<std::size_t>(k)] = row.aux[static_cast<std::size_t>(k)];
            if (row.strict) sp.strict_rows.push_back(static_cast<int>(sp.lp.rows.size()));
            sp.lp.add_row_geq(std::move(a), row.b);
        }
        subs.push_back(std::move(sp));
    }
    return subs;
}

bool strict_faces_satisfiable(const Subproblem& sub, double threshold) {
    if (sub.strict_rows.empty()) return true;
    LinearProgram lp = sub.lp;
    lp.c.assign(static_cast<std::size_t>(lp.nvars), 0.0);
    lp.c0 = 0.0;
    int mvar = lp.nvars;
    ++lp.nvars;
    lp.c.push_back(-1.0);  // maximize the common margin
    lp.lo.push_back(0.0);
    lp.hi.push_back(1.0);
    for (auto& row : lp.rows) row.a.push_back(0.0);
    for (int r : sub.strict_rows)
        lp.rows[static_cast<std::size_t>(r)].a[static_cast<std::size_t>(mvar)] = -1.0;
    LpSolution sol = solve_lp(lp);
    return sol.optimal() && -sol.value > threshold;
}

double strict_margin_at(const Subproblem& sub, const std::vector<double>& point) {
    if (sub.strict_rows.empty()) return LinearProgram::inf;
    double m = LinearProgram::inf;
    for (int r : sub.strict_rows) {
        const auto& row = sub.lp.rows[static_cast<std::size_t>(r)];
        double v = 0.0;
        for (std::size_t i = 0; i < row.a.size() && i < point.size(); ++i)
            v += row.a[i] * point[i];
        m = std::min(m, v - row.lo);
    }
    return m;
}

namespace {

constexpr double kInf = LinearProgram::inf;

struct Affine {
    std::vector<double> a;
    double b = 0.0;
};

// Segment of f covering [lo, hi]; f must be affine there (guaranteed by the
// breakpoint-driven interval construction).
PiecewiseLinear::Segment segment_at(const PiecewiseLinear& f, double lo, double hi) {
    for (const auto& sg : f.segments())
        if (sg.lo <= lo + 1e-12 && hi <= sg.hi + 1e-12) return sg;
    double mid = std::isfinite(lo) ? (std::isfinite(hi) ? 0.5 * (lo + hi) : lo + 1.0)
                                   : (std::isfinite(hi) ? hi - 1.0 : 0.0);
    double s = f(mid + 0.5) - f(mid - 0.5);
    return {lo, hi, s, f(mid) - s * mid};
}

// Effective curve of a Pwl expression term (coef folded in).
PiecewiseLinear scaled_curve(const PiecewiseLinear& c, double coef) {
    std::vector<double> ys;
    for (double y : c.values()) ys.push_back(coef * y);
    return PiecewiseLinear(c.breakpoints(), std::move(ys), coef * c.slope_left(),
                           coef * c.slope_right());
}

struct BuildContext {
    const MarketInstance* inst;
    const Position* X = nullptr;
    const std::vector<double>* weights = nullptr;
    const CompiledCell* cell = nullptr;
    std::vector<int> split_assets;                      // indices of split assets
    std::vector<std::vector<double>> breakpoints;       // per split asset
};

// Decide which assets must be box-split for this cell. Returns false when the
// structure cannot be represented exactly at all.
bool plan_splits(BuildContext& ctx) {
    const MarketInstance& inst = *ctx.inst;
    const std::size_t N = static_cast<std::size_t>(inst.nassets);
    const bool monotone_cell = (ctx.cell == nullptr) || ctx.cell->monotone;
    const bool weights_mode = ctx.weights != nullptr;
    if (weights_mode && !inst.v1.is_affine())
        for (double w : *ctx.weights)
            if (w < -1e-12) return false;

    std::vector<bool> split(N, false);
    std::vector<std::vector<double>> bps(N);

    // V0 side.
    if (inst.v0.has_curves()) {
        for (std::size_t i = 0; i < N; ++i) {
            const auto& c = inst.v0.curves()[i];
            if (!c.is_affine() && !c.is_convex()) {
                split[i] = true;
                for (double b : c.breakpoints()) bps[i].push_back(b);
            }
        }
    } else if (inst.v0.form() == V0Form::Expr) {
        for (const auto& term : inst.v0.expr_form().terms) {
            using K = ScalarExpr::Term::Kind;
            if (term.kind == K::Lin) continue;
            if ((term.kind == K::MinLin && term.coef > 0.0) ||
                (term.kind == K::MaxLin && term.coef < 0.0))
                return false;  // concave kink in the objective, not box-separable
            if (term.kind == K::Pwl) {
                PiecewiseLinear eff = scaled_curve(term.curve, term.coef);
                if (!eff.is_affine() && !eff.is_convex()) {
                    split[static_cast<std::size_t>(term.asset)] = true;
                    for (double b : eff.breakpoints())
                        bps[static_cast<std::size_t>(term.asset)].push_back(b);
                }
            }
        }
    }

    // V1 side (needed when acceptance rows or weights reference it).
    const bool need_v1 = (ctx.cell != nullptr) || weights_mode;
    if (need_v1) {
        const bool hypo_ok = monotone_cell || weights_mode;
        if (inst.v1.has_curves()) {
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t w = 0; w < inst.space.size(); ++w) {
                    const auto& h = inst.v1.curve(i, w);
                    if (h.is_affine()) continue;
                    if (h.is_concave() && hypo_ok) continue;
                    split[i] = true;
                    for (double b : h.breakpoints()) bps[i].push_back(b);
                }
        } else if (inst.v1.form() == V1Form::Kabanov) {
            if (!hypo_ok && !inst.v1.is_affine()) return false;
        } else if (inst.v1.form() == V1Form::Expr) {
            for (const auto& e : inst.v1.expr_form())
                for (const auto& term : e.terms) {
                    using K = ScalarExpr::Term::Kind;
                    if (term.kind == K::Lin) continue;
                    if ((term.kind == K::MinLin && term.coef > 0.0) ||
                        (term.kind == K::MaxLin && term.coef < 0.0)) {
                        if (!hypo_ok) return false;
                        continue;
                    }
                    if (term.kind == K::Pwl) {
                        PiecewiseLinear eff = scaled_curve(term.curve, term.coef);
                        if (eff.is_affine()) continue;
                        if (eff.is_concave() && hypo_ok) continue;
                        split[static_cast<std::size_t>(term.asset)] = true;
                        for (double b : eff.breakpoints())
                            bps[static_cast<std::size_t>(term.asset)].push_back(b);
                    } else if (term.kind == K::MaxLin || term.kind == K::MinLin) {
                        return false;  // convex structure against a monotone use
                    }
                }
        }
    }

    for (std::size_t i = 0; i < N; ++i) {
        if (!split[i]) continue;
        // Collect every curve breakpoint relevant to asset i so each interval
        // is affine for all of V0/V1.
        if (inst.v0.has_curves())
            for (double b : inst.v0.curves()[i].breakpoints()) bps[i].push_back(b);
        if (inst.v0.form() == V0Form::Expr)
            for (const auto& term : inst.v0.expr_form().terms)
                if (term.kind == ScalarExpr::Term::Kind::Pwl &&
                    static_cast<std::size_t>(term.asset) == i)
                    for (double b : term.curve.breakpoints()) bps[i].push_back(b);
        if (need_v1 && inst.v1.has_curves())
            for (std::size_t w = 0; w < inst.space.size(); ++w)
                for (double b : inst.v1.curve(i, w).breakpoints()) bps[i].push_back(b);
        if (need_v1 && inst.v1.form() == V1Form::Expr)
            for (const auto& e : inst.v1.expr_form())
                for (const auto& term : e.terms)
                    if (term.kind == ScalarExpr::Term::Kind::Pwl &&
                        static_cast<std::size_t>(term.asset) == i)
                        for (double b : term.curve.breakpoints()) bps[i].push_back(b);
        std::sort(bps[i].begin(), bps[i].end());
        bps[i].erase(std::unique(bps[i].begin(), bps[i].end(),
                                 [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                     bps[i].end());
        ctx.split_assets.push_back(static_cast<int>(i));
        ctx.breakpoints.push_back(bps[i]);
    }
    return true;
}

// Assemble the LP for one (cell, interval assignment). `choice[k]` selects the
// interval for split asset k. Returns nullopt when the piece is empty.
std::optional<Subproblem> assemble(const BuildContext& ctx, const std::vector<int>& choice) {
    const MarketInstance& inst = *ctx.inst;
    const std::size_t N = static_cast<std::size_t>(inst.nassets);
    const std::size_t d = inst.space.size();
    const bool monotone_cell = (ctx.cell == nullptr) || ctx.cell->monotone;
    const bool weights_mode = ctx.weights != nullptr;

    std::vector<int> interval_of(N, -1);
    std::vector<std::pair<double, double>> iv(N, {-kInf, kInf});
    for (std::size_t k = 0; k < ctx.split_assets.size(); ++k) {
        std::size_t i = static_cast<std::size_t>(ctx.split_assets[k]);
        const auto& bp = ctx.breakpoints[k];
        int c = choice[k];
        double lo = (c == 0) ? -kInf : bp[static_cast<std::size_t>(c - 1)];
        double hi = (c == static_cast<int>(bp.size())) ? kInf : bp[static_cast<std::size_t>(c)];
        interval_of[i] = c;
        iv[i] = {lo, hi};
    }

    Subproblem sp;
    sp.lp = LinearProgram(0);
    auto new_var = [&](double lo = -kInf, double hi = kInf) {
        sp.lp.c.push_back(0.0);
        sp.lp.lo.push_back(lo);
        sp.lp.hi.push_back(hi);
        return sp.lp.nvars++;
    };

    // Portfolio variables with P and interval bounds.
    for (std::size_t i = 0; i < N; ++i) {
        double lo = -kInf, hi = kInf;
        switch (inst.portfolio.family()) {
            case PortfolioFamily::NonNeg: lo = 0.0; break;
            case PortfolioFamily::Box:
                lo = inst.portfolio.box_lo()[i];
                hi = inst.portfolio.box_hi()[i];
                break;
            default: break;
        }
        lo = std::max(lo, iv[i].first);
        hi = std::min(hi, iv[i].second);
        if (lo > hi) return std::nullopt;
        new_var(lo, hi);
    }
    sp.nx = static_cast<int>(N);

    if (inst.portfolio.family() == PortfolioFamily::Polyhedral)
        for (const auto& r : inst.portfolio.rows()) {
            std::vector<double> a = r.a;
            sp.lp.add_row_geq(std::move(a), r.b);
        }

    struct PendingRow {
        std::vector<double> a;
        double lo, hi;
        bool strict;
    };
    std::vector<PendingRow> pending;
    auto add_geq = [&](std::vector<double> a, double b, bool strict = false) {
        pending.push_back({std::move(a), b, kInf, strict});
    };

    // --- V0 objective ---
    auto epi_of_convex = [&](std::size_t i, const PiecewiseLinear& eff) {
        int t = new_var();
        sp.lp.c[static_cast<std::size_t>(t)] = 1.0;
        for (const auto& sg : eff.segments()) {
            std::vector<double> a(static_cast<std::size_t>(sp.lp.nvars), 0.0);
            a[static_cast<std::size_t>(t)] = 1.0;
            a[i] = -sg.slope;
            add_geq(std::move(a), sg.intercept);  // t >= slope*x + intercept
        }
    };

    if (inst.v0.has_curves()) {
        for (std::size_t i = 0; i < N; ++i) {
            const auto& c = inst.v0.curves()[i];
            if (interval_of[i] >= 0) {
                auto sg = segment_at(c, iv[i].first, iv[i].second);
                sp.lp.c[i] += sg.slope;
                sp.lp.c0 += sg.intercept;
            } else if (c.is_affine()) {
                sp.lp.c[i] += c.slope_right();
                sp.lp.c0 += c(0.0);
            } else if (c.is_convex()) {
                epi_of_convex(i, c);
            } else {
                return std::nullopt;
            }
        }
    } else if (inst.v0.form() == V0Form::Kabanov) {
        int t = new_var();
        sp.lp.c[static_cast<std::size_t>(t)] = 1.0;
        for (const auto& z : inst.v0.kabanov_vertices()) {
            std::vector<double> a(static_cast<std::size_t>(sp.lp.nvars), 0.0);
            a[static_cast<std::size_t>(t)] = 1.0;
            for (std::size_t i = 0; i < N; ++i) a[i] = -z[i];
            add_geq(std::move(a), 0.0);  // t >= x.z
        }
    } else {
        for (const auto& term : inst.v0.expr_form().terms) {
            using K = ScalarExpr::Term::Kind;
            if (term.kind == K::Lin) {
                for (std::size_t i = 0; i < N; ++i) sp.lp.c[i] += term.coef * term.lin.a[i];
                sp.lp.c0 += term.coef * term.lin.b;
            } else if ((term.kind == K::MaxLin && term.coef > 0.0) ||
                       (term.kind == K::MinLin && term.coef < 0.0)) {
                int t = new_var();
                sp.lp.c[static_cast<std::size_t>(t)] = 1.0;
                for (const auto& f : term.forms) {
                    std::vector<double> a(static_cast<std::size_t>(sp.lp.nvars), 0.0);
                    a[static_cast<std::size_t>(t)] = 1.0;
                    for (std::size_t i = 0; i < N; ++i) a[i] = -term.coef * f.a[i];
                    add_geq(std::move(a), term.coef * f.b);
                }
            } else if (term.kind == K::Pwl) {
                std::size_t i = static_cast<std::size_t>(term.asset);
                PiecewiseLinear eff = scaled_curve(term.curve, term.coef);
                if (interval_of[i] >= 0) {
                    auto sg = segment_at(eff, iv[i].first, iv[i].second);
                    sp.lp.c[i] += sg.slope;
                    sp.lp.c0 += sg.intercept;
                } else if (eff.is_affine()) {
                    sp.lp.c[i] += eff.slope_right();
                    sp.lp.c0 += eff(0.0);
                } else if (eff.is_convex()) {
                    epi_of_convex(i, eff);
                } else {
                    return std::nullopt;
                }
            } else {
                return std::nullopt;
            }
        }
    }

    // --- V1 as affine expressions Z_w over the LP variables ---
    const bool need_z = (ctx.cell != nullptr) || weights_mode;
    std::vector<Affine> Zw(d);
    for (std::size_t w = 0; w < d; ++w)
        Zw[w].b = (ctx.X != nullptr) ? (*ctx.X)[w] : 0.0;

    auto zw_add_var = [&](std::size_t w, int var, double coef) {
        Zw[w].a.resize(static_cast<std::size_t>(sp.lp.nvars), 0.0);
        Zw[w].a[static_cast<std::size_t>(var)] += coef;
    };

    auto hypo_of_concave = [&](std::size_t i, const PiecewiseLinear& eff) {
        int v = new_var();
        for (const auto& sg : eff.segments()) {
            std::vector<double> a(static_cast<std::size_t>(sp.lp.nvars), 0.0);
            a[static_cast<std::size_t>(v)] = -1.0;
            a[i] = sg.slope;
            add_geq(std::move(a), -sg.intercept);  // v <= slope*x + intercept
        }
        return v;
    };

    if (need_z) {
        if (inst.v1.has_curves()) {
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t w = 0; w < d; ++w) {
                    const auto& h = inst.v1.curve(i, w);
                    if (interval_of[i] >= 0) {
                        auto sg = segment_at(h, iv[i].first, iv[i].second);
                        Zw[w].a.resize(static_cast<std::size_t>(sp.lp.nvars), 0.0);
                        Zw[w].a[i] += sg.slope;
                        Zw[w].b += sg.intercept;
                    } else if (h.is_affine()) {
                        Zw[w].a.resize(static_cast<std::size_t>(sp.lp.nvars), 0.0);
                        Zw[w].a[i] += h.slope_right();
                        Zw[w].b += h(0.0);
                    } else if (h.is_concave() && (monotone_cell || weights_mode)) {
                        int v = hypo_of_concave(i, h);
                        zw_add_var(w, v, 1.0);
                    } else {
                        return std::nullopt;
                    }
                }
        } else if (inst.v1.form() == V1Form::Kabanov) {
            for (std::size_t w = 0; w < d; ++w) {
                int v = new_var();
                for (const auto& z : inst.v1.kabanov_vertices()[w]) {
                    std::vector<double> a(static_cast<std::size_t>(sp.lp.nvars), 0.0);
                    a[static_cast<std::size_t>(v)] = -1.0;
                    for (std::size_t i = 0; i < N; ++i) a[i] = z[i];
                    add_geq(std::move(a), 0.0);  // v <= x.z per vertex
                }
                zw_add_var(w, v, 1.0);
            }
        } else {
            for (std::size_t w = 0; w < d; ++w)
                for (const auto& term : inst.v1.expr_form()[w].terms) {
                    using K = ScalarExpr::Term::Kind;
                    if (term.kind == K::Lin) {
                        Zw[w].a.resize(static_cast<std::size_t>(sp.lp.nvars), 0.0);
                        for (std::size_t i = 0; i < N; ++i)
                            Zw[w].a[i] += term.coef * term.lin.a[i];
                        Zw[w].b += term.coef * term.lin.b;
                    } else if ((term.kind == K::MinLin && term.coef > 0.0) ||
                               (term.kind == K::MaxLin && term.coef < 0.0)) {
                        int v = new_var();
                        for (const auto& f : term.forms) {
                            std::vector<double> a(static_cast<std::size_t>(sp.lp.nvars), 0.0);
                            a[static_cast<std::size_t>(v)] = -1.0;
                            for (std::size_t i = 0; i < N; ++i) a[i] = term.coef * f.a[i];
                            add_geq(std::move(a), -term.coef * f.b);
                        }
                        zw_add_var(w, v, 1.0);
                    } else if (term.kind == K::Pwl) {
                        std::size_t i = static_cast<std::size_t>(term.asset);
                        PiecewiseLinear eff = scaled_curve(term.curve, term.coef);
                        if (interval_of[i] >= 0) {
                            auto sg = segment_at(eff, iv[i].first, iv[i].second);
                            Zw[w].a.resize(static_cast<std::size_t>(sp.lp.nvars), 0.0);
                            Zw[w].a[i] += sg.slope;
                            Zw[w].b += sg.intercept;
                        } else if (eff.is_affine()) {
                            Zw[w].a.resize(static_cast<std::size_t>(sp.lp.nvars), 0.0);
                            Zw[w].a[i] += eff.slope_right();
                            Zw[w].b += eff(0.0);
                        } else {
                            int v = hypo_of_concave(i, eff);
                            zw_add_var(w, v, 1.0);
                        }
                    } else {
                        return std::nullopt;
                    }
                }
        }
    }

    // Market-support objective: -sum_w weights_w * (Z_w - X_w) with X = 0.
    if (weights_mode) {
        for (std::size_t w = 0; w < d; ++w) {
            double ww = (*ctx.weights)[w];
            if (ww == 0.0) continue;
            Zw[w].a.resize(static_cast<std::size_t>(sp.lp.nvars), 0.0);
            for (std::size_t i = 0; i < Zw[w].a.size(); ++i) sp.lp.c[i] -= ww * Zw[w].a[i];
            sp.lp.c0 -= ww * Zw[w].b;
        }
    }

    // Acceptance rows with cell auxiliaries appended as fresh variables.
    if (ctx.cell != nullptr) {
        std::vector<int> aux_var(static_cast<std::size_t>(ctx.cell->aux_dim));
        for (int k = 0; k < ctx.cell->aux_dim; ++k) aux_var[static_cast<std::size_t>(k)] = new_var();
        for (const auto& row : ctx.cell->rows) {
            std::vector<double> a(static_cast<std::size_t>(sp.lp.nvars), 0.0);
            double rhs = row.b;
            for (std::size_t w = 0; w < d; ++w) {
                double zc = row.z[w];
                if (zc == 0.0) continue;
                for (std::size_t i = 0; i < Zw[w].a.size(); ++i) a[i] += zc * Zw[w].a[i];
                rhs -= zc * Zw[w].b;
            }
            for (int k = 0; k < ctx.cell->aux_dim; ++k) {
                double ac = row.aux[static_cast<std::size_t>(k)];
                if (ac != 0.0) a[static_cast<std::size_t>(aux_var[static_cast<std::size_t>(k)])] += ac;
            }
            add_geq(std::move(a), rhs, row.strict);
        }
    }

    // Materialise pending rows at the final variable count.
    for (auto& pr : pending) {
        pr.a.resize(static_cast<std::size_t>(sp.lp.nvars), 0.0);
        if (pr.strict) sp.strict_rows.push_back(static_cast<int>(sp.lp.rows.size()));
        sp.lp.add_row_geq(std::move(pr.a), pr.lo);
    }
    return sp;
}

std::optional<std::vector<Subproblem>> enumerate_pieces(BuildContext& ctx, int max_cells) {
    if (!plan_splits(ctx)) return std::nullopt;
    double total = 1.0;
    for (const auto& bp : ctx.breakpoints) total *= static_cast<double>(bp.size() + 1);
    if (total > static_cast<double>(max_cells)) return std::nullopt;

    std::vector<Subproblem> out;
    std::vector<int> choice(ctx.split_assets.size(), 0);
    while (true) {
        if (auto sp = assemble(ctx, choice)) out.push_back(std::move(*sp));
        std::size_t k = 0;
        while (k < choice.size() &&
               ++choice[k] > static_cast<int>(ctx.breakpoints[k].size()))
            choice[k++] = 0;
        if (k == choice.size()) break;
    }
    return out;
}

}  // namespace

std::optional<std::vector<Subproblem>> build_min_v0_subproblems(
    const MarketInstance& inst, const Position& X, const std::vector<CompiledCell>& cells,
    int max_cells) {
    if (!inst.portfolio.is_polyhedral()) return std::nullopt;
    std::vector<Subproblem> out;
    for (const auto& cell : cells) {
        BuildContext ctx;
        ctx.inst = &inst;
        ctx.X = &X;
        ctx.cell = &cell;
        auto subs = enumerate_pieces(ctx, max_cells);
        if (!subs) return std::nullopt;
        for (auto& s : *subs) out.push_back(std::move(s));
        if (static_cast<int>(out.size()) > max_cells) return std::nullopt;
    }
    return out;
}

std::optional<std::vector<Subproblem>> build_market_support_subproblems(
    const MarketInstance& inst, const std::vector<double>& weights, int max_cells) {
    if (!inst.portfolio.is_polyhedral()) return std::nullopt;
    if (weights.size() != inst.space.size())
        throw std::invalid_argument("market support: weight dimension mismatch");
    BuildContext ctx;
    ctx.inst = &inst;
    ctx.weights = &weights;
    return enumerate_pieces(ctx, max_cells);
}

}  // namespace frictional

#include "frictional/risk.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "frictional/linear_program.hpp"

namespace frictional {

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::FeasibleBound: return "feasible-bound";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::ResolutionLimit: return "resolution-limit";
    }
    return "?";
}

std::string outcome_name(CheckOutcome o) {
    switch (o) {
        case CheckOutcome::Holds: return "holds";
        case CheckOutcome::Fails: return "fails";
        case CheckOutcome::PremiseViolation: return "premise-violation";
        case CheckOutcome::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

constexpr double kStrictThreshold = 1e-7;

bool lex_less(const Portfolio& a, const Portfolio& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] < b[i] - 1e-12) return true;
        if (a[i] > b[i] + 1e-12) return false;
    }
    return false;
}

// Exact path: per-subproblem LPs, minimum over pieces, strict faces handled
// by the satisfiability margin, ties broken to the lexicographically smallest
// minimizer.
std::optional<SolveReport> solve_polyhedral(const MarketInstance& inst, const Position& X,
                                            const std::vector<CompiledCell>& cells,
                                            const SearchConfig& cfg) {
    auto subs = build_min_v0_subproblems(inst, X, cells, cfg.max_cells);
    if (!subs) return std::nullopt;

    SolveReport rep;
    rep.path = "polyhedral";
    bool found = false;
    double best = 0.0;
    Portfolio best_x;
    bool best_attained = false;

    for (const auto& sub : *subs) {
        LpSolution sol = solve_lp(sub.lp);
        if (sol.infeasible()) continue;
        if (!strict_faces_satisfiable(sub, kStrictThreshold)) continue;

        if (sol.unbounded()) {
            rep.status = SolveStatus::Unbounded;
            rep.value = XReal::neg_inf();
            Portfolio ray(sub.nx), base(sub.nx);
            for (int i = 0; i < sub.nx; ++i) {
                ray[static_cast<std::size_t>(i)] = sol.ray[static_cast<std::size_t>(i)];
                base[static_cast<std::size_t>(i)] = sol.x[static_cast<std::size_t>(i)];
            }
            rep.ray = ray;
            rep.minimizer.reset();
            try {
                rep.ray_in_l = l_membership(inst, ray, 1e-6);
            } catch (const std::logic_error&) {
                rep.ray_in_l = false;
            }
            return rep;
        }

        Portfolio x(sub.nx);
        for (int i = 0; i < sub.nx; ++i)
            x[static_cast<std::size_t>(i)] = sol.x[static_cast<std::size_t>(i)];
        bool attained = strict_margin_at(sub, sol.x) > kStrictThreshold;
        if (!found || sol.value < best - 1e-12 ||
            (std::abs(sol.value - best) <= 1e-12 &&
             ((attained && !best_attained) ||
              (attained == best_attained && lex_less(x, best_x))))) {
            found = true;
            best = sol.value;
            best_x = x;
            best_attained = attained;
        }
    }

    if (!found) {
        rep.status = SolveStatus::Infeasible;
        rep.value = XReal::pos_inf();
        return rep;
    }
    rep.status = SolveStatus::Optimal;
    rep.value = best;
    if (best_attained) {
        rep.minimizer = best_x;
        // Verify the certificate against the instance-level predicates.
        bool ok = inst.portfolio.contains(best_x, &inst.v0, 1e-7) &&
                  std::abs(inst.v0.eval(best_x) - best) <= 1e-6;
        if (ok) {
            Position z = inst.v1.eval(best_x);
            for (std::size_t j = 0; j < z.size(); ++j) z[j] += X[j];
            if (inst.acceptance.family() != AcceptanceFamily::RangeValueAtRisk)
                ok = inst.acceptance.contains(z, 1e-7);
        }
        rep.feasible_point_verified = ok;
    }
    return rep;
}

// Same LP machinery against explicit cells (no instance-level acceptance
// verification possible).
std::optional<SolveReport> solve_polyhedral_cells(const MarketInstance& inst,
                                                  const Position& X,
                                                  const std::vector<CompiledCell>& cells,
                                                  const SearchConfig& cfg) {
    auto subs = build_min_v0_subproblems(inst, X, cells, cfg.max_cells);
    if (!subs) return std::nullopt;
    SolveReport rep;
    rep.path = "polyhedral";
    bool found = false;
    double best = 0.0;
    Portfolio best_x;
    bool best_attained = false;
    for (const auto& sub : *subs) {
        LpSolution sol = solve_lp(sub.lp);
        if (sol.infeasible()) continue;
        if (!strict_faces_satisfiable(sub, kStrictThreshold)) continue;
        if (sol.unbounded()) {
            rep.status = SolveStatus::Unbounded;
            rep.value = XReal::neg_inf();
            Portfolio ray(sub.nx);
            for (int i = 0; i < sub.nx; ++i)
                ray[static_cast<std::size_t>(i)] = sol.ray[static_cast<std::size_t>(i)];
            rep.ray = ray;
            return rep;
        }
        Portfolio x(sub.nx);
        for (int i = 0; i < sub.nx; ++i)
            x[static_cast<std::size_t>(i)] = sol.x[static_cast<std::size_t>(i)];
        bool attained = strict_margin_at(sub, sol.x) > kStrictThreshold;
        if (!found || sol.value < best - 1e-12 ||
            (std::abs(sol.value - best) <= 1e-12 && lex_less(x, best_x))) {
            found = true;
            best = sol.value;
            best_x = x;
            best_attained = attained;
        }
    }
    if (!found) {
        rep.status = SolveStatus::Infeasible;
        rep.value = XReal::pos_inf();
        return rep;
    }
    rep.status = SolveStatus::Optimal;
    rep.value = best;
    if (best_attained) rep.minimizer = best_x;
    return rep;
}

// ---------------------------------------------------------------------------
// Convex path: projected supergradient feasibility ascent + value bisection.

struct ConvexOracle {
    const MarketInstance* inst;
    const Position* X;
    std::vector<double> lo, hi;

    double feas_margin(const Portfolio& x) const {
        Position z = inst->v1.eval(x);
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += (*X)[j];
        double m = inst->acceptance.margin(z);
        switch (inst->portfolio.family()) {
            case PortfolioFamily::NonNeg:
                for (double v : x) m = std::min(m, v);
                break;
            case PortfolioFamily::Box:
                for (std::size_t i = 0; i < x.size(); ++i) {
                    m = std::min(m, x[i] - inst->portfolio.box_lo()[i]);
                    m = std::min(m, inst->portfolio.box_hi()[i] - x[i]);
                }
                break;
            case PortfolioFamily::Polyhedral:
                for (const auto& r : inst->portfolio.rows()) {
                    double ax = 0.0;
                    for (std::size_t i = 0; i < x.size(); ++i) ax += r.a[i] * x[i];
                    m = std::min(m, ax - r.b);
                }
                break;
            default:
                break;
        }
        return m;
    }

    // Maximize min(feas_margin, budget - V0): projected supergradient with
    // numeric one-sided gradients, then a pattern polish with diagonal moves
    // (the objective is piecewise-linear concave, where plain coordinate
    // steps can stall at kink corners).
    std::pair<double, Portfolio> ascend(double budget, Portfolio x, int iters) const {
        const std::size_t n = x.size();
        auto G = [&](const Portfolio& p) {
            double g = feas_margin(p);
            if (std::isfinite(budget)) g = std::min(g, budget - inst->v0.eval(p));
            return g;
        };
        double best = G(x);
        Portfolio best_x = x;
        double span = 0.0;
        for (std::size_t i = 0; i < n; ++i) span = std::max(span, hi[i] - lo[i]);
        double step0 = 0.25 * span;
        const double fd = 1e-6;
        for (int k = 1; k <= iters; ++k) {
            Portfolio grad(n, 0.0);
            double g0 = G(x);
            for (std::size_t i = 0; i < n; ++i) {
                Portfolio xp = x;
                xp[i] += fd;
                grad[i] = (G(xp) - g0) / fd;
            }
            double norm = 0.0;
            for (double v : grad) norm += v * v;
            norm = std::sqrt(norm);
            if (norm < 1e-13) break;
            double step = step0 / std::sqrt(static_cast<double>(k));
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += step * grad[i] / norm;
                x[i] = std::min(std::max(x[i], lo[i]), hi[i]);
            }
            double g = G(x);
            if (g > best) {
                best = g;
                best_x = x;
            }
        }

        // Pattern polish around the incumbent.
        std::vector<Portfolio> moves;
        if (n == 2) {
            for (int k = 0; k < 24; ++k) {
                double th = 2.0 * M_PI * k / 24.0;
                moves.push_back({std::cos(th), std::sin(th)});
            }
        } else if (n <= 3) {
            std::vector<int> pat(n, -1);
            while (true) {
                Portfolio m(n);
                bool zero = true;
                for (std::size_t i = 0; i < n; ++i) {
                    m[i] = static_cast<double>(pat[i]);
                    if (pat[i] != 0) zero = false;
                }
                if (!zero) moves.push_back(m);
                std::size_t k2 = 0;
                while (k2 < n && ++pat[k2] > 1) pat[k2++] = -1;
                if (k2 == n) break;
            }
        } else {
            for (std::size_t i = 0; i < n; ++i)
                for (double s : {1.0, -1.0}) {
                    Portfolio m(n, 0.0);
                    m[i] = s;
                    moves.push_back(m);
                }
        }
        double step = 0.5 * span;
        x = best_x;
        while (step > 1e-10) {
            bool moved = false;
            for (const auto& m : moves) {
                Portfolio y = x;
                for (std::size_t i = 0; i < n; ++i)
                    y[i] = std::min(std::max(y[i] + step * m[i], lo[i]), hi[i]);
                double g = G(y);
                if (g > best + 1e-14) {
                    best = g;
                    x = y;
                    moved = true;
                }
            }
            if (!moved) step *= 0.5;
        }
        return {best, x};
    }
};

std::optional<SolveReport> solve_convex(const MarketInstance& inst, const Position& X,
                                        const SearchConfig& cfg) {
    if (!inst.market_convex() || !inst.acceptance.has_statistic() ||
        !inst.acceptance.is_convex())
        return std::nullopt;
    if (inst.portfolio.family() == PortfolioFamily::Margin ||
        inst.portfolio.family() == PortfolioFamily::Collateral)
        return std::nullopt;

    ConvexOracle oracle{&inst, &X, cfg.lo_for(inst.nassets), cfg.hi_for(inst.nassets)};
    SolveReport rep;
    rep.path = "convex";

    const std::size_t n = static_cast<std::size_t>(inst.nassets);
    Portfolio x0(n, 0.0);
    auto [m0, xf] = oracle.ascend(std::numeric_limits<double>::infinity(), x0, 1500);
    if (m0 < 0.0) {
        rep.status = SolveStatus::Infeasible;  // semidecision at this resolution
        rep.value = XReal::pos_inf();
        return rep;
    }

    // Feasibility probe with multiple warm starts: a single supergradient
    // ascent can stall in the sliver near the optimum, so several seeded
    // starts back it up.
    std::mt19937_64 rng(split_seed(cfg.seed, 3));
    std::vector<Portfolio> seeds;
    for (int k = 0; k < 4; ++k) {
        Portfolio p(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_real_distribution<double> u(oracle.lo[i], oracle.hi[i]);
            p[i] = u(rng);
        }
        seeds.push_back(std::move(p));
    }
    Portfolio warm = xf;
    auto probe = [&](double budget) -> std::pair<bool, Portfolio> {
        auto [m, xb] = oracle.ascend(budget, warm, 900);
        if (m > 1e-10) return {true, xb};
        auto [mz, xz] = oracle.ascend(budget, x0, 600);
        if (mz > 1e-10) return {true, xz};
        auto [mf, xf2] = oracle.ascend(budget, xf, 600);
        if (mf > 1e-10) return {true, xf2};
        for (const auto& s : seeds) {
            auto [ms, xs] = oracle.ascend(budget, s, 600);
            if (ms > 1e-10) return {true, xs};
        }
        return {false, warm};
    };

    double hi = inst.v0.eval(xf);
    double lo = hi - 1.0;
    int expand = 0;
    while (expand < 40) {
        auto [ok, xb] = probe(lo);
        if (!ok) break;
        warm = xb;
        hi = std::min(hi, inst.v0.eval(xb));
        lo = hi - std::pow(2.0, expand + 1);
        ++expand;
    }
    if (expand >= 40) {
        rep.status = SolveStatus::FeasibleBound;  // refuse a -inf claim without a certificate
        rep.value = hi;
        return rep;
    }

    for (int it = 0; it < 60 && hi - lo > 1e-7; ++it) {
        double mid = 0.5 * (lo + hi);
        auto [ok, xb] = probe(mid);
        if (ok) {
            hi = std::min(std::min(mid, hi), inst.v0.eval(xb));
            warm = xb;
        } else {
            lo = mid;
        }
        if (lo > hi) lo = hi - 1e-12;
    }
    rep.status = SolveStatus::FeasibleBound;
    rep.value = hi;
    rep.gap = hi - lo;
    rep.minimizer = warm;
    rep.feasible_point_verified = oracle.feas_margin(warm) >= -1e-7;
    return rep;
}

// ---------------------------------------------------------------------------
// Global path: seeded grid + pattern-search refinement.

bool global_feasible(const MarketInstance& inst, const Position& X, const Portfolio& x,
                     double tol) {
    if (!inst.portfolio.contains(x, &inst.v0, tol)) return false;
    Position z = inst.v1.eval(x);
    for (std::size_t j = 0; j < z.size(); ++j) z[j] += X[j];
    return inst.acceptance.contains(z, tol);
}

SolveReport solve_global(const MarketInstance& inst, const Position& X,
                         const SearchConfig& cfg) {
    SolveReport rep;
    rep.path = "global";
    const int N = inst.nassets;
    auto lo = cfg.lo_for(N), hi = cfg.hi_for(N);

    double step = cfg.deal_grid;
    auto grid_counts = [&](double s) {
        std::vector<int> counts(static_cast<std::size_t>(N));
        double total = 1.0;
        for (int i = 0; i < N; ++i) {
            counts[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(
                (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) / s)) + 1;
            total *= counts[static_cast<std::size_t>(i)];
        }
        return std::make_pair(counts, total);
    };
    auto [counts, total] = grid_counts(step);
    while (total > 2e5) {
        step *= 2.0;
        std::tie(counts, total) = grid_counts(step);
    }

    struct Cand {
        double v;
        Portfolio x;
    };
    std::vector<Cand> best;
    const std::size_t keep = 10;
    std::vector<int> idx(static_cast<std::size_t>(N), 0);
    const double feas_tol = 1e-9;
    while (true) {
        Portfolio x(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i)
            x[static_cast<std::size_t>(i)] =
                lo[static_cast<std::size_t>(i)] + step * idx[static_cast<std::size_t>(i)];
        if (global_feasible(inst, X, x, feas_tol)) {
            double v = inst.v0.eval(x);
            best.push_back({v, x});
            std::sort(best.begin(), best.end(),
                      [](const Cand& a, const Cand& b) { return a.v < b.v; });
            if (best.size() > keep) best.resize(keep);
        }
        int k = 0;
        while (k < N &&
               ++idx[static_cast<std::size_t>(k)] >= counts[static_cast<std::size_t>(k)])
            idx[static_cast<std::size_t>(k++)] = 0;
        if (k == N) break;
    }
    if (best.empty()) {
        rep.status = SolveStatus::Infeasible;  // at this grid resolution
        rep.value = XReal::pos_inf();
        return rep;
    }

    // Pattern-search polish on the best cells.
    for (auto& cand : best) {
        double s = step;
        while (s > 1e-9) {
            bool moved = false;
            for (int i = 0; i < N; ++i)
                for (double sign : {1.0, -1.0}) {
                    Portfolio y = cand.x;
                    y[static_cast<std::size_t>(i)] += sign * s;
                    y[static_cast<std::size_t>(i)] = std::min(
                        std::max(y[static_cast<std::size_t>(i)], lo[static_cast<std::size_t>(i)]),
                        hi[static_cast<std::size_t>(i)]);
                    if (global_feasible(inst, X, y, feas_tol)) {
                        double v = inst.v0.eval(y);
                        if (v < cand.v - 1e-13) {
                            cand.v = v;
                            cand.x = y;
                            moved = true;
                        }
                    }
                }
            if (!moved) s *= 0.5;
        }
    }
    std::sort(best.begin(), best.end(), [](const Cand& a, const Cand& b) {
        return a.v < b.v || (a.v == b.v && lex_less(a.x, b.x));
    });
    const Cand& top = best.front();

    for (int i = 0; i < N; ++i) {
        double v = top.x[static_cast<std::size_t>(i)];
        if (v <= lo[static_cast<std::size_t>(i)] + step ||
            v >= hi[static_cast<std::size_t>(i)] - step)
            rep.boundary_hit = true;
    }

    // Certified unboundedness: the optimum direction lies in L and keeps
    // improving with scale.
    if (rep.boundary_hit) {
        Portfolio dir = top.x;
        double norm = 0.0;
        for (double v : dir) norm = std::max(norm, std::abs(v));
        if (norm > 1e-9) {
            for (double& v : dir) v /= norm;
            bool in_l = false;
            try {
                in_l = l_membership(inst, dir, cfg.deal_tol);
            } catch (const std::logic_error&) {
                in_l = false;
            }
            if (in_l) {
                Portfolio far(top.x);
                for (std::size_t i = 0; i < far.size(); ++i) far[i] += 100.0 * dir[i];
                if (global_feasible(inst, X, far, 1e-6) &&
                    inst.v0.eval(far) < top.v - 1e-3 * (1.0 + std::abs(top.v))) {
                    rep.status = SolveStatus::Unbounded;
                    rep.value = XReal::neg_inf();
                    rep.ray = dir;
                    rep.ray_in_l = true;
                    return rep;
                }
            }
        }
    }

    rep.status = SolveStatus::ResolutionLimit;
    rep.value = top.v;
    rep.minimizer = top.x;
    rep.feasible_point_verified = global_feasible(inst, X, top.x, 1e-7);
    return rep;
}

}  // namespace

SolveReport rho(const MarketInstance& inst, const Position& X, const SearchConfig& cfg) {
    inst.space.check_dim(X, "rho");
    const auto path = cfg.path;
    if (path == SearchConfig::Path::Auto || path == SearchConfig::Path::Polyhedral) {
        auto cells = compile_acceptance(inst.acceptance, cfg.max_cells);
        if (cells) {
            auto rep = solve_polyhedral(inst, X, *cells, cfg);
            if (rep) return *rep;
        }
        if (path == SearchConfig::Path::Polyhedral)
            throw std::invalid_argument("rho: instance is not polyhedrally representable");
    }
    if (path == SearchConfig::Path::Auto || path == SearchConfig::Path::Convex) {
        auto rep = solve_convex(inst, X, cfg);
        if (rep) return *rep;
        if (path == SearchConfig::Path::Convex)
            throw std::invalid_argument("rho: instance does not satisfy the convex-path flags");
    }
    return solve_global(inst, X, cfg);
}

SolveReport rho_with_cells(const MarketInstance& inst, const Position& X,
                           const std::vector<CompiledCell>& cells, const SearchConfig& cfg) {
    inst.space.check_dim(X, "rho_with_cells");
    auto rep = solve_polyhedral_cells(inst, X, cells, cfg);
    if (rep) return *rep;
    throw std::invalid_argument("rho_with_cells: cells not polyhedrally solvable for this market");
}

XReal rho_bruteforce(const MarketInstance& inst, const Position& X,
                     const std::vector<double>& lo, const std::vector<double>& hi,
                     double h, double feas_tol) {
    const int N = inst.nassets;
    if (!(h > 0.0)) throw std::invalid_argument("rho_bruteforce: h must be positive");
    double total = 1.0;
    std::vector<long> counts(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        counts[static_cast<std::size_t>(i)] = static_cast<long>(std::floor(
            (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) / h + 1e-9)) + 1;
        total *= static_cast<double>(counts[static_cast<std::size_t>(i)]);
    }
    if (total > 1e8) throw std::invalid_argument("rho_bruteforce: grid size cap exceeded");

    double best = std::numeric_limits<double>::infinity();
    std::vector<long> idx(static_cast<std::size_t>(N), 0);
    while (true) {
        Portfolio x(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i)
            x[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] +
                                             h * static_cast<double>(idx[static_cast<std::size_t>(i)]);
        if (global_feasible(inst, X, x, feas_tol))
            best = std::min(best, inst.v0.eval(x));
        int k = 0;
        while (k < N &&
               ++idx[static_cast<std::size_t>(k)] >= counts[static_cast<std::size_t>(k)])
            idx[static_cast<std::size_t>(k++)] = 0;
        if (k == N) break;
    }
    if (!std::isfinite(best)) return XReal::pos_inf();
    return best;
}

bool c_membership(const MarketInstance& inst, const Position& X, double m,
                  const SearchConfig& cfg) {
    inst.space.check_dim(X, "c_membership");
    auto cells = compile_acceptance(inst.acceptance, cfg.max_cells);
    if (cells) {
        auto subs = build_min_v0_subproblems(inst, X, *cells, cfg.max_cells);
        if (subs) {
            for (auto sub : *subs) {
                sub.add_budget_row(m + cfg.tol);
                LpSolution sol = solve_lp(sub.lp);
                if (sol.infeasible()) continue;
                if (strict_faces_satisfiable(sub, kStrictThreshold)) return true;
            }
            return false;
        }
    }
    // Grid fallback.
    const int N = inst.nassets;
    auto lo = cfg.lo_for(N), hi = cfg.hi_for(N);
    double step = cfg.deal_grid / 4.0;
    std::vector<int> counts(static_cast<std::size_t>(N));
    double total = 1.0;
    for (int i = 0; i < N; ++i) {
        counts[static_cast<std::size_t>(i)] = static_cast<int>(
            std::floor((hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) / step)) + 1;
        total *= counts[static_cast<std::size_t>(i)];
    }
    while (total > 2e5) {
        step *= 2.0;
        total = 1.0;
        for (int i = 0; i < N; ++i) {
            counts[static_cast<std::size_t>(i)] = static_cast<int>(
                std::floor((hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) / step)) + 1;
            total *= counts[static_cast<std::size_t>(i)];
        }
    }
    std::vector<int> idx(static_cast<std::size_t>(N), 0);
    while (true) {
        Portfolio x(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i)
            x[static_cast<std::size_t>(i)] =
                lo[static_cast<std::size_t>(i)] + step * idx[static_cast<std::size_t>(i)];
        if (inst.v0.eval(x) <= m + cfg.tol && global_feasible(inst, X, x, cfg.tol))
            return true;
        int k = 0;
        while (k < N &&
               ++idx[static_cast<std::size_t>(k)] >= counts[static_cast<std::size_t>(k)])
            idx[static_cast<std::size_t>(k++)] = 0;
        if (k == N) break;
    }
    return false;
}

XReal rho_cash_additive(const AcceptanceSet& a, const Position& X, double tol) {
    const auto& space = a.space();
    space.check_dim(X, "rho_cash_additive");
    switch (a.family()) {
        case AcceptanceFamily::WorstCase:
            return -*std::min_element(X.begin(), X.end());
        case AcceptanceFamily::ExpectedShortfall:
            return expected_shortfall(space, X, a.alpha());
        case AcceptanceFamily::ValueAtRisk:
            return -upper_quantile(space, X, a.alpha());
        case AcceptanceFamily::RangeValueAtRisk:
            return range_value_at_risk(space, X, a.alpha(), a.beta());
        case AcceptanceFamily::Dominance: {
            double m = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < X.size(); ++j)
                m = std::max(m, a.dominance_floor()[j] - X[j]);
            return m;
        }
        default:
            break;
    }
    // Monotone bisection on m -> contains(X + m 1).
    auto feasible = [&](double m) {
        Position z(X);
        for (double& v : z) v += m;
        return a.contains(z, 0.0);
    };
    double norm = 0.0;
    for (double v : X) norm = std::max(norm, std::abs(v));
    double hi = norm + 1.0;
    int guard = 0;
    while (!feasible(hi) && guard++ < 70) hi = hi * 2.0 + 1.0;
    if (guard >= 70) return XReal::pos_inf();
    double lo = -(norm + 1.0);
    guard = 0;
    while (feasible(lo) && guard++ < 70) lo = lo * 2.0 - 1.0;
    if (guard >= 70) return XReal::neg_inf();
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (feasible(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

CheckOutcome convex_min_decomposition_check(const MarketInstance& inst, const Position& X,
                                            const SearchConfig& cfg, int sampled_y) {
    SolveReport base = rho(inst, X, cfg);
    if (!base.value.finite() || !base.minimizer) return CheckOutcome::Inconclusive;
    const double slack = 1e-6;

    Position ystar = inst.v1.eval(*base.minimizer);
    for (std::size_t j = 0; j < ystar.size(); ++j) ystar[j] += X[j];

    auto dominance_cell = [&](const Position& y) {
        CompiledCell c;
        for (std::size_t j = 0; j < y.size(); ++j) {
            std::vector<double> e(y.size(), 0.0);
            e[j] = 1.0;
            c.add(std::move(e), {}, y[j]);
        }
        return c;
    };

    SolveReport star = rho_with_cells(inst, X, {dominance_cell(ystar)}, cfg);
    if (!star.value.finite() || std::abs(star.value.value() - base.value.value()) > slack)
        return CheckOutcome::Fails;

    // Sampled dominance restrictions must never undercut rho.
    std::mt19937_64 rng(cfg.seed);
    double scale = 1.0;
    for (double v : X) scale = std::max(scale, std::abs(v));
    std::uniform_real_distribution<double> unif(-3.0 * scale, 3.0 * scale);
    int found = 0, trials = 0;
    while (found < sampled_y && trials++ < 50 * sampled_y) {
        Position y(inst.space.size());
        for (auto& v : y) v = unif(rng);
        if (!inst.acceptance.contains(y, 0.0)) continue;
        ++found;
        SolveReport ry = rho_with_cells(inst, X, {dominance_cell(y)}, cfg);
        if (ry.value.raw() < base.value.value() - slack) return CheckOutcome::Fails;
    }
    return CheckOutcome::Holds;
}

CheckOutcome price_additivity_check(const MarketInstance& inst, const Portfolio& z,
                                    const Position& X, const std::vector<double>& lambdas,
                                    const SearchConfig& cfg) {
    // Premises: additivity of V0 and V1 along z, and P + span{z} inside P.
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    const double v0z = inst.v0.eval(z);
    const Position v1z = inst.v1.eval(z);
    for (int t = 0; t < 200; ++t) {
        Portfolio x(static_cast<std::size_t>(inst.nassets));
        for (auto& v : x) v = unif(rng);
        if (!inst.portfolio.contains(x, &inst.v0, 1e-9)) continue;
        double lam = unif(rng);
        Portfolio xz(x);
        for (std::size_t i = 0; i < x.size(); ++i) xz[i] += lam * z[i];
        if (std::abs(inst.v0.eval(xz) - inst.v0.eval(x) - lam * v0z) > 1e-8)
            return CheckOutcome::PremiseViolation;
        Position a = inst.v1.eval(xz), b = inst.v1.eval(x);
        for (std::size_t j = 0; j < a.size(); ++j)
            if (std::abs(a[j] - b[j] - lam * v1z[j]) > 1e-8)
                return CheckOutcome::PremiseViolation;
        if (!inst.portfolio.contains(xz, &inst.v0, 1e-9))
            return CheckOutcome::PremiseViolation;
    }

    SolveReport base = rho(inst, X, cfg);
    for (double lam : lambdas) {
        Position shifted(X);
        for (std::size_t j = 0; j < X.size(); ++j) shifted[j] += lam * v1z[j];
        SolveReport r = rho(inst, shifted, cfg);
        if (base.value.finite() != r.value.finite()) return CheckOutcome::Fails;
        if (base.value.finite() &&
            std::abs(r.value.value() - (base.value.value() - lam * v0z)) > 1e-6)
            return CheckOutcome::Fails;
    }
    return CheckOutcome::Holds;
}

CheckOutcome reduction_check(const MarketInstance& inst, const Portfolio& z,
                             const Position& X, const SearchConfig& cfg) {
    // Premises of the reduction: price additivity along z, positive V0(z),
    // linear V0 (zero-cost set is a hyperplane), V1(z) = 1, unconstrained P,
    // and the sampled sublevel inclusion {rho_A <= 0} subset A.
    if (!inst.v0.is_affine() || inst.portfolio.family() != PortfolioFamily::Full)
        return CheckOutcome::PremiseViolation;
    const double v0z = inst.v0.eval(z);
    if (!(v0z > 1e-12)) return CheckOutcome::PremiseViolation;
    Position v1z = inst.v1.eval(z);
    for (double v : v1z)
        if (std::abs(v - 1.0) > 1e-9) return CheckOutcome::PremiseViolation;
    if (price_additivity_check(inst, z, X, {0.0, 1.0}, cfg) != CheckOutcome::Holds)
        return CheckOutcome::PremiseViolation;
    {
        std::mt19937_64 rng(split_seed(cfg.seed, 7));
        std::uniform_real_distribution<double> unif(-4.0, 4.0);
        for (int t = 0; t < 200; ++t) {
            Position w(inst.space.size());
            for (auto& v : w) v = unif(rng);
            XReal ra = rho_cash_additive(inst.acceptance, w);
            if (ra.finite() && ra.value() <= 0.0 && !inst.acceptance.contains(w, 1e-9))
                return CheckOutcome::PremiseViolation;
        }
    }

    // Zero-cost hyperplane {p.x = 0}: orthonormal-ish basis of null(p).
    const std::size_t N = static_cast<std::size_t>(inst.nassets);
    std::vector<double> p(N);
    for (std::size_t i = 0; i < N; ++i) {
        Portfolio e(N, 0.0);
        e[i] = 1.0;
        p[i] = inst.v0.eval(e);
    }
    std::vector<Portfolio> basis;
    for (std::size_t i = 0; i < N && basis.size() + 1 < N; ++i) {
        Portfolio b(N, 0.0);
        b[i] = 1.0;
        double pp = 0.0, pb = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            pp += p[k] * p[k];
            pb += p[k] * b[k];
        }
        for (std::size_t k = 0; k < N; ++k) b[k] -= pb / pp * p[k];
        for (const auto& prev : basis) {
            double d = 0.0, nn = 0.0;
            for (std::size_t k = 0; k < N; ++k) {
                d += prev[k] * b[k];
                nn += prev[k] * prev[k];
            }
            for (std::size_t k = 0; k < N; ++k) b[k] -= d / nn * prev[k];
        }
        double nb = 0.0;
        for (double v : b) nb += v * v;
        if (nb > 1e-12) basis.push_back(b);
    }

    SolveReport base = rho(inst, X, cfg);
    if (!base.value.finite()) return CheckOutcome::Inconclusive;

    auto value_at = [&](const std::vector<double>& tvec) {
        Portfolio y(N, 0.0);
        for (std::size_t k = 0; k < basis.size(); ++k)
            for (std::size_t i = 0; i < N; ++i) y[i] += tvec[k] * basis[k][i];
        Position w = inst.v1.eval(y);
        for (std::size_t j = 0; j < w.size(); ++j) w[j] += X[j];
        XReal ra = rho_cash_additive(inst.acceptance, w);
        return ra.finite() ? v0z * ra.value() : std::numeric_limits<double>::infinity();
    };

    auto scan = [&](double span, double h, std::vector<double>& argbest) {
        double bestv = std::numeric_limits<double>::infinity();
        std::vector<double> t(basis.size(), -span);
        if (basis.empty()) return value_at({});
        while (true) {
            double v = value_at(t);
            if (v < bestv) {
                bestv = v;
                argbest = t;
            }
            std::size_t k = 0;
            while (k < basis.size() && (t[k] += h) > span + 1e-12) t[k++] = -span;
            if (k == basis.size()) break;
        }
        return bestv;
    };

    std::vector<double> arg;
    double coarse = scan(8.0, 1.0, arg);
    std::vector<double> arg2;
    double fine = scan(8.0, 0.25, arg2);
    // Pattern polish around the fine best; diagonal moves matter because the
    // sampled objective is convex piecewise linear in t.
    double polished = fine;
    if (!basis.empty()) {
        std::vector<double> t = arg2;
        std::vector<std::vector<double>> moves;
        std::vector<int> pat(basis.size(), -1);
        while (true) {
            std::vector<double> m(basis.size());
            bool zero = true;
            for (std::size_t i = 0; i < m.size(); ++i) {
                m[i] = static_cast<double>(pat[i]);
                if (pat[i] != 0) zero = false;
            }
            if (!zero) moves.push_back(m);
            std::size_t k2 = 0;
            while (k2 < pat.size() && ++pat[k2] > 1) pat[k2++] = -1;
            if (k2 == pat.size()) break;
        }
        double step = 0.5;
        while (step > 1e-9) {
            bool moved = false;
            for (const auto& m : moves) {
                auto u = t;
                for (std::size_t k = 0; k < u.size(); ++k) u[k] += step * m[k];
                double v = value_at(u);
                if (v < polished - 1e-13) {
                    polished = v;
                    t = u;
                    moved = true;
                }
            }
            if (!moved) step *= 0.5;
        }
    }

    const double r = base.value.value();
    if (coarse < r - 1e-7 || fine < r - 1e-7 || polished < r - 1e-7)
        return CheckOutcome::Fails;  // reduction values may never undercut rho
    if (fine > coarse + 1e-9) return CheckOutcome::Fails;  // densification must improve
    if (std::abs(polished - r) > 1e-6) return CheckOutcome::Fails;
    return CheckOutcome::Holds;
}

AttainmentFlags attainment_flags(const MarketInstance& inst, const SearchConfig& cfg) {
    AttainmentFlags f;
    auto l = l_structure(inst, cfg);
    bool l_linear = l.status == LStructure::Linear || l.status == LStructure::Trivial;
    bool l_trivial = l.status == LStructure::Trivial;

    f.convex_l_linear = inst.acceptance.is_convex() && inst.acceptance.is_closed() &&
                        inst.portfolio.is_convex(&inst.v0) && inst.v0.is_convex() &&
                        inst.v1.is_concave() && inst.v1.is_positively_homogeneous() &&
                        l_linear;
    bool anti_star = inst.v1.is_concave() || inst.v1.is_positively_homogeneous();
    f.closed_l_trivial = inst.acceptance.is_closed() && anti_star && l_trivial;
    f.compact_portfolio = inst.acceptance.is_closed() && inst.portfolio.is_bounded();
    return f;
}

}  // namespace frictional

#include "frictional/dual.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "frictional/linear_program.hpp"
#include "frictional/polyhedral.hpp"

namespace frictional {

namespace {

bool weights_nonneg(const std::vector<double>& w, double tol = 1e-12) {
    for (double v : w)
        if (v < -tol) return false;
    return true;
}

bool weights_zero(const std::vector<double>& w, double tol = 1e-14) {
    for (double v : w)
        if (std::abs(v) > tol) return false;
    return true;
}

// Capped grid minimization used when no exact path exists; the -inf verdict
// after cfg.doublings cap escalations is a semidecision.
XReal numeric_inf_escalating(const std::function<double(const std::vector<double>&)>& f,
                             std::size_t dim, const SearchConfig& cfg) {
    double cap = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    double best = prev;
    int shrinking = 0;
    for (int level = 0; level < 20; ++level) {
        // coarse grid + pattern polish inside [-cap, cap]^dim
        int per = (dim <= 2) ? 33 : (dim <= 3 ? 17 : 9);
        std::vector<int> idx(dim, 0);
        std::vector<double> bestx(dim, 0.0);
        double local = std::numeric_limits<double>::infinity();
        while (true) {
            std::vector<double> x(dim);
            for (std::size_t i = 0; i < dim; ++i)
                x[i] = -cap + 2.0 * cap * idx[i] / (per - 1);
            double v = f(x);
            if (v < local) {
                local = v;
                bestx = x;
            }
            std::size_t k = 0;
            while (k < dim && ++idx[k] >= per) idx[k++] = 0;
            if (k == dim) break;
        }
        double step = cap / per;
        while (step > 1e-9 * cap) {
            bool moved = false;
            for (std::size_t i = 0; i < dim; ++i)
                for (double s : {step, -step}) {
                    auto y = bestx;
                    y[i] = std::min(std::max(y[i] + s, -cap), cap);
                    double v = f(y);
                    if (v < local - 1e-13) {
                        local = v;
                        bestx = y;
                        moved = true;
                    }
                }
            if (!moved) step *= 0.5;
        }
        best = std::min(best, local);
        if (local < prev - 1e-6 * (1.0 + std::abs(local))) shrinking++;
        else return best;  // stabilized: finite verdict
        prev = local;
        cap *= 2.0;
        if (shrinking >= cfg.doublings) break;
    }
    return XReal::neg_inf();
}

}  // namespace

XReal sigma_acceptance(const AcceptanceSet& a, const std::vector<double>& w,
                       const SearchConfig& cfg) {
    const auto& space = a.space();
    if (w.size() != space.size())
        throw std::invalid_argument("sigma_acceptance: weight dimension mismatch");
    const double tol = 1e-12;

    // Monotone acceptance sets force psi >= 0 on the barrier cone.
    if (!weights_nonneg(w, 1e-12)) return XReal::neg_inf();

    switch (a.family()) {
        case AcceptanceFamily::WorstCase:
            return 0.0;
        case AcceptanceFamily::ExpectedShortfall: {
            double sum = 0.0, mx = 0.0;
            for (std::size_t j = 0; j < w.size(); ++j) {
                sum += w[j];
                mx = std::max(mx, w[j] / space.probs[j]);
            }
            if (mx <= sum / a.alpha() + tol) return 0.0;
            return XReal::neg_inf();
        }
        case AcceptanceFamily::Expectile: {
            // Dual cone: w_j = s p_j r_j with r_j in [alpha, 1-alpha].
            double mx = 0.0, mn = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < w.size(); ++j) {
                double r = w[j] / space.probs[j];
                mx = std::max(mx, r);
                mn = std::min(mn, r);
            }
            if (mx <= tol) return 0.0;  // zero functional
            if (mx * a.alpha() <= mn * (1.0 - a.alpha()) + tol) return 0.0;
            return XReal::neg_inf();
        }
        case AcceptanceFamily::Dominance: {
            double v = 0.0;
            for (std::size_t j = 0; j < w.size(); ++j) v += w[j] * a.dominance_floor()[j];
            return v;
        }
        default:
            break;
    }

    if (auto cells = compile_acceptance(a, cfg.max_cells)) {
        double best = std::numeric_limits<double>::infinity();
        auto subs = build_support_subproblems(*cells, w);
        for (const auto& sub : subs) {
            LpSolution sol = solve_lp(sub.lp);
            if (sol.infeasible()) continue;
            if (!strict_faces_satisfiable(sub)) continue;
            if (sol.unbounded()) return XReal::neg_inf();
            best = std::min(best, sol.value);
        }
        if (!std::isfinite(best)) return XReal::pos_inf();  // empty acceptance (cannot happen)
        return best;
    }

    // Escalating numeric fallback (range value at risk and oversized families).
    auto objective = [&](const std::vector<double>& z) {
        if (!a.contains(z, 1e-9)) return std::numeric_limits<double>::infinity();
        double v = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) v += w[j] * z[j];
        return v;
    };
    return numeric_inf_escalating(objective, space.size(), cfg);
}

XReal sigma_market(const MarketInstance& inst, const std::vector<double>& w,
                   const SearchConfig& cfg) {
    if (w.size() != inst.space.size())
        throw std::invalid_argument("sigma_market: weight dimension mismatch");
    if (auto subs = build_market_support_subproblems(inst, w, cfg.max_cells)) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& sub : *subs) {
            LpSolution sol = solve_lp(sub.lp);
            if (sol.infeasible()) continue;
            if (sol.unbounded()) return XReal::neg_inf();
            best = std::min(best, sol.value);
        }
        if (!std::isfinite(best)) return XReal::pos_inf();  // empty P (cannot happen)
        return best;
    }
    auto objective = [&](const std::vector<double>& x) {
        if (!inst.portfolio.contains(x, &inst.v0, 1e-9))
            return std::numeric_limits<double>::infinity();
        Position z = inst.v1.eval(x);
        double v = inst.v0.eval(x);
        for (std::size_t j = 0; j < z.size(); ++j) v -= w[j] * z[j];
        return v;
    };
    return numeric_inf_escalating(objective, static_cast<std::size_t>(inst.nassets), cfg);
}

DualClass classify(const MarketInstance& inst, const std::vector<double>& w,
                   const SearchConfig& cfg) {
    DualClass c;
    XReal sa = sigma_acceptance(inst.acceptance, w, cfg);
    c.in_b = !sa.is_neg_inf();
    if (c.in_b) c.in_d = !sigma_market(inst, w, cfg).is_neg_inf();

    if (!c.in_b) return c;
    if (weights_zero(w)) return c;  // the zero functional vanishes on all of A

    const auto& a = inst.acceptance;
    if (a.family() == AcceptanceFamily::WorstCase ||
        a.family() == AcceptanceFamily::Dominance) {
        c.strict = true;
        for (double v : w)
            if (v <= 1e-9) c.strict = false;
        return c;
    }
    // Sampled normalized A-sphere with a strictness margin (semidecision).
    c.strict = true;
    const std::size_t d = inst.space.size();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int found = 0;
    for (int t = 0; t < 4000 && found < 600; ++t) {
        Position z(d);
        for (auto& v : z) v = gauss(rng);
        double nrm = 0.0;
        for (double v : z) nrm = std::max(nrm, std::abs(v));
        if (nrm < 1e-12) continue;
        for (auto& v : z) v /= nrm;
        if (!a.contains(z, 0.0)) continue;
        ++found;
        double pv = 0.0;
        for (std::size_t j = 0; j < d; ++j) pv += w[j] * z[j];
        if (pv <= 1e-9) {
            c.strict = false;
            break;
        }
    }
    return c;
}

XReal dual_bound(const MarketInstance& inst, const Position& X,
                 const std::vector<double>& w, const SearchConfig& cfg) {
    XReal sa = sigma_acceptance(inst.acceptance, w, cfg);
    if (sa.is_neg_inf()) return XReal::neg_inf();
    XReal sm = sigma_market(inst, w, cfg);
    if (sm.is_neg_inf()) return XReal::neg_inf();
    double px = 0.0;
    for (std::size_t j = 0; j < X.size(); ++j) px += w[j] * X[j];
    return sa + sm - XReal(px);
}

namespace {

void push_candidate(std::vector<std::vector<double>>& cands, std::vector<double> w) {
    for (double& v : w)
        if (v < 0.0) v = 0.0;
    for (const auto& c : cands) {
        double d = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) d = std::max(d, std::abs(c[j] - w[j]));
        if (d < 1e-10) return;
    }
    cands.push_back(std::move(w));
}

// Deterministic candidate pricing rules; the order matters for tie-breaking.
std::vector<std::vector<double>> dual_candidates(const MarketInstance& inst,
                                                 const Position& X, const SearchConfig& cfg) {
    const std::size_t d = inst.space.size();
    const std::size_t N = static_cast<std::size_t>(inst.nassets);
    std::vector<std::vector<double>> cands;

    push_candidate(cands, std::vector<double>(d, 0.0));

    // Subgradient seeds from one-sided differences of the exact rho.
    {
        SearchConfig c2 = cfg;
        SolveReport r0 = rho(inst, X, c2);
        if (r0.value.finite()) {
            const double eps = 1e-5;
            std::vector<double> fw(d, 0.0), bw(d, 0.0);
            bool ok = true;
            for (std::size_t j = 0; j < d && ok; ++j) {
                Position xp(X), xm(X);
                xp[j] += eps;
                xm[j] -= eps;
                SolveReport rp = rho(inst, xp, c2), rm = rho(inst, xm, c2);
                if (!rp.value.finite() || !rm.value.finite()) {
                    ok = false;
                    break;
                }
                fw[j] = -(rp.value.value() - r0.value.value()) / eps;
                bw[j] = -(r0.value.value() - rm.value.value()) / eps;
            }
            if (ok) {
                push_candidate(cands, fw);
                push_candidate(cands, bw);
                std::vector<double> mid(d);
                for (std::size_t j = 0; j < d; ++j) mid[j] = 0.5 * (fw[j] + bw[j]);
                push_candidate(cands, mid);
            }
        }
    }

    // Linear-market consistency equations M^T w = p (least squares).
    if (inst.v1.is_affine() && inst.v1.has_curves() && inst.v0.is_affine()) {
        std::vector<std::vector<double>> m(d, std::vector<double>(N));
        for (std::size_t w0 = 0; w0 < d; ++w0)
            for (std::size_t i = 0; i < N; ++i)
                m[w0][i] = inst.v1.curve(i, w0).slope_right();
        std::vector<double> p(N);
        for (std::size_t i = 0; i < N; ++i) {
            Portfolio e(N, 0.0);
            e[i] = 1.0;
            p[i] = inst.v0.eval(e);
        }
        // Solve (M M^T + eps I) w = M p.
        std::vector<std::vector<double>> g(d, std::vector<double>(d + 1, 0.0));
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c2 = 0; c2 < d; ++c2)
                for (std::size_t i = 0; i < N; ++i) g[r][c2] += m[r][i] * m[c2][i];
            g[r][r] += 1e-12;
            for (std::size_t i = 0; i < N; ++i) g[r][d] += m[r][i] * p[i];
        }
        for (std::size_t k = 0; k < d; ++k) {
            std::size_t piv = k;
            for (std::size_t r = k + 1; r < d; ++r)
                if (std::abs(g[r][k]) > std::abs(g[piv][k])) piv = r;
            std::swap(g[k], g[piv]);
            if (std::abs(g[k][k]) < 1e-14) continue;
            for (std::size_t r = 0; r < d; ++r) {
                if (r == k) continue;
                double f = g[r][k] / g[k][k];
                for (std::size_t c2 = k; c2 <= d; ++c2) g[r][c2] -= f * g[k][c2];
            }
        }
        std::vector<double> w(d, 0.0);
        for (std::size_t k = 0; k < d; ++k)
            if (std::abs(g[k][k]) > 1e-14) w[k] = g[k][d] / g[k][k];
        push_candidate(cands, w);
    }

    // Simplex grid (step 1/6) scaled over a log grid.
    std::vector<std::vector<double>> simplex;
    {
        const int steps = 6;
        std::vector<int> comp(d, 0);
        std::vector<int> stack;
        // enumerate compositions of `steps` into d parts
        std::function<void(std::size_t, int)> rec = [&](std::size_t j, int left) {
            if (j + 1 == d) {
                comp[j] = left;
                std::vector<double> q(d);
                for (std::size_t k = 0; k < d; ++k)
                    q[k] = static_cast<double>(comp[k]) / steps;
                simplex.push_back(std::move(q));
                return;
            }
            for (int take = 0; take <= left; ++take) {
                comp[j] = take;
                rec(j + 1, left - take);
            }
        };
        if (d <= 5) rec(0, steps);
        else {
            for (std::size_t j = 0; j < d; ++j) {
                std::vector<double> q(d, 0.0);
                q[j] = 1.0;
                simplex.push_back(std::move(q));
            }
        }
    }
    for (const auto& q : simplex)
        for (double s : {1.0, 0.5, 2.0, 0.25, 4.0})
            push_candidate(cands, [&] {
                std::vector<double> w(d);
                for (std::size_t j = 0; j < d; ++j) w[j] = s * q[j];
                return w;
            }());

    // Seeded low-discrepancy simplex points.
    std::mt19937_64 rng(split_seed(cfg.seed, 11));
    std::exponential_distribution<double> expd(1.0);
    for (int t = 0; t < 160; ++t) {
        std::vector<double> w(d);
        double sum = 0.0;
        for (auto& v : w) {
            v = expd(rng);
            sum += v;
        }
        double s = std::pow(2.0, (t % 7) - 3);
        for (auto& v : w) v = s * v / sum;
        push_candidate(cands, std::move(w));
    }
    return cands;
}

}  // namespace

DualValueReport dual_value(const MarketInstance& inst, const Position& X,
                           const SearchConfig& cfg) {
    DualValueReport rep;
    auto cands = dual_candidates(inst, X, cfg);

    struct Scored {
        double v;
        std::vector<double> w;
        std::size_t order;
    };
    std::vector<Scored> scored;
    for (std::size_t k = 0; k < cands.size(); ++k) {
        XReal b = dual_bound(inst, X, cands[k], cfg);
        if (b.is_neg_inf()) continue;
        scored.push_back({b.value(), cands[k], k});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        return a.v > b.v || (a.v == b.v && a.order < b.order);
    });
    if (scored.size() > 6) scored.resize(6);

    // Coordinate polish on the leaders.
    for (auto& s : scored) {
        double step = 0.5;
        while (step > 1e-7) {
            bool moved = false;
            for (std::size_t j = 0; j < s.w.size(); ++j)
                for (double d : {step, -step}) {
                    auto w2 = s.w;
                    w2[j] = std::max(0.0, w2[j] + d);
                    XReal b = dual_bound(inst, X, w2, cfg);
                    if (!b.is_neg_inf() && b.value() > s.v + 1e-12) {
                        s.v = b.value();
                        s.w = w2;
                        moved = true;
                    }
                }
            if (!moved) step *= 0.5;
        }
    }

    for (const auto& s : scored) {
        if (rep.value.is_neg_inf() || s.v > rep.value.raw() + 1e-15) {
            rep.value = s.v;
            rep.best_psi = s.w;
        }
        DualClass cls = classify(inst, s.w, cfg);
        if (cls.in_d_str() &&
            (rep.value_d_str.is_neg_inf() || s.v > rep.value_d_str.raw())) {
            rep.value_d_str = s.v;
            rep.best_psi_d_str = s.w;
        }
    }
    if (!rep.best_psi.empty()) rep.best_class = classify(inst, rep.best_psi, cfg);

    auto pointed = inst.acceptance.pointed();
    rep.theorem_strict_applicable = inst.acceptance.is_cone() &&
                                    pointed.verdict == Tri::True &&
                                    l_structure(inst, cfg).status == LStructure::Trivial;
    return rep;
}

XReal rho_given_psi(const MarketInstance& inst, const Position& X,
                    const std::vector<double>& w, const SearchConfig& cfg) {
    inst.space.check_dim(X, "rho_given_psi");
    if (w.size() != inst.space.size())
        throw std::invalid_argument("rho_given_psi: weight dimension mismatch");

    if (weights_zero(w)) return rho(inst, X, cfg).value;  // rho(X|0) = rho(X)

    bool has_positive = false;
    for (double v : w)
        if (v > 1e-12) has_positive = true;
    if (has_positive) {
        // sup_A psi = +inf by monotonicity: A_psi is the whole space.
        return sigma_market(inst, std::vector<double>(w.size(), 0.0), cfg);
    }

    // psi <= 0: sup_A psi = -sigma_A(-psi); one monotone scalar row remains.
    std::vector<double> u(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) u[j] = -w[j];
    XReal sa = sigma_acceptance(inst.acceptance, u, cfg);
    if (sa.is_neg_inf())
        return sigma_market(inst, std::vector<double>(w.size(), 0.0), cfg);
    CompiledCell cell;
    cell.add(u, {}, sa.value());
    try {
        return rho_with_cells(inst, X, {cell}, cfg).value;
    } catch (const std::invalid_argument&) {
        // non-polyhedral market: grid semidecision on the scalar constraint
        auto objective = [&](const std::vector<double>& x) {
            if (!inst.portfolio.contains(x, &inst.v0, 1e-9))
                return std::numeric_limits<double>::infinity();
            Position z = inst.v1.eval(x);
            double uz = 0.0;
            for (std::size_t j = 0; j < z.size(); ++j) uz += u[j] * (X[j] + z[j]);
            if (uz < sa.value() - 1e-9) return std::numeric_limits<double>::infinity();
            return inst.v0.eval(x);
        };
        return numeric_inf_escalating(objective, static_cast<std::size_t>(inst.nassets), cfg);
    }
}

QuasiconvexDualReport quasiconvex_dual_value(const MarketInstance& inst, const Position& X,
                                             const SearchConfig& cfg) {
    QuasiconvexDualReport rep;
    const std::size_t d = inst.space.size();

    // psi = 0 is always in B and reproduces rho.
    {
        XReal v0 = rho_given_psi(inst, X, std::vector<double>(d, 0.0), cfg);
        rep.value_b = v0;
        rep.best_psi.assign(d, 0.0);
    }

    // Nonzero candidates from the simplex grid; their rho(X|psi) all coincide
    // with inf_P V0, so one evaluation covers them.
    XReal nonzero_value = sigma_market(inst, std::vector<double>(d, 0.0), cfg);
    auto cands = dual_candidates(inst, X, cfg);
    for (const auto& w : cands) {
        if (weights_zero(w)) continue;
        DualClass cls = classify(inst, w, cfg);
        if (!cls.in_b) continue;
        XReal v = nonzero_value;
        if (v.raw() > rep.value_b.raw()) {
            rep.value_b = v;
            rep.best_psi = w;
        }
        if (cls.in_b_str() && v.raw() > rep.value_b_str.raw()) rep.value_b_str = v;
        if (cls.in_d && v.raw() > rep.value_d.raw()) rep.value_d = v;
        if (cls.in_d_str() && v.raw() > rep.value_d_str.raw()) rep.value_d_str = v;
    }
    return rep;
}

}  // namespace frictional

#include "frictional/deals.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "frictional/linear_program.hpp"
#include "frictional/polyhedral.hpp"

namespace frictional {

std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 step keyed by the start index
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

void normalize_sup(Portfolio& x, double target) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    if (m < 1e-15) return;
    for (double& v : x) v *= target / m;
}

void push_unique(std::vector<Portfolio>& out, Portfolio x) {
    for (const auto& y : out) {
        double d = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
        if (d < 1e-10) return;
    }
    out.push_back(std::move(x));
}

// Hyperplane normals whose zero sets are likely to carry L: zero-cost sets of
// linear pieces of V0, kink planes of min/max payoff expressions, pull-backs
// of asymptotic acceptance faces through linear payoffs.
std::vector<Portfolio> algebraic_normals(const MarketInstance& inst) {
    const std::size_t N = static_cast<std::size_t>(inst.nassets);
    std::vector<Portfolio> normals;

    auto add = [&](Portfolio n) {
        double m = 0.0;
        for (double v : n) m = std::max(m, std::abs(v));
        if (m < 1e-12) return;
        for (double& v : n) v /= m;
        push_unique(normals, std::move(n));
    };

    if (inst.v0.has_curves()) {
        Portfolio n(N, 0.0);
        for (std::size_t i = 0; i < N; ++i) n[i] = inst.v0.curves()[i].slope_right();
        add(n);
        for (std::size_t i = 0; i < N; ++i) n[i] = inst.v0.curves()[i].slope_left();
        add(n);
    }
    if (inst.v0.form() == V0Form::Kabanov)
        for (const auto& z : inst.v0.kabanov_vertices()) add(z);
    if (inst.v0.form() == V0Form::Expr)
        for (const auto& t : inst.v0.expr_form().terms) {
            if (t.kind == ScalarExpr::Term::Kind::Lin) add(t.lin.a);
            else if (t.kind != ScalarExpr::Term::Kind::Pwl)
                for (const auto& f : t.forms) add(f.a);
        }

    // Linear payoff rows and expression forms per outcome.
    for (std::size_t w = 0; w < inst.space.size(); ++w) {
        if (inst.v1.has_curves()) {
            Portfolio row(N, 0.0);
            bool affine = true;
            for (std::size_t i = 0; i < N; ++i) {
                const auto& h = inst.v1.curve(i, w);
                if (!h.is_affine()) affine = false;
                row[i] = h.slope_right();
            }
            if (affine) add(row);
        } else if (inst.v1.form() == V1Form::Expr) {
            for (const auto& t : inst.v1.expr_form()[w].terms) {
                if (t.kind == ScalarExpr::Term::Kind::Lin) add(t.lin.a);
                else if (t.kind != ScalarExpr::Term::Kind::Pwl) {
                    for (const auto& f : t.forms) add(f.a);
                    // kink planes between branches
                    for (std::size_t a = 0; a < t.forms.size(); ++a)
                        for (std::size_t b = a + 1; b < t.forms.size(); ++b) {
                            Portfolio dn(N, 0.0);
                            for (std::size_t i = 0; i < N; ++i)
                                dn[i] = t.forms[a].a[i] - t.forms[b].a[i];
                            add(dn);
                        }
                }
            }
        }
    }

    // Pull asymptotic acceptance faces back through an affine payoff.
    if (inst.v1.is_affine() && inst.v1.has_curves()) {
        std::vector<std::vector<double>> faces;
        const auto& a = inst.acceptance;
        if (a.family() == AcceptanceFamily::FixtureUnion) {
            for (const auto& c : a.asymptotic_cells())
                for (const auto& f : c.faces) faces.push_back(f.a);
        } else if (a.family() == AcceptanceFamily::WorstCase ||
                   a.family() == AcceptanceFamily::Dominance) {
            for (std::size_t j = 0; j < inst.space.size(); ++j) {
                std::vector<double> e(inst.space.size(), 0.0);
                e[j] = 1.0;
                faces.push_back(std::move(e));
            }
        }
        for (const auto& f : faces) {
            Portfolio n(N, 0.0);
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t w = 0; w < inst.space.size(); ++w)
                    n[i] += f[w] * inst.v1.curve(i, w).slope_right();
            add(n);
        }
    }
    return normals;
}

}  // namespace

std::vector<Portfolio> candidate_directions(const MarketInstance& inst,
                                            const SearchConfig& cfg) {
    const std::size_t N = static_cast<std::size_t>(inst.nassets);
    std::vector<Portfolio> dirs;

    // Canonical axis and corner directions at sup-norm 1/2, lexicographic scan.
    {
        std::vector<int> pattern(N, -1);
        while (true) {
            Portfolio x(N);
            bool zero = true;
            for (std::size_t i = 0; i < N; ++i) {
                x[i] = 0.5 * pattern[i];
                if (pattern[i] != 0) zero = false;
            }
            if (!zero) push_unique(dirs, x);
            std::size_t k = 0;
            while (k < N && ++pattern[k] > 1) pattern[k++] = -1;
            if (k == N) break;
        }
    }

    // Algebraic candidates: directions inside the intersections of candidate
    // hyperplanes (for N = 2: the planes themselves, signed).
    auto normals = algebraic_normals(inst);
    if (N == 2) {
        for (const auto& n : normals) {
            Portfolio d = {-n[1], n[0]};
            normalize_sup(d, 0.5);
            Portfolio dneg = {n[1], -n[0]};
            normalize_sup(dneg, 0.5);
            push_unique(dirs, d);
            push_unique(dirs, dneg);
        }
    } else if (N == 3) {
        for (std::size_t a = 0; a < normals.size(); ++a)
            for (std::size_t b = a + 1; b < normals.size(); ++b) {
                // direction along the intersection line: cross product
                const auto& u = normals[a];
                const auto& v = normals[b];
                Portfolio d = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                               u[0] * v[1] - u[1] * v[0]};
                double m = std::abs(d[0]) + std::abs(d[1]) + std::abs(d[2]);
                if (m < 1e-12) continue;
                normalize_sup(d, 0.5);
                Portfolio dn = d;
                for (auto& c : dn) c = -c;
                push_unique(dirs, d);
                push_unique(dirs, dn);
            }
    }

    // Dense circle for N = 2; seeded directions otherwise.
    if (N == 1) {
        push_unique(dirs, {0.5});
        push_unique(dirs, {-0.5});
    } else if (N == 2) {
        for (int k = 0; k < 720; ++k) {
            double th = 2.0 * M_PI * k / 720.0;
            Portfolio d = {std::cos(th), std::sin(th)};
            normalize_sup(d, 0.5);
            push_unique(dirs, d);
        }
    } else {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int k = 0; k < cfg.sphere_random; ++k) {
            Portfolio d(N);
            for (auto& c : d) c = gauss(rng);
            normalize_sup(d, 0.5);
            bool zero = true;
            for (double c : d)
                if (std::abs(c) > 1e-12) zero = false;
            if (!zero) dirs.push_back(std::move(d));
        }
    }
    return dirs;
}

bool l_membership(const MarketInstance& inst, const Portfolio& x, double tol) {
    if (static_cast<int>(x.size()) != inst.nassets)
        throw std::invalid_argument("l_membership: dimension mismatch");
    if (!inst.portfolio.asymptotic_contains(x, &inst.v0, tol)) return false;
    if (inst.v0.asymptotic(x) > tol) return false;
    return inst.acceptance.asymptotic_contains(inst.v1.eval(x), tol);
}

namespace {

bool verify_acceptable(const MarketInstance& inst, const Portfolio& x, double tol) {
    if (!inst.portfolio.contains(x, &inst.v0, tol / 10)) return false;
    if (inst.v0.eval(x) > tol / 10) return false;
    Position z = inst.v1.eval(x);
    double norm = 0.0;
    for (double v : z) norm = std::max(norm, std::abs(v));
    return norm > tol && inst.acceptance.contains(z, tol / 10);
}

bool verify_scalable(const MarketInstance& inst, const Portfolio& x, double tol) {
    if (!inst.portfolio.asymptotic_contains(x, &inst.v0, tol / 10)) return false;
    if (inst.v0.asymptotic(x) > tol / 10) return false;
    Position z = inst.v1.eval(x);
    double norm = 0.0;
    for (double v : z) norm = std::max(norm, std::abs(v));
    return norm > tol && inst.acceptance.asymptotic_contains(z, tol / 10);
}

}  // namespace

std::optional<Portfolio> find_acceptable_deal(const MarketInstance& inst,
                                              const SearchConfig& cfg) {
    const int N = inst.nassets;
    const double tol = cfg.deal_tol;

    // Candidate directions at several radii first: catches conic witnesses
    // exactly (zero-cost rays), then the box grid.
    for (const auto& d : candidate_directions(inst, cfg))
        for (double r : {1.0, 2.0, 0.5, 4.0}) {
            Portfolio x(d.size());
            for (std::size_t i = 0; i < d.size(); ++i) x[i] = r * d[i];
            if (verify_acceptable(inst, x, tol)) return x;
        }

    auto lo = cfg.lo_for(N), hi = cfg.hi_for(N);
    double step = cfg.deal_grid;
    std::vector<int> counts(static_cast<std::size_t>(N));
    double total = 1.0;
    for (int i = 0; i < N; ++i) {
        counts[static_cast<std::size_t>(i)] =
            static_cast<int>(std::floor((hi[static_cast<std::size_t>(i)] -
                                         lo[static_cast<std::size_t>(i)]) / step)) + 1;
        total *= counts[static_cast<std::size_t>(i)];
    }
    while (total > 2e5) {  // keep the scan bounded for larger N
        step *= 2.0;
        total = 1.0;
        for (int i = 0; i < N; ++i) {
            counts[static_cast<std::size_t>(i)] =
                static_cast<int>(std::floor((hi[static_cast<std::size_t>(i)] -
                                             lo[static_cast<std::size_t>(i)]) / step)) + 1;
            total *= counts[static_cast<std::size_t>(i)];
        }
    }
    std::vector<int> idx(static_cast<std::size_t>(N), 0);
    while (true) {
        Portfolio x(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i)
            x[static_cast<std::size_t>(i)] =
                lo[static_cast<std::size_t>(i)] + step * idx[static_cast<std::size_t>(i)];
        if (verify_acceptable(inst, x, tol)) return x;
        int k = 0;
        while (k < N && ++idx[static_cast<std::size_t>(k)] >=
                            counts[static_cast<std::size_t>(k)])
            idx[static_cast<std::size_t>(k++)] = 0;
        if (k == N) break;
    }
    return std::nullopt;
}

std::optional<Portfolio> find_scalable_acceptable_deal(const MarketInstance& inst,
                                                       const SearchConfig& cfg) {
    const double tol = cfg.deal_tol;
    const bool homogeneous = inst.v1.is_positively_homogeneous();
    std::vector<double> scales = homogeneous ? std::vector<double>{1.0}
                                             : std::vector<double>{1.0, 2.0, 4.0, 8.0, 0.5,
                                                                   0.25, 16.0, 64.0};
    for (const auto& d : candidate_directions(inst, cfg))
        for (double s : scales) {
            Portfolio x(d.size());
            for (std::size_t i = 0; i < d.size(); ++i) x[i] = s * d[i];
            if (verify_scalable(inst, x, tol)) return x;
        }
    return std::nullopt;
}

LStructureReport l_structure(const MarketInstance& inst, const SearchConfig& cfg) {
    LStructureReport rep;
    const double tol = cfg.deal_tol;
    std::vector<Portfolio> members;
    try {
        for (const auto& d : candidate_directions(inst, cfg)) {
            if (l_membership(inst, d, tol)) {
                members.push_back(d);
                if (members.size() >= 200) break;
            }
        }
        if (members.empty()) {
            rep.status = LStructure::Trivial;
            return rep;
        }
        rep.member = members.front();
        for (const auto& x : members) {
            Portfolio nx(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) nx[i] = -x[i];
            if (!l_membership(inst, nx, tol)) {
                rep.status = LStructure::Nonlinear;
                rep.asym_witness = x;
                return rep;
            }
        }
        rep.status = LStructure::Linear;
    } catch (const std::logic_error&) {
        rep.status = LStructure::Unknown;
    }
    return rep;
}

bool linear_payoff_kernel_trivial(const LiquidationRule& v1) {
    if (!v1.is_affine() || !v1.has_curves()) return false;
    const std::size_t N = static_cast<std::size_t>(v1.dim()), d = v1.space().size();
    std::vector<std::vector<double>> m(d, std::vector<double>(N));
    for (std::size_t w = 0; w < d; ++w)
        for (std::size_t i = 0; i < N; ++i) m[w][i] = v1.curve(i, w).slope_right();
    // column rank via Gaussian elimination
    std::size_t rank = 0;
    for (std::size_t col = 0; col < N && rank < d; ++col) {
        std::size_t piv = rank;
        for (std::size_t r = rank + 1; r < d; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-11) return false;
        std::swap(m[rank], m[piv]);
        for (std::size_t r = 0; r < d; ++r) {
            if (r == rank) continue;
            double f = m[r][col] / m[rank][col];
            for (std::size_t c2 = col; c2 < N; ++c2) m[r][c2] -= f * m[rank][c2];
        }
        ++rank;
    }
    return rank == N;
}

namespace {

// Exact check that the compiled asymptotic cone sits inside the positive
// cone: per cell, minimize each coordinate over cell intersected with the
// unit box.
Tri cone_in_positive(const std::vector<CompiledCell>& cells, std::size_t d) {
    for (const auto& cell : cells) {
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> w(d, 0.0);
            w[j] = 1.0;
            auto subs = build_support_subproblems({cell}, w);
            auto& sp = subs.front();
            for (std::size_t v = 0; v < d; ++v) {
                sp.lp.lo[v] = -1.0;
                sp.lp.hi[v] = 1.0;
            }
            LpSolution sol = solve_lp(sp.lp);
            if (sol.infeasible()) break;  // empty cell contributes nothing
            if (sol.unbounded() || sol.value < -1e-9) return Tri::False;
        }
    }
    return Tri::True;
}

}  // namespace

SufficientConditions sufficient_conditions_report(const MarketInstance& inst,
                                                  const SearchConfig& cfg) {
    SufficientConditions out;
    const std::size_t d = inst.space.size();
    const auto& A = inst.acceptance;

    // Shared sub-search: scalable arbitrage = scalable acceptable deal with
    // the positive cone as acceptance set.
    {
        MarketInstance arb(inst.space, AcceptanceSet::worst_case(inst.space), inst.portfolio,
                           inst.v0, inst.v1, inst.name + "#arbitrage");
        out.no_scalable_arbitrage = !find_scalable_acceptable_deal(arb, cfg).has_value();
    }

    // (i) A^inf subset X_+.
    Tri a_pos = Tri::Unknown;
    switch (A.family()) {
        case AcceptanceFamily::WorstCase:
        case AcceptanceFamily::Dominance:
            a_pos = Tri::True;
            break;
        case AcceptanceFamily::ExpectedShortfall: {
            double pmin = *std::min_element(inst.space.probs.begin(), inst.space.probs.end());
            a_pos = (A.alpha() <= pmin + 1e-15) ? Tri::True : Tri::False;
            break;
        }
        case AcceptanceFamily::ValueAtRisk: {
            double pmin = *std::min_element(inst.space.probs.begin(), inst.space.probs.end());
            a_pos = (A.alpha() < pmin - 1e-15) ? Tri::True : Tri::False;
            break;
        }
        case AcceptanceFamily::Expectile:
            a_pos = (d == 1) ? Tri::True : Tri::False;
            break;
        case AcceptanceFamily::Utility: {
            const auto& u = A.utility_fn();
            if (u.is_concave()) {
                if (u.slope_right() <= 1e-12 && u.slope_left() > 1e-12) a_pos = Tri::True;
                else a_pos = (d == 1 && u.slope_left() > u.slope_right() + 1e-12)
                                 ? Tri::True : Tri::False;
            }
            break;
        }
        case AcceptanceFamily::FixtureUnion: {
            std::vector<CompiledCell> cells;
            for (const auto& uc : A.asymptotic_cells()) {
                CompiledCell c;
                for (const auto& f : uc.faces) c.add(f.a, {}, f.b, false);
                cells.push_back(std::move(c));
            }
            a_pos = cone_in_positive(cells, d);
            break;
        }
        default:
            break;
    }
    if (a_pos == Tri::True)
        out.acceptance_cone_positive = out.no_scalable_arbitrage ? Tri::True : Tri::False;
    else
        out.acceptance_cone_positive = a_pos;

    // (ii) P^inf subset R^N_+ and V1 maps the positive orthant into X_+.
    Tri p_pos = Tri::Unknown;
    switch (inst.portfolio.family()) {
        case PortfolioFamily::Full:
            p_pos = inst.nassets == 0 ? Tri::True : Tri::False;
            break;
        case PortfolioFamily::NonNeg:
            p_pos = Tri::True;
            break;
        case PortfolioFamily::Box: {
            p_pos = Tri::True;
            for (int i = 0; i < inst.nassets; ++i)
                if (!std::isfinite(inst.portfolio.box_lo()[static_cast<std::size_t>(i)]))
                    p_pos = Tri::False;
            break;
        }
        case PortfolioFamily::Polyhedral: {
            p_pos = Tri::True;
            for (int j = 0; j < inst.nassets && p_pos == Tri::True; ++j) {
                LinearProgram lp(inst.nassets);
                lp.c[static_cast<std::size_t>(j)] = 1.0;
                for (int i = 0; i < inst.nassets; ++i) {
                    lp.lo[static_cast<std::size_t>(i)] = -1.0;
                    lp.hi[static_cast<std::size_t>(i)] = 1.0;
                }
                for (const auto& r : inst.portfolio.rows()) lp.add_row_geq(r.a, 0.0);
                LpSolution sol = solve_lp(lp);
                if (!sol.optimal() || sol.value < -1e-9) p_pos = Tri::False;
            }
            break;
        }
        default:
            break;
    }
    bool v1_positive = false;
    switch (inst.v1.form()) {
        case V1Form::Separable:
        case V1Form::Kabanov:
            v1_positive = true;  // payoffs and dual vertices are >= 0 by construction
            break;
        case V1Form::Linear: {
            v1_positive = true;
            for (int i = 0; i < inst.nassets; ++i)
                for (std::size_t w = 0; w < d; ++w)
                    if (inst.v1.curve(static_cast<std::size_t>(i), w).slope_right() < -1e-12)
                        v1_positive = false;
            break;
        }
        case V1Form::Expr: {
            // seeded sample of the positive orthant
            v1_positive = true;
            std::mt19937_64 rng(cfg.seed);
            std::uniform_real_distribution<double> unif(0.0, 4.0);
            for (int t = 0; t < 500 && v1_positive; ++t) {
                Portfolio x(static_cast<std::size_t>(inst.nassets));
                for (auto& v : x) v = unif(rng);
                for (double v : inst.v1.eval(x))
                    if (v < -1e-9) v1_positive = false;
            }
            break;
        }
    }
    if (p_pos == Tri::True && v1_positive)
        out.portfolio_cone_positive = out.no_scalable_arbitrage ? Tri::True : Tri::False;
    else if (p_pos == Tri::Unknown)
        out.portfolio_cone_positive = Tri::Unknown;
    else
        out.portfolio_cone_positive = Tri::False;

    // (iii) P bounded.
    switch (inst.portfolio.family()) {
        case PortfolioFamily::Box:
            out.portfolio_bounded = inst.portfolio.is_bounded() ? Tri::True : Tri::False;
            break;
        case PortfolioFamily::Full:
        case PortfolioFamily::NonNeg:
            out.portfolio_bounded = Tri::False;
            break;
        case PortfolioFamily::Polyhedral: {
            out.portfolio_bounded = Tri::True;
            for (int j = 0; j < inst.nassets && out.portfolio_bounded == Tri::True; ++j)
                for (double sign : {1.0, -1.0}) {
                    LinearProgram lp(inst.nassets);
                    lp.c[static_cast<std::size_t>(j)] = sign;
                    for (const auto& r : inst.portfolio.rows()) lp.add_row_geq(r.a, r.b);
                    LpSolution sol = solve_lp(lp);
                    if (!sol.optimal()) out.portfolio_bounded = Tri::False;
                }
            break;
        }
        default:
            out.portfolio_bounded = Tri::Unknown;
    }
    return out;
}

DealReport deal_report(const MarketInstance& inst, const SearchConfig& cfg) {
    DealReport rep;
    rep.acceptable = find_acceptable_deal(inst, cfg);
    rep.scalable = find_scalable_acceptable_deal(inst, cfg);
    rep.l = l_structure(inst, cfg);
    rep.sufficient = sufficient_conditions_report(inst, cfg);
    return rep;
}

}  // namespace frictional

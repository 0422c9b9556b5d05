#include "frictional/market.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace frictional {

// ---------------------------------------------------------------------------
// ScalarExpr

double ScalarExpr::eval(const Portfolio& x) const {
    double v = 0.0;
    for (const auto& t : terms) {
        double tv = 0.0;
        switch (t.kind) {
            case Term::Kind::Lin:
                tv = t.lin.eval(x);
                break;
            case Term::Kind::MinLin: {
                tv = t.forms.front().eval(x);
                for (const auto& f : t.forms) tv = std::min(tv, f.eval(x));
                break;
            }
            case Term::Kind::MaxLin: {
                tv = t.forms.front().eval(x);
                for (const auto& f : t.forms) tv = std::max(tv, f.eval(x));
                break;
            }
            case Term::Kind::Pwl:
                tv = t.curve(x[static_cast<std::size_t>(t.asset)]);
                break;
        }
        v += t.coef * tv;
    }
    return v;
}

double ScalarExpr::asymptotic(const Portfolio& x) const {
    double v = 0.0;
    for (const auto& t : terms) {
        double tv = 0.0;
        switch (t.kind) {
            case Term::Kind::Lin:
                tv = t.lin.eval(x) - t.lin.b;
                break;
            case Term::Kind::MinLin: {
                tv = t.forms.front().eval(x) - t.forms.front().b;
                for (const auto& f : t.forms) tv = std::min(tv, f.eval(x) - f.b);
                break;
            }
            case Term::Kind::MaxLin: {
                tv = t.forms.front().eval(x) - t.forms.front().b;
                for (const auto& f : t.forms) tv = std::max(tv, f.eval(x) - f.b);
                break;
            }
            case Term::Kind::Pwl:
                tv = t.curve.asymptotic(x[static_cast<std::size_t>(t.asset)]);
                break;
        }
        v += t.coef * tv;
    }
    return v;
}

bool ScalarExpr::is_affine() const {
    for (const auto& t : terms) {
        if (t.kind == Term::Kind::Lin) continue;
        if (t.kind == Term::Kind::Pwl && t.curve.is_affine()) continue;
        if ((t.kind == Term::Kind::MinLin || t.kind == Term::Kind::MaxLin) &&
            t.forms.size() == 1)
            continue;
        return false;
    }
    return true;
}

bool ScalarExpr::is_concave() const {
    for (const auto& t : terms) {
        switch (t.kind) {
            case Term::Kind::Lin: break;
            case Term::Kind::MinLin:
                if (t.coef < 0.0) return false;
                break;
            case Term::Kind::MaxLin:
                if (t.coef > 0.0) return false;
                break;
            case Term::Kind::Pwl:
                if (t.coef >= 0.0 ? !t.curve.is_concave() : !t.curve.is_convex()) return false;
                break;
        }
    }
    return true;
}

bool ScalarExpr::is_convex() const {
    for (const auto& t : terms) {
        switch (t.kind) {
            case Term::Kind::Lin: break;
            case Term::Kind::MinLin:
                if (t.coef > 0.0) return false;
                break;
            case Term::Kind::MaxLin:
                if (t.coef < 0.0) return false;
                break;
            case Term::Kind::Pwl:
                if (t.coef >= 0.0 ? !t.curve.is_convex() : !t.curve.is_concave()) return false;
                break;
        }
    }
    return true;
}

bool ScalarExpr::positively_homogeneous() const {
    for (const auto& t : terms) {
        switch (t.kind) {
            case Term::Kind::Lin:
                if (t.lin.b != 0.0) return false;
                break;
            case Term::Kind::MinLin:
            case Term::Kind::MaxLin:
                for (const auto& f : t.forms)
                    if (f.b != 0.0) return false;
                break;
            case Term::Kind::Pwl: {
                // positively homogeneous iff the curve is linear on each side of 0
                bool two_sided = std::abs(t.curve(0.0)) < 1e-15;
                const auto segs = t.curve.segments();
                double sneg = 0, spos = 0;
                bool first_neg = true, first_pos = true, ok = two_sided;
                for (const auto& sg : segs) {
                    if (sg.hi <= 0) {
                        if (first_neg) { sneg = sg.slope; first_neg = false; }
                        else if (sg.slope != sneg) ok = false;
                    } else if (sg.lo >= 0) {
                        if (first_pos) { spos = sg.slope; first_pos = false; }
                        else if (sg.slope != spos) ok = false;
                    } else {
                        // segment straddles 0: must be linear through 0
                        if (std::abs(sg.intercept) > 1e-15) ok = false;
                    }
                }
                if (!ok) return false;
                break;
            }
        }
    }
    return true;
}

double ScalarExpr::lipschitz_bound() const {
    double l = 0.0;
    for (const auto& t : terms) {
        double tl = 0.0;
        switch (t.kind) {
            case Term::Kind::Lin:
                for (double a : t.lin.a) tl += std::abs(a);
                break;
            case Term::Kind::MinLin:
            case Term::Kind::MaxLin:
                for (const auto& f : t.forms) {
                    double s = 0.0;
                    for (double a : f.a) s += std::abs(a);
                    tl = std::max(tl, s);
                }
                break;
            case Term::Kind::Pwl:
                tl = t.curve.lipschitz_bound();
                break;
        }
        l += std::abs(t.coef) * tl;
    }
    return l;
}

std::vector<std::vector<double>> ScalarExpr::asset_breakpoints(int nassets) const {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(nassets));
    for (const auto& t : terms)
        if (t.kind == Term::Kind::Pwl)
            for (double b : t.curve.breakpoints())
                out[static_cast<std::size_t>(t.asset)].push_back(b);
    return out;
}

// ---------------------------------------------------------------------------
// Kabanov machinery

void validate_bid_ask(const BidAskMatrix& m) {
    const int n = m.size();
    if (n == 0) throw std::invalid_argument("bid-ask matrix: empty");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(m.pi[i].size()) != n)
            throw std::invalid_argument("bid-ask matrix: not square");
        if (std::abs(m.pi[i][i] - 1.0) > 1e-12)
            throw std::invalid_argument("bid-ask matrix: diagonal must be 1");
        for (int j = 0; j < n; ++j)
            if (!(m.pi[i][j] > 0.0))
                throw std::invalid_argument("bid-ask matrix: entries must be positive");
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (m.pi[i][j] > m.pi[i][k] * m.pi[k][j] + 1e-12)
                    throw std::invalid_argument("bid-ask matrix: triangle inequality violated");
}

namespace {

// Solve an n x n linear system; returns false when singular.
bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>& out) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        if (std::abs(a[p][k]) < 1e-12) return false;
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            double f = a[i][k] / a[k][k];
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) out[k] = b[k] / a[k][k];
    return true;
}

}  // namespace

std::vector<std::vector<double>> kabanov_build(const BidAskMatrix& m) {
    validate_bid_ask(m);
    const int n = m.size();
    if (n > 4)
        throw std::invalid_argument("kabanov_build: vertex enumeration supported for N <= 4");

    // Constraint pool over z in R^n: rows r.z >= 0.
    std::vector<std::vector<double>> pool;
    for (int j = 0; j < n; ++j) {
        std::vector<double> r(n, 0.0);
        r[j] = 1.0;
        pool.push_back(r);  // z_j >= 0
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            std::vector<double> r(n, 0.0);
            r[i] = m.pi[i][j];
            r[j] -= 1.0;
            pool.push_back(r);  // pi_ij z_i - z_j >= 0
        }

    std::vector<std::vector<double>> verts;
    auto feasible = [&](const std::vector<double>& z) {
        for (const auto& r : pool) {
            double v = 0.0;
            for (int j = 0; j < n; ++j) v += r[j] * z[j];
            if (v < -1e-9) return false;
        }
        return true;
    };
    auto push_unique = [&](const std::vector<double>& z) {
        for (const auto& w : verts) {
            double d = 0.0;
            for (int j = 0; j < n; ++j) d = std::max(d, std::abs(w[j] - z[j]));
            if (d < 1e-7) return;
        }
        verts.push_back(z);
    };

    // z_1 = 1 plus (n-1) active pool rows.
    std::vector<int> pick(static_cast<std::size_t>(std::max(0, n - 1)));
    const int pool_n = static_cast<int>(pool.size());
    std::vector<int> idx(static_cast<std::size_t>(std::max(0, n - 1)), 0);
    if (n == 1) {
        verts.push_back({1.0});
        return verts;
    }
    // Enumerate combinations of pool rows.
    std::vector<int> comb(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n - 1; ++i) comb[i] = i;
    auto next_comb = [&]() {
        int k = n - 1;
        for (int i = k - 1; i >= 0; --i) {
            if (comb[i] < pool_n - (k - i)) {
                ++comb[i];
                for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
                return true;
            }
        }
        return false;
    };
    do {
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        {
            std::vector<double> e1(n, 0.0);
            e1[0] = 1.0;
            a.push_back(e1);
            b.push_back(1.0);
        }
        for (int i = 0; i < n - 1; ++i) {
            a.push_back(pool[static_cast<std::size_t>(comb[i])]);
            b.push_back(0.0);
        }
        std::vector<double> z;
        if (solve_dense(a, b, z) && feasible(z)) push_unique(z);
    } while (next_comb());

    if (verts.empty())
        throw std::invalid_argument("kabanov_build: inconsistent bid-ask matrix (empty dual polytope)");
    std::sort(verts.begin(), verts.end());
    return verts;
}

// ---------------------------------------------------------------------------
// PortfolioSet

PortfolioSet PortfolioSet::full(int n) { return PortfolioSet(PortfolioFamily::Full, n); }

PortfolioSet PortfolioSet::nonneg(int n) { return PortfolioSet(PortfolioFamily::NonNeg, n); }

PortfolioSet PortfolioSet::box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size())
        throw std::invalid_argument("box: bound size mismatch");
    PortfolioSet p(PortfolioFamily::Box, static_cast<int>(lo.size()));
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= 0.0 && hi[i] >= 0.0))
            throw std::invalid_argument("box: must contain the zero portfolio");
        if (!(lo[i] < hi[i]))
            throw std::invalid_argument("box: lower bound must be below upper bound");
    }
    p.lo_ = std::move(lo);
    p.hi_ = std::move(hi);
    return p;
}

PortfolioSet PortfolioSet::polyhedral(int n, std::vector<LinForm> rows) {
    PortfolioSet p(PortfolioFamily::Polyhedral, n);
    for (const auto& r : rows) {
        if (static_cast<int>(r.a.size()) != n)
            throw std::invalid_argument("polyhedral: row dimension mismatch");
        if (r.b > 1e-12)
            throw std::invalid_argument("polyhedral: rows a.x >= b must admit x = 0");
    }
    p.rows_ = std::move(rows);
    return p;
}

PortfolioSet PortfolioSet::margin(std::vector<double> gammas) {
    PortfolioSet p(PortfolioFamily::Margin, static_cast<int>(gammas.size()));
    for (double g : gammas)
        if (!(g > 0.0)) throw std::invalid_argument("margin: gammas must be positive");
    p.gammas_ = std::move(gammas);
    return p;
}

PortfolioSet PortfolioSet::collateral(int n, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("collateral: gamma must be positive");
    PortfolioSet p(PortfolioFamily::Collateral, n);
    p.gamma_ = gamma;
    return p;
}

bool PortfolioSet::contains(const Portfolio& x, const AcquisitionRule* v0, double tol) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("portfolio set: dimension mismatch");
    switch (family_) {
        case PortfolioFamily::Full:
            return true;
        case PortfolioFamily::NonNeg:
            for (double v : x)
                if (v < -tol) return false;
            return true;
        case PortfolioFamily::Box:
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
            return true;
        case PortfolioFamily::Polyhedral:
            for (const auto& r : rows_) {
                double ax = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) ax += r.a[i] * x[i];
                if (ax < r.b - tol) return false;
            }
            return true;
        case PortfolioFamily::Margin: {
            if (!v0) throw std::invalid_argument("margin set requires the acquisition rule");
            for (std::size_t i = 0; i < x.size(); ++i) {
                Portfolio unit(x.size(), 0.0);
                unit[i] = x[i];
                if (v0->eval(unit) + gammas_[i] * v0->eval(x) < -tol) return false;
            }
            return true;
        }
        case PortfolioFamily::Collateral: {
            if (!v0) throw std::invalid_argument("collateral set requires the acquisition rule");
            Portfolio pos(x.size()), neg(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                pos[i] = std::max(x[i], 0.0);
                neg[i] = std::min(x[i], 0.0);
            }
            return gamma_ * v0->eval(pos) + v0->eval(neg) >= -tol;
        }
    }
    return false;
}

bool PortfolioSet::asymptotic_contains(const Portfolio& x, const AcquisitionRule* v0,
                                       double tol) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("portfolio set: dimension mismatch");
    switch (family_) {
        case PortfolioFamily::Full:
            return true;
        case PortfolioFamily::NonNeg:
            return contains(x, v0, tol);
        case PortfolioFamily::Box:
            for (std::size_t i = 0; i < x.size(); ++i) {
                bool lo_fin = std::isfinite(lo_[i]), hi_fin = std::isfinite(hi_[i]);
                if (lo_fin && hi_fin) {
                    if (std::abs(x[i]) > tol) return false;
                } else if (lo_fin) {
                    if (x[i] < -tol) return false;
                } else if (hi_fin) {
                    if (x[i] > tol) return false;
                }
            }
            return true;
        case PortfolioFamily::Polyhedral:
            for (const auto& r : rows_) {  // recession row: a.x >= 0
                double ax = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) ax += r.a[i] * x[i];
                if (ax < -tol) return false;
            }
            return true;
        case PortfolioFamily::Margin:
        case PortfolioFamily::Collateral: {
            if (!v0) throw std::invalid_argument("margin/collateral set requires the acquisition rule");
            if (v0->is_positively_homogeneous()) return contains(x, v0, tol);
            // Scaling semidecision: lambda * x stays admissible through 2^40.
            Portfolio probe(x.size());
            double lambda = 1.0;
            for (int k = 0; k <= 40; ++k) {
                for (std::size_t i = 0; i < x.size(); ++i) probe[i] = lambda * x[i];
                if (!contains(probe, v0, tol * std::max(1.0, lambda))) return false;
                lambda *= 2.0;
            }
            return true;
        }
    }
    return false;
}

bool PortfolioSet::is_convex(const AcquisitionRule* v0) const {
    switch (family_) {
        case PortfolioFamily::Full:
        case PortfolioFamily::NonNeg:
        case PortfolioFamily::Box:
        case PortfolioFamily::Polyhedral:
            return true;
        case PortfolioFamily::Margin:
        case PortfolioFamily::Collateral:
            // Convex when the defining V0-inequalities have concave left sides,
            // which fails for general convex V0; report conservatively.
            return v0 != nullptr && v0->is_affine();
    }
    return false;
}

bool PortfolioSet::is_bounded() const {
    if (family_ != PortfolioFamily::Box) return false;
    for (std::size_t i = 0; i < lo_.size(); ++i)
        if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// AcquisitionRule

AcquisitionRule AcquisitionRule::linear(std::vector<double> prices) {
    AcquisitionRule r(V0Form::Linear, static_cast<int>(prices.size()));
    for (double p : prices) r.curves_.push_back(PiecewiseLinear::affine(p, 0.0));
    r.prices_ = std::move(prices);
    return r;
}

namespace {

void check_side_curve(const PiecewiseLinear& c, const char* what) {
    if (!c.is_nondecreasing())
        throw std::invalid_argument(std::string(what) + ": curve must be nondecreasing");
    if (std::abs(c(0.0)) > 1e-12)
        throw std::invalid_argument(std::string(what) + ": curve must vanish at 0");
}

// Exact check ask >= bid on R+ for piecewise-linear curves: compare values on
// the union of breakpoints and the terminal slopes.
void check_spread(const PiecewiseLinear& ask, const PiecewiseLinear& bid, const char* what) {
    std::vector<double> pts = {0.0, 1.0};
    for (double b : ask.breakpoints()) pts.push_back(std::max(0.0, b));
    for (double b : bid.breakpoints()) pts.push_back(std::max(0.0, b));
    double far = 1.0;
    for (double p : pts) far = std::max(far, p);
    pts.push_back(2.0 * far + 1.0);
    for (double p : pts)
        if (ask(p) < bid(p) - 1e-12)
            throw std::invalid_argument(std::string(what) + ": negative bid-ask spread");
    if (ask.slope_right() < bid.slope_right() - 1e-12)
        throw std::invalid_argument(std::string(what) + ": negative terminal bid-ask spread");
}

// Combined curve c(t) = ask(t) on t >= 0, -bid(-t) on t < 0.
PiecewiseLinear combine_sides(const PiecewiseLinear& ask, const PiecewiseLinear& bid) {
    std::vector<double> xs = {0.0};
    for (double b : ask.breakpoints())
        if (b > 1e-14) xs.push_back(b);
    for (double b : bid.breakpoints())
        if (b > 1e-14) xs.push_back(-b);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<double> ys;
    for (double x : xs) ys.push_back(x >= 0.0 ? ask(x) : -bid(-x));
    double far = 1.0 + std::max(std::abs(xs.front()), std::abs(xs.back()));
    double slope_right = (ask(far + 1.0) - ask(far));
    double slope_left = (bid(far + 1.0) - bid(far));
    return PiecewiseLinear(std::move(xs), std::move(ys), slope_left, slope_right);
}

}  // namespace

AcquisitionRule AcquisitionRule::separable(std::vector<PiecewiseLinear> ask,
                                           std::vector<PiecewiseLinear> bid) {
    if (ask.size() != bid.size())
        throw std::invalid_argument("separable acquisition: ask/bid size mismatch");
    AcquisitionRule r(V0Form::Separable, static_cast<int>(ask.size()));
    for (std::size_t i = 0; i < ask.size(); ++i) {
        check_side_curve(ask[i], "acquisition ask");
        check_side_curve(bid[i], "acquisition bid");
        check_spread(ask[i], bid[i], "acquisition");
        r.curves_.push_back(combine_sides(ask[i], bid[i]));
    }
    r.ask_ = std::move(ask);
    r.bid_ = std::move(bid);
    return r;
}

AcquisitionRule AcquisitionRule::kabanov(const BidAskMatrix& pi0) {
    AcquisitionRule r(V0Form::Kabanov, pi0.size());
    r.vertices_ = kabanov_build(pi0);
    r.pi_ = pi0;
    return r;
}

AcquisitionRule AcquisitionRule::expr(int n, ScalarExpr e) {
    AcquisitionRule r(V0Form::Expr, n);
    Portfolio zero(static_cast<std::size_t>(n), 0.0);
    if (std::abs(e.eval(zero)) > 1e-12)
        throw std::invalid_argument("acquisition expr: V0(0) must be 0");
    r.expr_ = std::move(e);
    return r;
}

double AcquisitionRule::eval(const Portfolio& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("acquisition rule: dimension mismatch");
    switch (form_) {
        case V0Form::Linear:
        case V0Form::Separable: {
            double v = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) v += curves_[i](x[i]);
            return v;
        }
        case V0Form::Kabanov: {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& z : vertices_) {
                double v = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) v += x[i] * z[i];
                best = std::max(best, v);
            }
            return best;  // V0(x) = -sigma_{Z0}(-x) = sup_z x.z
        }
        case V0Form::Expr:
            return expr_.eval(x);
    }
    return 0.0;
}

double AcquisitionRule::asymptotic(const Portfolio& x) const {
    switch (form_) {
        case V0Form::Linear:
        case V0Form::Separable: {
            double v = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) v += curves_[i].asymptotic(x[i]);
            return v;
        }
        case V0Form::Kabanov:
            return eval(x);  // positively homogeneous
        case V0Form::Expr:
            return expr_.asymptotic(x);
    }
    return 0.0;
}

bool AcquisitionRule::is_convex() const {
    switch (form_) {
        case V0Form::Linear:
            return true;
        case V0Form::Separable:
            for (const auto& c : curves_)
                if (!c.is_convex()) return false;
            return true;
        case V0Form::Kabanov:
            return true;
        case V0Form::Expr:
            return expr_.is_convex();
    }
    return false;
}

bool AcquisitionRule::is_positively_homogeneous() const {
    switch (form_) {
        case V0Form::Linear:
        case V0Form::Kabanov:
            return true;
        case V0Form::Separable: {
            // homogeneous iff a single slope on each side of zero
            for (const auto& c : curves_) {
                const auto segs = c.segments();
                double sn = segs.front().slope, sp = segs.back().slope;
                for (const auto& sg : segs) {
                    if (sg.hi <= 0.0 && std::abs(sg.slope - sn) > 1e-12) return false;
                    if (sg.lo >= 0.0 && std::abs(sg.slope - sp) > 1e-12) return false;
                }
            }
            return true;
        }
        case V0Form::Expr:
            return expr_.positively_homogeneous();
    }
    return false;
}

bool AcquisitionRule::is_affine() const {
    switch (form_) {
        case V0Form::Linear:
            return true;
        case V0Form::Separable:
            for (const auto& c : curves_)
                if (!c.is_affine()) return false;
            return true;
        case V0Form::Kabanov:
            return vertices_.size() == 1;
        case V0Form::Expr:
            return expr_.is_affine();
    }
    return false;
}

double AcquisitionRule::lipschitz_bound() const {
    switch (form_) {
        case V0Form::Linear:
        case V0Form::Separable: {
            double l = 0.0;
            for (const auto& c : curves_) l += c.lipschitz_bound();
            return l;
        }
        case V0Form::Kabanov: {
            double l = 0.0;
            for (const auto& z : vertices_) {
                double s = 0.0;
                for (double v : z) s += std::abs(v);
                l = std::max(l, s);
            }
            return l;
        }
        case V0Form::Expr:
            return expr_.lipschitz_bound();
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// LiquidationRule

LiquidationRule LiquidationRule::linear(ScenarioSpace space, std::vector<Position> payoffs) {
    const std::size_t d = space.size();
    for (const auto& p : payoffs) {
        if (p.size() != d)
            throw std::invalid_argument("linear liquidation: payoff dimension mismatch");
    }
    LiquidationRule r(V1Form::Linear, std::move(space), static_cast<int>(payoffs.size()));
    for (std::size_t i = 0; i < payoffs.size(); ++i)
        for (std::size_t w = 0; w < d; ++w)
            r.curves_.push_back(PiecewiseLinear::affine(payoffs[i][w], 0.0));
    r.payoffs_ = std::move(payoffs);
    return r;
}

LiquidationRule LiquidationRule::separable(ScenarioSpace space,
                                           std::vector<PiecewiseLinear> phi_ask,
                                           std::vector<PiecewiseLinear> phi_bid,
                                           std::vector<Position> s_ask,
                                           std::vector<Position> s_bid) {
    const std::size_t n = phi_ask.size(), d = space.size();
    if (phi_bid.size() != n || s_ask.size() != n || s_bid.size() != n)
        throw std::invalid_argument("separable liquidation: size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        check_side_curve(phi_ask[i], "liquidation ask");
        check_side_curve(phi_bid[i], "liquidation bid");
        check_spread(phi_ask[i], phi_bid[i], "liquidation");
        space.check_dim(s_ask[i], "liquidation payoff");
        space.check_dim(s_bid[i], "liquidation payoff");
        for (std::size_t w = 0; w < d; ++w)
            if (s_ask[i][w] < 0.0 || s_bid[i][w] < 0.0)
                throw std::invalid_argument("separable liquidation: payoffs must be >= 0");
    }
    LiquidationRule r(V1Form::Separable, std::move(space), static_cast<int>(n));
    // Combined curve per (asset, outcome):
    //   h(t) = phi_bid(t) * S_bid(w)  for t >= 0,  -phi_ask(-t) * S_ask(w)  for t < 0.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t w = 0; w < d; ++w) {
            std::vector<double> xs = {0.0};
            for (double b : phi_bid[i].breakpoints())
                if (b > 1e-14) xs.push_back(b);
            for (double b : phi_ask[i].breakpoints())
                if (b > 1e-14) xs.push_back(-b);
            std::sort(xs.begin(), xs.end());
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            std::vector<double> ys;
            for (double x : xs)
                ys.push_back(x >= 0.0 ? phi_bid[i](x) * s_bid[i][w]
                                      : -phi_ask[i](-x) * s_ask[i][w]);
            double far = 1.0 + std::max(std::abs(xs.front()), std::abs(xs.back()));
            double sr = (phi_bid[i](far + 1.0) - phi_bid[i](far)) * s_bid[i][w];
            double sl = (phi_ask[i](far + 1.0) - phi_ask[i](far)) * s_ask[i][w];
            r.curves_.emplace_back(std::move(xs), std::move(ys), sl, sr);
        }
    }
    r.phi_ask_ = std::move(phi_ask);
    r.phi_bid_ = std::move(phi_bid);
    r.s_ask_ = std::move(s_ask);
    r.s_bid_ = std::move(s_bid);
    return r;
}

LiquidationRule LiquidationRule::kabanov(ScenarioSpace space, std::vector<BidAskMatrix> pi1) {
    if (pi1.size() != space.size())
        throw std::invalid_argument("kabanov liquidation: one bid-ask matrix per outcome required");
    const int n = pi1.front().size();
    LiquidationRule r(V1Form::Kabanov, std::move(space), n);
    for (const auto& m : pi1) {
        if (m.size() != n)
            throw std::invalid_argument("kabanov liquidation: inconsistent asset counts");
        r.vertices_.push_back(kabanov_build(m));
    }
    r.pi_ = std::move(pi1);
    return r;
}

LiquidationRule LiquidationRule::expr(ScenarioSpace space, int n,
                                      std::vector<ScalarExpr> per_outcome) {
    if (per_outcome.size() != space.size())
        throw std::invalid_argument("expr liquidation: one expression per outcome required");
    LiquidationRule r(V1Form::Expr, std::move(space), n);
    Portfolio zero(static_cast<std::size_t>(n), 0.0);
    for (const auto& e : per_outcome)
        if (std::abs(e.eval(zero)) > 1e-12)
            throw std::invalid_argument("expr liquidation: V1(0) must be 0");
    r.exprs_ = std::move(per_outcome);
    return r;
}

double LiquidationRule::eval_outcome(const Portfolio& x, std::size_t w) const {
    switch (form_) {
        case V1Form::Linear:
        case V1Form::Separable: {
            double v = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) v += curve(i, w)(x[i]);
            return v;
        }
        case V1Form::Kabanov: {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& z : vertices_[w]) {
                double v = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) v += x[i] * z[i];
                best = std::min(best, v);
            }
            return best;  // V1(x)(w) = sigma_{Z1(w)}(x) = inf_z x.z
        }
        case V1Form::Expr:
            return exprs_[w].eval(x);
    }
    return 0.0;
}

Position LiquidationRule::eval(const Portfolio& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("liquidation rule: dimension mismatch");
    Position out(space_.size());
    for (std::size_t w = 0; w < out.size(); ++w) out[w] = eval_outcome(x, w);
    return out;
}

bool LiquidationRule::is_concave() const {
    switch (form_) {
        case V1Form::Linear:
        case V1Form::Kabanov:
            return true;
        case V1Form::Separable:
            for (const auto& c : curves_)
                if (!c.is_concave()) return false;
            return true;
        case V1Form::Expr:
            for (const auto& e : exprs_)
                if (!e.is_concave()) return false;
            return true;
    }
    return false;
}

bool LiquidationRule::is_affine() const {
    switch (form_) {
        case V1Form::Linear:
            return true;
        case V1Form::Separable:
            for (const auto& c : curves_)
                if (!c.is_affine()) return false;
            return true;
        case V1Form::Kabanov:
            for (const auto& vs : vertices_)
                if (vs.size() != 1) return false;
            return true;
        case V1Form::Expr:
            for (const auto& e : exprs_)
                if (!e.is_affine()) return false;
            return true;
    }
    return false;
}

bool LiquidationRule::is_positively_homogeneous() const {
    switch (form_) {
        case V1Form::Linear:
        case V1Form::Kabanov:
            return true;
        case V1Form::Separable: {
            for (const auto& c : curves_) {
                const auto segs = c.segments();
                double sn = segs.front().slope, sp = segs.back().slope;
                for (const auto& sg : segs)
                    if ((sg.hi <= 0.0 && std::abs(sg.slope - sn) > 1e-12) ||
                        (sg.lo >= 0.0 && std::abs(sg.slope - sp) > 1e-12))
                        return false;
            }
            return true;
        }
        case V1Form::Expr:
            for (const auto& e : exprs_)
                if (!e.positively_homogeneous()) return false;
            return true;
    }
    return false;
}

double LiquidationRule::lipschitz_bound() const {
    switch (form_) {
        case V1Form::Linear:
        case V1Form::Separable: {
            double l = 0.0;
            for (std::size_t w = 0; w < space_.size(); ++w) {
                double row = 0.0;
                for (std::size_t i = 0; i < static_cast<std::size_t>(dim_); ++i)
                    row += curve(i, w).lipschitz_bound();
                l = std::max(l, row);
            }
            return l;
        }
        case V1Form::Kabanov: {
            double l = 0.0;
            for (const auto& vs : vertices_)
                for (const auto& z : vs) {
                    double s = 0.0;
                    for (double v : z) s += std::abs(v);
                    l = std::max(l, s);
                }
            return l;
        }
        case V1Form::Expr: {
            double l = 0.0;
            for (const auto& e : exprs_) l = std::max(l, e.lipschitz_bound());
            return l;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// MarketInstance

MarketInstance::MarketInstance(ScenarioSpace space_, AcceptanceSet acceptance_,
                               PortfolioSet portfolio_, AcquisitionRule v0_,
                               LiquidationRule v1_, std::string name_)
    : space(std::move(space_)), acceptance(std::move(acceptance_)),
      portfolio(std::move(portfolio_)), v0(std::move(v0_)), v1(std::move(v1_)),
      name(std::move(name_)) {
    nassets = v0.dim();
    if (v1.dim() != nassets || portfolio.dim() != nassets)
        throw std::invalid_argument("market instance: asset count mismatch");
    if (acceptance.space().size() != space.size() || v1.space().size() != space.size())
        throw std::invalid_argument("market instance: outcome count mismatch");

    Portfolio zero(static_cast<std::size_t>(nassets), 0.0);
    if (!portfolio.contains(zero, &v0, 1e-9))
        throw std::invalid_argument("market instance: 0 must be an admissible portfolio");
    if (std::abs(v0.eval(zero)) > 1e-12)
        throw std::invalid_argument("market instance: V0(0) must be 0");
    for (double v : v1.eval(zero))
        if (std::abs(v) > 1e-12)
            throw std::invalid_argument("market instance: V1(0) must be 0");

    // Seeded spot check of the bid-ask spread signs (exhaustive suites live in
    // the test battery).
    std::mt19937_64 rng(0x5EEDull);
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    for (int t = 0; t < 200; ++t) {
        Portfolio x(static_cast<std::size_t>(nassets));
        for (auto& v : x) v = unif(rng);
        Portfolio nx(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) nx[i] = -x[i];
        if (v0.eval(x) < -v0.eval(nx) - 1e-9)
            throw std::invalid_argument("market instance: V0 violates the bid-ask spread sign");
        Position up = v1.eval(x), dn = v1.eval(nx);
        for (std::size_t w = 0; w < up.size(); ++w)
            if (up[w] > -dn[w] + 1e-9)
                throw std::invalid_argument("market instance: V1 violates the bid-ask spread sign");
    }
}

bool MarketInstance::market_convex() const {
    return portfolio.is_convex(&v0) && v0.is_convex() && v1.is_concave();
}

bool MarketInstance::market_conic() const {
    bool pset_cone = false;
    switch (portfolio.family()) {
        case PortfolioFamily::Full:
        case PortfolioFamily::NonNeg:
            pset_cone = true;
            break;
        case PortfolioFamily::Polyhedral: {
            pset_cone = true;
            for (const auto& r : portfolio.rows())
                if (r.b != 0.0) pset_cone = false;
            break;
        }
        default:
            pset_cone = false;
    }
    return pset_cone && v0.is_positively_homogeneous() && v1.is_positively_homogeneous();
}

bool MarketInstance::polyhedral_ready() const {
    if (!portfolio.is_polyhedral()) return false;
    bool v0_ok = v0.has_curves() || v0.form() == V0Form::Kabanov || v0.form() == V0Form::Expr;
    bool v1_ok = v1.has_curves() || v1.form() == V1Form::Kabanov || v1.form() == V1Form::Expr;
    return v0_ok && v1_ok;
}

}  // namespace frictional

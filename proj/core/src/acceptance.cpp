#include "frictional/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace frictional {

std::string family_name(AcceptanceFamily f) {
    switch (f) {
        case AcceptanceFamily::WorstCase: return "worst_case";
        case AcceptanceFamily::ExpectedShortfall: return "expected_shortfall";
        case AcceptanceFamily::Expectile: return "expectile";
        case AcceptanceFamily::Utility: return "utility";
        case AcceptanceFamily::AdjustedES: return "adjusted_es";
        case AcceptanceFamily::ValueAtRisk: return "value_at_risk";
        case AcceptanceFamily::RangeValueAtRisk: return "range_value_at_risk";
        case AcceptanceFamily::FixtureUnion: return "fixture_union";
        case AcceptanceFamily::Dominance: return "dominance";
    }
    return "?";
}

bool cell_contains(const UnionCell& cell, const Position& z, double tol) {
    for (const auto& f : cell.faces) {
        double v = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) v += f.a[j] * z[j];
        if (f.strict) {
            if (!(v > f.b)) return false;
        } else {
            if (v < f.b - tol) return false;
        }
    }
    return true;
}

AcceptanceSet::AcceptanceSet(AcceptanceFamily family, ScenarioSpace space)
    : family_(family), space_(std::move(space)) {}

void AcceptanceSet::assert_standing_assumptions() const {
    Position zero(space_.size(), 0.0);
    if (family_ == AcceptanceFamily::FixtureUnion && !closed_) {
        // Open fixture cells may carry 0 on their boundary; assert closure
        // membership there (strict faces read non-strictly).
        for (const auto& c : cells_) {
            bool ok = true;
            for (const auto& f : c.faces)
                if (0.0 < f.b - 1e-12) ok = false;
            if (ok) return;
        }
        throw std::invalid_argument("acceptance set: 0 must lie in the closure");
    }
    if (!contains(zero, 1e-12))
        throw std::invalid_argument("acceptance set: 0 must be acceptable");
}

AcceptanceSet AcceptanceSet::worst_case(ScenarioSpace space) {
    AcceptanceSet a(AcceptanceFamily::WorstCase, std::move(space));
    a.cone_ = a.convex_ = a.closed_ = true;
    a.assert_standing_assumptions();
    return a;
}

AcceptanceSet AcceptanceSet::expected_shortfall(ScenarioSpace space, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("expected shortfall: alpha must lie in (0,1)");
    AcceptanceSet a(AcceptanceFamily::ExpectedShortfall, std::move(space));
    a.alpha_ = alpha;
    a.cone_ = a.convex_ = a.closed_ = true;
    a.assert_standing_assumptions();
    return a;
}

AcceptanceSet AcceptanceSet::expectile(ScenarioSpace space, double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw std::invalid_argument("expectile: alpha must lie in (0,1/2)");
    AcceptanceSet a(AcceptanceFamily::Expectile, std::move(space));
    a.alpha_ = alpha;
    a.cone_ = a.convex_ = a.closed_ = true;
    a.assert_standing_assumptions();
    return a;
}

AcceptanceSet AcceptanceSet::utility(ScenarioSpace space, PiecewiseLinear u) {
    if (!u.is_nondecreasing())
        throw std::invalid_argument("utility: u must be nondecreasing");
    if (std::abs(u(0.0)) > 1e-12)
        throw std::invalid_argument("utility: u(0) must be 0");
    AcceptanceSet a(AcceptanceFamily::Utility, std::move(space));
    a.utility_ = std::move(u);
    a.cone_ = false;
    a.convex_ = a.utility_.is_concave();
    a.closed_ = true;
    a.assert_standing_assumptions();
    return a;
}

AcceptanceSet AcceptanceSet::adjusted_es(ScenarioSpace space, std::vector<double> alphas,
                                         std::vector<double> values) {
    if (alphas.empty() || alphas.size() != values.size())
        throw std::invalid_argument("adjusted es: grid size mismatch");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0 && alphas[i] < 1.0))
            throw std::invalid_argument("adjusted es: levels must lie in (0,1)");
        if (i > 0 && !(alphas[i] > alphas[i - 1]))
            throw std::invalid_argument("adjusted es: levels must be strictly increasing");
        if (i > 0 && values[i] > values[i - 1] + 1e-12)
            throw std::invalid_argument("adjusted es: offset must be nonincreasing");
    }
    AcceptanceSet a(AcceptanceFamily::AdjustedES, std::move(space));
    a.adj_alphas_ = std::move(alphas);
    a.adj_values_ = std::move(values);
    a.cone_ = false;
    a.convex_ = true;
    a.closed_ = true;
    a.assert_standing_assumptions();  // requires g >= 0 on the grid
    return a;
}

AcceptanceSet AcceptanceSet::value_at_risk(ScenarioSpace space, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("value at risk: alpha must lie in (0,1)");
    AcceptanceSet a(AcceptanceFamily::ValueAtRisk, std::move(space));
    a.alpha_ = alpha;
    a.cone_ = true;
    a.convex_ = false;
    a.closed_ = true;
    a.assert_standing_assumptions();
    return a;
}

AcceptanceSet AcceptanceSet::range_value_at_risk(ScenarioSpace space, double alpha, double beta) {
    if (!(0.0 < alpha && alpha < beta && beta < 1.0))
        throw std::invalid_argument("range value at risk: need 0 < alpha < beta < 1");
    AcceptanceSet a(AcceptanceFamily::RangeValueAtRisk, std::move(space));
    a.alpha_ = alpha;
    a.beta_ = beta;
    a.cone_ = true;
    a.convex_ = false;
    a.closed_ = true;
    a.assert_standing_assumptions();
    return a;
}

AcceptanceSet AcceptanceSet::dominance(ScenarioSpace space, Position floor) {
    space.check_dim(floor, "dominance");
    for (double v : floor)
        if (v > 1e-12)
            throw std::invalid_argument("dominance: floor must be <= 0 so that 0 is acceptable");
    AcceptanceSet a(AcceptanceFamily::Dominance, std::move(space));
    a.floor_ = std::move(floor);
    a.cone_ = std::all_of(a.floor_.begin(), a.floor_.end(),
                          [](double v) { return v == 0.0; });
    a.convex_ = true;
    a.closed_ = true;
    a.assert_standing_assumptions();
    return a;
}

AcceptanceSet AcceptanceSet::fixture_union(ScenarioSpace space, std::vector<UnionCell> cells,
                                           std::vector<UnionCell> asymptotic_cells,
                                           bool cone, bool convex, bool closed) {
    if (cells.empty())
        throw std::invalid_argument("fixture union: at least one cell required");
    const std::size_t d = space.size();
    auto check_cells = [&](const std::vector<UnionCell>& cs, bool allow_strict) {
        for (const auto& c : cs)
            for (const auto& f : c.faces) {
                if (f.a.size() != d)
                    throw std::invalid_argument("fixture union: face dimension mismatch");
                if (f.strict && !allow_strict)
                    throw std::invalid_argument("fixture union: asymptotic cells must be closed");
            }
    };
    check_cells(cells, true);
    check_cells(asymptotic_cells, false);

    AcceptanceSet a(AcceptanceFamily::FixtureUnion, std::move(space));
    a.cells_ = std::move(cells);
    a.asym_cells_ = std::move(asymptotic_cells);
    a.cone_ = cone;
    a.convex_ = convex;
    a.closed_ = closed;
    a.assert_standing_assumptions();

    // Sampled monotonicity check of A + X_+ subset A (seed fixed for
    // reproducibility). Rejection-sample members in a data-scaled box.
    double scale = 1.0;
    for (const auto& c : a.cells_)
        for (const auto& f : c.faces) scale = std::max(scale, std::abs(f.b));
    std::mt19937_64 rng(0x5EEDull);
    std::uniform_real_distribution<double> unif(-2.0 * scale, 2.0 * scale);
    std::uniform_real_distribution<double> pos(0.0, 2.0 * scale);
    int found = 0;
    for (int trial = 0; trial < 4000 && found < 200; ++trial) {
        Position x(d);
        for (auto& v : x) v = unif(rng);
        if (!a.contains(x, 0.0)) continue;
        ++found;
        Position w(d);
        for (auto& v : w) v = pos(rng);
        Position xw(d);
        for (std::size_t j = 0; j < d; ++j) xw[j] = x[j] + w[j];
        if (!a.contains(xw, 1e-9))
            throw std::invalid_argument("fixture union: sampled monotonicity check failed");
    }
    return a;
}

double AcceptanceSet::g_at(double a) const {
    // Piecewise-linear interpolation on the grid; +inf outside its range is
    // handled by the callers (no constraint there).
    const auto& xs = adj_alphas_;
    const auto& ys = adj_values_;
    if (a <= xs.front()) return ys.front();
    if (a >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), a);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    double t = (a - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

double AcceptanceSet::adjusted_es_sup(const Position& x) const {
    // sup over levels of ES_a(x) - g(a). Both pieces are piecewise smooth with
    // breakpoints at the cumulative probabilities of x's sort order and at the
    // grid of g; on each sub-interval the difference attains its maximum at an
    // endpoint, so evaluating the candidate set is exact.
    std::set<double> cand(adj_alphas_.begin(), adj_alphas_.end());
    {
        // cumulative probabilities along x's sort order
        std::vector<std::size_t> idx(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) idx[j] = j;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
        double c = 0.0;
        for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
            c += space_.probs[idx[k]];
            if (c > adj_alphas_.front() && c < adj_alphas_.back()) cand.insert(c);
        }
    }
    double best = -std::numeric_limits<double>::infinity();
    for (double a : cand) {
        if (a < adj_alphas_.front() - 1e-15 || a > adj_alphas_.back() + 1e-15) continue;
        best = std::max(best, frictional::expected_shortfall(space_, x, a) - g_at(a));
    }
    return best;
}

double AcceptanceSet::margin(const Position& x) const {
    space_.check_dim(x, "acceptance margin");
    switch (family_) {
        case AcceptanceFamily::WorstCase:
            return *std::min_element(x.begin(), x.end());
        case AcceptanceFamily::ExpectedShortfall:
            return -frictional::expected_shortfall(space_, x, alpha_);
        case AcceptanceFamily::Expectile:
            return expectile_margin(space_, x, alpha_);
        case AcceptanceFamily::Utility: {
            double e = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j)
                e += space_.probs[j] * utility_(x[j]);
            return e;
        }
        case AcceptanceFamily::AdjustedES:
            return -adjusted_es_sup(x);
        case AcceptanceFamily::ValueAtRisk:
            return upper_quantile(space_, x, alpha_);
        case AcceptanceFamily::RangeValueAtRisk:
            return -frictional::range_value_at_risk(space_, x, alpha_, beta_);
        case AcceptanceFamily::Dominance: {
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < x.size(); ++j) m = std::min(m, x[j] - floor_[j]);
            return m;
        }
        case AcceptanceFamily::FixtureUnion:
            throw std::logic_error("margin: fixture unions have no scalar margin");
    }
    return 0.0;
}

bool AcceptanceSet::contains(const Position& x, double tol) const {
    space_.check_dim(x, "contains");
    if (family_ == AcceptanceFamily::FixtureUnion) {
        for (const auto& c : cells_)
            if (cell_contains(c, x, tol)) return true;
        return false;
    }
    return margin(x) >= -tol;
}

XReal AcceptanceSet::risk_statistic(const Position& x) const {
    space_.check_dim(x, "risk_statistic");
    switch (family_) {
        case AcceptanceFamily::WorstCase:
            return *std::min_element(x.begin(), x.end());
        case AcceptanceFamily::ExpectedShortfall:
            return frictional::expected_shortfall(space_, x, alpha_);
        case AcceptanceFamily::Expectile: {
            double pos = 0.0, neg = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                pos += space_.probs[j] * std::max(x[j], 0.0);
                neg += space_.probs[j] * std::max(-x[j], 0.0);
            }
            if (neg == 0.0) return XReal::pos_inf();  // includes 0/0 = +inf
            return pos / neg;
        }
        case AcceptanceFamily::Utility: {
            double e = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j)
                e += space_.probs[j] * utility_(x[j]);
            return e;
        }
        case AcceptanceFamily::AdjustedES:
            return adjusted_es_sup(x);
        case AcceptanceFamily::ValueAtRisk:
            return upper_quantile(space_, x, alpha_);
        case AcceptanceFamily::RangeValueAtRisk:
            return frictional::range_value_at_risk(space_, x, alpha_, beta_);
        case AcceptanceFamily::Dominance: {
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < x.size(); ++j) m = std::min(m, x[j] - floor_[j]);
            return m;
        }
        case AcceptanceFamily::FixtureUnion:
            throw std::logic_error("risk_statistic: fixture unions have no scalar statistic");
    }
    return 0.0;
}

bool AcceptanceSet::asymptotic_contains(const Position& x, double tol, int doublings) const {
    space_.check_dim(x, "asymptotic_contains");
    if (family_ == AcceptanceFamily::FixtureUnion) {
        for (const auto& c : asym_cells_)
            if (cell_contains(c, x, tol)) return true;
        return false;
    }
    if (family_ == AcceptanceFamily::Dominance) {
        // Recession cone of {X >= floor} is the positive cone.
        for (double v : x)
            if (v < -tol) return false;
        return true;
    }
    if (cone_) {
        if (!closed_) throw std::logic_error("asymptotic_contains: non-closed cone unsupported");
        return contains(x, tol);
    }
    if (convex_ && closed_) {
        // Scaling semidecision with anchor 0: X in A^inf iff lambda*X in A
        // for all lambda > 0; probe doubled scales up to 2^doublings.
        Position probe(x.size());
        double lambda = 1.0;
        for (int k = 0; k <= doublings; ++k) {
            for (std::size_t j = 0; j < x.size(); ++j) probe[j] = lambda * x[j];
            if (!contains(probe, tol * std::max(1.0, lambda))) return false;
            lambda *= 2.0;
        }
        return true;
    }
    throw std::logic_error("asymptotic_contains: unsupported family (non-closed, non-convex)");
}

namespace {

// Deterministic direction grid on the unit sphere: dense circle for d = 2,
// seeded uniform directions plus axis/corner patterns otherwise.
std::vector<Position> sphere_grid(std::size_t d, int n_random) {
    std::vector<Position> dirs;
    if (d == 1) {
        dirs.push_back({1.0});
        dirs.push_back({-1.0});
        return dirs;
    }
    if (d == 2) {
        for (int k = 0; k < 720; ++k) {
            double th = 2.0 * M_PI * k / 720.0;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
        return dirs;
    }
    for (std::size_t j = 0; j < d; ++j) {
        Position e(d, 0.0);
        e[j] = 1.0;
        dirs.push_back(e);
        e[j] = -1.0;
        dirs.push_back(e);
    }
    std::mt19937_64 rng(0x5EEDull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < n_random; ++k) {
        Position v(d);
        double norm = 0.0;
        for (auto& c : v) {
            c = gauss(rng);
            norm += c * c;
        }
        norm = std::sqrt(norm);
        if (norm < 1e-12) continue;
        for (auto& c : v) c /= norm;
        dirs.push_back(v);
    }
    return dirs;
}

}  // namespace

AcceptanceSet::PointedReport AcceptanceSet::pointed() const {
    PointedReport rep;
    const std::size_t d = space_.size();
    switch (family_) {
        case AcceptanceFamily::WorstCase:
        case AcceptanceFamily::ExpectedShortfall:
        case AcceptanceFamily::Dominance:
        case AcceptanceFamily::AdjustedES:
            // X >= 0 and -X >= 0 force X = 0; the ES cone and the adjusted-ES
            // recession cone (an intersection of ES cones) admit the same
            // argument via the tail-average/mean comparison.
            rep.verdict = Tri::True;
            return rep;
        case AcceptanceFamily::Expectile:
            // Adding the two margins gives (2*alpha - 1) E|X| >= 0, so
            // alpha < 1/2 forces X = 0.
            rep.verdict = Tri::True;
            return rep;
        case AcceptanceFamily::ValueAtRisk: {
            double pmin = *std::min_element(space_.probs.begin(), space_.probs.end());
            if (pmin > alpha_) {
                rep.verdict = Tri::True;
            } else {
                rep.verdict = Tri::False;
                std::size_t j = static_cast<std::size_t>(
                    std::min_element(space_.probs.begin(), space_.probs.end()) -
                    space_.probs.begin());
                Position w(d, 0.0);
                w[j] = -1.0;  // P(w < 0) = p_j <= alpha, and -w >= 0
                rep.witness = w;
            }
            return rep;
        }
        case AcceptanceFamily::Utility: {
            double sl = utility_.slope_left(), sr = utility_.slope_right();
            if (!utility_.is_concave()) break;  // fall through to grid search
            if (sr < sl - 1e-12 && sr >= 0.0) {
                rep.verdict = Tri::True;
            } else if (sr > 1e-12) {
                // Terminal slopes equal: recession set is the half space
                // {E[X] >= 0}, which contains a full line.
                rep.verdict = Tri::False;
                Position w(d, 0.0);
                if (d == 1) {
                    rep.verdict = Tri::True;  // E[X] >= 0 and <= 0 forces X = 0
                    return rep;
                }
                w[0] = 1.0 / space_.probs[0];
                w[1] = -1.0 / space_.probs[1];
                rep.witness = w;
            } else {
                rep.verdict = Tri::False;  // flat tails accept every direction
                Position w(d, 0.0);
                w[0] = 1.0;
                rep.witness = w;
            }
            return rep;
        }
        default:
            break;
    }

    // Grid semidecision: look for a nonzero direction in A^inf cap (-A^inf).
    for (const auto& dir : sphere_grid(d, 10000)) {
        Position neg(d);
        for (std::size_t j = 0; j < d; ++j) neg[j] = -dir[j];
        bool both = false;
        try {
            both = asymptotic_contains(dir, 1e-9) && asymptotic_contains(neg, 1e-9);
        } catch (const std::logic_error&) {
            rep.verdict = Tri::Unknown;
            return rep;
        }
        if (both) {
            rep.verdict = Tri::False;
            rep.witness = dir;
            return rep;
        }
    }
    rep.verdict = Tri::Unknown;
    return rep;
}

}  // namespace frictional

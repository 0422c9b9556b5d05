#include "frictional/properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace frictional {

std::string property_name(PropertyTag t) {
    switch (t) {
        case PropertyTag::Monotone: return "monotone";
        case PropertyTag::StarShaped: return "star_shaped";
        case PropertyTag::PosHomogeneous: return "pos_homogeneous";
        case PropertyTag::Convex: return "convex";
        case PropertyTag::Quasiconvex: return "quasiconvex";
        case PropertyTag::Subadditive: return "subadditive";
        case PropertyTag::LscSpotcheck: return "lsc_spotcheck";
    }
    return "?";
}

PropertyTag property_from_name(const std::string& name) {
    for (PropertyTag t : {PropertyTag::Monotone, PropertyTag::StarShaped,
                          PropertyTag::PosHomogeneous, PropertyTag::Convex,
                          PropertyTag::Quasiconvex, PropertyTag::Subadditive,
                          PropertyTag::LscSpotcheck})
        if (property_name(t) == name) return t;
    throw std::invalid_argument("unknown property: " + name);
}

namespace {

bool acceptance_star_shaped(const AcceptanceSet& a) {
    // Convex sets containing 0 and cones are star shaped; fixture unions are
    // not classified (conservative false unless flagged conic/convex).
    return a.is_cone() || a.is_convex();
}

bool portfolio_cone(const PortfolioSet& p) {
    switch (p.family()) {
        case PortfolioFamily::Full:
        case PortfolioFamily::NonNeg:
            return true;
        case PortfolioFamily::Polyhedral:
            for (const auto& r : p.rows())
                if (r.b != 0.0) return false;
            return true;
        default:
            return false;
    }
}

}  // namespace

bool property_premise(const MarketInstance& inst, PropertyTag property) {
    const auto& a = inst.acceptance;
    const auto& p = inst.portfolio;
    const bool v0_star = inst.v0.is_convex() || inst.v0.is_positively_homogeneous();
    const bool v1_antistar = inst.v1.is_concave() || inst.v1.is_positively_homogeneous();
    switch (property) {
        case PropertyTag::Monotone:
            return true;
        case PropertyTag::StarShaped:
            return acceptance_star_shaped(a) && p.is_convex(&inst.v0) && v0_star && v1_antistar;
        case PropertyTag::PosHomogeneous:
            return a.is_cone() && portfolio_cone(p) &&
                   inst.v0.is_positively_homogeneous() && inst.v1.is_positively_homogeneous();
        case PropertyTag::Convex:
            return a.is_convex() && p.is_convex(&inst.v0) && inst.v0.is_convex() &&
                   inst.v1.is_concave();
        case PropertyTag::Quasiconvex:
            return a.is_convex() && p.is_convex(&inst.v0) &&
                   (inst.v0.is_convex() ||
                    (inst.nassets == 1 && inst.v0.has_curves() &&
                     inst.v0.curves().front().is_nondecreasing())) &&
                   inst.v1.is_concave();
        case PropertyTag::Subadditive:
            return a.is_cone() && a.is_convex() && portfolio_cone(p) &&
                   inst.v0.is_convex() && inst.v0.is_positively_homogeneous() &&
                   inst.v1.is_concave() && inst.v1.is_positively_homogeneous();
        case PropertyTag::LscSpotcheck:
            return a.is_closed();
    }
    return false;
}

namespace {

double path_slack(const SolveReport& r, const SearchConfig& cfg,
                  const MarketInstance& inst) {
    double s = 10.0 * cfg.tol;
    if (r.path == "global")
        s += (1.0 + inst.v0.lipschitz_bound()) * cfg.grid_h;
    else if (r.path == "convex")
        s += r.gap.value_or(1e-4);
    return s;
}

struct Eval {
    XReal v;
    double slack;
};

Eval eval_rho(const MarketInstance& inst, const Position& x, const SearchConfig& cfg) {
    SolveReport r = rho(inst, x, cfg);
    return {r.value, path_slack(r, cfg, inst)};
}

}  // namespace

PropertyVerdict check_property(const MarketInstance& inst, PropertyTag property,
                               int trials, std::uint64_t seed, const SearchConfig& cfg) {
    PropertyVerdict verdict;
    verdict.property = property;
    verdict.trials = trials;
    verdict.seed = seed;
    verdict.premise_satisfied = property_premise(inst, property);

    const std::size_t d = inst.space.size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 2.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    auto sample = [&]() {
        Position x(d);
        for (auto& v : x) v = gauss(rng);
        return x;
    };

    // Violation report: re-evaluate the stored inputs and require the
    // violation to survive three times the combined slack.
    auto report_counterexample = [&](std::vector<Position> inputs, double lambda,
                                     double violation, double slack) {
        std::vector<double> values;
        for (const auto& x : inputs) values.push_back(eval_rho(inst, x, cfg).v.raw());
        verdict.result = PropertyVerdict::Result::Counterexample;
        verdict.inputs = std::move(inputs);
        verdict.values = std::move(values);
        verdict.lambda = lambda;
        verdict.violation = violation;
        verdict.slack = slack;
        verdict.reverified = violation > 3.0 * slack;
    };

    for (int t = 0; t < trials; ++t) {
        switch (property) {
            case PropertyTag::Monotone: {
                Position x = sample(), y(d);
                for (std::size_t j = 0; j < d; ++j) y[j] = x[j] - std::abs(gauss(rng));
                Eval rx = eval_rho(inst, x, cfg), ry = eval_rho(inst, y, cfg);
                double slack = rx.slack + ry.slack;
                // X >= Y implies rho(X) <= rho(Y)
                if (rx.v.raw() > ry.v.raw() + slack && !ry.v.is_pos_inf()) {
                    report_counterexample({x, y}, 0.0, rx.v.raw() - ry.v.raw(), slack);
                    if (verdict.reverified) return verdict;
                    verdict.result = PropertyVerdict::Result::Pass;
                }
                break;
            }
            case PropertyTag::StarShaped: {
                Position x = sample();
                double lam = 1.0 + 3.0 * u01(rng);
                Position lx(d);
                for (std::size_t j = 0; j < d; ++j) lx[j] = lam * x[j];
                Eval rx = eval_rho(inst, x, cfg), rl = eval_rho(inst, lx, cfg);
                if (!rx.v.finite() || !rl.v.finite()) break;
                double slack = (1.0 + lam) * (rx.slack + rl.slack);
                double gap = lam * rx.v.value() - rl.v.value();  // rho(lx) >= lam rho(x)
                if (gap > slack) {
                    report_counterexample({x, lx}, lam, gap, slack);
                    if (verdict.reverified) return verdict;
                    verdict.result = PropertyVerdict::Result::Pass;
                }
                break;
            }
            case PropertyTag::PosHomogeneous: {
                Position x = sample();
                double lam = 0.25 + 3.75 * u01(rng);
                Position lx(d);
                for (std::size_t j = 0; j < d; ++j) lx[j] = lam * x[j];
                Eval rx = eval_rho(inst, x, cfg), rl = eval_rho(inst, lx, cfg);
                if (rx.v.finite() != rl.v.finite()) {
                    report_counterexample({x, lx}, lam, 1.0, 0.0);
                    if (verdict.reverified) return verdict;
                    verdict.result = PropertyVerdict::Result::Pass;
                    break;
                }
                if (!rx.v.finite()) break;
                double slack = (1.0 + lam) * (rx.slack + rl.slack);
                double gap = std::abs(rl.v.value() - lam * rx.v.value());
                if (gap > slack) {
                    report_counterexample({x, lx}, lam, gap, slack);
                    if (verdict.reverified) return verdict;
                    verdict.result = PropertyVerdict::Result::Pass;
                }
                break;
            }
            case PropertyTag::Convex:
            case PropertyTag::Quasiconvex: {
                Position x = sample(), y = sample();
                double lam = u01(rng);
                Position mid(d);
                for (std::size_t j = 0; j < d; ++j) mid[j] = lam * x[j] + (1.0 - lam) * y[j];
                Eval rx = eval_rho(inst, x, cfg), ry = eval_rho(inst, y, cfg),
                     rm = eval_rho(inst, mid, cfg);
                if (!rx.v.finite() || !ry.v.finite()) break;
                double slack = rx.slack + ry.slack + rm.slack;
                double bound = (property == PropertyTag::Convex)
                                   ? lam * rx.v.value() + (1.0 - lam) * ry.v.value()
                                   : std::max(rx.v.value(), ry.v.value());
                if (rm.v.raw() > bound + slack) {
                    report_counterexample({x, y, mid}, lam, rm.v.raw() - bound, slack);
                    if (verdict.reverified) return verdict;
                    verdict.result = PropertyVerdict::Result::Pass;
                }
                break;
            }
            case PropertyTag::Subadditive: {
                Position x = sample(), y = sample(), s(d);
                for (std::size_t j = 0; j < d; ++j) s[j] = x[j] + y[j];
                Eval rx = eval_rho(inst, x, cfg), ry = eval_rho(inst, y, cfg),
                     rs = eval_rho(inst, s, cfg);
                if (!rx.v.finite() || !ry.v.finite()) break;
                double slack = rx.slack + ry.slack + rs.slack;
                double bound = rx.v.value() + ry.v.value();
                if (rs.v.raw() > bound + slack) {
                    report_counterexample({x, y, s}, 0.0, rs.v.raw() - bound, slack);
                    if (verdict.reverified) return verdict;
                    verdict.result = PropertyVerdict::Result::Pass;
                }
                break;
            }
            case PropertyTag::LscSpotcheck: {
                Position x = sample(), dir = sample();
                Eval rx = eval_rho(inst, x, cfg);
                double c_lip = (1.0 + inst.v0.lipschitz_bound()) *
                               (1.0 + inst.v1.lipschitz_bound());
                double worst = -std::numeric_limits<double>::infinity();
                double slack = rx.slack;
                // liminf form: rho(X) <= rho(X_n) + C/n eventually
                for (int n = 10; n <= 20; ++n) {
                    Position xn(d);
                    for (std::size_t j = 0; j < d; ++j) xn[j] = x[j] + dir[j] / n;
                    Eval rn = eval_rho(inst, xn, cfg);
                    worst = std::max(worst, rx.v.raw() - rn.v.raw() - c_lip / n);
                    slack = std::max(slack, rn.slack);
                }
                if (worst > 2.0 * slack && std::isfinite(worst)) {
                    report_counterexample({x, dir}, 0.0, worst, 2.0 * slack);
                    if (verdict.reverified) return verdict;
                    verdict.result = PropertyVerdict::Result::Pass;
                }
                break;
            }
        }
    }
    if (verdict.result != PropertyVerdict::Result::Counterexample)
        verdict.result = PropertyVerdict::Result::Pass;
    return verdict;
}

}  // namespace frictional

#include "frictional/instance_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

namespace frictional {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("instance document: " + path + ": " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) fail(path, "unknown key '" + it.key() + "'");
}

const json& need(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) fail(path, "missing key '" + key + "'");
    return obj.at(key);
}

double num(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    fail(path, "expected a number");
}

std::vector<double> num_array(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(num(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

PiecewiseLinear parse_curve(const json& v, const std::string& path) {
    check_keys(v, {"xs", "ys", "slope_left", "slope_right"}, path);
    return PiecewiseLinear(num_array(need(v, "xs", path), path + ".xs"),
                           num_array(need(v, "ys", path), path + ".ys"),
                           num(need(v, "slope_left", path), path + ".slope_left"),
                           num(need(v, "slope_right", path), path + ".slope_right"));
}

json curve_to_json(const PiecewiseLinear& c) {
    json out;
    out["xs"] = c.breakpoints();
    out["ys"] = c.values();
    out["slope_left"] = c.slope_left();
    out["slope_right"] = c.slope_right();
    return out;
}

ScalarExpr parse_expr(const json& v, const std::string& path) {
    check_keys(v, {"terms"}, path);
    const json& terms = need(v, "terms", path);
    if (!terms.is_array()) fail(path + ".terms", "expected an array");
    ScalarExpr e;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string tp = path + ".terms[" + std::to_string(i) + "]";
        const json& t = terms[i];
        ScalarExpr::Term term;
        std::string kind = need(t, "kind", tp).get<std::string>();
        term.coef = t.contains("coef") ? num(t.at("coef"), tp + ".coef") : 1.0;
        if (kind == "lin") {
            check_keys(t, {"kind", "coef", "a", "b"}, tp);
            term.kind = ScalarExpr::Term::Kind::Lin;
            term.lin.a = num_array(need(t, "a", tp), tp + ".a");
            term.lin.b = t.contains("b") ? num(t.at("b"), tp + ".b") : 0.0;
        } else if (kind == "min" || kind == "max") {
            check_keys(t, {"kind", "coef", "forms"}, tp);
            term.kind = (kind == "min") ? ScalarExpr::Term::Kind::MinLin
                                        : ScalarExpr::Term::Kind::MaxLin;
            const json& fs = need(t, "forms", tp);
            for (std::size_t k = 0; k < fs.size(); ++k) {
                const std::string fp = tp + ".forms[" + std::to_string(k) + "]";
                check_keys(fs[k], {"a", "b"}, fp);
                LinForm f;
                f.a = num_array(need(fs[k], "a", fp), fp + ".a");
                f.b = fs[k].contains("b") ? num(fs[k].at("b"), fp + ".b") : 0.0;
                term.forms.push_back(std::move(f));
            }
        } else if (kind == "pwl") {
            check_keys(t, {"kind", "coef", "asset", "curve"}, tp);
            term.kind = ScalarExpr::Term::Kind::Pwl;
            term.asset = need(t, "asset", tp).get<int>();
            term.curve = parse_curve(need(t, "curve", tp), tp + ".curve");
        } else {
            fail(tp, "unknown expression term kind '" + kind + "'");
        }
        e.terms.push_back(std::move(term));
    }
    return e;
}

json expr_to_json(const ScalarExpr& e) {
    json terms = json::array();
    for (const auto& t : e.terms) {
        json jt;
        jt["coef"] = t.coef;
        switch (t.kind) {
            case ScalarExpr::Term::Kind::Lin:
                jt["kind"] = "lin";
                jt["a"] = t.lin.a;
                jt["b"] = t.lin.b;
                break;
            case ScalarExpr::Term::Kind::MinLin:
            case ScalarExpr::Term::Kind::MaxLin: {
                jt["kind"] = (t.kind == ScalarExpr::Term::Kind::MinLin) ? "min" : "max";
                json fs = json::array();
                for (const auto& f : t.forms) {
                    json jf;
                    jf["a"] = f.a;
                    jf["b"] = f.b;
                    fs.push_back(std::move(jf));
                }
                jt["forms"] = std::move(fs);
                break;
            }
            case ScalarExpr::Term::Kind::Pwl:
                jt["kind"] = "pwl";
                jt["asset"] = t.asset;
                jt["curve"] = curve_to_json(t.curve);
                break;
        }
        terms.push_back(std::move(jt));
    }
    json out;
    out["terms"] = std::move(terms);
    return out;
}

std::vector<UnionCell> parse_cells(const json& v, std::size_t d, const std::string& path,
                                   bool allow_strict) {
    if (!v.is_array()) fail(path, "expected an array of cells");
    std::vector<UnionCell> cells;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string cp = path + "[" + std::to_string(i) + "]";
        check_keys(v[i], {"faces"}, cp);
        const json& faces = need(v[i], "faces", cp);
        UnionCell cell;
        for (std::size_t k = 0; k < faces.size(); ++k) {
            const std::string fp = cp + ".faces[" + std::to_string(k) + "]";
            check_keys(faces[k], {"a", "b", "strict"}, fp);
            CellFace f;
            f.a = num_array(need(faces[k], "a", fp), fp + ".a");
            if (f.a.size() != d) fail(fp + ".a", "face dimension mismatch");
            f.b = num(need(faces[k], "b", fp), fp + ".b");
            f.strict = faces[k].contains("strict") && faces[k].at("strict").get<bool>();
            if (f.strict && !allow_strict) fail(fp, "strict faces are not allowed here");
            cell.faces.push_back(std::move(f));
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

json cells_to_json(const std::vector<UnionCell>& cells) {
    json out = json::array();
    for (const auto& c : cells) {
        json faces = json::array();
        for (const auto& f : c.faces) {
            json jf;
            jf["a"] = f.a;
            jf["b"] = f.b;
            if (f.strict) jf["strict"] = true;
            faces.push_back(std::move(jf));
        }
        json jc;
        jc["faces"] = std::move(faces);
        out.push_back(std::move(jc));
    }
    return out;
}

AcceptanceSet parse_acceptance(const json& v, const ScenarioSpace& space,
                               const std::string& path) {
    std::string family = need(v, "family", path).get<std::string>();
    if (family == "worst_case") {
        check_keys(v, {"family"}, path);
        return AcceptanceSet::worst_case(space);
    }
    if (family == "expected_shortfall") {
        check_keys(v, {"family", "alpha"}, path);
        return AcceptanceSet::expected_shortfall(space, num(need(v, "alpha", path), path));
    }
    if (family == "expectile") {
        check_keys(v, {"family", "alpha"}, path);
        return AcceptanceSet::expectile(space, num(need(v, "alpha", path), path));
    }
    if (family == "utility") {
        check_keys(v, {"family", "u"}, path);
        return AcceptanceSet::utility(space, parse_curve(need(v, "u", path), path + ".u"));
    }
    if (family == "adjusted_es") {
        check_keys(v, {"family", "alphas", "values"}, path);
        return AcceptanceSet::adjusted_es(space,
                                          num_array(need(v, "alphas", path), path + ".alphas"),
                                          num_array(need(v, "values", path), path + ".values"));
    }
    if (family == "value_at_risk") {
        check_keys(v, {"family", "alpha"}, path);
        return AcceptanceSet::value_at_risk(space, num(need(v, "alpha", path), path));
    }
    if (family == "range_value_at_risk") {
        check_keys(v, {"family", "alpha", "beta"}, path);
        return AcceptanceSet::range_value_at_risk(space, num(need(v, "alpha", path), path),
                                                  num(need(v, "beta", path), path));
    }
    if (family == "dominance") {
        check_keys(v, {"family", "floor"}, path);
        return AcceptanceSet::dominance(space, num_array(need(v, "floor", path), path + ".floor"));
    }
    if (family == "fixture_union") {
        check_keys(v, {"family", "cells", "asymptotic", "cone", "convex", "closed"}, path);
        return AcceptanceSet::fixture_union(
            space, parse_cells(need(v, "cells", path), space.size(), path + ".cells", true),
            parse_cells(need(v, "asymptotic", path), space.size(), path + ".asymptotic", false),
            need(v, "cone", path).get<bool>(), need(v, "convex", path).get<bool>(),
            need(v, "closed", path).get<bool>());
    }
    fail(path, "unknown acceptance family '" + family + "'");
}

json acceptance_to_json(const AcceptanceSet& a) {
    json out;
    switch (a.family()) {
        case AcceptanceFamily::WorstCase:
            out["family"] = "worst_case";
            break;
        case AcceptanceFamily::ExpectedShortfall:
            out["family"] = "expected_shortfall";
            out["alpha"] = a.alpha();
            break;
        case AcceptanceFamily::Expectile:
            out["family"] = "expectile";
            out["alpha"] = a.alpha();
            break;
        case AcceptanceFamily::Utility:
            out["family"] = "utility";
            out["u"] = curve_to_json(a.utility_fn());
            break;
        case AcceptanceFamily::AdjustedES:
            out["family"] = "adjusted_es";
            out["alphas"] = a.adjusted_alphas();
            out["values"] = a.adjusted_values();
            break;
        case AcceptanceFamily::ValueAtRisk:
            out["family"] = "value_at_risk";
            out["alpha"] = a.alpha();
            break;
        case AcceptanceFamily::RangeValueAtRisk:
            out["family"] = "range_value_at_risk";
            out["alpha"] = a.alpha();
            out["beta"] = a.beta();
            break;
        case AcceptanceFamily::Dominance:
            out["family"] = "dominance";
            out["floor"] = a.dominance_floor();
            break;
        case AcceptanceFamily::FixtureUnion:
            out["family"] = "fixture_union";
            out["cells"] = cells_to_json(a.cells());
            out["asymptotic"] = cells_to_json(a.asymptotic_cells());
            out["cone"] = a.is_cone();
            out["convex"] = a.is_convex();
            out["closed"] = a.is_closed();
            break;
    }
    return out;
}

PortfolioSet parse_portfolio(const json& v, int n, const std::string& path) {
    std::string family = need(v, "family", path).get<std::string>();
    if (family == "full") {
        check_keys(v, {"family"}, path);
        return PortfolioSet::full(n);
    }
    if (family == "nonneg") {
        check_keys(v, {"family"}, path);
        return PortfolioSet::nonneg(n);
    }
    if (family == "box") {
        check_keys(v, {"family", "lo", "hi"}, path);
        return PortfolioSet::box(num_array(need(v, "lo", path), path + ".lo"),
                                 num_array(need(v, "hi", path), path + ".hi"));
    }
    if (family == "polyhedral") {
        check_keys(v, {"family", "rows"}, path);
        const json& rows = need(v, "rows", path);
        std::vector<LinForm> rs;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::string rp = path + ".rows[" + std::to_string(i) + "]";
            check_keys(rows[i], {"a", "b"}, rp);
            LinForm r;
            r.a = num_array(need(rows[i], "a", rp), rp + ".a");
            r.b = num(need(rows[i], "b", rp), rp + ".b");
            rs.push_back(std::move(r));
        }
        return PortfolioSet::polyhedral(n, std::move(rs));
    }
    if (family == "margin") {
        check_keys(v, {"family", "gammas"}, path);
        return PortfolioSet::margin(num_array(need(v, "gammas", path), path + ".gammas"));
    }
    if (family == "collateral") {
        check_keys(v, {"family", "gamma"}, path);
        return PortfolioSet::collateral(n, num(need(v, "gamma", path), path + ".gamma"));
    }
    fail(path, "unknown portfolio family '" + family + "'");
}

json portfolio_to_json(const PortfolioSet& p) {
    json out;
    switch (p.family()) {
        case PortfolioFamily::Full:
            out["family"] = "full";
            break;
        case PortfolioFamily::NonNeg:
            out["family"] = "nonneg";
            break;
        case PortfolioFamily::Box: {
            out["family"] = "box";
            json lo = json::array(), hi = json::array();
            for (double v : p.box_lo()) lo.push_back(json_extended(v));
            for (double v : p.box_hi()) hi.push_back(json_extended(v));
            out["lo"] = std::move(lo);
            out["hi"] = std::move(hi);
            break;
        }
        case PortfolioFamily::Polyhedral: {
            out["family"] = "polyhedral";
            json rows = json::array();
            for (const auto& r : p.rows()) {
                json jr;
                jr["a"] = r.a;
                jr["b"] = r.b;
                rows.push_back(std::move(jr));
            }
            out["rows"] = std::move(rows);
            break;
        }
        case PortfolioFamily::Margin:
            out["family"] = "margin";
            out["gammas"] = p.gammas();
            break;
        case PortfolioFamily::Collateral:
            out["family"] = "collateral";
            out["gamma"] = p.gamma();
            break;
    }
    return out;
}

std::vector<PiecewiseLinear> parse_curves(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of curves");
    std::vector<PiecewiseLinear> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(parse_curve(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

BidAskMatrix parse_bid_ask(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected a matrix");
    BidAskMatrix m;
    for (std::size_t i = 0; i < v.size(); ++i)
        m.pi.push_back(num_array(v[i], path + "[" + std::to_string(i) + "]"));
    return m;
}

AcquisitionRule parse_v0(const json& v, const std::string& path) {
    std::string form = need(v, "form", path).get<std::string>();
    if (form == "linear") {
        check_keys(v, {"form", "prices"}, path);
        return AcquisitionRule::linear(num_array(need(v, "prices", path), path + ".prices"));
    }
    if (form == "separable") {
        check_keys(v, {"form", "ask", "bid"}, path);
        return AcquisitionRule::separable(parse_curves(need(v, "ask", path), path + ".ask"),
                                          parse_curves(need(v, "bid", path), path + ".bid"));
    }
    if (form == "kabanov") {
        check_keys(v, {"form", "pi"}, path);
        return AcquisitionRule::kabanov(parse_bid_ask(need(v, "pi", path), path + ".pi"));
    }
    if (form == "expr") {
        check_keys(v, {"form", "nassets", "expr"}, path);
        return AcquisitionRule::expr(need(v, "nassets", path).get<int>(),
                                     parse_expr(need(v, "expr", path), path + ".expr"));
    }
    fail(path, "unknown acquisition form '" + form + "'");
}

json v0_to_json(const AcquisitionRule& v0) {
    json out;
    switch (v0.form()) {
        case V0Form::Linear:
            out["form"] = "linear";
            out["prices"] = v0.prices();
            break;
        case V0Form::Separable: {
            out["form"] = "separable";
            json ask = json::array(), bid = json::array();
            for (const auto& c : v0.ask_curves()) ask.push_back(curve_to_json(c));
            for (const auto& c : v0.bid_curves()) bid.push_back(curve_to_json(c));
            out["ask"] = std::move(ask);
            out["bid"] = std::move(bid);
            break;
        }
        case V0Form::Kabanov:
            out["form"] = "kabanov";
            out["pi"] = v0.bid_ask().pi;
            break;
        case V0Form::Expr:
            out["form"] = "expr";
            out["nassets"] = v0.dim();
            out["expr"] = expr_to_json(v0.expr_form());
            break;
    }
    return out;
}

LiquidationRule parse_v1(const json& v, const ScenarioSpace& space, const std::string& path) {
    std::string form = need(v, "form", path).get<std::string>();
    if (form == "linear_payoff") {
        check_keys(v, {"form", "payoffs"}, path);
        const json& ps = need(v, "payoffs", path);
        std::vector<Position> payoffs;
        for (std::size_t i = 0; i < ps.size(); ++i)
            payoffs.push_back(num_array(ps[i], path + ".payoffs[" + std::to_string(i) + "]"));
        return LiquidationRule::linear(space, std::move(payoffs));
    }
    if (form == "separable") {
        check_keys(v, {"form", "phi_ask", "phi_bid", "s_ask", "s_bid"}, path);
        const json& sa = need(v, "s_ask", path);
        const json& sb = need(v, "s_bid", path);
        std::vector<Position> s_ask, s_bid;
        for (std::size_t i = 0; i < sa.size(); ++i)
            s_ask.push_back(num_array(sa[i], path + ".s_ask[" + std::to_string(i) + "]"));
        for (std::size_t i = 0; i < sb.size(); ++i)
            s_bid.push_back(num_array(sb[i], path + ".s_bid[" + std::to_string(i) + "]"));
        return LiquidationRule::separable(
            space, parse_curves(need(v, "phi_ask", path), path + ".phi_ask"),
            parse_curves(need(v, "phi_bid", path), path + ".phi_bid"), std::move(s_ask),
            std::move(s_bid));
    }
    if (form == "kabanov") {
        check_keys(v, {"form", "pi"}, path);
        const json& pis = need(v, "pi", path);
        std::vector<BidAskMatrix> mats;
        for (std::size_t w = 0; w < pis.size(); ++w)
            mats.push_back(parse_bid_ask(pis[w], path + ".pi[" + std::to_string(w) + "]"));
        return LiquidationRule::kabanov(space, std::move(mats));
    }
    if (form == "expr") {
        check_keys(v, {"form", "nassets", "outcomes"}, path);
        const json& os = need(v, "outcomes", path);
        std::vector<ScalarExpr> exprs;
        for (std::size_t w = 0; w < os.size(); ++w)
            exprs.push_back(parse_expr(os[w], path + ".outcomes[" + std::to_string(w) + "]"));
        return LiquidationRule::expr(space, need(v, "nassets", path).get<int>(),
                                     std::move(exprs));
    }
    fail(path, "unknown liquidation form '" + form + "'");
}

json v1_to_json(const LiquidationRule& v1) {
    json out;
    switch (v1.form()) {
        case V1Form::Linear: {
            out["form"] = "linear_payoff";
            json ps = json::array();
            for (const auto& p : v1.payoffs()) ps.push_back(p);
            out["payoffs"] = std::move(ps);
            break;
        }
        case V1Form::Separable: {
            out["form"] = "separable";
            json pa = json::array(), pb = json::array(), sa = json::array(), sb = json::array();
            for (const auto& c : v1.phi_ask()) pa.push_back(curve_to_json(c));
            for (const auto& c : v1.phi_bid()) pb.push_back(curve_to_json(c));
            for (const auto& s : v1.s_ask()) sa.push_back(s);
            for (const auto& s : v1.s_bid()) sb.push_back(s);
            out["phi_ask"] = std::move(pa);
            out["phi_bid"] = std::move(pb);
            out["s_ask"] = std::move(sa);
            out["s_bid"] = std::move(sb);
            break;
        }
        case V1Form::Kabanov: {
            out["form"] = "kabanov";
            json pis = json::array();
            for (const auto& m : v1.bid_ask()) pis.push_back(m.pi);
            out["pi"] = std::move(pis);
            break;
        }
        case V1Form::Expr: {
            out["form"] = "expr";
            out["nassets"] = v1.dim();
            json os = json::array();
            for (const auto& e : v1.expr_form()) os.push_back(expr_to_json(e));
            out["outcomes"] = std::move(os);
            break;
        }
    }
    return out;
}

// Declared acceptance flags are cross-checked against the family-computed
// flags and, for the structural ones, by seeded sampling.
void cross_check_flags(const json& flags, const AcceptanceSet& a, const std::string& path) {
    check_keys(flags, {"convex", "conic", "closed"}, path);
    std::mt19937_64 rng(0x5EEDull);
    std::normal_distribution<double> gauss(0.0, 2.0);
    const std::size_t d = a.space().size();

    if (flags.contains("conic")) {
        bool declared = flags.at("conic").get<bool>();
        if (declared != a.is_cone()) fail(path + ".conic", "flag mismatch with the family");
        if (declared) {
            for (int t = 0; t < 200; ++t) {
                Position x(d);
                for (auto& v : x) v = gauss(rng);
                if (!a.contains(x, 0.0)) continue;
                Position x2(d), xh(d);
                for (std::size_t j = 0; j < d; ++j) {
                    x2[j] = 2.0 * x[j];
                    xh[j] = 0.5 * x[j];
                }
                if (!a.contains(x2, 1e-9) || !a.contains(xh, 1e-9))
                    fail(path + ".conic", "sampled scale invariance failed");
            }
        }
    }
    if (flags.contains("convex")) {
        bool declared = flags.at("convex").get<bool>();
        if (declared != a.is_convex()) fail(path + ".convex", "flag mismatch with the family");
        if (declared) {
            for (int t = 0; t < 200; ++t) {
                Position x(d), y(d), mid(d);
                for (auto& v : x) v = gauss(rng);
                for (auto& v : y) v = gauss(rng);
                if (!a.contains(x, 0.0) || !a.contains(y, 0.0)) continue;
                for (std::size_t j = 0; j < d; ++j) mid[j] = 0.5 * (x[j] + y[j]);
                if (!a.contains(mid, 1e-9))
                    fail(path + ".convex", "sampled midpoint membership failed");
            }
        }
    }
    if (flags.contains("closed")) {
        if (flags.at("closed").get<bool>() != a.is_closed())
            fail(path + ".closed", "flag mismatch with the family");
    }
}

}  // namespace

double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

json json_extended(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(round12(v));
}

LoadedInstance load_instance_json(const json& doc) {
    check_keys(doc, {"version", "name", "space", "acceptance", "portfolio_set", "v0", "v1",
                     "positions", "flags", "expected"},
               "$");
    std::string version = need(doc, "version", "$").get<std::string>();
    if (version != "1") fail("$.version", "unsupported schema version '" + version + "'");

    const json& jspace = need(doc, "space", "$");
    check_keys(jspace, {"labels", "probs"}, "$.space");
    std::vector<std::string> labels;
    for (const auto& l : need(jspace, "labels", "$.space")) labels.push_back(l.get<std::string>());
    ScenarioSpace space(labels, num_array(need(jspace, "probs", "$.space"), "$.space.probs"));

    AcquisitionRule v0 = parse_v0(need(doc, "v0", "$"), "$.v0");
    LiquidationRule v1 = parse_v1(need(doc, "v1", "$"), space, "$.v1");
    AcceptanceSet acc = parse_acceptance(need(doc, "acceptance", "$"), space, "$.acceptance");
    PortfolioSet pset = parse_portfolio(need(doc, "portfolio_set", "$"), v0.dim(),
                                        "$.portfolio_set");

    if (doc.contains("flags")) cross_check_flags(doc.at("flags"), acc, "$.flags");

    std::string name = doc.contains("name") ? doc.at("name").get<std::string>() : "";
    MarketInstance inst(space, std::move(acc), std::move(pset), std::move(v0), std::move(v1),
                        name);

    LoadedInstance li{std::move(inst), {}, json(), name};
    if (doc.contains("positions")) {
        const json& ps = doc.at("positions");
        if (!ps.is_object()) fail("$.positions", "expected an object");
        for (auto it = ps.begin(); it != ps.end(); ++it) {
            Position x = num_array(it.value(), "$.positions." + it.key());
            li.instance.space.check_dim(x, ("position '" + it.key() + "'").c_str());
            li.positions[it.key()] = std::move(x);
        }
    }
    if (doc.contains("expected")) li.expected = doc.at("expected");
    return li;
}

LoadedInstance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open instance file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("instance document: " + path + ": " + e.what());
    }
    return load_instance_json(doc);
}

json serialize_instance(const LoadedInstance& li) {
    json out;
    out["version"] = "1";
    if (!li.name.empty()) out["name"] = li.name;
    json jspace;
    jspace["labels"] = li.instance.space.labels;
    jspace["probs"] = li.instance.space.probs;
    out["space"] = std::move(jspace);
    out["acceptance"] = acceptance_to_json(li.instance.acceptance);
    out["portfolio_set"] = portfolio_to_json(li.instance.portfolio);
    out["v0"] = v0_to_json(li.instance.v0);
    out["v1"] = v1_to_json(li.instance.v1);
    json ps;
    for (const auto& [k, v] : li.positions) ps[k] = v;
    out["positions"] = std::move(ps);
    if (!li.expected.is_null() && !li.expected.empty()) out["expected"] = li.expected;
    return out;
}

}  // namespace frictional

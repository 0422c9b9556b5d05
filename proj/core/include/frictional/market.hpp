#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "frictional/acceptance.hpp"
#include "frictional/piecewise_linear.hpp"
#include "frictional/scenario.hpp"

namespace frictional {

using Portfolio = std::vector<double>;

/// Linear form a.x + b over portfolios.
struct LinForm {
    std::vector<double> a;
    double b = 0.0;
    double eval(const Portfolio& x) const {
        double v = b;
        for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * x[i];
        return v;
    }
};

/// Scalar expression over portfolios: a sum of weighted terms, each a linear
/// form, a min or max of linear forms, or a piecewise-linear reshaping of a
/// single coordinate. This is exactly the grammar the fixture markets need.
struct ScalarExpr {
    struct Term {
        enum class Kind { Lin, MinLin, MaxLin, Pwl } kind = Kind::Lin;
        double coef = 1.0;
        LinForm lin;                  // Lin
        std::vector<LinForm> forms;   // MinLin / MaxLin
        int asset = 0;                // Pwl
        PiecewiseLinear curve;        // Pwl
    };
    std::vector<Term> terms;

    double eval(const Portfolio& x) const;
    /// Exact limit of eval(t*x)/t (terminal slopes for Pwl terms, the
    /// expression itself for the positively homogeneous ones).
    double asymptotic(const Portfolio& x) const;
    bool is_affine() const;
    bool is_concave() const;  // sufficient per-term analysis
    bool is_convex() const;
    bool positively_homogeneous() const;
    double lipschitz_bound() const;
    /// Breakpoints of Pwl terms, keyed by asset (for box decompositions).
    std::vector<std::vector<double>> asset_breakpoints(int nassets) const;
};

/// Bid-ask matrix for a currency market: pi[i][j] is the cost, in units of
/// currency i, of one unit of currency j. Requires pi > 0, unit diagonal and
/// the triangle consistency pi_ij <= pi_ik * pi_kj.
struct BidAskMatrix {
    std::vector<std::vector<double>> pi;
    int size() const { return static_cast<int>(pi.size()); }
};

void validate_bid_ask(const BidAskMatrix& m);

/// Vertices of {z : z_1 = 1, z >= 0, pi_ij z_i >= z_j} by facet intersection
/// and feasibility filtering; supported for N <= 4.
std::vector<std::vector<double>> kabanov_build(const BidAskMatrix& m);

enum class PortfolioFamily { Full, NonNeg, Box, Margin, Collateral, Polyhedral };

class AcquisitionRule;  // forward; margin/collateral constraints price through V0

/// Admissible-portfolio constraint set. Membership of the margin/collateral
/// families depends on the instance's acquisition rule, passed by the caller.
class PortfolioSet {
public:
    static PortfolioSet full(int n);
    static PortfolioSet nonneg(int n);
    static PortfolioSet box(std::vector<double> lo, std::vector<double> hi);
    /// Rows a.x >= b (the LinForm's b field is the right-hand side here,
    /// not an intercept).
    static PortfolioSet polyhedral(int n, std::vector<LinForm> rows);
    static PortfolioSet margin(std::vector<double> gammas);
    static PortfolioSet collateral(int n, double gamma);

    PortfolioFamily family() const { return family_; }
    int dim() const { return dim_; }

    bool contains(const Portfolio& x, const AcquisitionRule* v0 = nullptr,
                  double tol = 1e-9) const;
    /// Membership in the recession cone P^inf; closed form for the polyhedral
    /// families, scaling semidecision for margin/collateral with non-homogeneous V0.
    bool asymptotic_contains(const Portfolio& x, const AcquisitionRule* v0 = nullptr,
                             double tol = 1e-9) const;

    bool is_polyhedral() const {
        return family_ != PortfolioFamily::Margin && family_ != PortfolioFamily::Collateral;
    }
    bool is_convex(const AcquisitionRule* v0 = nullptr) const;
    /// True when the family is bounded by construction (finite box).
    bool is_bounded() const;

    const std::vector<double>& box_lo() const { return lo_; }
    const std::vector<double>& box_hi() const { return hi_; }
    const std::vector<LinForm>& rows() const { return rows_; }
    const std::vector<double>& gammas() const { return gammas_; }
    double gamma() const { return gamma_; }

private:
    PortfolioSet(PortfolioFamily f, int n) : family_(f), dim_(n) {}
    PortfolioFamily family_;
    int dim_;
    std::vector<double> lo_, hi_;     // Box
    std::vector<LinForm> rows_;       // Polyhedral
    std::vector<double> gammas_;      // Margin
    double gamma_ = 1.0;              // Collateral
};

enum class V0Form { Separable, Linear, Kabanov, Expr };

/// Acquisition pricing rule V0 (ask side at date 0).
class AcquisitionRule {
public:
    static AcquisitionRule linear(std::vector<double> prices);
    /// Per-asset ask/bid curves on R+ (nondecreasing, zero at zero, ask >= bid);
    /// the aggregate prices long legs on the ask curve and short legs on the bid.
    static AcquisitionRule separable(std::vector<PiecewiseLinear> ask,
                                     std::vector<PiecewiseLinear> bid);
    static AcquisitionRule kabanov(const BidAskMatrix& pi0);
    static AcquisitionRule expr(int n, ScalarExpr e);

    V0Form form() const { return form_; }
    int dim() const { return dim_; }

    double eval(const Portfolio& x) const;
    /// Asymptotic function V0^inf along x; exact for every supported form.
    double asymptotic(const Portfolio& x) const;

    bool is_convex() const;
    bool is_positively_homogeneous() const;
    bool is_affine() const;
    double lipschitz_bound() const;

    /// Combined per-asset curve c_i with c_i(t) = ask_i(t) on t>=0 and
    /// -bid_i(-t) on t<0 (Separable/Linear forms only).
    const std::vector<PiecewiseLinear>& curves() const { return curves_; }
    bool has_curves() const { return form_ == V0Form::Separable || form_ == V0Form::Linear; }
    const std::vector<std::vector<double>>& kabanov_vertices() const { return vertices_; }
    const ScalarExpr& expr_form() const { return expr_; }
    const BidAskMatrix& bid_ask() const { return pi_; }
    const std::vector<double>& prices() const { return prices_; }
    const std::vector<PiecewiseLinear>& ask_curves() const { return ask_; }
    const std::vector<PiecewiseLinear>& bid_curves() const { return bid_; }

private:
    AcquisitionRule(V0Form f, int n) : form_(f), dim_(n) {}
    V0Form form_;
    int dim_;
    std::vector<PiecewiseLinear> curves_;
    std::vector<std::vector<double>> vertices_;
    BidAskMatrix pi_;
    ScalarExpr expr_;
    std::vector<double> prices_;             // Linear form, for serialization
    std::vector<PiecewiseLinear> ask_, bid_; // Separable form, for serialization
};

enum class V1Form { Separable, Linear, Kabanov, Expr };

/// Liquidation pricing rule V1 (bid side at date 1), scenario-valued.
class LiquidationRule {
public:
    /// V1(x) = sum_i x_i * payoff_i.
    static LiquidationRule linear(ScenarioSpace space, std::vector<Position> payoffs);
    /// Long legs liquidate through phi_b against payoff S_b, short legs buy
    /// back through phi_a against S_a; payoffs must be componentwise >= 0.
    static LiquidationRule separable(ScenarioSpace space,
                                     std::vector<PiecewiseLinear> phi_ask,
                                     std::vector<PiecewiseLinear> phi_bid,
                                     std::vector<Position> s_ask,
                                     std::vector<Position> s_bid);
    static LiquidationRule kabanov(ScenarioSpace space, std::vector<BidAskMatrix> pi1);
    static LiquidationRule expr(ScenarioSpace space, int n, std::vector<ScalarExpr> per_outcome);

    V1Form form() const { return form_; }
    int dim() const { return dim_; }
    const ScenarioSpace& space() const { return space_; }

    Position eval(const Portfolio& x) const;
    double eval_outcome(const Portfolio& x, std::size_t omega) const;

    bool is_concave() const;  // componentwise, sufficient analysis
    bool is_affine() const;
    bool is_positively_homogeneous() const;
    double lipschitz_bound() const;  // sup-norm bound on the Jacobian

    /// Per-(asset, outcome) combined scalar curve h_{i,w}(t): valid for
    /// Separable/Linear forms.
    bool has_curves() const { return form_ == V1Form::Separable || form_ == V1Form::Linear; }
    const PiecewiseLinear& curve(std::size_t asset, std::size_t omega) const {
        return curves_[asset * space_.size() + omega];
    }
    const std::vector<std::vector<std::vector<double>>>& kabanov_vertices() const {
        return vertices_;  // per outcome
    }
    const std::vector<BidAskMatrix>& bid_ask() const { return pi_; }
    const std::vector<ScalarExpr>& expr_form() const { return exprs_; }
    const std::vector<Position>& payoffs() const { return payoffs_; }
    const std::vector<PiecewiseLinear>& phi_ask() const { return phi_ask_; }
    const std::vector<PiecewiseLinear>& phi_bid() const { return phi_bid_; }
    const std::vector<Position>& s_ask() const { return s_ask_; }
    const std::vector<Position>& s_bid() const { return s_bid_; }

private:
    LiquidationRule(V1Form f, ScenarioSpace space, int n)
        : form_(f), space_(std::move(space)), dim_(n) {}
    V1Form form_;
    ScenarioSpace space_;
    int dim_;
    std::vector<PiecewiseLinear> curves_;  // asset-major, outcome-minor
    std::vector<std::vector<std::vector<double>>> vertices_;
    std::vector<BidAskMatrix> pi_;
    std::vector<ScalarExpr> exprs_;
    std::vector<Position> payoffs_;                    // Linear form, for serialization
    std::vector<PiecewiseLinear> phi_ask_, phi_bid_;   // Separable form
    std::vector<Position> s_ask_, s_bid_;
};

/// The four market primitives bundled with dimension checks and seeded
/// standing-assumption spot checks (bid-ask spread signs, zero at zero).
struct MarketInstance {
    ScenarioSpace space;
    AcceptanceSet acceptance;
    PortfolioSet portfolio;
    AcquisitionRule v0;
    LiquidationRule v1;
    int nassets = 0;
    std::string name;

    MarketInstance(ScenarioSpace space_, AcceptanceSet acceptance_, PortfolioSet portfolio_,
                   AcquisitionRule v0_, LiquidationRule v1_, std::string name_ = "");

    /// Structural flags used by solver dispatch and the dual engine.
    bool market_convex() const;   // P convex, V0 convex, V1 concave
    bool market_conic() const;    // P cone-like, V0/V1 positively homogeneous
    bool polyhedral_ready() const;
};

}  // namespace frictional

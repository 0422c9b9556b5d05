#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frictional/extended_real.hpp"
#include "frictional/piecewise_linear.hpp"
#include "frictional/scenario.hpp"

namespace frictional {

enum class AcceptanceFamily {
    WorstCase,
    ExpectedShortfall,
    Expectile,
    Utility,
    AdjustedES,
    ValueAtRisk,
    RangeValueAtRisk,
    FixtureUnion,
    Dominance,
};

std::string family_name(AcceptanceFamily f);

/// One linear face of a fixture cell: a.Z >= b, optionally strict (a.Z > b).
/// Strict faces are never relaxed by membership tolerances.
struct CellFace {
    std::vector<double> a;
    double b = 0.0;
    bool strict = false;
};

/// Intersection of faces; a fixture acceptance set is a finite union of cells.
struct UnionCell {
    std::vector<CellFace> faces;
};

enum class Tri { True, False, Unknown };

/// Acceptance sets over a finite scenario space: membership, the family's
/// defining statistic, structural flags, asymptotic-cone membership and a
/// pointedness check. Statistics involving quantile integrals are evaluated
/// by exact sums over atoms.
class AcceptanceSet {
public:
    static AcceptanceSet worst_case(ScenarioSpace space);
    static AcceptanceSet expected_shortfall(ScenarioSpace space, double alpha);
    /// Expectile acceptance at level alpha in (0, 1/2): E[X+]/E[X-] >= (1-alpha)/alpha,
    /// with the convention 0/0 = +inf.
    static AcceptanceSet expectile(ScenarioSpace space, double alpha);
    /// Expected-utility acceptance E[u(X)] >= 0; u piecewise linear,
    /// nondecreasing, u(0) = 0.
    static AcceptanceSet utility(ScenarioSpace space, PiecewiseLinear u);
    /// Adjusted expected shortfall: ES_a(X) <= g(a) for every level a. The
    /// offset g is the piecewise-linear interpolation of (alphas, values) and
    /// is treated as +inf (no constraint) outside [alphas.front(), alphas.back()].
    static AcceptanceSet adjusted_es(ScenarioSpace space, std::vector<double> alphas,
                                     std::vector<double> values);
    static AcceptanceSet value_at_risk(ScenarioSpace space, double alpha);
    static AcceptanceSet range_value_at_risk(ScenarioSpace space, double alpha, double beta);
    /// Dominance set {X : X >= floor}; requires floor <= 0 so that 0 is acceptable.
    static AcceptanceSet dominance(ScenarioSpace space, Position floor);
    /// Finite union of polyhedral cells with per-face open/closed flags and a
    /// stored closed-form asymptotic cone (cells of closed faces).
    static AcceptanceSet fixture_union(ScenarioSpace space, std::vector<UnionCell> cells,
                                       std::vector<UnionCell> asymptotic_cells,
                                       bool cone, bool convex, bool closed);

    AcceptanceFamily family() const { return family_; }
    const ScenarioSpace& space() const { return space_; }

    bool is_cone() const { return cone_; }
    bool is_convex() const { return convex_; }
    bool is_closed() const { return closed_; }
    bool has_statistic() const { return family_ != AcceptanceFamily::FixtureUnion; }

    /// Membership with tolerance: the family's defining inequality relaxed by
    /// tol; strict fixture faces are not relaxed.
    bool contains(const Position& x, double tol = 0.0) const;

    /// The family's defining number (ES_a, q+_a, expectile ratio, E[u(X)],
    /// sup_a(ES_a - g(a)), min X_j, min(X_j - floor_j)). Extended-real because
    /// the expectile ratio may be +inf.
    XReal risk_statistic(const Position& x) const;

    /// Acceptance margin: >= 0 iff acceptable, scaled so that tolerances act
    /// additively (expectile uses the linearised form alpha E[X+] - (1-alpha) E[X-]).
    /// Not defined for fixture unions.
    double margin(const Position& x) const;

    /// Membership in the asymptotic cone A^inf. Conic closed families test
    /// membership directly; convex closed families run the scaling
    /// semidecision 0 + lambda*X in A for lambda = 1, 2, 4, ..., 2^doublings;
    /// fixture unions use their stored closed form.
    bool asymptotic_contains(const Position& x, double tol = 1e-9, int doublings = 40) const;

    struct PointedReport {
        Tri verdict = Tri::Unknown;
        std::optional<Position> witness;  // nonzero X with +-X both in A^inf
    };
    /// Checks A^inf cap (-A^inf) = {0}; closed form per family where known,
    /// else a deterministic sphere-grid semidecision.
    PointedReport pointed() const;

    // Family parameters (valid for the corresponding family only).
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const PiecewiseLinear& utility_fn() const { return utility_; }
    const std::vector<double>& adjusted_alphas() const { return adj_alphas_; }
    const std::vector<double>& adjusted_values() const { return adj_values_; }
    const Position& dominance_floor() const { return floor_; }
    const std::vector<UnionCell>& cells() const { return cells_; }
    const std::vector<UnionCell>& asymptotic_cells() const { return asym_cells_; }

private:
    AcceptanceSet(AcceptanceFamily family, ScenarioSpace space);
    void assert_standing_assumptions() const;
    double adjusted_es_sup(const Position& x) const;
    double g_at(double a) const;  // adjusted-ES offset (piecewise linear on grid)

    AcceptanceFamily family_;
    ScenarioSpace space_;
    bool cone_ = false, convex_ = false, closed_ = true;

    double alpha_ = 0.0, beta_ = 0.0;
    PiecewiseLinear utility_;
    std::vector<double> adj_alphas_, adj_values_;
    Position floor_;
    std::vector<UnionCell> cells_, asym_cells_;
};

/// Membership of Z in a single cell (closed faces relaxed by tol).
bool cell_contains(const UnionCell& cell, const Position& z, double tol);

}  // namespace frictional

#pragma once

#include <optional>
#include <string>

#include "frictional/deals.hpp"
#include "frictional/extended_real.hpp"
#include "frictional/market.hpp"
#include "frictional/polyhedral.hpp"
#include "frictional/search.hpp"

namespace frictional {

enum class SolveStatus { Optimal, FeasibleBound, Infeasible, Unbounded, ResolutionLimit };

std::string status_name(SolveStatus s);

struct SolveReport {
    XReal value = XReal::pos_inf();
    SolveStatus status = SolveStatus::Infeasible;
    /// Present when the infimum is attained and a minimizer was certified.
    std::optional<Portfolio> minimizer;
    /// Improving feasible direction certifying value = -inf.
    std::optional<Portfolio> ray;
    std::string path;  // "polyhedral" | "convex" | "global"
    bool feasible_point_verified = false;
    bool ray_in_l = false;            // unbounded ray re-verified through L-membership
    std::optional<double> gap;        // upper-lower bracket width (convex path)
    bool boundary_hit = false;        // global-path optimum sits on the search box edge
};

/// Risk measure rho(X) = inf{ V0(x) : x in P, X + V1(x) in A }. Dispatch:
/// exact per-cell LPs when the instance is polyhedral, projected
/// supergradient + value bisection on convex instances, seeded grid descent
/// otherwise.
SolveReport rho(const MarketInstance& inst, const Position& X, const SearchConfig& cfg = {});

/// Same solver with the acceptance set replaced by an explicit cell union
/// (used by the min-of-convex decomposition and the quasiconvex dual).
SolveReport rho_with_cells(const MarketInstance& inst, const Position& X,
                           const std::vector<CompiledCell>& cells,
                           const SearchConfig& cfg = {});

/// Exhaustive grid oracle: minimum of V0 over feasible grid points of the
/// box at resolution h; +inf when no grid point is feasible. Grid sizes above
/// 10^8 points are rejected.
XReal rho_bruteforce(const MarketInstance& inst, const Position& X,
                     const std::vector<double>& lo, const std::vector<double>& hi,
                     double h, double feas_tol = 1e-9);

/// Membership of (X, m) in C = {(X,m) : exists x in P, V0(x) <= m, X+V1(x) in A}.
/// The budget is enforced at LP tolerance (not semantically relaxed), so
/// epigraph points whose infimum is unattained are correctly excluded.
bool c_membership(const MarketInstance& inst, const Position& X, double m,
                  const SearchConfig& cfg = {});

/// Cash-additive rho_A(X) = inf{m : X + m 1 in A}; closed forms for the
/// quantile families, monotone bisection otherwise.
XReal rho_cash_additive(const AcceptanceSet& a, const Position& X, double tol = 1e-12);

enum class CheckOutcome { Holds, Fails, PremiseViolation, Inconclusive };

std::string outcome_name(CheckOutcome o);

/// Min-of-convex decomposition: rho restricted to the dominance set of the
/// optimal payoff reproduces rho, and every dominance restriction is >= rho.
CheckOutcome convex_min_decomposition_check(const MarketInstance& inst, const Position& X,
                                            const SearchConfig& cfg = {}, int sampled_y = 60);

/// Price additivity along a frictionless direction z:
/// rho(X + lambda V1(z)) = rho(X) - lambda V0(z). Premises (additivity of
/// V0/V1 along z and P + span{z} = P) are verified by seeded sampling first.
CheckOutcome price_additivity_check(const MarketInstance& inst, const Portfolio& z,
                                    const Position& X, const std::vector<double>& lambdas,
                                    const SearchConfig& cfg = {});

/// Reduction through the zero-cost value set V = {V1(x) : x in P, V0(x) = 0}:
/// rho(X) = V0(z) * inf_{Y in V} rho_A(X + Y) for a cash-like z. Requires a
/// linear V0 (the zero-cost set is then a hyperplane) and the sublevel
/// inclusion {rho_A <= 0} subset A, both premise-checked.
CheckOutcome reduction_check(const MarketInstance& inst, const Portfolio& z,
                             const Position& X, const SearchConfig& cfg = {});

/// Which attainment/lower-semicontinuity hypothesis sets the instance satisfies.
struct AttainmentFlags {
    bool convex_l_linear = false;  // convex data, superlinear V1, L linear
    bool closed_l_trivial = false; // closed data, anti-star V1, L = {0}
    bool compact_portfolio = false;
    bool any() const { return convex_l_linear || closed_l_trivial || compact_portfolio; }
};

AttainmentFlags attainment_flags(const MarketInstance& inst, const SearchConfig& cfg = {});

}  // namespace frictional

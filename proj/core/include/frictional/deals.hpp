#pragma once

#include <optional>

#include "frictional/market.hpp"
#include "frictional/search.hpp"

namespace frictional {

/// Membership in L = {x in P^inf : V0^inf(x) <= tol, V1(x) in A^inf}.
bool l_membership(const MarketInstance& inst, const Portfolio& x, double tol = 1e-7);

/// Acceptable deal: x in P, V0(x) <= tol, V1(x) in A \ {0}. Deterministic
/// grid-plus-candidates scan; a returned witness re-verifies its defining
/// predicates at tol/10. none-found is a semidecision at the scan resolution.
std::optional<Portfolio> find_acceptable_deal(const MarketInstance& inst,
                                              const SearchConfig& cfg = {});

/// Scalable acceptable deal: x in P^inf, V0^inf(x) <= tol, V1(x) in A^inf\{0}.
/// Sphere-restricted when V1 is positively homogeneous, multi-scale otherwise.
std::optional<Portfolio> find_scalable_acceptable_deal(const MarketInstance& inst,
                                                       const SearchConfig& cfg = {});

enum class LStructure { Trivial, Linear, Nonlinear, Unknown };

struct LStructureReport {
    LStructure status = LStructure::Unknown;
    std::optional<Portfolio> member;        // some nonzero element of L
    std::optional<Portfolio> asym_witness;  // x in L with -x not in L (Nonlinear)
};

/// Semidecision on the structure of L at the configured scan resolution.
LStructureReport l_structure(const MarketInstance& inst, const SearchConfig& cfg = {});

struct SufficientConditions {
    Tri acceptance_cone_positive = Tri::Unknown;  // A^inf subset X_+ (+ no scalable arbitrage)
    Tri portfolio_cone_positive = Tri::Unknown;   // P^inf subset R^N_+, V1(R^N_+) subset X_+ (+ ...)
    Tri portfolio_bounded = Tri::Unknown;
    bool no_scalable_arbitrage = false;  // sub-search outcome shared by (i)/(ii)
    bool any_holds() const {
        return acceptance_cone_positive == Tri::True ||
               portfolio_cone_positive == Tri::True || portfolio_bounded == Tri::True;
    }
};

/// Evaluates the three no-scalable-deal sufficient conditions.
SufficientConditions sufficient_conditions_report(const MarketInstance& inst,
                                                  const SearchConfig& cfg = {});

/// Rank check of a linear payoff map (trivial kernel).
bool linear_payoff_kernel_trivial(const LiquidationRule& v1);

struct DealReport {
    std::optional<Portfolio> acceptable;
    std::optional<Portfolio> scalable;
    LStructureReport l;
    SufficientConditions sufficient;
};

DealReport deal_report(const MarketInstance& inst, const SearchConfig& cfg = {});

}  // namespace frictional

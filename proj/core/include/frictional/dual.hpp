#pragma once

#include <optional>
#include <vector>

#include "frictional/risk.hpp"

namespace frictional {

/// Continuous linear functional psi(X) = sum_j weights_j X_j over outcomes.
/// The density of Example-5.2 form is weights_j / p_j.
struct DualElement {
    std::vector<double> weights;
    double operator()(const Position& x) const {
        double v = 0.0;
        for (std::size_t j = 0; j < x.size() && j < weights.size(); ++j)
            v += weights[j] * x[j];
        return v;
    }
};

/// Lower support function sigma_A(psi) = inf{psi(X) : X in A}. Closed forms
/// for the conic families with known dual cones (worst case, expected
/// shortfall, expectile, dominance), exact per-cell LPs for the other
/// polyhedrally representable families, capped grid escalation otherwise
/// (a -inf verdict at escalation level K is a semidecision).
XReal sigma_acceptance(const AcceptanceSet& a, const std::vector<double>& w,
                       const SearchConfig& cfg = {});

/// sigma_{P,V0,V1}(psi) = inf{V0(x) - psi(V1(x)) : x in P}.
XReal sigma_market(const MarketInstance& inst, const std::vector<double>& w,
                   const SearchConfig& cfg = {});

struct DualClass {
    bool in_b = false;      // sigma_A(psi) > -inf
    bool in_d = false;      // additionally sigma_market(psi) > -inf
    bool strict = false;    // psi > 0 on A \ {0}
    bool in_b_str() const { return in_b && strict; }
    bool in_d_str() const { return in_d && strict; }
};

DualClass classify(const MarketInstance& inst, const std::vector<double>& w,
                   const SearchConfig& cfg = {});

/// Affine weak-duality bound sigma_A(psi) + sigma_market(psi) - psi(X).
XReal dual_bound(const MarketInstance& inst, const Position& X,
                 const std::vector<double>& w, const SearchConfig& cfg = {});

struct DualValueReport {
    XReal value = XReal::neg_inf();
    std::vector<double> best_psi;
    DualClass best_class;
    XReal value_d_str = XReal::neg_inf();  // best bound over candidates in D_str
    std::optional<std::vector<double>> best_psi_d_str;
    bool theorem_strict_applicable = false;  // conic pointed A, L trivial
};

/// Maximizes the convex dual bound over psi >= 0 (deterministic candidate set:
/// subgradient seeds, linear-market solutions, simplex grid and seeded points,
/// then coordinate polish). Always a lower bound on rho.
DualValueReport dual_value(const MarketInstance& inst, const Position& X,
                           const SearchConfig& cfg = {});

/// Quasiconvex building block rho(X|psi): the risk measure with acceptance
/// set enlarged by positions the pricing rule values nonpositively,
/// A_psi = A + {psi <= 0}. Scalar closure criterion: psi(Z) <= sup_A psi;
/// psi = 0 reproduces rho itself, and any psi with a positive weight makes
/// A_psi the whole space (the value is then inf_P V0).
XReal rho_given_psi(const MarketInstance& inst, const Position& X,
                    const std::vector<double>& w, const SearchConfig& cfg = {});

struct QuasiconvexDualReport {
    XReal value_b = XReal::neg_inf();
    XReal value_b_str = XReal::neg_inf();
    XReal value_d = XReal::neg_inf();
    XReal value_d_str = XReal::neg_inf();
    std::vector<double> best_psi;  // achieving the sup over B
};

/// sup of rho(X|psi) over psi in B and over the restricted domains
/// B_str, D, D_str (sup over an empty or everywhere--inf domain reports -inf).
QuasiconvexDualReport quasiconvex_dual_value(const MarketInstance& inst, const Position& X,
                                             const SearchConfig& cfg = {});

}  // namespace frictional

#pragma once

#include <optional>
#include <vector>

#include "frictional/acceptance.hpp"
#include "frictional/linear_program.hpp"
#include "frictional/market.hpp"

namespace frictional {

/// Polyhedral representation of one acceptance region over payoff
/// coordinates Z and cell-local auxiliary variables:
/// rows z.Z + aux.u >= b (strict faces marked, never tolerance-relaxed).
struct CompiledCell {
    struct Row {
        std::vector<double> z;
        std::vector<double> aux;
        double b = 0.0;
        bool strict = false;
    };
    int aux_dim = 0;
    std::vector<Row> rows;
    bool monotone = true;  // all z-coefficients >= 0

    void add(std::vector<double> z, std::vector<double> aux, double b, bool strict = false);
};

/// Compile an acceptance set into a finite union of polyhedral cells:
/// direct rows for the worst-case/dominance/fixture families, the
/// Rockafellar-Uryasev epigraph for expected shortfall, hypograph rows for
/// concave-utility and expectile margins, subset cells for value at risk.
/// Returns nullopt for families without an exact finite representation
/// (range value at risk, non-concave utilities that would exceed max_cells).
std::optional<std::vector<CompiledCell>> compile_acceptance(const AcceptanceSet& a,
                                                            int max_cells = 4096);

/// One exact LP whose feasible set is a piece of the original problem; the
/// pointwise minimum over the list equals the original infimum.
struct Subproblem {
    LinearProgram lp;
    int nx = 0;                    // portfolio coordinates occupy vars [0, nx)
    std::vector<int> strict_rows;  // lp row indices that came from strict faces

    /// Append the budget row (objective <= m) used by feasibility queries.
    void add_budget_row(double m);
};

/// Subproblems for inf{ V0(x) : x in P, X + V1(x) in union(cells) }.
/// Exact via epigraph/hypograph reformulation where curvature and cell
/// monotonicity allow it and per-segment box decomposition otherwise;
/// nullopt when the market data cannot be compiled exactly (non-polyhedral
/// portfolio sets, min/max payoff structure against non-monotone cells, ...).
std::optional<std::vector<Subproblem>> build_min_v0_subproblems(
    const MarketInstance& inst, const Position& X, const std::vector<CompiledCell>& cells,
    int max_cells = 4096);

/// Subproblems for inf{ V0(x) - sum_w weights_w V1(x)_w : x in P }.
/// weights must be componentwise >= 0 unless V1 is affine.
std::optional<std::vector<Subproblem>> build_market_support_subproblems(
    const MarketInstance& inst, const std::vector<double>& weights, int max_cells = 4096);

/// Per-cell LPs for inf{ w.Z : Z in A } with variables (Z, aux).
std::vector<Subproblem> build_support_subproblems(const std::vector<CompiledCell>& cells,
                                                  const std::vector<double>& w);

/// True when the subproblem's strict faces admit a strictly feasible point
/// (margin above `threshold`); subproblems without strict rows pass trivially.
bool strict_faces_satisfiable(const Subproblem& sub, double threshold = 1e-7);

/// Margin of x* on the subproblem's strict rows (+inf when none).
double strict_margin_at(const Subproblem& sub, const std::vector<double>& point);

}  // namespace frictional

#pragma once

#include <cstdint>
#include <vector>

#include "frictional/market.hpp"

namespace frictional {

/// Shared knobs for the numeric searches (deal finders, global path,
/// dual multi-starts). Defaults follow the documented battery settings:
/// box [-10,10]^N, 720 circle directions for N = 2, 10^4 seeded directions
/// otherwise, seed 0x5EED.
struct SearchConfig {
    std::vector<double> box_lo, box_hi;  // empty: [-10, 10] per asset
    double grid_h = 1.0 / 64;            // oracle / refinement resolution
    double deal_grid = 0.5;              // coarse grid step for deal scans
    int multistart = 64;
    int sphere_random = 10000;
    std::uint64_t seed = 0x5EEDull;
    double tol = 1e-9;       // LP / certificate tolerance
    double deal_tol = 1e-7;  // nonzero-payoff and zero-cost threshold
    int doublings = 40;      // cap-escalation level for semidecisions
    enum class Path { Auto, Polyhedral, Convex, Global } path = Path::Auto;
    int max_cells = 4096;

    std::vector<double> lo_for(int n) const {
        if (!box_lo.empty()) return box_lo;
        return std::vector<double>(static_cast<std::size_t>(n), -10.0);
    }
    std::vector<double> hi_for(int n) const {
        if (!box_hi.empty()) return box_hi;
        return std::vector<double>(static_cast<std::size_t>(n), 10.0);
    }
};

/// Deterministic direction set used by the deal finders and structure scans:
/// canonical axis/corner directions at sup-norm 1/2 first (so paper-sized
/// witnesses come out in closed form), then market-derived algebraic
/// candidates (zero-cost hyperplanes, payoff kink planes, pulled-back
/// asymptotic faces), then a dense circle (N = 2) or seeded directions.
std::vector<Portfolio> candidate_directions(const MarketInstance& inst,
                                            const SearchConfig& cfg);

/// Deterministic per-start RNG stream splitting.
std::uint64_t split_seed(std::uint64_t base, std::uint64_t index);

}  // namespace frictional

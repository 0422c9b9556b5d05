#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frictional/risk.hpp"

namespace frictional {

enum class PropertyTag {
    Monotone,
    StarShaped,
    PosHomogeneous,
    Convex,
    Quasiconvex,
    Subadditive,
    LscSpotcheck,
};

std::string property_name(PropertyTag t);
PropertyTag property_from_name(const std::string& name);

/// Outcome of one randomized property check. Counterexamples are re-verified:
/// the stored inputs are re-evaluated and must reproduce the violation beyond
/// three times the solver slack before the verdict is reported.
struct PropertyVerdict {
    PropertyTag property = PropertyTag::Monotone;
    enum class Result { Pass, Counterexample, Skipped } result = Result::Pass;
    bool premise_satisfied = false;  // checks run either way; this only annotates
    int trials = 0;
    std::uint64_t seed = 0;
    double slack = 0.0;

    std::vector<Position> inputs;  // counterexample positions
    std::vector<double> values;    // rho at the inputs
    double lambda = 0.0;
    double violation = 0.0;
    bool reverified = false;
};

/// Seeded randomized check of one risk-measure property at solver-aware slack
/// (10x the path tolerance plus grid slack where the global path was used).
PropertyVerdict check_property(const MarketInstance& inst, PropertyTag property,
                               int trials, std::uint64_t seed,
                               const SearchConfig& cfg = {});

/// Premise flags of the property table for this instance.
bool property_premise(const MarketInstance& inst, PropertyTag property);

}  // namespace frictional

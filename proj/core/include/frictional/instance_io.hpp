#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "frictional/market.hpp"

namespace frictional {

/// An instance document: the market primitives, named positions and the
/// optional fixture expectations used by the repro command.
struct LoadedInstance {
    MarketInstance instance;
    std::map<std::string, Position> positions;
    nlohmann::json expected;  // empty when absent
    std::string name;
};

/// Parse and validate an instance document. The schema is strict: unknown
/// keys anywhere are an error, every standing-assumption check re-runs, and
/// declared acceptance flags are cross-checked by seeded sampling.
LoadedInstance load_instance_json(const nlohmann::json& doc);
LoadedInstance load_instance_file(const std::string& path);

/// Serialize back to the document form; load(serialize(x)) is the identity
/// on the in-memory instance and serialize is idempotent byte-for-byte.
nlohmann::json serialize_instance(const LoadedInstance& li);

/// Round to 12 significant digits (report float convention).
double round12(double v);

/// JSON value for an extended real: a number, or "inf"/"-inf" strings.
nlohmann::json json_extended(double v);

}  // namespace frictional

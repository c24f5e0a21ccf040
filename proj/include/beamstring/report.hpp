#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "beamstring/model.hpp"
#include "beamstring/stability.hpp"
#include "beamstring/timestepper.hpp"

namespace beamstring {

nlohmann::json to_json(const PhysicalParams& p);
PhysicalParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IntegratorConfig& cfg);
nlohmann::json to_json(const ConditionMargin& c);
nlohmann::json to_json(const StructuralReport& rep);
nlohmann::json to_json(const FreeParameters& fp);
nlohmann::json to_json(const LambdaConstants& lam);
nlohmann::json to_json(const RateConstants& rc);
nlohmann::json to_json(const Certificate& cert);
nlohmann::json to_json(const BoundVerdict& v);
nlohmann::json to_json(const PointwiseVerdict& v);
nlohmann::json to_json(const SandwichVerdict& v);
nlohmann::json to_json(const DissipationVerdict& v);
nlohmann::json to_json(const RunMetadata& m);

/// Deterministic dump: keys sorted (nlohmann object order), no whitespace,
/// shortest round-trip doubles.
std::string canonical_dump(const nlohmann::json& j);

/// 16-hex-digit FNV-1a of the canonical dump; stamped into CSV headers so a
/// result file can be matched to the exact configuration that produced it.
std::string config_hash(const nlohmann::json& j);

/// One row per feasibility/rate condition with lhs, rhs, absolute and
/// relative margins (structural conditions plus both certificate variants).
void write_margins_csv(const Certificate& cert, std::ostream& out);

}  // namespace beamstring

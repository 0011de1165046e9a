#pragma once

#include <string>

#include <json.hpp>

#include "mindist/oracle.hpp"
#include "mindist/separation.hpp"
#include "mindist/solver.hpp"

namespace mindist {

/// Deterministic serialization: keys in lexicographic order, two-space
/// indentation, floating-point values at 17 significant digits, non-finite
/// values as null. Parsing the output and dumping again reproduces it byte for
/// byte.
std::string canonical_dump(const nlohmann::json& j);

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const DualPoint& dp);
nlohmann::json to_json(const DualDiagnostics& diag);
nlohmann::json to_json(const SeparationReport& rep);
nlohmann::json to_json(const StationaryPoint& sp);
nlohmann::json to_json(const OracleResult& res);

/// Result record: status, dual_point, x_bar {y, z}, pi, pi_d, grad_norm,
/// diagnostics {d, in_sa, in_sa_plus}, residuals and, when present,
/// perturbation_trace and separation.
nlohmann::json certificate_record(const Certificate& cert);

}  // namespace mindist

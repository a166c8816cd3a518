#pragma once

// Scenario configuration: the JSON schema, a validator that reports the path
// of the offending field, and builders for manifolds and drivers.

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "roughman/manifold.hpp"
#include "roughman/roughpath.hpp"

namespace roughman {

/// The published configuration schema (a JSON Schema subset).
const nlohmann::json& config_schema();

struct SchemaError {
  std::string path;  // e.g. "$.driver.p"
  std::string message;
};

/// Validates `doc` against `schema`. Supported keywords: type, enum,
/// properties (other keys are rejected), required, items, minItems,
/// minimum, maximum, exclusiveMinimum, $ref to "#/definitions/<name>".
std::vector<SchemaError> validate_schema(const nlohmann::json& doc, const nlohmann::json& schema);

/// validate_schema against config_schema().
std::vector<SchemaError> validate_config(const nlohmann::json& doc);

/// {"manifold": "plane"|"sphere"|"so3"|"product", ...}
ManifoldPtr manifold_from_json(const nlohmann::json& spec);

/// {"kind": "lift_smooth"|"pure_area"|"spinning_line"|"log_linear", ...}
DriverPtr driver_from_json(const nlohmann::json& spec);

std::vector<std::vector<double>> matrix_from_json(const nlohmann::json& j, const std::string& what);

}  // namespace roughman

#pragma once

#include <json.hpp>
#include <optional>
#include <string>

namespace lsv {

// Shipped JSON schemas for the tool's output formats.
nlohmann::json trace_schema();
nlohmann::json derivation_schema();
nlohmann::json verdict_schema();

// Minimal schema validator covering the keyword subset the shipped schemas
// use: type, enum, properties, required, items, additionalProperties,
// oneOf, minimum. Returns an error description, or nullopt when valid.
std::optional<std::string> validate_json(const nlohmann::json& schema,
                                         const nlohmann::json& value);

}  // namespace lsv

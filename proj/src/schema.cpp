#include "lsv/schema.hpp"

namespace lsv {

using nlohmann::json;

namespace {

const char* const kTraceSchema = R"JSON(
{
  "type": "object",
  "required": ["events", "states"],
  "properties": {
    "protocol": {"type": "string"},
    "events": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["type"],
        "oneOf": [
          {
            "properties": {
              "type": {"enum": ["corrupt"]},
              "ids": {"type": "array", "items": {"type": "string"}}
            },
            "required": ["type", "ids"]
          },
          {
            "properties": {
              "type": {"enum": ["new"]},
              "role": {"type": "integer", "minimum": 1},
              "ids": {"type": "array", "items": {"type": "string"}}
            },
            "required": ["type", "role", "ids"]
          },
          {
            "properties": {
              "type": {"enum": ["send"]},
              "sid": {"type": "integer", "minimum": 1},
              "message": {"type": "string"}
            },
            "required": ["type", "sid", "message"]
          }
        ]
      }
    },
    "states": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["sessions", "knowledge", "corrupted", "universe"],
        "properties": {
          "sessions": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["sid", "role", "ids", "point", "bindings"],
              "properties": {
                "sid": {"type": "integer", "minimum": 1},
                "role": {"type": "integer", "minimum": 1},
                "ids": {"type": "array", "items": {"type": "string"}},
                "point": {"type": "integer", "minimum": 1},
                "bindings": {"type": "object"}
              }
            }
          },
          "knowledge": {"type": "array", "items": {"type": "string"}},
          "corrupted": {"type": "array", "items": {"type": "string"}},
          "universe": {"type": "array", "items": {"type": "string"}}
        }
      }
    }
  }
}
)JSON";

const char* const kDerivationSchema = R"JSON(
{
  "type": "object",
  "required": ["rule", "conclusion", "premises"],
  "properties": {
    "rule": {
      "enum": ["membership", "initial", "pair", "unpair-1", "unpair-2",
               "enc", "dec", "sign", "sig-open"]
    },
    "conclusion": {"type": "string"},
    "premises": {"type": "array"}
  }
}
)JSON";

const char* const kVerdictSchema = R"JSON(
{
  "type": "object",
  "required": ["result", "protocol", "formula", "traces-checked"],
  "properties": {
    "result": {"enum": ["holds-within-bounds", "violated"]},
    "protocol": {"type": "string"},
    "formula": {"type": "string"},
    "traces-checked": {"type": "integer", "minimum": 0},
    "counterexample": {"type": "object"},
    "witness": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["subvar", "bindings"],
        "properties": {
          "subvar": {"type": "string"},
          "bindings": {"type": "object"}
        }
      }
    }
  }
}
)JSON";

bool type_matches(const std::string& type, const json& value) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

std::optional<std::string> check(const json& schema, const json& value,
                                 const std::string& path) {
  if (schema.contains("type")) {
    const std::string type = schema["type"].get<std::string>();
    if (!type_matches(type, value))
      return path + ": expected " + type + ", got " + value.type_name();
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& candidate : schema["enum"])
      if (candidate == value) {
        ok = true;
        break;
      }
    if (!ok) return path + ": value not in enum";
  }
  if (schema.contains("minimum") && value.is_number()) {
    if (value.get<double>() < schema["minimum"].get<double>())
      return path + ": below minimum";
  }
  if (schema.contains("oneOf")) {
    unsigned hits = 0;
    for (const auto& sub : schema["oneOf"])
      if (!check(sub, value, path)) ++hits;
    if (hits != 1)
      return path + ": matched " + std::to_string(hits) + " of oneOf";
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& req : schema["required"])
        if (!value.contains(req.get<std::string>()))
          return path + ": missing required '" + req.get<std::string>() + "'";
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items())
        if (value.contains(key))
          if (auto err = check(sub, value[key], path + "." + key)) return err;
      if (schema.contains("additionalProperties") &&
          schema["additionalProperties"].is_boolean() &&
          !schema["additionalProperties"].get<bool>()) {
        for (const auto& [key, sub] : value.items())
          if (!schema["properties"].contains(key))
            return path + ": unexpected property '" + key + "'";
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const auto& item : value) {
      if (auto err = check(schema["items"], item, path + "[" + std::to_string(i) + "]"))
        return err;
      ++i;
    }
  }
  return std::nullopt;
}

}  // namespace

json trace_schema() { return json::parse(kTraceSchema); }
json derivation_schema() { return json::parse(kDerivationSchema); }
json verdict_schema() { return json::parse(kVerdictSchema); }

std::optional<std::string> validate_json(const json& schema, const json& value) {
  return check(schema, value, "$");
}

}  // namespace lsv

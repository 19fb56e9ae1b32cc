#pragma once

#include <json.hpp>

#include "lsv/deduction.hpp"
#include "lsv/execution.hpp"
#include "lsv/logic.hpp"

namespace lsv {

// JSON shapes are stable and validated by the shipped schemas; terms are
// embedded as canonical strings.

nlohmann::json trace_to_json(const Trace& tr, const std::string& protocol_name = "");
Trace trace_from_json(const nlohmann::json& j);

nlohmann::json derivation_to_json(const Derivation& d);
Derivation derivation_from_json(const nlohmann::json& j);

nlohmann::json verdict_to_json(const Verdict& v, const std::string& protocol_name,
                               const std::string& formula_text);

std::string trace_to_text(const Trace& tr);

}  // namespace lsv

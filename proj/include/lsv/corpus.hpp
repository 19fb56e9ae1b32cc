#pragma once

#include <string>
#include <vector>

#include "lsv/execution.hpp"
#include "lsv/logic.hpp"

namespace lsv {

// Built-in protocols, formulas and traces used by the checker's examples
// command and the acceptance suite.
struct CorpusEntry {
  std::string name;
  enum class Kind { Protocol, Formula, Trace } kind;
  std::string source;      // DSL text (protocols, formulas) or JSON (traces)
  std::string provenance;  // one-line content note
};

const std::vector<CorpusEntry>& corpus_entries();
const CorpusEntry& corpus_get(const std::string& name);  // throws CorpusError

Protocol corpus_protocol(const std::string& name);
Formula corpus_formula(const std::string& name);
Trace corpus_trace(const std::string& name);

// File extension for an entry when exported: .proto.dsl / .formula.dsl /
// .trace.json.
std::string corpus_file_name(const CorpusEntry& entry);

}  // namespace lsv

#include "lsv/corpus.hpp"

#include <json.hpp>

#include "lsv/json_io.hpp"
#include "lsv/parser.hpp"

namespace lsv {

namespace {

const char* const kNsl = R"(# Needham-Schroeder-Lowe, public-key variant, with randomness labels
protocol nsl {
  parties 2
  agents a1 a2 a3
  labeled
  role 1 {
    step init -> enc(<X1@A1, A1>, ek(A2))^ag(1)
    step enc(<X1@A1, X1@A2, A2>, ek(A1))^L1 -> enc(X1@A2, ek(A2))^ag(1)
  }
  role 2 {
    step enc(<X1@A1, A1>, ek(A2))^L1 -> enc(<X1@A1, X1@A2, A2>, ek(A1))^ag(1)
    step enc(X1@A2, ek(A2))^L2 -> stop
  }
}
)";

const char* const kNslSecrecyRig = R"(# NSL plus a witness role that accepts a nonce and stops
protocol nsl-secrecy-rig {
  parties 3
  agents a1 a2 a3
  labeled
  role 1 {
    step init -> enc(<X1@A1, A1>, ek(A2))^ag(1)
    step enc(<X1@A1, X1@A2, A2>, ek(A1))^L1 -> enc(X1@A2, ek(A2))^ag(1)
  }
  role 2 {
    step enc(<X1@A1, A1>, ek(A2))^L1 -> enc(<X1@A1, X1@A2, A2>, ek(A1))^ag(1)
    step enc(X1@A2, ek(A2))^L2 -> stop
  }
  role 3 {
    step X1@A3 -> stop
  }
}
)";

const char* const kExample41 = R"(# One flow: A sends B a nonce and two separately encrypted copies for C
protocol example41 {
  parties 3
  agents a1 a2 a3
  labeled
  role 1 {
    step init -> enc(<X1@A1, enc(X1@A1, ek(A3))^ag(1), enc(X1@A1, ek(A3))^ag(2)>, ek(A2))^ag(3)
  }
  role 2 {
    step enc(<X1@A1, C1@A2, C2@A2>, ek(A2))^L1 -> stop
  }
  role 3 {
  }
}
)";

const char* const kPhi1 = R"(# agreement on the nonce forces equal received ciphertexts
forall LS(1, 2) as s . forall LS(2, 2) as t .
  NC(s(A1)) && NC(s(A2)) && s(X1@A1) = t(X1@A1) -> t(C1@A2) = t(C2@A2)
)";

const char* const kPhi2 = R"(# agreement on the nonce forces distinct received ciphertexts
forall LS(1, 2) as s . forall LS(2, 2) as t .
  NC(s(A1)) && NC(s(A2)) && s(X1@A1) = t(X1@A1) -> t(C1@A2) != t(C2@A2)
)";

const char* const kPhiS = R"(# secrecy via the witness role, exactly as displayed (see phi-s-corrected)
forall LS(1, 1) as s . forall LS(3, 2) as t .
  NC(s(A1)) && NC(s(A2)) -> !(t(X1@A3) = s(X1@A2))
)";

const char* const kPhiSCorrected = R"(# secrecy via the witness role, comparing against the initiator's own nonce
forall LS(1, 1) as s . forall LS(3, 2) as t .
  NC(s(A1)) && NC(s(A2)) -> !(t(X1@A3) = s(X1@A1))
)";

const char* const kPhiA = R"(# weak agreement: a finished responder run has a matching finished initiator run
forall LS(2, 3) as s . exists LS(1, 3) as t .
  NC(s(A1)) && NC(t(A2)) ->
    s(X1@A1) = t(X1@A1) && s(A2) = t(A2) && s(A1) = t(A1)
)";

const char* const kTraceEx22 = R"JSON(
{
  "protocol": "nsl",
  "events": [
    {"type": "corrupt", "ids": ["a3"]},
    {"type": "new", "role": 2, "ids": ["a1", "a2"]},
    {"type": "send", "sid": 1, "message": "enc(<n(a3,1,1), a1>, ek(a2))^adv(1)"}
  ],
  "states": [
    {
      "sessions": [],
      "knowledge": [],
      "corrupted": [],
      "universe": ["a1", "a2", "a3"]
    },
    {
      "sessions": [],
      "knowledge": ["dk(a3)", "sk(a3)"],
      "corrupted": ["a3"],
      "universe": ["a1", "a2", "a3"]
    },
    {
      "sessions": [
        {
          "sid": 1, "role": 2, "ids": ["a1", "a2"], "point": 1,
          "bindings": {"A1": "a1", "A2": "a2", "X1@A2": "n(a2,1,1)"}
        }
      ],
      "knowledge": ["dk(a3)", "sk(a3)"],
      "corrupted": ["a3"],
      "universe": ["a1", "a2", "a3"]
    },
    {
      "sessions": [
        {
          "sid": 1, "role": 2, "ids": ["a1", "a2"], "point": 2,
          "bindings": {
            "A1": "a1", "A2": "a2", "L1": "adv(1)",
            "X1@A1": "n(a3,1,1)", "X1@A2": "n(a2,1,1)"
          }
        }
      ],
      "knowledge": [
        "dk(a3)", "sk(a3)",
        "enc(<n(a3,1,1), n(a2,1,1), a2>, ek(a1))^ag(1)"
      ],
      "corrupted": ["a3"],
      "universe": ["a1", "a2", "a3"]
    }
  ]
}
)JSON";

std::vector<CorpusEntry> build_entries() {
  using K = CorpusEntry::Kind;
  return {
      {"nsl", K::Protocol, kNsl,
       "two-role Needham-Schroeder-Lowe with per-message randomness labels"},
      {"nsl-secrecy-rig", K::Protocol, kNslSecrecyRig,
       "nsl extended with a third, witness role that receives one nonce"},
      {"example41", K::Protocol, kExample41,
       "single-flow protocol whose initiator sends two distinctly-labeled "
       "copies of the same ciphertext"},
      {"phi1", K::Formula, kPhi1,
       "responder's two ciphertexts equal whenever both agree on the nonce"},
      {"phi2", K::Formula, kPhi2,
       "responder's two ciphertexts distinct whenever both agree on the nonce"},
      {"phi-s", K::Formula, kPhiS,
       "witnessed nonce secrecy, as displayed (queries an unbound variable "
       "at LS(1,1); kept verbatim)"},
      {"phi-s-corrected", K::Formula, kPhiSCorrected,
       "witnessed nonce secrecy over the initiator's own nonce"},
      {"phi-a", K::Formula, kPhiA,
       "weak agreement between finished responder and initiator runs"},
      {"trace-ex22", K::Trace, kTraceEx22,
       "three-event nsl run: corrupt an outsider, start a responder, inject "
       "a message built from the corrupted party's nonce"},
  };
}

}  // namespace

const std::vector<CorpusEntry>& corpus_entries() {
  static const std::vector<CorpusEntry> entries = build_entries();
  return entries;
}

const CorpusEntry& corpus_get(const std::string& name) {
  for (const CorpusEntry& e : corpus_entries())
    if (e.name == name) return e;
  throw CorpusError("unknown corpus entry '" + name + "'");
}

Protocol corpus_protocol(const std::string& name) {
  const CorpusEntry& e = corpus_get(name);
  if (e.kind != CorpusEntry::Kind::Protocol)
    throw CorpusError("'" + name + "' is not a protocol");
  return parse_protocol(e.source);
}

Formula corpus_formula(const std::string& name) {
  const CorpusEntry& e = corpus_get(name);
  if (e.kind != CorpusEntry::Kind::Formula)
    throw CorpusError("'" + name + "' is not a formula");
  return parse_formula(e.source);
}

Trace corpus_trace(const std::string& name) {
  const CorpusEntry& e = corpus_get(name);
  if (e.kind != CorpusEntry::Kind::Trace)
    throw CorpusError("'" + name + "' is not a trace");
  return trace_from_json(nlohmann::json::parse(e.source));
}

std::string corpus_file_name(const CorpusEntry& entry) {
  switch (entry.kind) {
    case CorpusEntry::Kind::Protocol: return entry.name + ".proto.dsl";
    case CorpusEntry::Kind::Formula: return entry.name + ".formula.dsl";
    case CorpusEntry::Kind::Trace: return entry.name + ".trace.json";
  }
  return entry.name;
}

}  // namespace lsv

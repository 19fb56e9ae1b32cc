// Acceptance suite: runs every gating criterion end to end and prints one
// pass/fail line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lsv/corpus.hpp"
#include "lsv/generators.hpp"
#include "lsv/json_io.hpp"
#include "lsv/logic.hpp"
#include "lsv/parser.hpp"
#include "lsv/schema.hpp"
#include "lsv/selfcheck.hpp"

using namespace lsv;

namespace {

struct Criterion {
  std::string name;
  std::function<void(std::string& detail)> run;  // throws on failure
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure(what);
}

// ---- 1: the recorded three-event run replays with the exact bindings ----

void criterion_replay(std::string& detail) {
  Protocol nsl = corpus_protocol("nsl");
  Trace tr = corpus_trace("trace-ex22");
  ValidationResult v = is_valid_trace(nsl, tr);
  require(v.ok(), "stored trace failed validation: " + v.reason);

  require(tr.states.size() == 4, "expected four states");
  const LocalState& f2 = tr.states[2].locals.at(1);
  const LocalState& f3 = tr.states[3].locals.at(1);
  require(f2.role == 2 && f2.point == 1, "f2 must sit at (sigma1, 2, 1)");
  require(f3.role == 2 && f3.point == 2, "f3 must sit at (sigma2, 2, 2)");
  require(f2.sigma.to_string() == "A1 = a1, A2 = a2, X1@A2 = n(a2,1,1)",
          "sigma1 printed as: " + f2.sigma.to_string());
  require(f3.sigma.to_string() ==
              "A1 = a1, A2 = a2, L1 = adv(1), X1@A1 = n(a3,1,1), "
              "X1@A2 = n(a2,1,1)",
          "sigma2 printed as: " + f3.sigma.to_string());
  Term reply = Term::enc(
      Term::pair(Term::nonce("a3", 1, 1),
                 Term::pair(Term::nonce("a2", 1, 1), Term::agent("a2"))),
      Term::ek(Term::agent("a1")), Term::ag(1));
  require(tr.states[3].knowledge.terms.count(reply) == 1,
          "responder reply missing from the network knowledge");
  detail = "bindings byte-identical";
}

// ---- 2: label erasure preserves deducibility on 1000 forward-built pairs ----

void criterion_deduction_erasure(std::string& detail) {
  Rng rng(20240229);
  unsigned long accepted = 0, rejected_depth = 0;
  while (accepted < 1000) {
    DerivableCase c = random_derivable_case(rng, 3, rng.range(1, 8));
    if (c.goal.depth() > 4) {
      ++rejected_depth;
      continue;
    }
    ++accepted;
    require(deducible_labeled(c.knowledge, c.goal),
            "forward-built goal not deducible: " + c.goal.to_string());
    KnowledgeSet erased;
    erased.corrupted = c.knowledge.corrupted;
    erased.universe = c.knowledge.universe;
    for (const Term& t : c.knowledge.terms) erased.terms.insert(erase(t));
    require(deducible_unlabeled(erased, erase(c.goal)),
            "erasure broke deducibility of: " + c.goal.to_string());
  }
  detail = "1000/1000 pairs transfer";
}

// ---- 3: the decision procedure agrees exactly with the bounded closure ----

void check_agreement(const KnowledgeSet& ks, unsigned depth,
                     const std::vector<Term>& goals, unsigned long& checks) {
  std::set<Term> closure = closure_bounded(ks, depth);
  for (const Term& m : closure) {
    if (!m.ground()) continue;
    ++checks;
    if (!deducible_labeled(ks, m))
      throw Failure("closure member not deducible: " + m.to_string());
  }
  for (const Term& g : goals) {
    ++checks;
    if (deducible_labeled(ks, g) != (closure.count(g) != 0))
      throw Failure("disagreement on goal: " + g.to_string());
  }
}

// every term of depth <= depth over the given atoms/keys/labels
std::vector<Term> goal_family(const std::vector<Term>& atoms,
                              const std::vector<Term>& enc_keys,
                              const std::vector<Term>& sig_keys,
                              const std::vector<Term>& labels, unsigned depth) {
  std::vector<Term> all = atoms;
  std::size_t level_start = 0;
  for (unsigned d = 1; d <= depth; ++d) {
    std::vector<Term> next;
    std::size_t level_end = all.size();
    (void)level_start;
    for (std::size_t i = 0; i < level_end; ++i) {
      if (all[i].depth() > d - 1) continue;
      for (std::size_t j = 0; j < level_end; ++j) {
        if (all[j].depth() > d - 1) continue;
        next.push_back(Term::pair(all[i], all[j]));
      }
      for (const Term& k : enc_keys)
        for (const Term& l : labels) next.push_back(Term::enc(all[i], k, l));
      for (const Term& k : sig_keys)
        for (const Term& l : labels) next.push_back(Term::sig(all[i], k, l));
    }
    std::set<Term> dedup(all.begin(), all.end());
    for (Term& t : next)
      if (dedup.insert(t).second) all.push_back(std::move(t));
    level_start = level_end;
  }
  return all;
}

void criterion_oracle_agreement(std::string& detail) {
  unsigned long checks = 0;

  // family A: every subset of a six-term pool over two agents, honest,
  // closure depth 2, goals exhaustive to depth 2
  Term a = Term::agent("a"), b = Term::agent("b");
  std::vector<Term> pool = {
      Term::enc(Term::pair(Term::nonce("a", 1, 1), b), Term::ek(b), Term::ag(1)),
      Term::dk(b),
      Term::sig(Term::nonce("a", 1, 2), Term::sk(b), Term::ag(2)),
      Term::enc(Term::dk(a), Term::ek(b), Term::ag(3)),
      Term::pair(Term::nonce("b", 1, 1),
                 Term::enc(Term::nonce("a", 1, 1), Term::ek(a), Term::adv(1))),
      Term::sk(a),
  };
  std::vector<Term> goals_a =
      goal_family({a, Term::nonce("a", 1, 1), Term::dk(b), Term::nonce("b", 1, 1)},
                  {Term::ek(a), Term::ek(b)}, {Term::sk(b)},
                  {Term::ag(1), Term::ag(2), Term::adv(1), Term::adv(2)}, 2);
  for (unsigned mask = 0; mask < 64; ++mask) {
    KnowledgeSet ks;
    ks.universe = {"a", "b"};
    for (unsigned bit = 0; bit < 6; ++bit)
      if (mask & (1u << bit)) ks.terms.insert(pool[bit]);
    check_agreement(ks, 2, goals_a, checks);
  }

  // family A': the same subsets with one corrupted party, closure depth 1
  std::vector<Term> goals_a1 =
      goal_family({a, Term::nonce("a", 1, 1), Term::dk(b), Term::nonce("b", 1, 1)},
                  {Term::ek(a), Term::ek(b)}, {Term::sk(b)},
                  {Term::ag(1), Term::adv(1)}, 1);
  for (unsigned mask = 0; mask < 64; ++mask) {
    KnowledgeSet ks;
    ks.universe = {"a", "b"};
    ks.corrupt("b");
    for (unsigned bit = 0; bit < 6; ++bit)
      if (mask & (1u << bit)) ks.terms.insert(pool[bit]);
    check_agreement(ks, 1, goals_a1, checks);
  }

  // family B: depth-3 closures over a deliberately small basis, goals
  // exhaustive to depth 3
  std::vector<Term> goals_b =
      goal_family({b, Term::dk(b), Term::nonce("b", 1, 1), Term::ek(b)},
                  {Term::ek(b)}, {}, {Term::ag(1), Term::adv(1)}, 3);
  std::vector<KnowledgeSet> panel;
  {
    KnowledgeSet k0;
    k0.universe = {"b"};
    panel.push_back(k0);
    KnowledgeSet k1 = k0;
    k1.terms.insert(Term::dk(b));
    panel.push_back(k1);
    KnowledgeSet k2 = k0;
    k2.terms.insert(
        Term::enc(Term::nonce("b", 1, 1), Term::ek(b), Term::ag(1)));
    panel.push_back(k2);
    KnowledgeSet k3 = k2;
    k3.terms.insert(Term::dk(b));
    panel.push_back(k3);
  }
  for (const KnowledgeSet& ks : panel) check_agreement(ks, 3, goals_b, checks);

  std::ostringstream os;
  os << checks << " agreement checks, zero disagreements";
  detail = os.str();
}

// ---- 4: every enumerated labeled trace erases to a valid unlabeled one ----

void criterion_trace_erasure(std::string& detail) {
  Protocol nsl = corpus_protocol("nsl");
  Protocol erased = erase(nsl);
  Bounds bounds;
  bounds.max_sessions = 2;
  bounds.max_events = 7;
  bounds.msg_depth = 2;
  bounds.corrupt_options = {{}, {"a3"}};
  unsigned long count = 0;
  enumerate_traces(nsl, bounds, [&](const Trace& tr) {
    ++count;
    ValidationResult v = is_valid_trace(erased, erase_trace(tr));
    if (!v.ok())
      throw Failure("erased trace invalid at event " +
                    std::to_string(v.event_index) + ": " + v.reason);
    return true;
  });
  require(count > 100, "suspiciously few traces enumerated");
  std::ostringstream os;
  os << count << " traces, all erase to valid runs";
  detail = os.str();
}

// ---- 5 and 6: the crossing verdicts around ciphertext (dis)equality ----

Bounds example41_bounds() {
  Bounds bounds;
  bounds.max_sessions = 2;
  bounds.max_events = 8;
  bounds.msg_depth = 2;
  bounds.sessions_per_role = 1;
  bounds.session_templates = {{1, {"a1", "a2", "a3"}}, {2, {"a1", "a2", "a3"}}};
  return bounds;
}

void criterion_equality_crossing(std::string& detail) {
  Protocol p = corpus_protocol("example41");
  Formula phi1 = corpus_formula("phi1");
  Bounds bounds = example41_bounds();

  Verdict labeled = satisfies(p, phi1, bounds);
  require(!labeled.holds(), "labeled protocol must violate the formula");
  require(labeled.counterexample.has_value(), "missing counterexample");
  require(is_valid_trace(p, *labeled.counterexample).ok(),
          "counterexample does not replay");
  require(interpret(phi1, *labeled.counterexample) == 0,
          "counterexample does not falsify the formula");
  require(labeled.witness.size() == 2, "expected two quantifier witnesses");
  const Substitution& responder = labeled.witness[1].sigma;
  auto c1 = responder.lookup(Variable::ciphertext(1, 2));
  auto c2 = responder.lookup(Variable::ciphertext(2, 2));
  require(c1 && c2, "responder bindings missing");
  require(*c1 != *c2, "received ciphertexts must differ");
  require(erase(*c1) == erase(*c2), "they must differ in labels only");

  Verdict unlabeled = satisfies(erase(p), erase_formula(phi1), bounds);
  require(unlabeled.holds(), "erased protocol must satisfy the erased formula");
  std::ostringstream os;
  os << "violated with label-only difference; erased holds over "
     << unlabeled.traces_checked << " traces";
  detail = os.str();
}

void criterion_disequality_crossing(std::string& detail) {
  Protocol p = corpus_protocol("example41");
  Formula phi2 = corpus_formula("phi2");
  Bounds bounds = example41_bounds();

  Verdict labeled = satisfies(p, phi2, bounds);
  require(labeled.holds(), "labeled protocol must satisfy the formula");

  Verdict unlabeled = satisfies(erase(p), erase_formula(phi2), bounds);
  require(!unlabeled.holds(), "erased protocol must violate the erased formula");
  require(unlabeled.counterexample.has_value(), "missing counterexample");
  require(unlabeled.witness.size() == 2, "expected two quantifier witnesses");
  const Substitution& responder = unlabeled.witness[1].sigma;
  auto c1 = responder.lookup(Variable::ciphertext(1, 2));
  auto c2 = responder.lookup(Variable::ciphertext(2, 2));
  require(c1 && c2, "responder bindings missing");
  require(*c1 == *c2, "erased counterexample needs equal ciphertexts");
  std::ostringstream os;
  os << "labeled holds over " << labeled.traces_checked
     << " traces; erased violated with equal ciphertexts";
  detail = os.str();
}

// ---- 7: fragment classification of the built-in formulas ----

void criterion_fragment_flags(std::string& detail) {
  require(!is_L2(corpus_formula("phi1")), "phi1 must be outside the fragment");
  for (const char* name : {"phi2", "phi-s", "phi-s-corrected", "phi-a"})
    require(is_L2(corpus_formula(name)),
            std::string(name) + " must be inside the fragment");
  detail = "phi1 out; phi2, phi-s, phi-s-corrected, phi-a in";
}

// ---- 8: no [erased holds, labeled violated] pair over random instances ----

void criterion_soundness_fuzz(std::string& detail) {
  SuiteResult r = run_soundness_suite(987654321, 200);
  require(r.cases >= 200, "fewer than 200 conclusive pairs");
  require(r.failures == 0,
          "forbidden pattern occurred: " +
              (r.notes.empty() ? std::string("?") : r.notes.front()));
  detail = r.notes.empty() ? "ok" : r.notes.back();
}

// ---- 9: witnessed secrecy for the rigged protocol ----

void criterion_secrecy(std::string& detail) {
  Protocol rig = corpus_protocol("nsl-secrecy-rig");
  Formula phi = corpus_formula("phi-s-corrected");
  Bounds bounds;
  bounds.max_sessions = 2;
  bounds.max_events = 7;
  bounds.msg_depth = 2;
  bounds.corrupt_options = {{}, {"a3"}};
  Verdict v = satisfies(rig, phi, bounds);
  require(v.holds(), "secrecy must hold within the bounds");
  std::ostringstream os;
  os << "holds over " << v.traces_checked << " traces";
  detail = os.str();
}

// ---- 10: round trips and schema-valid outputs ----

void criterion_roundtrip_and_schemas(std::string& detail) {
  for (const CorpusEntry& e : corpus_entries()) {
    switch (e.kind) {
      case CorpusEntry::Kind::Protocol: {
        Protocol p = parse_protocol(e.source);
        require(parse_protocol(print_protocol(p)) == p,
                e.name + ": protocol round trip failed");
        break;
      }
      case CorpusEntry::Kind::Formula: {
        Formula f = parse_formula(e.source);
        require(parse_formula(print_formula(f)) == f,
                e.name + ": formula round trip failed");
        break;
      }
      case CorpusEntry::Kind::Trace: {
        Trace tr = corpus_trace(e.name);
        nlohmann::json j = trace_to_json(tr, "nsl");
        require(trace_from_json(j) == tr, e.name + ": trace round trip failed");
        require(!validate_json(trace_schema(), j),
                e.name + ": trace schema validation failed");
        break;
      }
    }
  }

  // derivation and verdict outputs validate against the shipped schemas
  KnowledgeSet ks;
  ks.universe = {"a1", "a2", "a3"};
  ks.corrupt("a3");
  auto d = derive(ks, Term::enc(Term::pair(Term::nonce("a3", 1, 1),
                                           Term::agent("a1")),
                                Term::ek(Term::agent("a2")), Term::adv(1)));
  require(d.has_value(), "derivation missing");
  require(!validate_json(derivation_schema(), derivation_to_json(*d)),
          "derivation schema validation failed");

  Protocol p = corpus_protocol("example41");
  Bounds bounds = example41_bounds();
  for (const char* name : {"phi1", "phi2"}) {
    Verdict v = satisfies(p, corpus_formula(name), bounds);
    nlohmann::json j = verdict_to_json(v, p.name, name);
    require(!validate_json(verdict_schema(), j),
            std::string(name) + ": verdict schema validation failed");
  }
  detail = "all entries round trip; all outputs schema-valid";
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"example-2.2 replay, exact bindings", criterion_replay},
      {"deducibility survives erasure (1000 seeded pairs)",
       criterion_deduction_erasure},
      {"decision procedure == bounded closure oracle",
       criterion_oracle_agreement},
      {"every enumerated trace erases to a valid trace",
       criterion_trace_erasure},
      {"labeled violated / erased holds (ciphertext equality)",
       criterion_equality_crossing},
      {"labeled holds / erased violated (ciphertext disequality)",
       criterion_disequality_crossing},
      {"fragment classification of built-in formulas",
       criterion_fragment_flags},
      {"soundness fuzz: no [erased holds, labeled violated] pair",
       criterion_soundness_fuzz},
      {"witnessed secrecy holds within bounds", criterion_secrecy},
      {"round trips and schema-valid outputs",
       criterion_roundtrip_and_schemas},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    std::string reason;
    try {
      criteria[i].run(detail);
    } catch (const std::exception& e) {
      ok = false;
      reason = e.what();
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    std::printf("[%2zu/10] %s  %-55s (%lld ms)%s%s\n", i + 1,
                ok ? "PASS" : "FAIL", criteria[i].name.c_str(),
                static_cast<long long>(elapsed),
                detail.empty() && reason.empty() ? "" : " -- ",
                ok ? detail.c_str() : reason.c_str());
    if (!ok) ++failures;
  }
  if (failures == 0)
    std::printf("all 10 criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", failures);
  return failures;
}

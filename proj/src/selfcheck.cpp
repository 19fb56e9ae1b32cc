#include "lsv/selfcheck.hpp"

#include <algorithm>
#include <sstream>

#include "lsv/corpus.hpp"
#include "lsv/logic.hpp"

namespace lsv {

namespace {

void note_failure(SuiteResult& r, const std::string& what) {
  ++r.failures;
  if (r.notes.size() < 5) r.notes.push_back(what);
}

KnowledgeSet erase_knowledge(const KnowledgeSet& ks) {
  KnowledgeSet out;
  out.corrupted = ks.corrupted;
  out.universe = ks.universe;
  for (const Term& t : ks.terms) out.terms.insert(erase(t));
  return out;
}

}  // namespace

SuiteResult run_label_erasure_deduction_suite(std::uint64_t seed,
                                              unsigned long cases) {
  SuiteResult r;
  r.name = "label-erasure-deduction";
  Rng rng(seed);
  for (unsigned long i = 0; i < cases; ++i) {
    DerivableCase c = random_derivable_case(rng, 3, rng.range(1, 8));
    ++r.cases;
    if (!deducible_labeled(c.knowledge, c.goal)) {
      note_failure(r, "forward-built goal not labeled-deducible: " +
                          c.goal.to_string());
      continue;
    }
    if (!deducible_unlabeled(erase_knowledge(c.knowledge), erase(c.goal)))
      note_failure(r, "erasure broke deducibility of " + c.goal.to_string());
  }
  return r;
}

SuiteResult run_trace_erasure_suite(std::uint64_t seed,
                                    unsigned long random_protocols) {
  SuiteResult r;
  r.name = "trace-erasure";
  Rng rng(seed);

  auto check_protocol = [&](const Protocol& p, const Bounds& bounds) {
    const unsigned long budget = 50000;  // per protocol
    unsigned long seen = 0;
    Protocol erased = erase(p);
    enumerate_traces(p, bounds, [&](const Trace& tr) {
      if (++seen > budget) return false;
      ++r.cases;
      ValidationResult v = is_valid_trace(erased, erase_trace(tr));
      if (!v.ok())
        note_failure(r, "erased trace invalid under erased " + p.name + ": " +
                            v.reason);
      return true;
    });
  };

  Bounds nsl_bounds;
  nsl_bounds.max_sessions = 1;
  nsl_bounds.max_events = 5;
  nsl_bounds.msg_depth = 2;
  nsl_bounds.corrupt_options = {{}, {"a3"}};
  check_protocol(corpus_protocol("nsl"), nsl_bounds);

  Bounds ex41_bounds;
  ex41_bounds.max_sessions = 2;
  ex41_bounds.max_events = 6;
  ex41_bounds.msg_depth = 2;
  ex41_bounds.session_templates = {{1, {"a1", "a2", "a3"}},
                                   {2, {"a1", "a2", "a3"}}};
  ex41_bounds.explore_failed_sends = true;
  check_protocol(corpus_protocol("example41"), ex41_bounds);

  for (unsigned long i = 0; i < random_protocols; ++i) {
    Protocol p = random_protocol(rng);
    Bounds bounds;
    bounds.max_sessions = 2;
    bounds.max_events = 6;
    bounds.msg_depth = 2;
    bounds.corrupt_options = {{}, {"a2"}};
    bounds.explore_failed_sends = rng.chance(0.5);
    check_protocol(p, bounds);
  }
  return r;
}

SuiteResult run_formula_transfer_suite(std::uint64_t seed,
                                       unsigned long cases) {
  SuiteResult r;
  r.name = "formula-transfer";
  Rng rng(seed);
  while (r.cases < cases) {
    Protocol p = random_protocol(rng);
    Protocol erased = erase(p);
    Bounds bounds;
    bounds.max_sessions = 2;
    bounds.max_events = 5;
    bounds.msg_depth = 2;
    bounds.corrupt_options = {{}, {"a2"}};
    std::vector<Trace> traces;
    enumerate_traces(p, bounds, [&](const Trace& tr) {
      traces.push_back(tr);
      return traces.size() < 400;
    });

    unsigned formulas = rng.range(1, 3);
    for (unsigned i = 0; i < formulas && r.cases < cases; ++i) {
      Formula f = random_l2_formula(rng, p);
      Formula f_erased = erase_formula(f);
      for (const Trace& tr : traces) {
        if (r.cases >= cases) break;
        ++r.cases;
        int unlabeled = interpret(f_erased, erase_trace(tr));
        if (unlabeled == 1 && interpret(f, tr) != 1)
          note_failure(r, "transfer failed for " + f.to_string());
      }
    }
  }
  return r;
}

namespace {

enum class CappedOutcome { Holds, Violated, Budget };

// Bounded satisfaction with a trace budget; Budget means the enumeration
// was cut short and nothing can be concluded.
CappedOutcome capped_satisfies(const Protocol& p, const Formula& f,
                               const Bounds& bounds, unsigned long budget) {
  CappedOutcome out = CappedOutcome::Holds;
  unsigned long seen = 0;
  enumerate_traces(p, bounds, [&](const Trace& tr) {
    if (++seen > budget) {
      out = CappedOutcome::Budget;
      return false;
    }
    if (interpret(f, tr) == 0) {
      out = CappedOutcome::Violated;
      return false;
    }
    return true;
  });
  return out;
}

}  // namespace

SuiteResult run_soundness_suite(std::uint64_t seed, unsigned long cases) {
  SuiteResult r;
  r.name = "soundness";
  Rng rng(seed);
  const unsigned long budget = 50000;
  unsigned long violated_side_seen = 0, skipped = 0, attempts = 0;
  while (r.cases < cases && attempts < cases * 3) {
    ++attempts;
    Protocol p = random_protocol(rng);
    Formula f = random_l2_formula(rng, p);
    Bounds bounds;
    bounds.max_sessions = 2;
    bounds.max_events = 5;
    bounds.msg_depth = 2;
    bounds.corrupt_options = rng.chance(0.5)
                                 ? std::vector<std::vector<std::string>>{{}}
                                 : std::vector<std::vector<std::string>>{{},
                                                                         {"a2"}};
    CappedOutcome labeled = capped_satisfies(p, f, bounds, budget);
    CappedOutcome unlabeled =
        capped_satisfies(erase(p), erase_formula(f), bounds, budget);
    if (labeled == CappedOutcome::Budget || unlabeled == CappedOutcome::Budget) {
      ++skipped;  // inconclusive: counts toward neither side
      continue;
    }
    ++r.cases;
    if (labeled == CappedOutcome::Violated) ++violated_side_seen;
    if (unlabeled == CappedOutcome::Holds && labeled == CappedOutcome::Violated)
      note_failure(r, "unlabeled holds but labeled violated for " +
                          f.to_string());
  }
  r.notes.push_back(std::to_string(violated_side_seen) +
                    " cases exercised the violated side; " +
                    std::to_string(skipped) + " skipped on budget");
  return r;
}

SuiteResult run_algebra_suite(std::uint64_t seed, unsigned long cases) {
  SuiteResult r;
  r.name = "term-algebra";
  Rng rng(seed);
  const std::vector<std::string> agents = {"a1", "a2", "a3"};
  for (unsigned long i = 0; i < cases; ++i) {
    ++r.cases;
    // erasure is homomorphic over application and idempotent
    Substitution sigma = random_substitution(rng, agents, true);
    Term t = [&] {
      PatternCase pc = random_pattern_case(rng, agents, true);
      return pc.pattern;  // a term with variables exercises apply
    }();
    Term applied = apply(sigma, t);
    if (erase(apply(sigma, t)) != apply(erase(sigma), erase(t))) {
      note_failure(r, "erase/apply homomorphism failed on " + t.to_string());
      continue;
    }
    if (erase(erase(applied)) != erase(applied)) {
      note_failure(r, "erase not idempotent on " + applied.to_string());
      continue;
    }

    // match soundness, minimality and erasure compatibility
    PatternCase pc = random_pattern_case(rng, agents, true);
    Term ground = apply(pc.filling, pc.pattern);
    if (!ground.ground()) continue;
    auto theta = match(pc.pattern, ground);
    if (!theta) {
      note_failure(r, "match failed on its own instance: " +
                          pc.pattern.to_string());
      continue;
    }
    if (apply(*theta, pc.pattern) != ground) {
      note_failure(r, "match unsound for " + pc.pattern.to_string());
      continue;
    }
    auto pattern_vars = variables(pc.pattern);
    bool minimal = true;
    for (const auto& [v, img] : *theta)
      if (!pattern_vars.count(v)) minimal = false;
    if (!minimal) {
      note_failure(r, "match bound variables outside the pattern");
      continue;
    }
    auto erased_match = match(erase(pc.pattern), erase(ground));
    if (!erased_match) {
      note_failure(r, "erased instance no longer matches erased pattern");
      continue;
    }
    for (const auto& [v, img] : *erased_match) {
      if (v.sort == VarSort::Label) continue;
      auto orig = theta->lookup(v);
      if (!orig || erase(*orig) != img) {
        note_failure(r, "erased match disagrees with erased bindings");
        break;
      }
    }

    // NNF preserves interpretation on random formulas and traces
    if (i % 4 == 0) {
      Protocol p = random_protocol(rng);
      Formula f = random_l1_formula(rng, p);
      Formula n = nnf(f);
      Bounds bounds;
      bounds.max_sessions = 1;
      bounds.max_events = 4;
      bounds.msg_depth = 1;
      bool mismatch = false;
      enumerate_traces(p, bounds, [&](const Trace& tr) {
        int a, b;
        try {
          a = interpret(f, tr);
        } catch (const EvalError&) {
          try {
            interpret(n, tr);
            mismatch = true;  // one side errors, the other does not
          } catch (const EvalError&) {
          }
          return true;
        }
        try {
          b = interpret(n, tr);
        } catch (const EvalError&) {
          mismatch = true;
          return false;
        }
        if (a != b) mismatch = true;
        return !mismatch;
      });
      if (mismatch) note_failure(r, "nnf changed meaning of " + f.to_string());
    }
  }
  return r;
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed,
                                        unsigned long cases) {
  return {
      run_algebra_suite(seed, cases),
      run_label_erasure_deduction_suite(seed + 1, cases),
      run_trace_erasure_suite(seed + 2, std::min<unsigned long>(cases / 20 + 1, 40)),
      run_formula_transfer_suite(seed + 3, cases),
      run_soundness_suite(seed + 4, std::min<unsigned long>(cases / 4 + 1, 400)),
  };
}

}  // namespace lsv

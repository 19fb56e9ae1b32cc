#include <doctest.h>

#include "lsv/corpus.hpp"
#include "lsv/generators.hpp"
#include "lsv/logic.hpp"
#include "lsv/parser.hpp"

using namespace lsv;

namespace {

Trace ex22() { return corpus_trace("trace-ex22"); }

Formula nc_of(const char* agent) { return Formula::nc(Term::agent(agent)); }

}  // namespace

TEST_CASE("local states collect distinct (sigma, role, point) triples") {
  Trace tr = ex22();
  auto ls22 = local_states(tr, 2, 2);
  REQUIRE(ls22.size() == 1);
  CHECK(ls22[0].sigma.to_string() ==
        "A1 = a1, A2 = a2, L1 = adv(1), X1@A1 = n(a3,1,1), X1@A2 = n(a2,1,1)");
  auto ls21 = local_states(tr, 2, 1);
  REQUIRE(ls21.size() == 1);
  CHECK(ls21[0].sigma.to_string() == "A1 = a1, A2 = a2, X1@A2 = n(a2,1,1)");
  CHECK(local_states(tr, 1, 1).empty());
}

TEST_CASE("interpretation follows the model") {
  Trace tr = ex22();
  CHECK(interpret(nc_of("a3"), tr) == 0);  // corrupted
  CHECK(interpret(nc_of("a1"), tr) == 1);
  CHECK(interpret(nc_of("zz"), tr) == 1);  // any identity outside the event

  Term t = Term::nonce("a1", 1, 1);
  CHECK(interpret(Formula::eq(t, t), tr) == 1);
  CHECK(interpret(Formula::neq(t, t), tr) == 0);

  // NC of a non-identity is 0
  Formula nc_ct = Formula::nc(
      Term::enc(Term::agent("a1"), Term::ek(Term::agent("b")), Term::ag(1)));
  CHECK(interpret(nc_ct, tr) == 0);

  // a universal over an empty range holds vacuously
  Formula vac = Formula::forall_ls(1, 2, "s",
                                   Formula::eq(Term::sub_app("s", Variable::agent(1)),
                                               Term::agent("zz")));
  CHECK(interpret(vac, tr) == 1);
  // while the matching existential fails
  Formula exi = Formula::exists_ls(1, 2, "s", nc_of("a1"));
  CHECK(interpret(exi, tr) == 0);
}

TEST_CASE("quantifiers substitute local-state bindings") {
  Trace tr = ex22();
  // at LS(2,2) the label variable resolved to adversary randomness
  Formula f = Formula::forall_ls(
      2, 2, "s",
      Formula::eq(Term::sub_app("s", Variable::nonce(1, 1)),
                  Term::nonce("a3", 1, 1)));
  CHECK(interpret(f, tr) == 1);
}

TEST_CASE("consulting an unbound variable is an error, not a zero") {
  Trace tr = ex22();
  Formula f = Formula::forall_ls(
      2, 1, "s",
      Formula::eq(Term::sub_app("s", Variable::nonce(1, 1)),  // unbound at p=1
                  Term::nonce("a3", 1, 1)));
  CHECK_THROWS_AS(interpret(f, tr), EvalError);

  Formula open = Formula::nc(Term::sub_app("s", Variable::agent(1)));
  CHECK_THROWS_AS(interpret(open, tr), EvalError);  // not closed
}

TEST_CASE("negation normal form") {
  Term u1 = Term::agent("a1"), u2 = Term::agent("a2");
  Formula inner = Formula::conj(nc_of("a1"), Formula::eq(u1, u2));
  CHECK(nnf(Formula::negation(inner)) ==
        Formula::disj(Formula::negation(nc_of("a1")), Formula::neq(u1, u2)));

  Formula all = Formula::forall_ls(1, 2, "s", Formula::eq(u1, u1));
  CHECK(nnf(Formula::negation(all)) ==
        Formula::exists_ls(1, 2, "s", Formula::neq(u1, u1)));

  CHECK(nnf(Formula::negation(Formula::negation(nc_of("a1")))) == nc_of("a1"));
  CHECK(nnf(Formula::negation(Formula::neq(u1, u2))) == Formula::eq(u1, u2));
}

TEST_CASE("nnf preserves interpretation") {
  Rng rng(31);
  for (int i = 0; i < 60; ++i) {
    Protocol p = random_protocol(rng);
    Formula f = random_l1_formula(rng, p);
    Formula n = nnf(f);
    Bounds bounds;
    bounds.max_sessions = 1;
    bounds.max_events = 3;
    bounds.msg_depth = 1;
    enumerate_traces(p, bounds, [&](const Trace& tr) {
      CHECK(interpret(f, tr) == interpret(n, tr));
      return true;
    });
  }
}

TEST_CASE("the weak-agreement property normalizes to a forall/exists shape") {
  Formula agreement = corpus_formula("phi-a");
  Formula n = nnf(agreement);
  REQUIRE(n.kind() == Formula::Kind::Forall);
  REQUIRE(n.child().kind() == Formula::Kind::Exists);
  // body: a disjunction with negated NC atoms and simple equalities
  const Formula& body = n.child().child();
  CHECK(body.kind() == Formula::Kind::Or);
  CHECK(is_L2(agreement));
}

TEST_CASE("fragment membership") {
  CHECK_FALSE(is_L2(corpus_formula("phi1")));  // equates ciphertext variables
  CHECK(is_L2(corpus_formula("phi2")));        // a disequality is fine
  CHECK(is_L2(corpus_formula("phi-s")));
  CHECK(is_L2(corpus_formula("phi-s-corrected")));
  CHECK(is_L2(corpus_formula("phi-a")));

  // equality between simple terms is allowed ...
  Formula eq_simple = Formula::forall_ls(
      1, 1, "s",
      Formula::eq(Term::sub_app("s", Variable::nonce(1, 1)),
                  Term::nonce("a1", 1, 1)));
  CHECK(is_L2(eq_simple));
  // ... equality between ciphertext variables is not
  Formula eq_cipher = Formula::forall_ls(
      1, 1, "s",
      Formula::eq(Term::sub_app("s", Variable::ciphertext(1, 2)),
                  Term::sub_app("s", Variable::ciphertext(2, 2))));
  CHECK_FALSE(is_L2(eq_cipher));
  // general negation over a compound is not in the fragment either, but its
  // NNF may be: !(NC && NC) normalizes to !NC || !NC
  Formula neg_conj =
      Formula::negation(Formula::conj(nc_of("a1"), nc_of("a2")));
  CHECK(is_L2(neg_conj));
  Formula neg_neq = Formula::negation(
      Formula::neq(Term::sub_app("s", Variable::ciphertext(1, 2)),
                   Term::sub_app("s", Variable::ciphertext(2, 2))));
  CHECK_FALSE(is_L2(Formula::forall_ls(1, 1, "s", neg_neq)));
}

TEST_CASE("random fragment formulas stay in the fragment, even erased") {
  Rng rng(37);
  for (int i = 0; i < 120; ++i) {
    Protocol p = random_protocol(rng);
    Formula f = random_l2_formula(rng, p);
    CHECK(is_L2(f));
    CHECK(is_L2(erase_formula(f)));
  }
}

TEST_CASE("formula erasure is homomorphic") {
  Term labeled_ct =
      Term::enc(Term::agent("a1"), Term::ek(Term::agent("a2")), Term::ag(1));
  Formula f = Formula::nc(labeled_ct);
  CHECK(erase_formula(f) == Formula::nc(erase(labeled_ct)));

  Formula agreement = corpus_formula("phi-a");
  CHECK(erase_formula(agreement) == agreement);  // no labels in its terms

  Formula neq = Formula::neq(labeled_ct, Term::agent("a1"));
  CHECK(erase_formula(neq) ==
        Formula::neq(erase(labeled_ct), Term::agent("a1")));
}

TEST_CASE("ground disequality survives erasure in one direction") {
  Rng rng(41);
  for (int i = 0; i < 300; ++i) {
    Term t1 = random_ground_term(rng, {"a1", "a2"}, 2, true);
    Term t2 = random_ground_term(rng, {"a1", "a2"}, 2, true);
    if (erase(t1) != erase(t2)) CHECK(t1 != t2);
  }
}

TEST_CASE("bounded satisfaction reproduces the crossing verdicts") {
  Protocol p = corpus_protocol("example41");
  Bounds bounds;
  bounds.max_sessions = 2;
  bounds.max_events = 8;
  bounds.msg_depth = 2;
  bounds.sessions_per_role = 1;
  bounds.session_templates = {{1, {"a1", "a2", "a3"}}, {2, {"a1", "a2", "a3"}}};
  Formula phi1 = corpus_formula("phi1");
  Formula phi2 = corpus_formula("phi2");

  Verdict v1 = satisfies(p, phi1, bounds);
  REQUIRE_FALSE(v1.holds());
  REQUIRE(v1.counterexample.has_value());
  // the counterexample replays and falsifies the formula
  CHECK(is_valid_trace(p, *v1.counterexample).ok());
  CHECK(interpret(phi1, *v1.counterexample) == 0);
  // and the responder's two ciphertexts differ exactly in their labels
  REQUIRE(v1.witness.size() == 2);
  const Substitution& responder = v1.witness[1].sigma;
  Term c1 = *responder.lookup(Variable::ciphertext(1, 2));
  Term c2 = *responder.lookup(Variable::ciphertext(2, 2));
  CHECK(c1 != c2);
  CHECK(erase(c1) == erase(c2));

  CHECK(satisfies(erase(p), erase_formula(phi1), bounds).holds());
  CHECK(satisfies(p, phi2, bounds).holds());

  Verdict v2 = satisfies(erase(p), erase_formula(phi2), bounds);
  REQUIRE_FALSE(v2.holds());
  REQUIRE(v2.witness.size() == 2);
  const Substitution& responder2 = v2.witness[1].sigma;
  CHECK(*responder2.lookup(Variable::ciphertext(1, 2)) ==
        *responder2.lookup(Variable::ciphertext(2, 2)));
}

TEST_CASE("weak agreement holds for honest matched sessions") {
  Protocol nsl = corpus_protocol("nsl");
  Formula agreement = corpus_formula("phi-a");
  Bounds bounds;
  bounds.max_sessions = 2;
  bounds.max_events = 8;
  bounds.msg_depth = 2;
  bounds.session_templates = {{1, {"a1", "a2"}}, {2, {"a1", "a2"}}};
  CHECK(satisfies(nsl, agreement, bounds).holds());
}

TEST_CASE("weak agreement fails once a responder can finish alone") {
  // with its partner corrupted the responder completes with no initiator
  // run at all, and the existential over initiator states is empty
  Protocol nsl = corpus_protocol("nsl");
  Formula agreement = corpus_formula("phi-a");
  Bounds bounds;
  bounds.max_sessions = 1;
  bounds.max_events = 4;
  bounds.msg_depth = 2;
  bounds.corrupt_options = {{"a3"}};
  bounds.session_templates = {{2, {"a3", "a2"}}};
  Verdict v = satisfies(nsl, agreement, bounds);
  REQUIRE_FALSE(v.holds());
  const GlobalState& last = v.counterexample->last();
  CHECK(last.locals.at(1).point == 3);  // the responder finished
  CHECK(local_states(*v.counterexample, 1, 3).empty());
}

TEST_CASE("parallel evaluation returns the same verdict") {
  Protocol p = corpus_protocol("example41");
  Bounds bounds;
  bounds.max_sessions = 2;
  bounds.max_events = 8;
  bounds.msg_depth = 2;
  bounds.sessions_per_role = 1;
  bounds.session_templates = {{1, {"a1", "a2", "a3"}}, {2, {"a1", "a2", "a3"}}};
  Formula phi1 = corpus_formula("phi1");
  Verdict sequential = satisfies(p, phi1, bounds, {}, 1);
  Verdict parallel = satisfies(p, phi1, bounds, {}, 4);
  REQUIRE_FALSE(sequential.holds());
  REQUIRE_FALSE(parallel.holds());
  CHECK(*sequential.counterexample == *parallel.counterexample);
  CHECK(sequential.traces_checked == parallel.traces_checked);
}

TEST_CASE("evaluation errors surface with the offending trace attached") {
  Protocol rig = corpus_protocol("nsl-secrecy-rig");
  Formula displayed = corpus_formula("phi-s");  // queries X1@A2 at LS(1,1)
  Bounds bounds;
  bounds.max_sessions = 2;
  bounds.max_events = 6;
  bounds.msg_depth = 2;
  bounds.corrupt_options = {{"a3"}};
  bounds.session_templates = {{1, {"a1", "a2", "a3"}}, {3, {"a1", "a2", "a3"}}};
  CHECK_THROWS_AS(satisfies(rig, displayed, bounds), SatisfactionError);
}

TEST_CASE("transfer for fragment formulas on enumerated traces") {
  Rng rng(43);
  unsigned long checked = 0;
  while (checked < 300) {
    Protocol p = random_protocol(rng);
    Formula f = random_l2_formula(rng, p);
    Formula fe = erase_formula(f);
    Protocol pe = erase(p);
    Bounds bounds;
    bounds.max_sessions = 2;
    bounds.max_events = 4;
    bounds.msg_depth = 1;
    bounds.corrupt_options = {{}, {"a2"}};
    enumerate_traces(p, bounds, [&](const Trace& tr) {
      ++checked;
      if (interpret(fe, erase_trace(tr)) == 1) CHECK(interpret(f, tr) == 1);
      return checked < 300;
    });
    (void)pe;
  }
}

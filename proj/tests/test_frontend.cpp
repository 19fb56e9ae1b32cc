#include <doctest.h>

#include <json.hpp>

#include "lsv/corpus.hpp"
#include "lsv/generators.hpp"
#include "lsv/json_io.hpp"
#include "lsv/parser.hpp"
#include "lsv/schema.hpp"

using namespace lsv;
using nlohmann::json;

TEST_CASE("the protocol parser builds the declared structure") {
  Protocol nsl = corpus_protocol("nsl");
  CHECK(nsl.parties == 2);
  CHECK(nsl.universe == std::vector<std::string>{"a1", "a2", "a3"});
  CHECK(nsl.labeled);
  REQUIRE(nsl.roles.size() == 2);
  REQUIRE(nsl.role(1).steps.size() == 2);

  const RoleStep& first = nsl.role(1).steps[0];
  CHECK_FALSE(first.recv.has_value());  // init
  Term expected_send = Term::enc(
      Term::pair(Term::var(Variable::nonce(1, 1)), Term::var(Variable::agent(1))),
      Term::ek(Term::var(Variable::agent(2))), Term::ag(1));
  CHECK(*first.send == expected_send);

  const RoleStep& last = nsl.role(2).steps[1];
  CHECK_FALSE(last.send.has_value());  // stop
}

TEST_CASE("parse-print round trips") {
  for (const CorpusEntry& e : corpus_entries()) {
    if (e.kind == CorpusEntry::Kind::Protocol) {
      Protocol p = parse_protocol(e.source);
      CHECK(parse_protocol(print_protocol(p)) == p);
    } else if (e.kind == CorpusEntry::Kind::Formula) {
      Formula f = parse_formula(e.source);
      CHECK(parse_formula(print_formula(f)) == f);
    }
  }
}

TEST_CASE("term round trips on random terms") {
  Rng rng(47);
  for (int i = 0; i < 300; ++i) {
    Term t = random_ground_term(rng, {"a1", "a2", "a3"}, 3, rng.chance(0.5));
    CHECK(parse_term(t.to_string()) == t);
  }
  // and on patterns with variables
  for (int i = 0; i < 300; ++i) {
    PatternCase pc = random_pattern_case(rng, {"a1", "a2"}, true);
    CHECK(parse_term(pc.pattern.to_string()) == pc.pattern);
  }
}

TEST_CASE("sort errors are parse errors with positions") {
  CHECK_THROWS_AS(parse_term("enc(a1, sk(A1))^ag(1)"), ParseError);
  try {
    parse_term("enc(a1, sk(A1))^ag(1)");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
    CHECK(e.column >= 1);
  }
  CHECK_THROWS_AS(parse_term("sig(a1, ek(a1))"), ParseError);
  CHECK_THROWS_AS(parse_term("ek(n(a1,1,1))"), ParseError);
  CHECK_THROWS_AS(parse_term("enc(a1, ek(a1))^a2"), ParseError);
}

TEST_CASE("syntax errors carry line and column") {
  const char* bad = R"(protocol p {
  parties 2
  agents a1
  labeled
  role 1 {
    step init -> <a1,>
  }
})";
  try {
    parse_protocol(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 6);
  }
}

TEST_CASE("label-mode violations are rejected") {
  const char* unlabeled_enc = R"(protocol p {
  parties 1
  agents a1
  labeled
  role 1 { step init -> enc(a1, ek(A1)) }
})";
  CHECK_THROWS_AS(parse_protocol(unlabeled_enc), ParseError);

  const char* labeled_enc_in_unlabeled = R"(protocol p {
  parties 1
  agents a1
  unlabeled
  role 1 { step init -> enc(a1, ek(A1))^ag(1) }
})";
  CHECK_THROWS_AS(parse_protocol(labeled_enc_in_unlabeled), ParseError);
}

TEST_CASE("init and stop placement is enforced") {
  const char* init_mid = R"(protocol p {
  parties 1
  agents a1
  labeled
  role 1 {
    step a1 -> a1
    step init -> a1
  }
})";
  CHECK_THROWS_AS(parse_protocol(init_mid), ParseError);

  const char* stop_mid = R"(protocol p {
  parties 1
  agents a1
  labeled
  role 1 {
    step init -> stop
    step a1 -> a1
  }
})";
  CHECK_THROWS_AS(parse_protocol(stop_mid), ParseError);
}

TEST_CASE("formula parsing binds substitution variables") {
  Formula f = parse_formula("forall LS(1, 2) as s . s(X1@A1) = s(X1@A1)");
  CHECK(f.kind() == Formula::Kind::Forall);
  CHECK(free_subvars(f).empty());

  CHECK_THROWS_AS(parse_formula("t(X1@A1) = t(X1@A1)"), ParseError);
  try {
    parse_formula("forall LS(1, 1) as s . t(X1@A1) = s(X1@A1)");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unbound") != std::string::npos);
  }
}

TEST_CASE("malformed quantifier indices are syntax errors") {
  CHECK_THROWS_AS(parse_formula("forall LS(x, 1) as s . NC(s(A1))"), ParseError);
  CHECK_THROWS_AS(parse_formula("forall LS(1) as s . NC(s(A1))"), ParseError);
  CHECK_THROWS_AS(parse_formula("forall LS(1, 2) s . NC(s(A1))"), ParseError);
}

TEST_CASE("implication desugars") {
  Formula f = parse_formula("forall LS(1, 1) as s . NC(s(A1)) -> NC(s(A2))");
  const Formula& body = f.child();
  REQUIRE(body.kind() == Formula::Kind::Or);
  CHECK(body.child(0).kind() == Formula::Kind::Not);
}

TEST_CASE("trace JSON round trips and validates against the schema") {
  Trace tr = corpus_trace("trace-ex22");
  json j = trace_to_json(tr, "nsl");
  CHECK(trace_from_json(j) == tr);
  CHECK_FALSE(validate_json(trace_schema(), j).has_value());

  json broken = j;
  broken["events"][0].erase("ids");
  CHECK(validate_json(trace_schema(), broken).has_value());
}

TEST_CASE("derivation JSON round trips and validates") {
  KnowledgeSet ks;
  ks.universe = {"a1", "a2", "a3"};
  ks.corrupt("a3");
  Term goal = Term::enc(Term::pair(Term::nonce("a3", 1, 1), Term::agent("a1")),
                        Term::ek(Term::agent("a2")), Term::adv(1));
  auto d = derive(ks, goal);
  REQUIRE(d.has_value());
  json j = derivation_to_json(*d);
  CHECK_FALSE(validate_json(derivation_schema(), j).has_value());
  Derivation back = derivation_from_json(j);
  CHECK(check_derivation(ks, back, goal));
}

TEST_CASE("verdict JSON validates against the schema") {
  Protocol p = corpus_protocol("example41");
  Bounds bounds;
  bounds.max_sessions = 2;
  bounds.max_events = 8;
  bounds.msg_depth = 2;
  bounds.sessions_per_role = 1;
  bounds.session_templates = {{1, {"a1", "a2", "a3"}}, {2, {"a1", "a2", "a3"}}};
  Verdict violated = satisfies(p, corpus_formula("phi1"), bounds);
  json j = verdict_to_json(violated, p.name, "phi1");
  CHECK_FALSE(validate_json(verdict_schema(), j).has_value());
  CHECK(j["result"] == "violated");
  // the embedded counterexample is itself schema-valid
  CHECK_FALSE(validate_json(trace_schema(), j["counterexample"]).has_value());

  Verdict holds = satisfies(p, corpus_formula("phi2"), bounds);
  json h = verdict_to_json(holds, p.name, "phi2");
  CHECK_FALSE(validate_json(verdict_schema(), h).has_value());
  CHECK(h["result"] == "holds-within-bounds");
}

TEST_CASE("every enumerated trace serializes to schema-valid JSON") {
  Protocol nsl = corpus_protocol("nsl");
  Bounds bounds;
  bounds.max_sessions = 1;
  bounds.max_events = 3;
  bounds.msg_depth = 2;
  bounds.corrupt_options = {{"a3"}};
  enumerate_traces(nsl, bounds, [&](const Trace& tr) {
    json j = trace_to_json(tr, nsl.name);
    CHECK_FALSE(validate_json(trace_schema(), j).has_value());
    CHECK(trace_from_json(j) == tr);
    return true;
  });
}

TEST_CASE("the schema validator notices shape violations") {
  json schema = {{"type", "object"},
                 {"required", {"a"}},
                 {"properties", {{"a", {{"type", "integer"}, {"minimum", 1}}}}}};
  CHECK_FALSE(validate_json(schema, json{{"a", 3}}).has_value());
  CHECK(validate_json(schema, json{{"a", "x"}}).has_value());
  CHECK(validate_json(schema, json{{"a", 0}}).has_value());
  CHECK(validate_json(schema, json::object()).has_value());
  CHECK(validate_json(schema, json::array()).has_value());
}

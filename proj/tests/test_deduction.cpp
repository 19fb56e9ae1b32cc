#include <doctest.h>

#include <algorithm>

#include "lsv/deduction.hpp"
#include "lsv/generators.hpp"

using namespace lsv;

namespace {

KnowledgeSet corrupted_a3() {
  KnowledgeSet ks;
  ks.universe = {"a1", "a2", "a3"};
  ks.corrupt("a3");
  return ks;
}

Term ex22_message() {
  return Term::enc(Term::pair(Term::nonce("a3", 1, 1), Term::agent("a1")),
                   Term::ek(Term::agent("a2")), Term::adv(1));
}

}  // namespace

TEST_CASE("the injected responder message is deducible after corruption") {
  CHECK(deducible_labeled(corrupted_a3(), ex22_message()));
}

TEST_CASE("membership axiom") {
  KnowledgeSet ks;
  ks.universe = {"b"};
  Term m = Term::enc(Term::agent("b"), Term::ek(Term::agent("b")), Term::ag(9));
  ks.terms.insert(m);
  CHECK(deducible_labeled(ks, m));
}

TEST_CASE("signatures give up their message") {
  KnowledgeSet ks;
  ks.universe = {"b"};
  Term m = Term::pair(Term::nonce("b", 1, 1), Term::agent("b"));
  ks.terms.insert(Term::sig(m, Term::sk(Term::agent("b")), Term::ag(7)));
  CHECK(deducible_labeled(ks, m));

  DeductionOptions no_open;
  no_open.sig_open = false;
  CHECK_FALSE(deducible_labeled(ks, m, no_open));
}

TEST_CASE("agent labels cannot be synthesized") {
  KnowledgeSet ks;
  ks.universe = {"b"};
  Term b = Term::agent("b");
  CHECK_FALSE(deducible_labeled(ks, Term::enc(b, Term::ek(b), Term::ag(1))));
  CHECK(deducible_labeled(ks, Term::enc(b, Term::ek(b), Term::adv(1))));
}

TEST_CASE("adversary label index is free") {
  KnowledgeSet ks;
  ks.universe = {"b"};
  Term b = Term::agent("b");
  for (unsigned i : {1u, 2u, 17u, 400u})
    CHECK(deducible_labeled(ks, Term::enc(b, Term::ek(b), Term::adv(i))));
}

TEST_CASE("unlabeled deduction") {
  KnowledgeSet erased;
  erased.universe = {"a1", "a2", "a3"};
  erased.corrupt("a3");
  CHECK(deducible_unlabeled(erased, erase(ex22_message())));

  KnowledgeSet pairset;
  pairset.universe = {"b"};
  Term m1 = Term::nonce("b", 1, 1), m2 = Term::nonce("b", 2, 1);
  pairset.terms.insert(Term::pair(m1, m2));
  CHECK(deducible_unlabeled(pairset, m2));

  KnowledgeSet enc_parts;
  enc_parts.universe = {"b"};
  Term m = Term::nonce("a9", 1, 1);  // an outsider nonce, known directly
  enc_parts.terms.insert(m);
  CHECK(deducible_unlabeled(enc_parts, Term::enc(m, Term::ek(Term::agent("b")))));
}

TEST_CASE("decryption requires the decryption key, transitively") {
  KnowledgeSet ks;
  ks.universe = {"a", "b"};
  Term secret = Term::nonce("a", 1, 1);
  // secret under ek(b); dk(b) under ek(a); dk(a) known
  ks.terms.insert(Term::enc(secret, Term::ek(Term::agent("b")), Term::ag(1)));
  ks.terms.insert(Term::enc(Term::dk(Term::agent("b")),
                            Term::ek(Term::agent("a")), Term::ag(2)));
  CHECK_FALSE(deducible_labeled(ks, secret));
  ks.terms.insert(Term::dk(Term::agent("a")));
  CHECK(deducible_labeled(ks, secret));
}

TEST_CASE("derive returns checkable witnesses") {
  KnowledgeSet ks = corrupted_a3();

  SUBCASE("membership leaf") {
    Term m = Term::nonce("a9", 3, 3);
    ks.terms.insert(m);
    auto d = derive(ks, m);
    REQUIRE(d.has_value());
    CHECK(d->rule == DeductionRule::Membership);
    CHECK(d->premises.empty());
    CHECK(check_derivation(ks, *d, m));
  }

  SUBCASE("the injected message yields pair + enc over initial leaves") {
    auto d = derive(ks, ex22_message());
    REQUIRE(d.has_value());
    CHECK(d->rule == DeductionRule::Enc);
    REQUIRE(d->premises.size() == 2);
    CHECK(d->premises[0].rule == DeductionRule::Initial);  // ek(a2)
    CHECK(d->premises[1].rule == DeductionRule::Pair);
    CHECK(check_derivation(ks, *d, ex22_message()));
  }

  SUBCASE("secret decryption keys are underivable") {
    KnowledgeSet empty;
    empty.universe = {"a"};
    CHECK_FALSE(derive(empty, Term::dk(Term::agent("a"))).has_value());
    CHECK_FALSE(deducible_labeled(empty, Term::dk(Term::agent("a"))));
  }

  SUBCASE("tampered witnesses are rejected") {
    auto d = derive(ks, ex22_message());
    REQUIRE(d.has_value());
    Derivation bad = *d;
    bad.premises[0] =
        Derivation{DeductionRule::Initial, Term::dk(Term::agent("a1")), {}};
    CHECK_FALSE(check_derivation(ks, bad, ex22_message()));
    // and under the wrong goal
    CHECK_FALSE(check_derivation(ks, *d, Term::agent("a1")));
  }
}

TEST_CASE("derivations agree with the decision procedure") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    DerivableCase c = random_derivable_case(rng, 3, rng.range(1, 6));
    auto d = derive(c.knowledge, c.goal);
    REQUIRE(d.has_value());
    CHECK(check_derivation(c.knowledge, *d, c.goal));
  }
}

TEST_CASE("derive succeeds exactly when the relation holds") {
  Rng rng(53);
  unsigned derivable = 0;
  for (int i = 0; i < 400; ++i) {
    DerivableCase c = random_derivable_case(rng, 2, rng.range(1, 4));
    Term goal = random_ground_term(rng, {"a1", "a2"}, rng.range(0, 3), true);
    bool decided = deducible_labeled(c.knowledge, goal);
    auto witness = derive(c.knowledge, goal);
    CHECK(witness.has_value() == decided);
    if (witness) {
      ++derivable;
      CHECK(check_derivation(c.knowledge, *witness, goal));
    }
    // and the unlabeled relation agrees with its own witness extraction
    KnowledgeSet erased;
    erased.corrupted = c.knowledge.corrupted;
    erased.universe = c.knowledge.universe;
    for (const Term& t : c.knowledge.terms) erased.terms.insert(erase(t));
    Term erased_goal = erase(goal);
    auto unlabeled = derive(erased, erased_goal, DeductionMode::Unlabeled);
    CHECK(unlabeled.has_value() == deducible_unlabeled(erased, erased_goal));
    if (unlabeled)
      CHECK(check_derivation(erased, *unlabeled, erased_goal,
                             DeductionMode::Unlabeled));
  }
  CHECK(derivable > 30);  // the random goals do hit both outcomes
}

TEST_CASE("bounded closure basics") {
  KnowledgeSet ks;
  ks.universe = {"b"};
  auto c0 = closure_bounded(ks, 0);
  CHECK(c0.count(Term::agent("b")));
  CHECK(c0.count(Term::ek(Term::agent("b"))));
  CHECK(c0.count(Term::vk(Term::agent("b"))));
  CHECK_FALSE(c0.count(Term::dk(Term::agent("b"))));

  KnowledgeSet withpair;
  withpair.universe = {"b"};
  Term x = Term::nonce("z", 1, 1), y = Term::nonce("z", 2, 1);
  withpair.terms.insert(Term::pair(x, y));
  auto c1 = closure_bounded(withpair, 1);
  CHECK(c1.count(x));
  CHECK(c1.count(y));

  // monotone in the depth bound
  auto c2 = closure_bounded(withpair, 2);
  CHECK(c1.size() < c2.size());
  CHECK(std::includes(c2.begin(), c2.end(), c1.begin(), c1.end()));
}

TEST_CASE("monotonicity in the knowledge set") {
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    DerivableCase c = random_derivable_case(rng, 2, rng.range(1, 5));
    KnowledgeSet bigger = c.knowledge;
    bigger.terms.insert(random_ground_term(rng, {"a1", "a2"}, 2, true));
    CHECK(deducible_labeled(c.knowledge, c.goal));
    CHECK(deducible_labeled(bigger, c.goal));
  }
}

TEST_CASE("closure membership agrees with the decision procedure (small)") {
  KnowledgeSet ks;
  ks.universe = {"a", "b"};
  ks.terms.insert(Term::enc(Term::nonce("a", 1, 1), Term::ek(Term::agent("b")),
                            Term::ag(1)));
  ks.terms.insert(Term::dk(Term::agent("b")));
  auto closure = closure_bounded(ks, 2);
  for (const Term& m : closure) CHECK(deducible_labeled(ks, m));
}

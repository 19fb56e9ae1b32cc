#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lsv/term.hpp"

namespace lsv {

enum class DeductionMode { Labeled, Unlabeled };

struct DeductionOptions {
  // The message-recovery rule for signatures can be switched off; the
  // default keeps it.
  bool sig_open = true;
};

// Adversary knowledge: the network messages H, the corrupted identities,
// and the universe of agent identities in play. Corrupting an identity
// adds its dk/sk to H and makes every nonce it generates derivable.
struct KnowledgeSet {
  std::set<Term> terms;
  std::set<std::string> corrupted;
  std::set<std::string> universe;

  void corrupt(const std::string& id);
  KnowledgeSet with_term(const Term& t) const;

  bool operator==(const KnowledgeSet&) const = default;
};

// Analysis closure of a knowledge set: everything obtainable by unpairing,
// decrypting with available dk's, and opening signatures. Remembers how
// each element was obtained so that derivations can be replayed.
struct Saturation {
  struct Origin {
    enum class Via { Member, Initial, Unpair1, Unpair2, Dec, SigOpen } via;
    std::vector<Term> premises;  // source terms already in the closure
  };
  std::set<Term> closed;
  std::map<Term, Origin> origins;

  bool contains(const Term& t) const { return closed.count(t) != 0; }
};

Saturation analyze(const KnowledgeSet& s, const DeductionOptions& opts = {});

// Synthesis check against a precomputed analysis closure. Exposed so that
// callers evaluating many goals over one knowledge set can share the
// saturation.
bool synthesizable(const Saturation& analysis, const KnowledgeSet& s,
                   const Term& m, DeductionMode mode,
                   const DeductionOptions& opts = {});

// Decides S |-l m (labeled deduction). m must be ground.
bool deducible_labeled(const KnowledgeSet& s, const Term& m,
                       const DeductionOptions& opts = {});

// Decides S |- m over the unlabeled algebra; synthesized ciphertexts and
// signatures carry no label constraint.
bool deducible_unlabeled(const KnowledgeSet& s, const Term& m,
                         const DeductionOptions& opts = {});

enum class DeductionRule {
  Membership,
  Initial,
  Pair,
  Unpair1,
  Unpair2,
  Enc,
  Dec,
  Sign,
  SigOpen,
};

const char* rule_name(DeductionRule r);

// Checkable proof tree: each node concludes its term from its premises by
// one deduction rule; leaves are membership or initial-knowledge axioms.
struct Derivation {
  DeductionRule rule;
  Term conclusion;
  std::vector<Derivation> premises;

  std::string to_text() const;  // indented tree, one node per line
};

std::optional<Derivation> derive(const KnowledgeSet& s, const Term& m,
                                 DeductionMode mode = DeductionMode::Labeled,
                                 const DeductionOptions& opts = {});

// Re-checks a derivation node by node against the rules; true only if every
// node is justified and the root concludes `goal`.
bool check_derivation(const KnowledgeSet& s, const Derivation& d,
                      const Term& goal,
                      DeductionMode mode = DeductionMode::Labeled,
                      const DeductionOptions& opts = {});

// Brute-force bounded closure, used as an independent oracle: every term of
// message depth <= depth derivable from s, where synthesized ciphertexts and
// signatures carry the canonical adversary labels adv(1)..adv(depth) and
// corrupted nonces range over indices 1..max(depth,1). Implemented as a
// naive fixpoint, deliberately sharing no code with deducible_labeled.
std::set<Term> closure_bounded(const KnowledgeSet& s, unsigned depth,
                               const DeductionOptions& opts = {});

}  // namespace lsv

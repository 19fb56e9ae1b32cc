#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lsv/execution.hpp"
#include "lsv/term.hpp"

namespace lsv {

// Trace-property formulas: the non-corruption predicate, (in)equality
// atoms over formula terms, classical connectives, and quantifiers over
// the local states of role i at control point p. Implication is sugar and
// is desugared on construction.
class Formula {
 public:
  enum class Kind : std::uint8_t { Nc, Eq, Neq, Not, And, Or, Forall, Exists };

  static Formula nc(Term t);
  static Formula eq(Term lhs, Term rhs);
  static Formula neq(Term lhs, Term rhs);
  static Formula negation(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);  // !a || b
  static Formula forall_ls(unsigned role, unsigned point, std::string subvar,
                           Formula body);
  static Formula exists_ls(unsigned role, unsigned point, std::string subvar,
                           Formula body);

  Kind kind() const { return rep_->kind; }
  const Term& lhs() const { return *rep_->t1; }           // Nc / Eq / Neq
  const Term& rhs() const { return *rep_->t2; }           // Eq / Neq
  const Formula& child(std::size_t i = 0) const { return rep_->children[i]; }
  std::size_t arity() const { return rep_->children.size(); }
  unsigned role() const { return rep_->role; }
  unsigned point() const { return rep_->point; }
  const std::string& subvar() const { return rep_->subvar; }

  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }

  std::string to_string() const;

 private:
  struct Rep {
    Kind kind;
    std::optional<Term> t1, t2;
    std::vector<Formula> children;
    unsigned role = 0, point = 0;
    std::string subvar;
  };
  explicit Formula(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static Formula make(Rep rep);
  std::shared_ptr<const Rep> rep_;
};

std::ostream& operator<<(std::ostream& os, const Formula& f);

// Substitution meta-variables not bound by any enclosing quantifier.
std::vector<std::string> free_subvars(const Formula& f);

// The distinct local states (sigma, i, p) occurring anywhere in the trace,
// in deterministic (substitution) order.
std::vector<LocalState> local_states(const Trace& tr, unsigned role,
                                     unsigned point);

// Truth value of a closed formula on a trace, exactly by the model's
// interpretation: NC holds of agent identities absent from the corrupt
// event, equality is syntactic on ground terms, quantifiers range over
// local_states. Consulting an unbound variable raises EvalError.
int interpret(const Formula& f, const Trace& tr);

// Negation normal form; interpretation-equivalent on every trace.
Formula nnf(const Formula& f);

// Membership in the restricted fragment: after NNF, negation appears only
// on NC atoms and equality only between simple terms, where a substitution
// application counts as simple iff its variable has sort agent or nonce.
bool is_L2(const Formula& f);

// Homomorphic label erasure over all atom terms.
Formula erase_formula(const Formula& f);

struct WitnessBinding {
  std::string subvar;
  Substitution sigma;
};

struct Verdict {
  enum class Kind { HoldsWithinBounds, Violated } kind;
  std::optional<Trace> counterexample;
  std::vector<WitnessBinding> witness;  // failing quantifier assignments
  unsigned long traces_checked = 0;

  bool holds() const { return kind == Kind::HoldsWithinBounds; }
};

// An EvalError that occurred on a specific enumerated trace.
struct SatisfactionError : EvalError {
  SatisfactionError(const std::string& what, Trace trace)
      : EvalError(what), trace(std::move(trace)) {}
  Trace trace;
};

// Bounded satisfaction: enumerates valid traces and evaluates f on each.
// Returns the first violation in enumeration order, or holds-within-bounds.
// jobs > 1 evaluates batches of traces concurrently; the reported
// counterexample is still the enumeration-order first.
Verdict satisfies(const Protocol& p, const Formula& f, const Bounds& bounds,
                  const DeductionOptions& opts = {}, unsigned jobs = 1);

// Best-effort explanation of a violation: the chain of universally
// quantified bindings that falsifies nnf(f) on tr.
std::vector<WitnessBinding> falsifying_assignments(const Formula& f,
                                                   const Trace& tr);

}  // namespace lsv

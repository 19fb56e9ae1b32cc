#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "lsv/errors.hpp"

namespace lsv {

// Sorts of the message algebra. TermTop is the supersort of everything
// except SigKey and DecKey.
enum class Sort : std::uint8_t {
  AgentId,
  SigKey,
  VerKey,
  EncKey,
  DecKey,
  Nonce,
  Label,
  Ciphertext,
  Signature,
  Pair,
  TermTop,
};

std::string sort_name(Sort s);

enum class KeyKind : std::uint8_t { Enc, Dec, Sig, Ver };
enum class LabelKind : std::uint8_t { Agent, Adversary };

enum class VarSort : std::uint8_t { Agent, Nonce, Ciphertext, Signature, Label };

// Sorted variables. Agent variables are A1..Ak; nonce / ciphertext /
// signature variables are owned by an agent variable (X1@A1, C2@A2, S1@A1);
// label variables are L1, L2, ...
struct Variable {
  VarSort sort = VarSort::Agent;
  unsigned owner = 0;  // owning agent-variable index, 0 when unowned
  unsigned index = 0;

  static Variable agent(unsigned i) { return {VarSort::Agent, 0, i}; }
  static Variable nonce(unsigned j, unsigned owner) {
    return {VarSort::Nonce, owner, j};
  }
  static Variable ciphertext(unsigned j, unsigned owner) {
    return {VarSort::Ciphertext, owner, j};
  }
  static Variable signature(unsigned j, unsigned owner) {
    return {VarSort::Signature, owner, j};
  }
  static Variable label(unsigned j) { return {VarSort::Label, 0, j}; }

  std::string name() const;
  auto operator<=>(const Variable&) const = default;
};

// Immutable term of the (optionally labeled) message algebra. A label slot
// on enc/sig nodes is either absent (unlabeled mode) or holds a term of
// sort Label: a label literal ag(i)/adv(j) or a label variable. Formula
// terms may additionally contain substitution applications s(x).
class Term {
 public:
  enum class Kind : std::uint8_t {
    Var,
    Agent,
    Key,
    Nonce,
    Pair,
    Enc,
    Sig,
    Label,
    SubApp,
  };

  struct VarN;
  struct AgentN;
  struct KeyN;
  struct NonceN;
  struct PairN;
  struct EncN;
  struct SigN;
  struct LabelN;
  struct SubAppN;
  using Node =
      std::variant<VarN, AgentN, KeyN, NonceN, PairN, EncN, SigN, LabelN, SubAppN>;

  // Factories. Sort discipline is enforced here: enc keys must be ek(.),
  // sig keys sk(.), key arguments must have sort agent-id, label slots
  // must have sort label.
  static Term var(Variable v);
  static Term agent(std::string name);
  static Term key(KeyKind k, Term id);
  static Term ek(Term id) { return key(KeyKind::Enc, std::move(id)); }
  static Term dk(Term id) { return key(KeyKind::Dec, std::move(id)); }
  static Term sk(Term id) { return key(KeyKind::Sig, std::move(id)); }
  static Term vk(Term id) { return key(KeyKind::Ver, std::move(id)); }
  static Term nonce(std::string owner, unsigned index, unsigned session);
  static Term pair(Term first, Term second);
  static Term enc(Term plain, Term key, std::optional<Term> label = std::nullopt);
  static Term sig(Term body, Term key, std::optional<Term> label = std::nullopt);
  static Term label(LabelKind kind, unsigned index);
  static Term ag(unsigned i) { return label(LabelKind::Agent, i); }
  static Term adv(unsigned i) { return label(LabelKind::Adversary, i); }
  static Term sub_app(std::string subvar, Variable arg);

  Term() = delete;

  Kind kind() const;
  const Node& node() const;

  template <typename T>
  const T& as() const;
  template <typename T>
  const T* get_if() const;

  // True when no variable and no substitution application occurs anywhere.
  bool ground() const;
  // Message nesting depth: pair/enc/sig nodes count one level over their
  // payload; keys, labels and atoms have depth 0.
  unsigned depth() const;
  bool has_labels() const;

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }
  bool operator<(const Term& other) const;

  std::string to_string() const;

 private:
  struct Rep;
  explicit Term(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static Term make(Node node);
  std::shared_ptr<const Rep> rep_;
};

struct Term::VarN {
  Variable var;
};
struct Term::AgentN {
  std::string name;
};
struct Term::KeyN {
  KeyKind kind;
  Term id;  // agent constant or agent variable
};
struct Term::NonceN {
  std::string owner;
  unsigned index;
  unsigned session;
};
struct Term::PairN {
  Term first;
  Term second;
};
struct Term::EncN {
  Term plain;
  Term key;  // ek(.)
  std::optional<Term> label;
};
struct Term::SigN {
  Term body;
  Term key;  // sk(.)
  std::optional<Term> label;
};
struct Term::LabelN {
  LabelKind kind;
  unsigned index;
};
struct Term::SubAppN {
  std::string subvar;
  Variable arg;
};

struct Term::Rep {
  Node data;
  bool ground;
  unsigned depth;
  bool labeled;  // some enc/sig below carries a label slot
  Rep(Node d, bool g, unsigned dep, bool lab)
      : data(std::move(d)), ground(g), depth(dep), labeled(lab) {}
};

inline Term::Kind Term::kind() const {
  return static_cast<Kind>(rep_->data.index());
}
inline const Term::Node& Term::node() const { return rep_->data; }
template <typename T>
const T& Term::as() const {
  return std::get<T>(rep_->data);
}
template <typename T>
const T* Term::get_if() const {
  return std::get_if<T>(&rep_->data);
}
inline bool Term::ground() const { return rep_->ground; }
inline unsigned Term::depth() const { return rep_->depth; }
inline bool Term::has_labels() const { return rep_->labeled; }

std::ostream& operator<<(std::ostream& os, const Term& t);

std::strong_ordering compare(const Term& a, const Term& b);

// Most specific sort of a term.
Sort sort_of(const Term& t);

// Label removal. Homomorphic, idempotent, total (already-unlabeled terms
// pass through unchanged). Substitution applications are fixed points.
Term erase(const Term& t);

// Simple terms: agent/nonce variables, agent constants, nonce constants.
// Every simple term is a fixed point of erase.
bool is_simple(const Term& t);

// Finite sort-preserving map from variables to terms.
class Substitution {
 public:
  Substitution() = default;

  // Throws SortError when the image's sort differs from the variable's.
  void bind(const Variable& v, const Term& image);
  std::optional<Term> lookup(const Variable& v) const;
  bool contains(const Variable& v) const { return map_.count(v) != 0; }
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }

  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  // Union of two substitutions; bindings present in both must agree.
  Substitution merged(const Substitution& other) const;

  bool operator==(const Substitution& other) const { return map_ == other.map_; }
  bool operator!=(const Substitution& other) const { return !(*this == other); }
  bool operator<(const Substitution& other) const { return map_ < other.map_; }

  // "A1 = a1, X1@A2 = n(a2,1,1)" ordered by variable name.
  std::string to_string() const;

 private:
  std::map<Variable, Term> map_;
};

// Applies sigma to t, replacing every bound variable by its image.
Term apply(const Substitution& sigma, const Term& t);

// Erases every image; bindings of label variables are dropped (a ground
// label has no unlabeled counterpart).
Substitution erase(const Substitution& sigma);

// Matches a ground message against a pattern: the least substitution theta
// with apply(theta, pattern) == m, if any. Variables bind only terms of
// their own sort; repeated variables must bind identical terms; label slots
// must agree in presence. Returns nullopt on any disagreement.
std::optional<Substitution> match(const Term& pattern, const Term& m);

// All variables occurring in t (including label slots), in term order.
std::set<Variable> variables(const Term& t);

}  // namespace lsv

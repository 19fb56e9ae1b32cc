#include "lsv/term.hpp"

#include <algorithm>
#include <sstream>

namespace lsv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string sort_name(Sort s) {
  switch (s) {
    case Sort::AgentId: return "agent-id";
    case Sort::SigKey: return "sig-key";
    case Sort::VerKey: return "ver-key";
    case Sort::EncKey: return "enc-key";
    case Sort::DecKey: return "dec-key";
    case Sort::Nonce: return "nonce";
    case Sort::Label: return "label";
    case Sort::Ciphertext: return "ciphertext";
    case Sort::Signature: return "signature";
    case Sort::Pair: return "pair";
    case Sort::TermTop: return "term";
  }
  return "?";
}

std::string Variable::name() const {
  switch (sort) {
    case VarSort::Agent: return "A" + std::to_string(index);
    case VarSort::Nonce:
      return "X" + std::to_string(index) + "@A" + std::to_string(owner);
    case VarSort::Ciphertext:
      return "C" + std::to_string(index) + "@A" + std::to_string(owner);
    case VarSort::Signature:
      return "S" + std::to_string(index) + "@A" + std::to_string(owner);
    case VarSort::Label: return "L" + std::to_string(index);
  }
  return "?";
}

static Sort var_sort(VarSort s) {
  switch (s) {
    case VarSort::Agent: return Sort::AgentId;
    case VarSort::Nonce: return Sort::Nonce;
    case VarSort::Ciphertext: return Sort::Ciphertext;
    case VarSort::Signature: return Sort::Signature;
    case VarSort::Label: return Sort::Label;
  }
  return Sort::TermTop;
}

Sort sort_of(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: return var_sort(t.as<Term::VarN>().var.sort);
    case Term::Kind::Agent: return Sort::AgentId;
    case Term::Kind::Key:
      switch (t.as<Term::KeyN>().kind) {
        case KeyKind::Enc: return Sort::EncKey;
        case KeyKind::Dec: return Sort::DecKey;
        case KeyKind::Sig: return Sort::SigKey;
        case KeyKind::Ver: return Sort::VerKey;
      }
      return Sort::TermTop;
    case Term::Kind::Nonce: return Sort::Nonce;
    case Term::Kind::Pair: return Sort::Pair;
    case Term::Kind::Enc: return Sort::Ciphertext;
    case Term::Kind::Sig: return Sort::Signature;
    case Term::Kind::Label: return Sort::Label;
    case Term::Kind::SubApp: return var_sort(t.as<Term::SubAppN>().arg.sort);
  }
  return Sort::TermTop;
}

Term Term::make(Node node) {
  bool ground = true;
  unsigned depth = 0;
  bool labeled = false;
  std::visit(
      overloaded{
          [&](const VarN&) { ground = false; },
          [&](const AgentN&) {},
          [&](const KeyN& k) {
            ground = k.id.ground();
            labeled = k.id.has_labels();
          },
          [&](const NonceN&) {},
          [&](const PairN& p) {
            ground = p.first.ground() && p.second.ground();
            depth = 1 + std::max(p.first.depth(), p.second.depth());
            labeled = p.first.has_labels() || p.second.has_labels();
          },
          [&](const EncN& e) {
            ground = e.plain.ground() && e.key.ground() &&
                     (!e.label || e.label->ground());
            depth = 1 + e.plain.depth();
            labeled = e.label.has_value() || e.plain.has_labels() ||
                      e.key.has_labels();
          },
          [&](const SigN& s) {
            ground = s.body.ground() && s.key.ground() &&
                     (!s.label || s.label->ground());
            depth = 1 + s.body.depth();
            labeled = s.label.has_value() || s.body.has_labels() ||
                      s.key.has_labels();
          },
          [&](const LabelN&) {},
          [&](const SubAppN&) { ground = false; },
      },
      node);
  return Term(std::make_shared<const Rep>(std::move(node), ground, depth, labeled));
}

Term Term::var(Variable v) { return make(VarN{v}); }

Term Term::agent(std::string name) {
  if (name.empty()) throw SortError("agent constant must have a name");
  return make(AgentN{std::move(name)});
}

Term Term::key(KeyKind k, Term id) {
  if (sort_of(id) != Sort::AgentId)
    throw SortError("key operations apply to agent identities, got sort " +
                    sort_name(sort_of(id)));
  return make(KeyN{k, std::move(id)});
}

Term Term::nonce(std::string owner, unsigned index, unsigned session) {
  if (owner.empty()) throw SortError("nonce owner must be an agent name");
  return make(NonceN{std::move(owner), index, session});
}

Term Term::pair(Term first, Term second) {
  return make(PairN{std::move(first), std::move(second)});
}

static void check_label_slot(const std::optional<Term>& label) {
  if (label && sort_of(*label) != Sort::Label)
    throw SortError("label slot must hold a term of sort label, got " +
                    label->to_string());
}

Term Term::enc(Term plain, Term key, std::optional<Term> label) {
  if (key.kind() != Kind::Key || key.as<KeyN>().kind != KeyKind::Enc)
    throw SortError("encryption requires an ek(.) key, got " + key.to_string());
  check_label_slot(label);
  return make(EncN{std::move(plain), std::move(key), std::move(label)});
}

Term Term::sig(Term body, Term key, std::optional<Term> label) {
  if (key.kind() != Kind::Key || key.as<KeyN>().kind != KeyKind::Sig)
    throw SortError("signing requires an sk(.) key, got " + key.to_string());
  check_label_slot(label);
  return make(SigN{std::move(body), std::move(key), std::move(label)});
}

Term Term::label(LabelKind kind, unsigned index) {
  return make(LabelN{kind, index});
}

Term Term::sub_app(std::string subvar, Variable arg) {
  if (subvar.empty()) throw SortError("substitution variable must have a name");
  return make(SubAppN{std::move(subvar), arg});
}

static std::strong_ordering cmp_opt(const std::optional<Term>& a,
                                    const std::optional<Term>& b) {
  if (a.has_value() != b.has_value())
    return a.has_value() ? std::strong_ordering::greater
                         : std::strong_ordering::less;
  if (!a) return std::strong_ordering::equal;
  return compare(*a, *b);
}

std::strong_ordering compare(const Term& a, const Term& b) {
  if (&a.node() == &b.node()) return std::strong_ordering::equal;
  if (a.kind() != b.kind())
    return static_cast<int>(a.kind()) <=> static_cast<int>(b.kind());
  switch (a.kind()) {
    case Term::Kind::Var:
      return a.as<Term::VarN>().var <=> b.as<Term::VarN>().var;
    case Term::Kind::Agent:
      return a.as<Term::AgentN>().name <=> b.as<Term::AgentN>().name;
    case Term::Kind::Key: {
      const auto& x = a.as<Term::KeyN>();
      const auto& y = b.as<Term::KeyN>();
      if (auto c = static_cast<int>(x.kind) <=> static_cast<int>(y.kind); c != 0)
        return c;
      return compare(x.id, y.id);
    }
    case Term::Kind::Nonce: {
      const auto& x = a.as<Term::NonceN>();
      const auto& y = b.as<Term::NonceN>();
      if (auto c = x.owner <=> y.owner; c != 0) return c;
      if (auto c = x.index <=> y.index; c != 0) return c;
      return x.session <=> y.session;
    }
    case Term::Kind::Pair: {
      const auto& x = a.as<Term::PairN>();
      const auto& y = b.as<Term::PairN>();
      if (auto c = compare(x.first, y.first); c != 0) return c;
      return compare(x.second, y.second);
    }
    case Term::Kind::Enc: {
      const auto& x = a.as<Term::EncN>();
      const auto& y = b.as<Term::EncN>();
      if (auto c = compare(x.plain, y.plain); c != 0) return c;
      if (auto c = compare(x.key, y.key); c != 0) return c;
      return cmp_opt(x.label, y.label);
    }
    case Term::Kind::Sig: {
      const auto& x = a.as<Term::SigN>();
      const auto& y = b.as<Term::SigN>();
      if (auto c = compare(x.body, y.body); c != 0) return c;
      if (auto c = compare(x.key, y.key); c != 0) return c;
      return cmp_opt(x.label, y.label);
    }
    case Term::Kind::Label: {
      const auto& x = a.as<Term::LabelN>();
      const auto& y = b.as<Term::LabelN>();
      if (auto c = static_cast<int>(x.kind) <=> static_cast<int>(y.kind); c != 0)
        return c;
      return x.index <=> y.index;
    }
    case Term::Kind::SubApp: {
      const auto& x = a.as<Term::SubAppN>();
      const auto& y = b.as<Term::SubAppN>();
      if (auto c = x.subvar <=> y.subvar; c != 0) return c;
      return x.arg <=> y.arg;
    }
  }
  return std::strong_ordering::equal;
}

bool Term::operator==(const Term& other) const {
  return compare(*this, other) == 0;
}

bool Term::operator<(const Term& other) const {
  return compare(*this, other) < 0;
}

// ---- printing ------------------------------------------------------------

static void print_term(std::ostream& os, const Term& t);

static void print_label_slot(std::ostream& os, const std::optional<Term>& l) {
  if (!l) return;
  os << '^';
  print_term(os, *l);
}

static void print_term(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
      os << t.as<Term::VarN>().var.name();
      return;
    case Term::Kind::Agent:
      os << t.as<Term::AgentN>().name;
      return;
    case Term::Kind::Key: {
      const auto& k = t.as<Term::KeyN>();
      switch (k.kind) {
        case KeyKind::Enc: os << "ek("; break;
        case KeyKind::Dec: os << "dk("; break;
        case KeyKind::Sig: os << "sk("; break;
        case KeyKind::Ver: os << "vk("; break;
      }
      print_term(os, k.id);
      os << ')';
      return;
    }
    case Term::Kind::Nonce: {
      const auto& n = t.as<Term::NonceN>();
      os << "n(" << n.owner << ',' << n.index << ',' << n.session << ')';
      return;
    }
    case Term::Kind::Pair: {
      // right-nested pairs print flattened: <t1, t2, t3>
      os << '<';
      const Term* cur = &t;
      while (true) {
        const auto& p = cur->as<Term::PairN>();
        print_term(os, p.first);
        os << ", ";
        if (p.second.kind() == Term::Kind::Pair) {
          cur = &p.second;
        } else {
          print_term(os, p.second);
          break;
        }
      }
      os << '>';
      return;
    }
    case Term::Kind::Enc: {
      const auto& e = t.as<Term::EncN>();
      os << "enc(";
      print_term(os, e.plain);
      os << ", ";
      print_term(os, e.key);
      os << ')';
      print_label_slot(os, e.label);
      return;
    }
    case Term::Kind::Sig: {
      const auto& s = t.as<Term::SigN>();
      os << "sig(";
      print_term(os, s.body);
      os << ", ";
      print_term(os, s.key);
      os << ')';
      print_label_slot(os, s.label);
      return;
    }
    case Term::Kind::Label: {
      const auto& l = t.as<Term::LabelN>();
      os << (l.kind == LabelKind::Agent ? "ag(" : "adv(") << l.index << ')';
      return;
    }
    case Term::Kind::SubApp: {
      const auto& s = t.as<Term::SubAppN>();
      os << s.subvar << '(' << s.arg.name() << ')';
      return;
    }
  }
}

std::string Term::to_string() const {
  std::ostringstream os;
  print_term(os, *this);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  print_term(os, t);
  return os;
}

// ---- erase ---------------------------------------------------------------

Term erase(const Term& t) {
  if (!t.has_labels()) return t;
  switch (t.kind()) {
    case Term::Kind::Key: {
      const auto& k = t.as<Term::KeyN>();
      return Term::key(k.kind, erase(k.id));
    }
    case Term::Kind::Pair: {
      const auto& p = t.as<Term::PairN>();
      return Term::pair(erase(p.first), erase(p.second));
    }
    case Term::Kind::Enc: {
      const auto& e = t.as<Term::EncN>();
      return Term::enc(erase(e.plain), erase(e.key), std::nullopt);
    }
    case Term::Kind::Sig: {
      const auto& s = t.as<Term::SigN>();
      return Term::sig(erase(s.body), erase(s.key), std::nullopt);
    }
    default:
      return t;  // atoms carry no label slots
  }
}

bool is_simple(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto s = t.as<Term::VarN>().var.sort;
      return s == VarSort::Agent || s == VarSort::Nonce;
    }
    case Term::Kind::Agent:
    case Term::Kind::Nonce:
      return true;
    default:
      return false;
  }
}

// ---- substitutions -------------------------------------------------------

void Substitution::bind(const Variable& v, const Term& image) {
  Sort expect = [&] {
    switch (v.sort) {
      case VarSort::Agent: return Sort::AgentId;
      case VarSort::Nonce: return Sort::Nonce;
      case VarSort::Ciphertext: return Sort::Ciphertext;
      case VarSort::Signature: return Sort::Signature;
      case VarSort::Label: return Sort::Label;
    }
    return Sort::TermTop;
  }();
  if (sort_of(image) != expect)
    throw SortError("cannot bind " + v.name() + " (sort " + sort_name(expect) +
                    ") to " + image.to_string() + " (sort " +
                    sort_name(sort_of(image)) + ")");
  auto [it, inserted] = map_.emplace(v, image);
  if (!inserted && it->second != image)
    throw SortError("conflicting rebinding of " + v.name());
}

std::optional<Term> Substitution::lookup(const Variable& v) const {
  auto it = map_.find(v);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

Substitution Substitution::merged(const Substitution& other) const {
  Substitution out = *this;
  for (const auto& [v, img] : other.map_) out.bind(v, img);
  return out;
}

std::string Substitution::to_string() const {
  std::vector<std::pair<std::string, const Term*>> items;
  items.reserve(map_.size());
  for (const auto& [v, img] : map_) items.emplace_back(v.name(), &img);
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, img] : items) {
    if (!first) os << ", ";
    first = false;
    os << name << " = " << *img;
  }
  return os.str();
}

Term apply(const Substitution& sigma, const Term& t) {
  if (t.ground() || sigma.empty()) return t;
  switch (t.kind()) {
    case Term::Kind::Var: {
      if (auto img = sigma.lookup(t.as<Term::VarN>().var)) return *img;
      return t;
    }
    case Term::Kind::Key: {
      const auto& k = t.as<Term::KeyN>();
      return Term::key(k.kind, apply(sigma, k.id));
    }
    case Term::Kind::Pair: {
      const auto& p = t.as<Term::PairN>();
      return Term::pair(apply(sigma, p.first), apply(sigma, p.second));
    }
    case Term::Kind::Enc: {
      const auto& e = t.as<Term::EncN>();
      std::optional<Term> label;
      if (e.label) label = apply(sigma, *e.label);
      return Term::enc(apply(sigma, e.plain), apply(sigma, e.key),
                       std::move(label));
    }
    case Term::Kind::Sig: {
      const auto& s = t.as<Term::SigN>();
      std::optional<Term> label;
      if (s.label) label = apply(sigma, *s.label);
      return Term::sig(apply(sigma, s.body), apply(sigma, s.key),
                       std::move(label));
    }
    default:
      return t;  // agent, nonce, label literals; sub-apps are left alone
  }
}

Substitution erase(const Substitution& sigma) {
  Substitution out;
  for (const auto& [v, img] : sigma) {
    if (v.sort == VarSort::Label) continue;
    out.bind(v, erase(img));
  }
  return out;
}

// ---- matching ------------------------------------------------------------

namespace {

bool match_into(const Term& pattern, const Term& m, Substitution& theta) {
  switch (pattern.kind()) {
    case Term::Kind::Var: {
      const Variable& v = pattern.as<Term::VarN>().var;
      Sort want = [&] {
        switch (v.sort) {
          case VarSort::Agent: return Sort::AgentId;
          case VarSort::Nonce: return Sort::Nonce;
          case VarSort::Ciphertext: return Sort::Ciphertext;
          case VarSort::Signature: return Sort::Signature;
          case VarSort::Label: return Sort::Label;
        }
        return Sort::TermTop;
      }();
      if (sort_of(m) != want) return false;
      if (auto prev = theta.lookup(v)) return *prev == m;
      theta.bind(v, m);
      return true;
    }
    case Term::Kind::Agent:
    case Term::Kind::Nonce:
    case Term::Kind::Label:
      return pattern == m;
    case Term::Kind::Key: {
      if (m.kind() != Term::Kind::Key) return false;
      const auto& pk = pattern.as<Term::KeyN>();
      const auto& mk = m.as<Term::KeyN>();
      return pk.kind == mk.kind && match_into(pk.id, mk.id, theta);
    }
    case Term::Kind::Pair: {
      if (m.kind() != Term::Kind::Pair) return false;
      const auto& pp = pattern.as<Term::PairN>();
      const auto& mp = m.as<Term::PairN>();
      return match_into(pp.first, mp.first, theta) &&
             match_into(pp.second, mp.second, theta);
    }
    case Term::Kind::Enc: {
      if (m.kind() != Term::Kind::Enc) return false;
      const auto& pe = pattern.as<Term::EncN>();
      const auto& me = m.as<Term::EncN>();
      if (pe.label.has_value() != me.label.has_value()) return false;
      if (!match_into(pe.plain, me.plain, theta)) return false;
      if (!match_into(pe.key, me.key, theta)) return false;
      return !pe.label || match_into(*pe.label, *me.label, theta);
    }
    case Term::Kind::Sig: {
      if (m.kind() != Term::Kind::Sig) return false;
      const auto& ps = pattern.as<Term::SigN>();
      const auto& ms = m.as<Term::SigN>();
      if (ps.label.has_value() != ms.label.has_value()) return false;
      if (!match_into(ps.body, ms.body, theta)) return false;
      if (!match_into(ps.key, ms.key, theta)) return false;
      return !ps.label || match_into(*ps.label, *ms.label, theta);
    }
    case Term::Kind::SubApp:
      return false;  // substitution applications never occur in patterns
  }
  return false;
}

}  // namespace

std::optional<Substitution> match(const Term& pattern, const Term& m) {
  if (!m.ground())
    throw std::invalid_argument("match: message must be ground, got " +
                                m.to_string());
  Substitution theta;
  if (!match_into(pattern, m, theta)) return std::nullopt;
  return theta;
}

static void collect_vars(const Term& t, std::set<Variable>& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      out.insert(t.as<Term::VarN>().var);
      return;
    case Term::Kind::Key:
      collect_vars(t.as<Term::KeyN>().id, out);
      return;
    case Term::Kind::Pair: {
      const auto& p = t.as<Term::PairN>();
      collect_vars(p.first, out);
      collect_vars(p.second, out);
      return;
    }
    case Term::Kind::Enc: {
      const auto& e = t.as<Term::EncN>();
      collect_vars(e.plain, out);
      collect_vars(e.key, out);
      if (e.label) collect_vars(*e.label, out);
      return;
    }
    case Term::Kind::Sig: {
      const auto& s = t.as<Term::SigN>();
      collect_vars(s.body, out);
      collect_vars(s.key, out);
      if (s.label) collect_vars(*s.label, out);
      return;
    }
    default:
      return;
  }
}

std::set<Variable> variables(const Term& t) {
  std::set<Variable> out;
  collect_vars(t, out);
  return out;
}

}  // namespace lsv

#include "lsv/deduction.hpp"

#include <deque>
#include <sstream>

namespace lsv {

void KnowledgeSet::corrupt(const std::string& id) {
  corrupted.insert(id);
  universe.insert(id);
  terms.insert(Term::dk(Term::agent(id)));
  terms.insert(Term::sk(Term::agent(id)));
}

KnowledgeSet KnowledgeSet::with_term(const Term& t) const {
  KnowledgeSet out = *this;
  out.terms.insert(t);
  return out;
}

// ---- analysis saturation ---------------------------------------------------

namespace {

bool is_key_of(const Term& t, KeyKind kind, const std::string& agent) {
  const auto* k = t.get_if<Term::KeyN>();
  if (!k || k->kind != kind) return false;
  const auto* a = k->id.get_if<Term::AgentN>();
  return a && a->name == agent;
}

std::optional<std::string> key_agent(const Term& key) {
  const auto* k = key.get_if<Term::KeyN>();
  if (!k) return std::nullopt;
  const auto* a = k->id.get_if<Term::AgentN>();
  if (!a) return std::nullopt;
  return a->name;
}

}  // namespace

Saturation analyze(const KnowledgeSet& s, const DeductionOptions& opts) {
  Saturation sat;
  std::deque<Term> work;
  auto add = [&](const Term& t, Saturation::Origin origin) {
    if (sat.closed.insert(t).second) {
      sat.origins.emplace(t, std::move(origin));
      work.push_back(t);
    }
  };
  for (const Term& t : s.terms)
    add(t, {Saturation::Origin::Via::Member, {}});
  // Corrupted parties' secret keys are available even when the caller did
  // not materialize them in H; they may unlock decryptions below.
  for (const std::string& a : s.corrupted) {
    add(Term::dk(Term::agent(a)), {Saturation::Origin::Via::Initial, {}});
    add(Term::sk(Term::agent(a)), {Saturation::Origin::Via::Initial, {}});
  }

  // Ciphertexts whose decryption key is not (yet) available, indexed by the
  // key's agent so a later dk unlocks them.
  std::map<std::string, std::vector<Term>> pending_dec;

  auto try_decrypt = [&](const Term& ct) {
    const auto& e = ct.as<Term::EncN>();
    auto agent = key_agent(e.key);
    if (!agent) return;  // key over an agent variable: nothing to do
    Term dk = Term::dk(Term::agent(*agent));
    if (sat.contains(dk)) {
      add(e.plain, {Saturation::Origin::Via::Dec, {ct, dk}});
    } else {
      pending_dec[*agent].push_back(ct);
    }
  };

  while (!work.empty()) {
    Term t = work.front();
    work.pop_front();
    switch (t.kind()) {
      case Term::Kind::Pair: {
        const auto& p = t.as<Term::PairN>();
        add(p.first, {Saturation::Origin::Via::Unpair1, {t}});
        add(p.second, {Saturation::Origin::Via::Unpair2, {t}});
        break;
      }
      case Term::Kind::Enc:
        try_decrypt(t);
        break;
      case Term::Kind::Sig:
        if (opts.sig_open) {
          const auto& g = t.as<Term::SigN>();
          add(g.body, {Saturation::Origin::Via::SigOpen, {t}});
        }
        break;
      case Term::Kind::Key: {
        const auto& k = t.as<Term::KeyN>();
        if (k.kind == KeyKind::Dec) {
          if (auto agent = key_agent(t)) {
            auto it = pending_dec.find(*agent);
            if (it != pending_dec.end()) {
              auto blocked = std::move(it->second);
              pending_dec.erase(it);
              for (const Term& ct : blocked) try_decrypt(ct);
            }
          }
        }
        break;
      }
      default:
        break;
    }
  }
  return sat;
}

// ---- synthesis --------------------------------------------------------------

namespace {

bool initial_knowledge(const KnowledgeSet& s, const Term& m) {
  switch (m.kind()) {
    case Term::Kind::Agent:
      return s.universe.count(m.as<Term::AgentN>().name) != 0;
    case Term::Kind::Key: {
      const auto& k = m.as<Term::KeyN>();
      auto agent = key_agent(m);
      if (!agent) return false;
      if (k.kind == KeyKind::Enc || k.kind == KeyKind::Ver)
        return s.universe.count(*agent) != 0;
      return s.corrupted.count(*agent) != 0;  // dk/sk of corrupted parties
    }
    case Term::Kind::Nonce:
      return s.corrupted.count(m.as<Term::NonceN>().owner) != 0;
    default:
      return false;
  }
}

bool adv_labeled(const std::optional<Term>& slot) {
  if (!slot) return false;
  const auto* l = slot->get_if<Term::LabelN>();
  return l && l->kind == LabelKind::Adversary;
}

}  // namespace

bool synthesizable(const Saturation& analysis, const KnowledgeSet& s,
                   const Term& m, DeductionMode mode,
                   const DeductionOptions& opts) {
  (void)opts;
  if (analysis.contains(m)) return true;
  if (initial_knowledge(s, m)) return true;
  switch (m.kind()) {
    case Term::Kind::Pair: {
      const auto& p = m.as<Term::PairN>();
      return synthesizable(analysis, s, p.first, mode, opts) &&
             synthesizable(analysis, s, p.second, mode, opts);
    }
    case Term::Kind::Enc: {
      const auto& e = m.as<Term::EncN>();
      // Labeled synthesis mints only adversary randomness; agent-labeled
      // ciphertexts are reachable through the analysis closure alone.
      if (mode == DeductionMode::Labeled && !adv_labeled(e.label)) return false;
      if (mode == DeductionMode::Unlabeled && e.label) return false;
      return synthesizable(analysis, s, e.key, mode, opts) &&
             synthesizable(analysis, s, e.plain, mode, opts);
    }
    case Term::Kind::Sig: {
      const auto& g = m.as<Term::SigN>();
      if (mode == DeductionMode::Labeled && !adv_labeled(g.label)) return false;
      if (mode == DeductionMode::Unlabeled && g.label) return false;
      return synthesizable(analysis, s, g.key, mode, opts) &&
             synthesizable(analysis, s, g.body, mode, opts);
    }
    default:
      return false;
  }
}

static void require_ground(const Term& m, const char* who) {
  if (!m.ground())
    throw std::invalid_argument(std::string(who) +
                                ": goal must be ground, got " + m.to_string());
}

bool deducible_labeled(const KnowledgeSet& s, const Term& m,
                       const DeductionOptions& opts) {
  require_ground(m, "deducible_labeled");
  Saturation sat = analyze(s, opts);
  return synthesizable(sat, s, m, DeductionMode::Labeled, opts);
}

bool deducible_unlabeled(const KnowledgeSet& s, const Term& m,
                         const DeductionOptions& opts) {
  require_ground(m, "deducible_unlabeled");
  Saturation sat = analyze(s, opts);
  return synthesizable(sat, s, m, DeductionMode::Unlabeled, opts);
}

// ---- derivations -------------------------------------------------------------

const char* rule_name(DeductionRule r) {
  switch (r) {
    case DeductionRule::Membership: return "membership";
    case DeductionRule::Initial: return "initial";
    case DeductionRule::Pair: return "pair";
    case DeductionRule::Unpair1: return "unpair-1";
    case DeductionRule::Unpair2: return "unpair-2";
    case DeductionRule::Enc: return "enc";
    case DeductionRule::Dec: return "dec";
    case DeductionRule::Sign: return "sign";
    case DeductionRule::SigOpen: return "sig-open";
  }
  return "?";
}

namespace {

// Rebuilds the proof of an analysis-closure member from its recorded origin.
Derivation analysis_proof(const Saturation& sat, const Term& t) {
  const auto& origin = sat.origins.at(t);
  using Via = Saturation::Origin::Via;
  switch (origin.via) {
    case Via::Member:
      return {DeductionRule::Membership, t, {}};
    case Via::Initial:
      return {DeductionRule::Initial, t, {}};
    case Via::Unpair1:
      return {DeductionRule::Unpair1, t, {analysis_proof(sat, origin.premises[0])}};
    case Via::Unpair2:
      return {DeductionRule::Unpair2, t, {analysis_proof(sat, origin.premises[0])}};
    case Via::Dec:
      return {DeductionRule::Dec,
              t,
              {analysis_proof(sat, origin.premises[0]),
               analysis_proof(sat, origin.premises[1])}};
    case Via::SigOpen:
      return {DeductionRule::SigOpen, t, {analysis_proof(sat, origin.premises[0])}};
  }
  return {DeductionRule::Membership, t, {}};
}

std::optional<Derivation> synth_proof(const Saturation& sat,
                                      const KnowledgeSet& s, const Term& m,
                                      DeductionMode mode,
                                      const DeductionOptions& opts) {
  if (sat.contains(m)) return analysis_proof(sat, m);
  if (initial_knowledge(s, m)) return Derivation{DeductionRule::Initial, m, {}};
  switch (m.kind()) {
    case Term::Kind::Pair: {
      const auto& p = m.as<Term::PairN>();
      auto a = synth_proof(sat, s, p.first, mode, opts);
      if (!a) return std::nullopt;
      auto b = synth_proof(sat, s, p.second, mode, opts);
      if (!b) return std::nullopt;
      return Derivation{DeductionRule::Pair, m, {std::move(*a), std::move(*b)}};
    }
    case Term::Kind::Enc: {
      const auto& e = m.as<Term::EncN>();
      if (mode == DeductionMode::Labeled && !adv_labeled(e.label))
        return std::nullopt;
      if (mode == DeductionMode::Unlabeled && e.label) return std::nullopt;
      auto k = synth_proof(sat, s, e.key, mode, opts);
      if (!k) return std::nullopt;
      auto x = synth_proof(sat, s, e.plain, mode, opts);
      if (!x) return std::nullopt;
      return Derivation{DeductionRule::Enc, m, {std::move(*k), std::move(*x)}};
    }
    case Term::Kind::Sig: {
      const auto& g = m.as<Term::SigN>();
      if (mode == DeductionMode::Labeled && !adv_labeled(g.label))
        return std::nullopt;
      if (mode == DeductionMode::Unlabeled && g.label) return std::nullopt;
      auto k = synth_proof(sat, s, g.key, mode, opts);
      if (!k) return std::nullopt;
      auto x = synth_proof(sat, s, g.body, mode, opts);
      if (!x) return std::nullopt;
      return Derivation{DeductionRule::Sign, m, {std::move(*k), std::move(*x)}};
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

std::optional<Derivation> derive(const KnowledgeSet& s, const Term& m,
                                 DeductionMode mode,
                                 const DeductionOptions& opts) {
  require_ground(m, "derive");
  Saturation sat = analyze(s, opts);
  return synth_proof(sat, s, m, mode, opts);
}

namespace {

bool check_node(const KnowledgeSet& s, const Derivation& d, DeductionMode mode,
                const DeductionOptions& opts) {
  for (const Derivation& p : d.premises)
    if (!check_node(s, p, mode, opts)) return false;
  const Term& c = d.conclusion;
  auto premise = [&](std::size_t i) -> const Term& {
    return d.premises[i].conclusion;
  };
  switch (d.rule) {
    case DeductionRule::Membership:
      return d.premises.empty() && s.terms.count(c) != 0;
    case DeductionRule::Initial:
      return d.premises.empty() && initial_knowledge(s, c);
    case DeductionRule::Pair: {
      const auto* p = c.get_if<Term::PairN>();
      return p && d.premises.size() == 2 && premise(0) == p->first &&
             premise(1) == p->second;
    }
    case DeductionRule::Unpair1: {
      if (d.premises.size() != 1) return false;
      const auto* p = premise(0).get_if<Term::PairN>();
      return p && p->first == c;
    }
    case DeductionRule::Unpair2: {
      if (d.premises.size() != 1) return false;
      const auto* p = premise(0).get_if<Term::PairN>();
      return p && p->second == c;
    }
    case DeductionRule::Enc: {
      const auto* e = c.get_if<Term::EncN>();
      if (!e || d.premises.size() != 2) return false;
      if (mode == DeductionMode::Labeled && !adv_labeled(e->label)) return false;
      if (mode == DeductionMode::Unlabeled && e->label) return false;
      return premise(0) == e->key && premise(1) == e->plain;
    }
    case DeductionRule::Dec: {
      if (d.premises.size() != 2) return false;
      const auto* e = premise(0).get_if<Term::EncN>();
      if (!e || e->plain != c) return false;
      auto agent = key_agent(e->key);
      return agent && is_key_of(premise(1), KeyKind::Dec, *agent);
    }
    case DeductionRule::Sign: {
      const auto* g = c.get_if<Term::SigN>();
      if (!g || d.premises.size() != 2) return false;
      if (mode == DeductionMode::Labeled && !adv_labeled(g->label)) return false;
      if (mode == DeductionMode::Unlabeled && g->label) return false;
      return premise(0) == g->key && premise(1) == g->body;
    }
    case DeductionRule::SigOpen: {
      if (!opts.sig_open || d.premises.size() != 1) return false;
      const auto* g = premise(0).get_if<Term::SigN>();
      return g && g->body == c;
    }
  }
  return false;
}

}  // namespace

bool check_derivation(const KnowledgeSet& s, const Derivation& d,
                      const Term& goal, DeductionMode mode,
                      const DeductionOptions& opts) {
  return d.conclusion == goal && check_node(s, d, mode, opts);
}

std::string Derivation::to_text() const {
  std::ostringstream os;
  struct Walk {
    std::ostringstream& os;
    void operator()(const Derivation& d, unsigned indent) {
      for (unsigned i = 0; i < indent; ++i) os << "  ";
      os << rule_name(d.rule) << ": " << d.conclusion << '\n';
      for (const Derivation& p : d.premises) (*this)(p, indent + 1);
    }
  } walk{os};
  walk(*this, 0);
  return os.str();
}

// ---- bounded brute-force closure ---------------------------------------------

std::set<Term> closure_bounded(const KnowledgeSet& s, unsigned depth,
                               const DeductionOptions& opts) {
  std::set<Term> closed = s.terms;

  // Initial knowledge for the declared universe and corrupted parties.
  unsigned nonce_bound = depth > 0 ? depth : 1;
  for (const std::string& a : s.universe) {
    closed.insert(Term::agent(a));
    closed.insert(Term::ek(Term::agent(a)));
    closed.insert(Term::vk(Term::agent(a)));
  }
  for (const std::string& a : s.corrupted) {
    closed.insert(Term::dk(Term::agent(a)));
    closed.insert(Term::sk(Term::agent(a)));
    for (unsigned j = 1; j <= nonce_bound; ++j)
      for (unsigned sess = 1; sess <= nonce_bound; ++sess)
        closed.insert(Term::nonce(a, j, sess));
  }
  // Analysis: plain repeat-until-stable scans, no worklist.
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Term> found;
    for (const Term& t : closed) {
      if (const auto* p = t.get_if<Term::PairN>()) {
        found.push_back(p->first);
        found.push_back(p->second);
      } else if (const auto* e = t.get_if<Term::EncN>()) {
        if (auto agent = key_agent(e->key);
            agent && closed.count(Term::dk(Term::agent(*agent))))
          found.push_back(e->plain);
      } else if (const auto* g = t.get_if<Term::SigN>()) {
        if (opts.sig_open) found.push_back(g->body);
      }
    }
    for (const Term& t : found)
      if (closed.insert(t).second) changed = true;
  }

  // Bottom-up synthesis, stratified by term depth: stage d builds every
  // pair / ciphertext / signature of depth exactly d from members of depth
  // <= d-1. Adversary label indices are canonicalized to 1..depth.
  std::vector<Term> eks, sks;
  for (const Term& t : closed) {
    if (const auto* k = t.get_if<Term::KeyN>()) {
      if (k->kind == KeyKind::Enc) eks.push_back(t);
      if (k->kind == KeyKind::Sig) sks.push_back(t);
    }
  }
  for (unsigned d = 1; d <= depth; ++d) {
    std::vector<Term> components;
    for (const Term& t : closed)
      if (t.depth() <= d - 1) components.push_back(t);
    std::vector<Term> fresh;
    for (const Term& a : components) {
      for (const Term& b : components) fresh.push_back(Term::pair(a, b));
      for (unsigned i = 1; i <= depth; ++i) {
        for (const Term& k : eks) fresh.push_back(Term::enc(a, k, Term::adv(i)));
        for (const Term& k : sks) fresh.push_back(Term::sig(a, k, Term::adv(i)));
      }
    }
    closed.insert(fresh.begin(), fresh.end());
  }
  return closed;
}

}  // namespace lsv

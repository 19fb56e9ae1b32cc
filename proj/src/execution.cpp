#include "lsv/execution.hpp"

#include <algorithm>
#include <sstream>

namespace lsv {

// ---- protocol structure ----------------------------------------------------

namespace {

void walk_subterms(const Term& t, const std::function<void(const Term&)>& f) {
  f(t);
  switch (t.kind()) {
    case Term::Kind::Key:
      walk_subterms(t.as<Term::KeyN>().id, f);
      break;
    case Term::Kind::Pair: {
      const auto& p = t.as<Term::PairN>();
      walk_subterms(p.first, f);
      walk_subterms(p.second, f);
      break;
    }
    case Term::Kind::Enc: {
      const auto& e = t.as<Term::EncN>();
      walk_subterms(e.plain, f);
      walk_subterms(e.key, f);
      if (e.label) walk_subterms(*e.label, f);
      break;
    }
    case Term::Kind::Sig: {
      const auto& s = t.as<Term::SigN>();
      walk_subterms(s.body, f);
      walk_subterms(s.key, f);
      if (s.label) walk_subterms(*s.label, f);
      break;
    }
    default:
      break;
  }
}

void check_mode(const Protocol& p, const Term& t, const char* where) {
  walk_subterms(t, [&](const Term& u) {
    const std::optional<Term>* slot = nullptr;
    if (const auto* e = u.get_if<Term::EncN>()) slot = &e->label;
    if (const auto* s = u.get_if<Term::SigN>()) slot = &s->label;
    if (!slot) return;
    if (p.labeled && !slot->has_value())
      throw SortError(std::string(where) +
                      ": labeled protocol requires a label on " + u.to_string());
    if (!p.labeled && slot->has_value())
      throw SortError(std::string(where) +
                      ": unlabeled protocol forbids the label on " +
                      u.to_string());
  });
}

}  // namespace

void validate_protocol(const Protocol& p) {
  if (p.parties == 0) throw ExecError("protocol needs at least one party");
  if (p.roles.size() != p.parties)
    throw ExecError("protocol declares " + std::to_string(p.parties) +
                    " parties but " + std::to_string(p.roles.size()) + " roles");
  for (unsigned i = 1; i <= p.parties; ++i) {
    const Role& role = p.role(i);
    for (std::size_t q = 0; q < role.steps.size(); ++q) {
      const RoleStep& st = role.steps[q];
      if (!st.recv && q != 0)
        throw ExecError("role " + std::to_string(i) +
                        ": init only allowed at the first step");
      if (!st.send && q + 1 != role.steps.size())
        throw ExecError("role " + std::to_string(i) +
                        ": stop only allowed at the last step");
      std::string where = "role " + std::to_string(i);
      if (st.recv) check_mode(p, *st.recv, where.c_str());
      if (st.send) check_mode(p, *st.send, where.c_str());
      for (const auto* side : {&st.recv, &st.send}) {
        if (!*side) continue;
        for (const Variable& v : variables(**side)) {
          if (v.sort == VarSort::Agent && (v.index == 0 || v.index > p.parties))
            throw ExecError(where + ": agent variable " + v.name() +
                            " outside A1..A" + std::to_string(p.parties));
          if (v.owner > p.parties)
            throw ExecError(where + ": variable " + v.name() +
                            " owned by an undeclared agent variable");
        }
      }
    }
  }
}

Protocol erase(const Protocol& p) {
  Protocol out = p;
  out.labeled = false;
  for (Role& role : out.roles)
    for (RoleStep& st : role.steps) {
      if (st.recv) st.recv = erase(*st.recv);
      if (st.send) st.send = erase(*st.send);
    }
  return out;
}

std::vector<unsigned> nonce_indices(const Protocol& p) {
  std::set<unsigned> seen;
  for (const Role& role : p.roles)
    for (const RoleStep& st : role.steps)
      for (const auto* side : {&st.recv, &st.send}) {
        if (!*side) continue;
        for (const Variable& v : variables(**side))
          if (v.sort == VarSort::Nonce) seen.insert(v.index);
      }
  return {seen.begin(), seen.end()};
}

// ---- states and transitions -------------------------------------------------

GlobalState GlobalState::initial(const Protocol& p) {
  GlobalState g;
  g.knowledge.universe.insert(p.universe.begin(), p.universe.end());
  return g;
}

GlobalState step_corrupt(const Protocol& p, const GlobalState& g,
                         const std::vector<std::string>& ids) {
  if (!g.sessions.empty() || !g.knowledge.terms.empty() ||
      !g.knowledge.corrupted.empty())
    throw ExecError("corrupt is allowed only once, at the very beginning");
  GlobalState out = g;
  for (const std::string& id : ids) {
    if (std::find(p.universe.begin(), p.universe.end(), id) == p.universe.end())
      throw ExecError("corrupt: unknown identity " + id);
    out.knowledge.corrupt(id);
  }
  return out;
}

GlobalState step_new(const Protocol& p, const GlobalState& g, unsigned role,
                     const std::vector<std::string>& ids) {
  if (role == 0 || role > p.parties)
    throw ExecError("new: role index " + std::to_string(role) +
                    " outside 1.." + std::to_string(p.parties));
  if (ids.size() != p.parties)
    throw ExecError("new: expected " + std::to_string(p.parties) +
                    " identities, got " + std::to_string(ids.size()));
  GlobalState out = g;
  unsigned s = static_cast<unsigned>(g.sessions.size()) + 1;
  out.sessions.push_back(SessionId{s, role, ids});
  LocalState local;
  local.role = role;
  local.point = 1;
  for (unsigned j = 1; j <= p.parties; ++j)
    local.sigma.bind(Variable::agent(j), Term::agent(ids[j - 1]));
  // The executing party's own nonce variables are instantiated up front,
  // one fresh nonce per (index, session).
  for (const RoleStep& st : p.role(role).steps)
    for (const auto* side : {&st.recv, &st.send}) {
      if (!*side) continue;
      for (const Variable& v : variables(**side))
        if (v.sort == VarSort::Nonce && v.owner == role &&
            !local.sigma.contains(v))
          local.sigma.bind(v, Term::nonce(ids[role - 1], v.index, s));
    }
  out.locals.emplace(s, std::move(local));
  return out;
}

GlobalState step_send(const Protocol& p, const GlobalState& g, unsigned sid,
                      const std::optional<Term>& message) {
  auto it = g.locals.find(sid);
  if (it == g.locals.end())
    throw ExecError("send: unknown session " + std::to_string(sid));
  const LocalState& local = it->second;
  const Role& role = p.role(local.role);
  if (local.point > role.steps.size()) return g;  // finished session
  const RoleStep& st = role.steps[local.point - 1];

  Substitution theta;
  if (!st.recv) {
    // init step: only the bare init ping triggers it
    if (message.has_value()) return g;
  } else {
    if (!message.has_value()) return g;
    Term expected = apply(local.sigma, *st.recv);
    auto m = match(expected, *message);
    if (!m) return g;
    theta = std::move(*m);
  }

  GlobalState out = g;
  LocalState& next = out.locals.at(sid);
  next.sigma = local.sigma.merged(theta);
  next.point = local.point + 1;
  if (st.send) {
    Term reply = apply(next.sigma, *st.send);
    if (!reply.ground())
      throw ExecError("send: reply of role " + std::to_string(local.role) +
                      " step " + std::to_string(local.point) +
                      " is not ground: " + reply.to_string());
    out.knowledge.terms.insert(reply);
  }
  return out;
}

// ---- erasure ------------------------------------------------------------------

GlobalState erase(const GlobalState& g) {
  GlobalState out;
  out.sessions = g.sessions;
  for (const auto& [sid, local] : g.locals)
    out.locals.emplace(sid, LocalState{erase(local.sigma), local.role, local.point});
  out.knowledge.corrupted = g.knowledge.corrupted;
  out.knowledge.universe = g.knowledge.universe;
  for (const Term& t : g.knowledge.terms) out.knowledge.terms.insert(erase(t));
  return out;
}

Event erase(const Event& e) {
  if (const auto* send = std::get_if<SendEvent>(&e)) {
    SendEvent out = *send;
    if (out.message) out.message = erase(*out.message);
    return out;
  }
  return e;
}

Trace erase_trace(const Trace& tr) {
  Trace out;
  out.states.reserve(tr.states.size());
  out.events.reserve(tr.events.size());
  for (const GlobalState& g : tr.states) out.states.push_back(erase(g));
  for (const Event& e : tr.events) out.events.push_back(erase(e));
  return out;
}

std::string event_to_string(const Event& e) {
  std::ostringstream os;
  if (const auto* c = std::get_if<CorruptEvent>(&e)) {
    os << "corrupt(";
    for (std::size_t i = 0; i < c->ids.size(); ++i)
      os << (i ? ", " : "") << c->ids[i];
    os << ')';
  } else if (const auto* n = std::get_if<NewEvent>(&e)) {
    os << "new(" << n->role;
    for (const std::string& id : n->ids) os << ", " << id;
    os << ')';
  } else {
    const auto& s = std::get<SendEvent>(e);
    os << "send(" << s.sid << ", ";
    if (s.message)
      os << *s.message;
    else
      os << "init";
    os << ')';
  }
  return os.str();
}

// ---- trace validation ----------------------------------------------------------

ValidationResult is_valid_trace(const Protocol& p, const Trace& tr,
                                const DeductionOptions& opts) {
  using Status = ValidationResult::Status;
  if (tr.states.size() != tr.events.size() + 1)
    return {Status::Malformed, "state/event count mismatch", 0};
  if (!(tr.states.front() == GlobalState::initial(p)))
    return {Status::Malformed, "trace does not start from the empty state", 0};

  for (std::size_t i = 0; i < tr.events.size(); ++i) {
    const GlobalState& pre = tr.states[i];
    const Event& ev = tr.events[i];
    if (std::holds_alternative<CorruptEvent>(ev) && i != 0)
      return {Status::Malformed, "corrupt after the first event", i};

    GlobalState next;
    try {
      if (const auto* c = std::get_if<CorruptEvent>(&ev)) {
        next = step_corrupt(p, pre, c->ids);
      } else if (const auto* n = std::get_if<NewEvent>(&ev)) {
        next = step_new(p, pre, n->role, n->ids);
      } else {
        const auto& s = std::get<SendEvent>(ev);
        if (s.message) {
          bool ok = p.labeled
                        ? deducible_labeled(pre.knowledge, *s.message, opts)
                        : deducible_unlabeled(pre.knowledge, *s.message, opts);
          if (!ok)
            return {Status::Invalid,
                    "message not deducible: " + s.message->to_string(), i};
        }
        next = step_send(p, pre, s.sid, s.message);
      }
    } catch (const ExecError& err) {
      return {Status::Malformed, err.what(), i};
    }
    if (!(next == tr.states[i + 1]))
      return {Status::Invalid,
              "recorded state is not the successor of its predecessor", i};
  }
  return {Status::Valid, "", 0};
}

// ---- bounded enumeration ---------------------------------------------------------

namespace {

// Cartesian product over per-variable candidate lists, emitted in order.
void product(const std::vector<std::pair<Variable, std::vector<Term>>>& domains,
             std::size_t at, Substitution& acc,
             const std::function<void(const Substitution&)>& out) {
  if (at == domains.size()) {
    out(acc);
    return;
  }
  for (const Term& cand : domains[at].second) {
    Substitution next = acc;
    next.bind(domains[at].first, cand);
    product(domains, at + 1, next, out);
  }
}

unsigned least_unused_adv_index(const KnowledgeSet& ks) {
  std::set<unsigned> used;
  std::function<void(const Term&)> scan = [&](const Term& t) {
    walk_subterms(t, [&](const Term& u) {
      if (const auto* l = u.get_if<Term::LabelN>())
        if (l->kind == LabelKind::Adversary) used.insert(l->index);
    });
  };
  for (const Term& t : ks.terms) scan(t);
  unsigned i = 1;
  while (used.count(i)) ++i;
  return i;
}

struct CandidateContext {
  const Protocol& protocol;
  const Bounds& bounds;
  const DeductionOptions& opts;
  const KnowledgeSet& ks;
  const Saturation& sat;
  DeductionMode mode;
};

std::vector<Term> label_candidates(const CandidateContext& cx) {
  std::set<Term> ags;
  for (const Term& t : cx.ks.terms)
    walk_subterms(t, [&](const Term& u) {
      if (const auto* l = u.get_if<Term::LabelN>())
        if (l->kind == LabelKind::Agent) ags.insert(u);
    });
  std::vector<Term> out(ags.begin(), ags.end());
  out.push_back(Term::adv(least_unused_adv_index(cx.ks)));
  return out;
}

std::vector<Term> nonce_candidates(const CandidateContext& cx) {
  std::set<Term> pool;
  for (const Term& t : cx.sat.closed)
    if (t.kind() == Term::Kind::Nonce) pool.insert(t);
  for (const std::string& a : cx.ks.corrupted)
    for (unsigned j : nonce_indices(cx.protocol))
      for (unsigned s = 1; s <= std::max(1u, cx.bounds.max_sessions); ++s)
        pool.insert(Term::nonce(a, j, s));
  return {pool.begin(), pool.end()};
}

std::vector<Term> agent_candidates(const CandidateContext& cx) {
  std::vector<Term> out;
  for (const std::string& a : cx.protocol.universe) out.push_back(Term::agent(a));
  return out;
}

// Ciphertexts / signatures the adversary can hand over: everything of that
// sort already analyzable, plus freshly minted ones over shallow deducible
// payloads, carrying the canonical adversary label (labeled mode only).
std::vector<Term> crypto_candidates(const CandidateContext& cx,
                                    bool signatures) {
  std::set<Term> pool;
  for (const Term& t : cx.sat.closed)
    if (t.kind() == (signatures ? Term::Kind::Sig : Term::Kind::Enc))
      pool.insert(t);

  std::set<Term> payloads;
  for (const Term& t : cx.sat.closed)
    if (t.depth() + 1 <= cx.bounds.msg_depth) payloads.insert(t);
  for (const std::string& a : cx.protocol.universe) payloads.insert(Term::agent(a));
  for (const Term& n : nonce_candidates(cx)) payloads.insert(n);

  std::optional<Term> label;
  if (cx.mode == DeductionMode::Labeled)
    label = Term::adv(least_unused_adv_index(cx.ks));
  for (const std::string& a : cx.protocol.universe) {
    Term id = Term::agent(a);
    Term key = signatures ? Term::sk(id) : Term::ek(id);
    if (!synthesizable(cx.sat, cx.ks, key, cx.mode, cx.opts)) continue;
    for (const Term& payload : payloads) {
      if (payload.depth() + 1 > cx.bounds.msg_depth) continue;
      Term minted = signatures ? Term::sig(payload, key, label)
                               : Term::enc(payload, key, label);
      if (synthesizable(cx.sat, cx.ks, minted, cx.mode, cx.opts))
        pool.insert(minted);
    }
  }
  return {pool.begin(), pool.end()};
}

// All adversary messages worth sending to a session expecting `pattern`:
// saturated-knowledge replays that match, plus instantiations of the
// pattern whose unbound variables are filled with obtainable terms. Every
// candidate is deducible and matches by construction.
std::vector<Term> candidate_messages(const CandidateContext& cx,
                                     const Term& pattern) {
  std::set<Term> out;
  for (const Term& h : cx.sat.closed)
    if (h.ground() && match(pattern, h)) out.insert(h);

  std::set<Variable> vars = variables(pattern);
  if (!vars.empty()) {
    std::vector<std::pair<Variable, std::vector<Term>>> domains;
    for (const Variable& v : vars) {
      switch (v.sort) {
        case VarSort::Agent:
          domains.emplace_back(v, agent_candidates(cx));
          break;
        case VarSort::Nonce:
          domains.emplace_back(v, nonce_candidates(cx));
          break;
        case VarSort::Ciphertext:
          domains.emplace_back(v, crypto_candidates(cx, false));
          break;
        case VarSort::Signature:
          domains.emplace_back(v, crypto_candidates(cx, true));
          break;
        case VarSort::Label:
          domains.emplace_back(v, label_candidates(cx));
          break;
      }
    }
    Substitution acc;
    product(domains, 0, acc, [&](const Substitution& theta) {
      Term m = apply(theta, pattern);
      if (!m.ground()) return;
      if (synthesizable(cx.sat, cx.ks, m, cx.mode, cx.opts)) out.insert(m);
    });
  } else if (pattern.ground() &&
             synthesizable(cx.sat, cx.ks, pattern, cx.mode, cx.opts)) {
    out.insert(pattern);
  }
  return {out.begin(), out.end()};
}

struct Enumerator {
  const Protocol& protocol;
  const Bounds& bounds;
  const DeductionOptions& opts;
  const std::function<bool(const Trace&)>& visit;
  DeductionMode mode;
  bool stopped = false;

  bool role_cap_reached(const GlobalState& g, unsigned role) const {
    if (bounds.sessions_per_role == 0) return false;
    unsigned count = 0;
    for (const SessionId& sid : g.sessions)
      if (sid.role == role) ++count;
    return count >= bounds.sessions_per_role;
  }

  struct NewOption {
    unsigned role;
    std::vector<std::string> ids;
    std::size_t template_index;  // npos when not template-driven
  };
  static constexpr std::size_t kNoTemplate = static_cast<std::size_t>(-1);

  std::vector<NewOption> new_options(const GlobalState& g,
                                     const std::vector<bool>& templates_used) const {
    std::vector<NewOption> out;
    if (g.sessions.size() >= bounds.max_sessions) return out;
    if (!bounds.session_templates.empty()) {
      for (std::size_t i = 0; i < bounds.session_templates.size(); ++i) {
        const SessionTemplate& t = bounds.session_templates[i];
        if (templates_used[i] || role_cap_reached(g, t.role)) continue;
        bool duplicate = false;
        for (std::size_t k = 0; k < i; ++k)
          if (!templates_used[k] && bounds.session_templates[k].role == t.role &&
              bounds.session_templates[k].ids == t.ids) {
            duplicate = true;  // an identical unused template already branches
            break;
          }
        if (!duplicate) out.push_back({t.role, t.ids, i});
      }
      return out;
    }
    std::vector<std::vector<std::string>> tuples = {{}};
    for (unsigned j = 0; j < protocol.parties; ++j) {
      std::vector<std::vector<std::string>> next;
      for (const auto& prefix : tuples)
        for (const std::string& id : protocol.universe) {
          auto t = prefix;
          t.push_back(id);
          next.push_back(std::move(t));
        }
      tuples = std::move(next);
    }
    for (unsigned role = 1; role <= protocol.parties; ++role) {
      if (role_cap_reached(g, role)) continue;
      for (const auto& ids : tuples) out.push_back({role, ids, kNoTemplate});
    }
    return out;
  }

  // Recursive depth-first expansion. Emits `trace` itself, then children.
  void expand(const Trace& trace, const std::vector<bool>& templates_used,
              const Saturation& sat) {
    if (stopped) return;
    if (!visit(trace)) {
      stopped = true;
      return;
    }
    if (trace.events.size() >= bounds.max_events) return;
    const GlobalState& g = trace.last();

    // The first move picks one corruption option; the empty option is the
    // honest world and continues below without a corrupt event.
    if (trace.events.empty()) {
      bool honest = bounds.corrupt_options.empty();
      for (const auto& ids : bounds.corrupt_options) {
        if (ids.empty()) {
          honest = true;
          continue;
        }
        Trace child = trace;
        child.events.emplace_back(CorruptEvent{ids});
        child.states.push_back(step_corrupt(protocol, g, ids));
        expand(child, templates_used, analyze(child.last().knowledge, opts));
        if (stopped) return;
      }
      if (!honest) return;
    }

    for (const NewOption& opt : new_options(g, templates_used)) {
      Trace child = trace;
      child.events.emplace_back(NewEvent{opt.role, opt.ids});
      child.states.push_back(step_new(protocol, g, opt.role, opt.ids));
      auto used = templates_used;
      if (opt.template_index != kNoTemplate) used[opt.template_index] = true;
      expand(child, used, sat);  // H unchanged: reuse the saturation
      if (stopped) return;
    }

    CandidateContext cx{protocol, bounds, opts, g.knowledge, sat, mode};
    for (const SessionId& sid : g.sessions) {
      const LocalState& local = g.locals.at(sid.number);
      const Role& role = protocol.role(local.role);
      if (local.point > role.steps.size()) continue;  // finished
      const RoleStep& st = role.steps[local.point - 1];

      std::vector<std::optional<Term>> messages;
      if (!st.recv) {
        messages.push_back(std::nullopt);  // init ping
      } else {
        Term expected = apply(local.sigma, *st.recv);
        for (const Term& m : candidate_messages(cx, expected))
          messages.push_back(m);
      }
      for (const auto& m : messages) {
        Trace child = trace;
        child.events.emplace_back(SendEvent{sid.number, m});
        GlobalState next = step_send(protocol, g, sid.number, m);
        bool advanced = !(next == g);
        child.states.push_back(std::move(next));
        if (advanced) {
          const KnowledgeSet& nk = child.last().knowledge;
          if (nk == g.knowledge)
            expand(child, templates_used, sat);
          else
            expand(child, templates_used, analyze(nk, opts));
        } else {
          if (!visit(child)) {  // emitted, never expanded
            stopped = true;
          }
        }
        if (stopped) return;
      }

      if (bounds.explore_failed_sends && st.recv &&
          !protocol.universe.empty()) {
        // the canonical junk message: a plain agent identity
        Term junk = Term::agent(protocol.universe.front());
        Term expected = apply(local.sigma, *st.recv);
        if (!match(expected, junk)) {
          Trace child = trace;
          child.events.emplace_back(SendEvent{sid.number, junk});
          child.states.push_back(g);
          if (!visit(child)) stopped = true;  // leaf: state unchanged
          if (stopped) return;
        }
      }
    }
  }
};

}  // namespace

void enumerate_traces(const Protocol& p, const Bounds& bounds,
                      const std::function<bool(const Trace&)>& visit,
                      const DeductionOptions& opts) {
  validate_protocol(p);
  Trace root;
  root.states.push_back(GlobalState::initial(p));
  Enumerator en{p, bounds, opts, visit,
                p.labeled ? DeductionMode::Labeled : DeductionMode::Unlabeled};
  std::vector<bool> used(bounds.session_templates.size(), false);
  en.expand(root, used, analyze(root.last().knowledge, opts));
}

std::vector<Trace> collect_traces(const Protocol& p, const Bounds& bounds,
                                  const DeductionOptions& opts) {
  std::vector<Trace> out;
  enumerate_traces(
      p, bounds,
      [&](const Trace& tr) {
        out.push_back(tr);
        return true;
      },
      opts);
  return out;
}

}  // namespace lsv

#include "lsv/generators.hpp"

#include <algorithm>
#include <set>

namespace lsv {

namespace {

Term random_label(Rng& rng) {
  return rng.chance(0.5) ? Term::ag(rng.range(1, 3)) : Term::adv(rng.range(1, 3));
}

Term random_key(Rng& rng, const std::vector<std::string>& agents) {
  static const KeyKind kinds[] = {KeyKind::Enc, KeyKind::Dec, KeyKind::Sig,
                                  KeyKind::Ver};
  return Term::key(kinds[rng.range(0, 3)], Term::agent(rng.pick(agents)));
}

}  // namespace

Term random_ground_term(Rng& rng, const std::vector<std::string>& agents,
                        unsigned depth, bool labeled) {
  unsigned shape = depth == 0 ? rng.range(0, 2) : rng.range(0, 5);
  switch (shape) {
    case 0:
      return Term::agent(rng.pick(agents));
    case 1:
      return Term::nonce(rng.pick(agents), rng.range(1, 2), rng.range(1, 2));
    case 2:
      return random_key(rng, agents);
    case 3:
      return Term::pair(random_ground_term(rng, agents, depth - 1, labeled),
                        random_ground_term(rng, agents, depth - 1, labeled));
    case 4: {
      Term key = Term::ek(Term::agent(rng.pick(agents)));
      std::optional<Term> label;
      if (labeled) label = random_label(rng);
      return Term::enc(random_ground_term(rng, agents, depth - 1, labeled), key,
                       label);
    }
    default: {
      Term key = Term::sk(Term::agent(rng.pick(agents)));
      std::optional<Term> label;
      if (labeled) label = random_label(rng);
      return Term::sig(random_ground_term(rng, agents, depth - 1, labeled), key,
                       label);
    }
  }
}

Substitution random_substitution(Rng& rng,
                                 const std::vector<std::string>& agents,
                                 bool labeled) {
  Substitution sigma;
  unsigned n = rng.range(0, 4);
  for (unsigned i = 0; i < n; ++i) {
    switch (rng.range(0, 4)) {
      case 0: {
        Variable v = Variable::agent(rng.range(1, 3));
        if (!sigma.contains(v)) sigma.bind(v, Term::agent(rng.pick(agents)));
        break;
      }
      case 1: {
        Variable v = Variable::nonce(rng.range(1, 2), rng.range(1, 3));
        if (!sigma.contains(v))
          sigma.bind(v, Term::nonce(rng.pick(agents), rng.range(1, 2),
                                    rng.range(1, 2)));
        break;
      }
      case 2: {
        Variable v = Variable::ciphertext(rng.range(1, 2), rng.range(1, 3));
        std::optional<Term> label;
        if (labeled) label = random_label(rng);
        if (!sigma.contains(v))
          sigma.bind(v, Term::enc(random_ground_term(rng, agents, 1, labeled),
                                  Term::ek(Term::agent(rng.pick(agents))), label));
        break;
      }
      case 3: {
        Variable v = Variable::signature(rng.range(1, 2), rng.range(1, 3));
        std::optional<Term> label;
        if (labeled) label = random_label(rng);
        if (!sigma.contains(v))
          sigma.bind(v, Term::sig(random_ground_term(rng, agents, 1, labeled),
                                  Term::sk(Term::agent(rng.pick(agents))), label));
        break;
      }
      default: {
        Variable v = Variable::label(rng.range(1, 3));
        if (labeled && !sigma.contains(v)) sigma.bind(v, random_label(rng));
        break;
      }
    }
  }
  return sigma;
}

namespace {

Term random_pattern(Rng& rng, const std::vector<std::string>& agents,
                    unsigned depth, bool labeled, unsigned& fresh,
                    std::vector<Variable>& vars) {
  auto new_var = [&](VarSort sort) {
    Variable v;
    switch (sort) {
      case VarSort::Agent: v = Variable::agent(rng.range(1, 3)); break;
      case VarSort::Nonce: v = Variable::nonce(++fresh, rng.range(1, 3)); break;
      case VarSort::Ciphertext:
        v = Variable::ciphertext(++fresh, rng.range(1, 3));
        break;
      case VarSort::Signature:
        v = Variable::signature(++fresh, rng.range(1, 3));
        break;
      case VarSort::Label: v = Variable::label(++fresh); break;
    }
    vars.push_back(v);
    return Term::var(v);
  };
  unsigned shape = depth == 0 ? rng.range(0, 2) : rng.range(0, 5);
  switch (shape) {
    case 0:
      // occasionally reuse an existing variable: non-linear patterns
      if (!vars.empty() && rng.chance(0.3)) {
        const Variable& v = rng.pick(vars);
        if (v.sort != VarSort::Label) return Term::var(v);
      }
      return new_var(rng.chance(0.5) ? VarSort::Nonce : VarSort::Agent);
    case 1:
      return Term::agent(rng.pick(agents));
    case 2:
      return Term::nonce(rng.pick(agents), rng.range(1, 2), rng.range(1, 2));
    case 3:
      return Term::pair(
          random_pattern(rng, agents, depth - 1, labeled, fresh, vars),
          random_pattern(rng, agents, depth - 1, labeled, fresh, vars));
    case 4: {
      std::optional<Term> label;
      if (labeled)
        label = rng.chance(0.5) ? new_var(VarSort::Label) : random_label(rng);
      return Term::enc(
          random_pattern(rng, agents, depth - 1, labeled, fresh, vars),
          Term::ek(Term::agent(rng.pick(agents))), label);
    }
    default:
      return new_var(rng.chance(0.5) ? VarSort::Ciphertext : VarSort::Signature);
  }
}

}  // namespace

PatternCase random_pattern_case(Rng& rng, const std::vector<std::string>& agents,
                                bool labeled) {
  unsigned fresh = 10;  // fresh variable indices start above hand-written ones
  std::vector<Variable> vars;
  Term pattern = random_pattern(rng, agents, rng.range(1, 3), labeled, fresh, vars);
  Substitution filling;
  for (const Variable& v : vars) {
    if (filling.contains(v)) continue;
    switch (v.sort) {
      case VarSort::Agent:
        filling.bind(v, Term::agent(rng.pick(agents)));
        break;
      case VarSort::Nonce:
        filling.bind(v, Term::nonce(rng.pick(agents), rng.range(1, 2),
                                    rng.range(1, 2)));
        break;
      case VarSort::Ciphertext: {
        std::optional<Term> label;
        if (labeled) label = random_label(rng);
        filling.bind(v, Term::enc(random_ground_term(rng, agents, 1, labeled),
                                  Term::ek(Term::agent(rng.pick(agents))), label));
        break;
      }
      case VarSort::Signature: {
        std::optional<Term> label;
        if (labeled) label = random_label(rng);
        filling.bind(v, Term::sig(random_ground_term(rng, agents, 1, labeled),
                                  Term::sk(Term::agent(rng.pick(agents))), label));
        break;
      }
      case VarSort::Label:
        filling.bind(v, random_label(rng));
        break;
    }
  }
  return {pattern, filling};
}

DerivableCase random_derivable_case(Rng& rng, unsigned max_agents,
                                    unsigned build_steps) {
  static const std::vector<std::string> names = {"a1", "a2", "a3"};
  unsigned agent_count = rng.range(1, std::min<unsigned>(max_agents, 3));
  std::vector<std::string> agents(names.begin(), names.begin() + agent_count);

  KnowledgeSet ks;
  ks.universe.insert(agents.begin(), agents.end());
  for (const std::string& a : agents)
    if (rng.chance(0.35)) ks.corrupt(a);

  unsigned seeds = rng.range(0, 4);
  for (unsigned i = 0; i < seeds; ++i)
    ks.terms.insert(random_ground_term(rng, agents, rng.range(0, 3), true));

  // Forward application of the rules: everything in the pool is derivable.
  std::vector<Term> pool(ks.terms.begin(), ks.terms.end());
  for (const std::string& a : agents) {
    pool.push_back(Term::agent(a));
    pool.push_back(Term::ek(Term::agent(a)));
    pool.push_back(Term::vk(Term::agent(a)));
  }
  for (const std::string& a : ks.corrupted) {
    pool.push_back(Term::dk(Term::agent(a)));
    pool.push_back(Term::sk(Term::agent(a)));
    pool.push_back(Term::nonce(a, rng.range(1, 2), rng.range(1, 2)));
  }

  for (unsigned step = 0; step < build_steps; ++step) {
    switch (rng.range(0, 5)) {
      case 0:
        pool.push_back(Term::pair(rng.pick(pool), rng.pick(pool)));
        break;
      case 1:
        pool.push_back(Term::enc(rng.pick(pool),
                                 Term::ek(Term::agent(rng.pick(agents))),
                                 Term::adv(rng.range(1, 3))));
        break;
      case 2: {
        std::vector<Term> sks;
        for (const Term& t : pool)
          if (const auto* k = t.get_if<Term::KeyN>())
            if (k->kind == KeyKind::Sig && k->id.kind() == Term::Kind::Agent)
              sks.push_back(t);
        if (!sks.empty())
          pool.push_back(
              Term::sig(rng.pick(pool), rng.pick(sks), Term::adv(rng.range(1, 3))));
        break;
      }
      case 3: {
        std::vector<Term> pairs;
        for (const Term& t : pool)
          if (t.kind() == Term::Kind::Pair) pairs.push_back(t);
        if (!pairs.empty()) {
          const auto& p = rng.pick(pairs).as<Term::PairN>();
          pool.push_back(rng.chance(0.5) ? p.first : p.second);
        }
        break;
      }
      case 4: {
        std::vector<Term> openable;
        std::set<Term> have(pool.begin(), pool.end());
        for (const Term& t : pool)
          if (const auto* e = t.get_if<Term::EncN>())
            if (const auto* k = e->key.get_if<Term::KeyN>())
              if (k->id.kind() == Term::Kind::Agent &&
                  have.count(Term::dk(k->id)))
                openable.push_back(t);
        if (!openable.empty())
          pool.push_back(rng.pick(openable).as<Term::EncN>().plain);
        break;
      }
      default: {
        std::vector<Term> sigs;
        for (const Term& t : pool)
          if (t.kind() == Term::Kind::Sig) sigs.push_back(t);
        if (!sigs.empty()) pool.push_back(rng.pick(sigs).as<Term::SigN>().body);
        break;
      }
    }
  }
  return {ks, pool.back()};
}

// ---- random protocols -------------------------------------------------------

Protocol random_protocol(Rng& rng, unsigned max_steps_per_role,
                         unsigned max_depth) {
  Protocol p;
  p.name = "fuzz";
  p.parties = 2;
  p.universe = {"a1", "a2"};
  p.labeled = true;

  for (unsigned role = 1; role <= p.parties; ++role) {
    Role r;
    unsigned len = rng.range(0, max_steps_per_role);
    std::vector<Variable> bound;  // receivable variables already bound
    for (unsigned j = 1; j <= p.parties; ++j) bound.push_back(Variable::agent(j));
    Variable own = Variable::nonce(1, role);
    bool own_used = false;
    unsigned fresh = 0;

    // terms built only from bound material, every enc labeled with agent
    // randomness
    std::function<Term(unsigned)> send_term = [&](unsigned depth) -> Term {
      unsigned shape = depth == 0 ? rng.range(0, 1) : rng.range(0, 3);
      switch (shape) {
        case 0: {
          std::vector<Term> atoms;
          for (const Variable& v : bound)
            if (v.sort != VarSort::Label) atoms.push_back(Term::var(v));
          atoms.push_back(Term::var(own));
          Term out = rng.pick(atoms);
          if (out == Term::var(own)) own_used = true;
          return out;
        }
        case 1:
          return Term::agent(rng.pick(p.universe));
        case 2:
          return Term::pair(send_term(depth - 1), send_term(depth - 1));
        default:
          return Term::enc(send_term(depth - 1),
                           Term::ek(Term::var(Variable::agent(rng.range(1, 2)))),
                           Term::ag(rng.range(1, 3)));
      }
    };

    std::function<Term(unsigned)> recv_pattern = [&](unsigned depth) -> Term {
      unsigned shape = depth == 0 ? rng.range(0, 1) : rng.range(0, 3);
      switch (shape) {
        case 0: {
          // a fresh variable to be bound by this receive
          Variable v = rng.chance(0.5)
                           ? Variable::nonce(10 + ++fresh, 3 - role)
                           : Variable::ciphertext(10 + ++fresh, role);
          bound.push_back(v);
          return Term::var(v);
        }
        case 1:
          return rng.chance(0.5)
                     ? Term::var(Variable::agent(rng.range(1, 2)))
                     : Term::agent(rng.pick(p.universe));
        case 2:
          return Term::pair(recv_pattern(depth - 1), recv_pattern(depth - 1));
        default: {
          Term label = rng.chance(0.5) ? Term::var(Variable::label(10 + ++fresh))
                                       : Term::ag(rng.range(1, 3));
          if (label.kind() == Term::Kind::Var)
            bound.push_back(label.as<Term::VarN>().var);
          return Term::enc(recv_pattern(depth - 1),
                           Term::ek(Term::var(Variable::agent(rng.range(1, 2)))),
                           label);
        }
      }
    };

    for (unsigned q = 1; q <= len; ++q) {
      RoleStep st;
      if (q == 1 && rng.chance(0.4)) {
        // init step
      } else {
        st.recv = recv_pattern(rng.range(1, max_depth));
      }
      if (q == len && rng.chance(0.35)) {
        // stop step
      } else {
        if (rng.chance(0.5)) own_used = true;  // encourage own-nonce use
        Term out = own_used && rng.chance(0.6)
                       ? Term::enc(Term::var(own),
                                   Term::ek(Term::var(Variable::agent(
                                       rng.range(1, 2)))),
                                   Term::ag(rng.range(1, 3)))
                       : send_term(rng.range(1, max_depth));
        st.send = out;
      }
      r.steps.push_back(std::move(st));
    }
    p.roles.push_back(std::move(r));
  }
  validate_protocol(p);
  return p;
}

// ---- random formulas ---------------------------------------------------------

namespace {

// Variables certainly bound in every local state of role i at point p.
std::vector<Variable> bound_at(const Protocol& p, unsigned role, unsigned point) {
  std::vector<Variable> out;
  for (unsigned j = 1; j <= p.parties; ++j) out.push_back(Variable::agent(j));
  const Role& r = p.role(role);
  for (const RoleStep& st : r.steps)
    for (const auto* side : {&st.recv, &st.send}) {
      if (!*side) continue;
      for (const Variable& v : variables(**side))
        if (v.sort == VarSort::Nonce && v.owner == role &&
            std::find(out.begin(), out.end(), v) == out.end())
          out.push_back(v);
    }
  for (unsigned q = 1; q < point && q <= r.steps.size(); ++q) {
    if (!r.steps[q - 1].recv) continue;
    for (const Variable& v : variables(*r.steps[q - 1].recv))
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

struct QuantifierPick {
  unsigned role, point;
  std::string subvar;
  std::vector<Variable> bound;
};

std::vector<QuantifierPick> pick_quantifiers(Rng& rng, const Protocol& p,
                                             unsigned count) {
  static const char* names[] = {"s", "t", "u"};
  std::vector<QuantifierPick> out;
  for (unsigned i = 0; i < count; ++i) {
    unsigned role = rng.range(1, p.parties);
    unsigned point = rng.range(1, static_cast<unsigned>(p.role(role).steps.size()) + 1);
    out.push_back({role, point, names[i], bound_at(p, role, point)});
  }
  return out;
}

Term simple_item(Rng& rng, const std::vector<QuantifierPick>& qs) {
  // a simple formula term: sub-applied agent/nonce variable or a constant
  for (unsigned attempt = 0; attempt < 8; ++attempt) {
    const QuantifierPick& q = qs[rng.range(0, static_cast<unsigned>(qs.size()) - 1)];
    std::vector<Variable> candidates;
    for (const Variable& v : q.bound)
      if (v.sort == VarSort::Agent || v.sort == VarSort::Nonce)
        candidates.push_back(v);
    if (!candidates.empty() && rng.chance(0.8))
      return Term::sub_app(q.subvar, rng.pick(candidates));
  }
  return rng.chance(0.5) ? Term::agent(rng.chance(0.5) ? "a1" : "a2")
                         : Term::nonce(rng.chance(0.5) ? "a1" : "a2", 1, 1);
}

Term any_item(Rng& rng, const std::vector<QuantifierPick>& qs) {
  const QuantifierPick& q = qs[rng.range(0, static_cast<unsigned>(qs.size()) - 1)];
  // label variables live in label slots only, never as standalone terms
  std::vector<Variable> candidates;
  for (const Variable& v : q.bound)
    if (v.sort != VarSort::Label) candidates.push_back(v);
  if (!candidates.empty() && rng.chance(0.7))
    return Term::sub_app(q.subvar, rng.pick(candidates));
  return simple_item(rng, qs);
}

Formula l2_atom(Rng& rng, const std::vector<QuantifierPick>& qs) {
  switch (rng.range(0, 3)) {
    case 0: {
      const QuantifierPick& q =
          qs[rng.range(0, static_cast<unsigned>(qs.size()) - 1)];
      Formula nc = Formula::nc(
          Term::sub_app(q.subvar, Variable::agent(rng.range(1, 2))));
      return rng.chance(0.4) ? Formula::negation(nc) : nc;
    }
    case 1:
      return Formula::eq(simple_item(rng, qs), simple_item(rng, qs));
    default:
      return Formula::neq(any_item(rng, qs), any_item(rng, qs));
  }
}

Formula combine(Rng& rng, std::vector<Formula> atoms) {
  Formula out = atoms.back();
  atoms.pop_back();
  while (!atoms.empty()) {
    out = rng.chance(0.5) ? Formula::conj(atoms.back(), out)
                          : Formula::disj(atoms.back(), out);
    atoms.pop_back();
  }
  return out;
}

}  // namespace

Formula random_l2_formula(Rng& rng, const Protocol& p) {
  unsigned quant_count = rng.range(1, 2);
  auto qs = pick_quantifiers(rng, p, quant_count);

  std::vector<Formula> atoms;
  unsigned n = rng.range(1, 3);
  for (unsigned i = 0; i < n; ++i) atoms.push_back(l2_atom(rng, qs));
  Formula body = combine(rng, std::move(atoms));

  if (rng.chance(0.5)) {
    // an implication whose premise negates cleanly inside the fragment
    std::vector<Formula> premise;
    unsigned m = rng.range(1, 2);
    for (unsigned i = 0; i < m; ++i) {
      if (rng.chance(0.6)) {
        const QuantifierPick& q =
            qs[rng.range(0, static_cast<unsigned>(qs.size()) - 1)];
        premise.push_back(Formula::nc(
            Term::sub_app(q.subvar, Variable::agent(rng.range(1, 2)))));
      } else {
        premise.push_back(Formula::eq(simple_item(rng, qs), simple_item(rng, qs)));
      }
    }
    body = Formula::implies(combine(rng, std::move(premise)), body);
  }

  for (auto it = qs.rbegin(); it != qs.rend(); ++it)
    body = rng.chance(0.7)
               ? Formula::forall_ls(it->role, it->point, it->subvar, body)
               : Formula::exists_ls(it->role, it->point, it->subvar, body);
  return body;
}

Formula random_l1_formula(Rng& rng, const Protocol& p) {
  unsigned quant_count = rng.range(1, 2);
  auto qs = pick_quantifiers(rng, p, quant_count);

  std::vector<Formula> atoms;
  unsigned n = rng.range(1, 4);
  for (unsigned i = 0; i < n; ++i) {
    Formula atom = rng.chance(0.5)
                       ? l2_atom(rng, qs)
                       : Formula::eq(any_item(rng, qs), any_item(rng, qs));
    while (rng.chance(0.35)) atom = Formula::negation(atom);
    atoms.push_back(atom);
  }
  Formula body = combine(rng, std::move(atoms));
  if (rng.chance(0.3)) body = Formula::negation(body);

  for (auto it = qs.rbegin(); it != qs.rend(); ++it) {
    body = rng.chance(0.5)
               ? Formula::forall_ls(it->role, it->point, it->subvar, body)
               : Formula::exists_ls(it->role, it->point, it->subvar, body);
    if (rng.chance(0.25)) body = Formula::negation(body);
  }
  return body;
}

}  // namespace lsv

#include "lsv/logic.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

namespace lsv {

// ---- construction -----------------------------------------------------------

Formula Formula::make(Rep rep) {
  return Formula(std::make_shared<const Rep>(std::move(rep)));
}

Formula Formula::nc(Term t) {
  Rep r;
  r.kind = Kind::Nc;
  r.t1 = std::move(t);
  return make(std::move(r));
}

Formula Formula::eq(Term lhs, Term rhs) {
  Rep r;
  r.kind = Kind::Eq;
  r.t1 = std::move(lhs);
  r.t2 = std::move(rhs);
  return make(std::move(r));
}

Formula Formula::neq(Term lhs, Term rhs) {
  Rep r;
  r.kind = Kind::Neq;
  r.t1 = std::move(lhs);
  r.t2 = std::move(rhs);
  return make(std::move(r));
}

Formula Formula::negation(Formula f) {
  Rep r;
  r.kind = Kind::Not;
  r.children.push_back(std::move(f));
  return make(std::move(r));
}

Formula Formula::conj(Formula a, Formula b) {
  Rep r;
  r.kind = Kind::And;
  r.children.push_back(std::move(a));
  r.children.push_back(std::move(b));
  return make(std::move(r));
}

Formula Formula::disj(Formula a, Formula b) {
  Rep r;
  r.kind = Kind::Or;
  r.children.push_back(std::move(a));
  r.children.push_back(std::move(b));
  return make(std::move(r));
}

Formula Formula::implies(Formula a, Formula b) {
  return disj(negation(std::move(a)), std::move(b));
}

Formula Formula::forall_ls(unsigned role, unsigned point, std::string subvar,
                           Formula body) {
  Rep r;
  r.kind = Kind::Forall;
  r.role = role;
  r.point = point;
  r.subvar = std::move(subvar);
  r.children.push_back(std::move(body));
  return make(std::move(r));
}

Formula Formula::exists_ls(unsigned role, unsigned point, std::string subvar,
                           Formula body) {
  Rep r;
  r.kind = Kind::Exists;
  r.role = role;
  r.point = point;
  r.subvar = std::move(subvar);
  r.children.push_back(std::move(body));
  return make(std::move(r));
}

bool Formula::operator==(const Formula& other) const {
  if (rep_ == other.rep_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::Nc:
      return lhs() == other.lhs();
    case Kind::Eq:
    case Kind::Neq:
      return lhs() == other.lhs() && rhs() == other.rhs();
    case Kind::Not:
      return child() == other.child();
    case Kind::And:
    case Kind::Or:
      return child(0) == other.child(0) && child(1) == other.child(1);
    case Kind::Forall:
    case Kind::Exists:
      return role() == other.role() && point() == other.point() &&
             subvar() == other.subvar() && child() == other.child();
  }
  return false;
}

// ---- printing -----------------------------------------------------------------

namespace {

// precedence: quantifier < or < and < not/atom
void print_formula(std::ostream& os, const Formula& f, int parent_prec) {
  auto wrap = [&](int prec, auto&& body) {
    bool need = prec < parent_prec;
    if (need) os << '(';
    body();
    if (need) os << ')';
  };
  switch (f.kind()) {
    case Formula::Kind::Nc:
      os << "NC(" << f.lhs() << ')';
      return;
    case Formula::Kind::Eq:
      wrap(3, [&] { os << f.lhs() << " = " << f.rhs(); });
      return;
    case Formula::Kind::Neq:
      wrap(3, [&] { os << f.lhs() << " != " << f.rhs(); });
      return;
    case Formula::Kind::Not:
      os << '!';
      print_formula(os, f.child(), 4);
      return;
    case Formula::Kind::And:
      wrap(2, [&] {
        print_formula(os, f.child(0), 2);
        os << " && ";
        print_formula(os, f.child(1), 3);
      });
      return;
    case Formula::Kind::Or:
      wrap(1, [&] {
        print_formula(os, f.child(0), 1);
        os << " || ";
        print_formula(os, f.child(1), 2);
      });
      return;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      wrap(0, [&] {
        os << (f.kind() == Formula::Kind::Forall ? "forall" : "exists")
           << " LS(" << f.role() << ", " << f.point() << ") as " << f.subvar()
           << " . ";
        print_formula(os, f.child(), 0);
      });
      return;
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::ostringstream os;
  print_formula(os, *this, 0);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Formula& f) {
  print_formula(os, f, 0);
  return os;
}

// ---- free substitution variables ------------------------------------------------

namespace {

void term_subvars(const Term& t, std::vector<std::string>& out) {
  switch (t.kind()) {
    case Term::Kind::SubApp:
      out.push_back(t.as<Term::SubAppN>().subvar);
      break;
    case Term::Kind::Key:
      term_subvars(t.as<Term::KeyN>().id, out);
      break;
    case Term::Kind::Pair: {
      const auto& p = t.as<Term::PairN>();
      term_subvars(p.first, out);
      term_subvars(p.second, out);
      break;
    }
    case Term::Kind::Enc: {
      const auto& e = t.as<Term::EncN>();
      term_subvars(e.plain, out);
      term_subvars(e.key, out);
      if (e.label) term_subvars(*e.label, out);
      break;
    }
    case Term::Kind::Sig: {
      const auto& s = t.as<Term::SigN>();
      term_subvars(s.body, out);
      term_subvars(s.key, out);
      if (s.label) term_subvars(*s.label, out);
      break;
    }
    default:
      break;
  }
}

void collect_free(const Formula& f, std::vector<std::string>& bound,
                  std::vector<std::string>& out) {
  switch (f.kind()) {
    case Formula::Kind::Nc: {
      std::vector<std::string> used;
      term_subvars(f.lhs(), used);
      for (auto& s : used)
        if (std::find(bound.begin(), bound.end(), s) == bound.end())
          out.push_back(s);
      return;
    }
    case Formula::Kind::Eq:
    case Formula::Kind::Neq: {
      std::vector<std::string> used;
      term_subvars(f.lhs(), used);
      term_subvars(f.rhs(), used);
      for (auto& s : used)
        if (std::find(bound.begin(), bound.end(), s) == bound.end())
          out.push_back(s);
      return;
    }
    case Formula::Kind::Not:
      collect_free(f.child(), bound, out);
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      collect_free(f.child(0), bound, out);
      collect_free(f.child(1), bound, out);
      return;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      bound.push_back(f.subvar());
      collect_free(f.child(), bound, out);
      bound.pop_back();
      return;
  }
}

}  // namespace

std::vector<std::string> free_subvars(const Formula& f) {
  std::vector<std::string> bound, out;
  collect_free(f, bound, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---- local states ------------------------------------------------------------------

std::vector<LocalState> local_states(const Trace& tr, unsigned role,
                                     unsigned point) {
  std::vector<LocalState> out;
  for (const GlobalState& g : tr.states)
    for (const auto& [sid, local] : g.locals) {
      if (local.role != role || local.point != point) continue;
      bool seen = false;
      for (const LocalState& prev : out)
        if (prev == local) {
          seen = true;
          break;
        }
      if (!seen) out.push_back(local);
    }
  std::sort(out.begin(), out.end(), [](const LocalState& a, const LocalState& b) {
    return a.sigma < b.sigma;
  });
  return out;
}

// ---- interpretation ----------------------------------------------------------------

namespace {

using Env = std::vector<std::pair<std::string, const Substitution*>>;

const Substitution* env_lookup(const Env& env, const std::string& name) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == name) return it->second;
  return nullptr;
}

Term eval_term(const Term& t, const Env& env) {
  switch (t.kind()) {
    case Term::Kind::SubApp: {
      const auto& s = t.as<Term::SubAppN>();
      const Substitution* theta = env_lookup(env, s.subvar);
      if (!theta)
        throw EvalError("unbound substitution variable " + s.subvar);
      if (auto img = theta->lookup(s.arg)) return *img;
      throw EvalError("variable " + s.arg.name() + " has no binding under " +
                      s.subvar);
    }
    case Term::Kind::Key: {
      const auto& k = t.as<Term::KeyN>();
      return Term::key(k.kind, eval_term(k.id, env));
    }
    case Term::Kind::Pair: {
      const auto& p = t.as<Term::PairN>();
      return Term::pair(eval_term(p.first, env), eval_term(p.second, env));
    }
    case Term::Kind::Enc: {
      const auto& e = t.as<Term::EncN>();
      std::optional<Term> label;
      if (e.label) label = eval_term(*e.label, env);
      return Term::enc(eval_term(e.plain, env), eval_term(e.key, env),
                       std::move(label));
    }
    case Term::Kind::Sig: {
      const auto& s = t.as<Term::SigN>();
      std::optional<Term> label;
      if (s.label) label = eval_term(*s.label, env);
      return Term::sig(eval_term(s.body, env), eval_term(s.key, env),
                       std::move(label));
    }
    default:
      return t;
  }
}

std::vector<std::string> corrupted_ids(const Trace& tr) {
  std::vector<std::string> out;
  for (const Event& e : tr.events)
    if (const auto* c = std::get_if<CorruptEvent>(&e))
      out.insert(out.end(), c->ids.begin(), c->ids.end());
  return out;
}

int eval(const Formula& f, const Trace& tr, Env& env) {
  switch (f.kind()) {
    case Formula::Kind::Nc: {
      Term t = eval_term(f.lhs(), env);
      const auto* agent = t.get_if<Term::AgentN>();
      if (!agent) return 0;
      for (const std::string& id : corrupted_ids(tr))
        if (id == agent->name) return 0;
      return 1;
    }
    case Formula::Kind::Eq:
      return eval_term(f.lhs(), env) == eval_term(f.rhs(), env) ? 1 : 0;
    case Formula::Kind::Neq:
      return eval_term(f.lhs(), env) != eval_term(f.rhs(), env) ? 1 : 0;
    case Formula::Kind::Not:
      return eval(f.child(), tr, env) ? 0 : 1;
    case Formula::Kind::And:
      return eval(f.child(0), tr, env) && eval(f.child(1), tr, env) ? 1 : 0;
    case Formula::Kind::Or:
      return eval(f.child(0), tr, env) || eval(f.child(1), tr, env) ? 1 : 0;
    case Formula::Kind::Forall: {
      for (const LocalState& ls : local_states(tr, f.role(), f.point())) {
        env.emplace_back(f.subvar(), &ls.sigma);
        int v = eval(f.child(), tr, env);
        env.pop_back();
        if (!v) return 0;
      }
      return 1;
    }
    case Formula::Kind::Exists: {
      for (const LocalState& ls : local_states(tr, f.role(), f.point())) {
        env.emplace_back(f.subvar(), &ls.sigma);
        int v = eval(f.child(), tr, env);
        env.pop_back();
        if (v) return 1;
      }
      return 0;
    }
  }
  return 0;
}

}  // namespace

int interpret(const Formula& f, const Trace& tr) {
  auto free = free_subvars(f);
  if (!free.empty())
    throw EvalError("formula is not closed; free: " + free.front());
  Env env;
  return eval(f, tr, env);
}

// ---- negation normal form -------------------------------------------------------------

namespace {

Formula nnf_pos(const Formula& f);

Formula nnf_neg(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Nc:
      return Formula::negation(f);
    case Formula::Kind::Eq:
      return Formula::neq(f.lhs(), f.rhs());
    case Formula::Kind::Neq:
      return Formula::eq(f.lhs(), f.rhs());
    case Formula::Kind::Not:
      return nnf_pos(f.child());
    case Formula::Kind::And:
      return Formula::disj(nnf_neg(f.child(0)), nnf_neg(f.child(1)));
    case Formula::Kind::Or:
      return Formula::conj(nnf_neg(f.child(0)), nnf_neg(f.child(1)));
    case Formula::Kind::Forall:
      return Formula::exists_ls(f.role(), f.point(), f.subvar(),
                                nnf_neg(f.child()));
    case Formula::Kind::Exists:
      return Formula::forall_ls(f.role(), f.point(), f.subvar(),
                                nnf_neg(f.child()));
  }
  return f;
}

Formula nnf_pos(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Nc:
    case Formula::Kind::Eq:
    case Formula::Kind::Neq:
      return f;
    case Formula::Kind::Not:
      return nnf_neg(f.child());
    case Formula::Kind::And:
      return Formula::conj(nnf_pos(f.child(0)), nnf_pos(f.child(1)));
    case Formula::Kind::Or:
      return Formula::disj(nnf_pos(f.child(0)), nnf_pos(f.child(1)));
    case Formula::Kind::Forall:
      return Formula::forall_ls(f.role(), f.point(), f.subvar(),
                                nnf_pos(f.child()));
    case Formula::Kind::Exists:
      return Formula::exists_ls(f.role(), f.point(), f.subvar(),
                                nnf_pos(f.child()));
  }
  return f;
}

}  // namespace

Formula nnf(const Formula& f) { return nnf_pos(f); }

// ---- fragment membership ----------------------------------------------------------------

namespace {

bool simple_for_fragment(const Term& t) {
  if (const auto* s = t.get_if<Term::SubAppN>())
    return s->arg.sort == VarSort::Agent || s->arg.sort == VarSort::Nonce;
  return is_simple(t);
}

bool l2_shape(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Nc:
      return true;
    case Formula::Kind::Not:
      return f.child().kind() == Formula::Kind::Nc;
    case Formula::Kind::Neq:
      return true;  // disequalities between arbitrary terms are allowed
    case Formula::Kind::Eq:
      return simple_for_fragment(f.lhs()) && simple_for_fragment(f.rhs());
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return l2_shape(f.child(0)) && l2_shape(f.child(1));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return l2_shape(f.child());
  }
  return false;
}

}  // namespace

bool is_L2(const Formula& f) { return l2_shape(nnf(f)); }

// ---- erasure -------------------------------------------------------------------------------

Formula erase_formula(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Nc:
      return Formula::nc(erase(f.lhs()));
    case Formula::Kind::Eq:
      return Formula::eq(erase(f.lhs()), erase(f.rhs()));
    case Formula::Kind::Neq:
      return Formula::neq(erase(f.lhs()), erase(f.rhs()));
    case Formula::Kind::Not:
      return Formula::negation(erase_formula(f.child()));
    case Formula::Kind::And:
      return Formula::conj(erase_formula(f.child(0)), erase_formula(f.child(1)));
    case Formula::Kind::Or:
      return Formula::disj(erase_formula(f.child(0)), erase_formula(f.child(1)));
    case Formula::Kind::Forall:
      return Formula::forall_ls(f.role(), f.point(), f.subvar(),
                                erase_formula(f.child()));
    case Formula::Kind::Exists:
      return Formula::exists_ls(f.role(), f.point(), f.subvar(),
                                erase_formula(f.child()));
  }
  return f;
}

// ---- falsifying assignments ------------------------------------------------------------------

namespace {

// Walks nnf(f), which evaluates to 0 on tr, recording the first failing
// binding of each universal quantifier along the way.
void explain(const Formula& f, const Trace& tr, Env& env,
             std::vector<WitnessBinding>& out) {
  switch (f.kind()) {
    case Formula::Kind::Forall: {
      for (const LocalState& ls : local_states(tr, f.role(), f.point())) {
        env.emplace_back(f.subvar(), &ls.sigma);
        int v = eval(f.child(), tr, env);
        if (!v) {
          out.push_back({f.subvar(), ls.sigma});
          explain(f.child(), tr, env, out);
          env.pop_back();
          return;
        }
        env.pop_back();
      }
      return;
    }
    case Formula::Kind::Exists:
      return;  // all candidate bindings fail; nothing singular to report
    case Formula::Kind::And: {
      if (!eval(f.child(0), tr, env))
        explain(f.child(0), tr, env, out);
      else
        explain(f.child(1), tr, env, out);
      return;
    }
    case Formula::Kind::Or:
      explain(f.child(0), tr, env, out);
      return;
    default:
      return;  // atom: the recorded bindings already tell the story
  }
}

}  // namespace

std::vector<WitnessBinding> falsifying_assignments(const Formula& f,
                                                   const Trace& tr) {
  Formula n = nnf(f);
  Env env;
  if (eval(n, tr, env)) return {};
  std::vector<WitnessBinding> out;
  explain(n, tr, env, out);
  return out;
}

// ---- bounded satisfaction -----------------------------------------------------------------------

namespace {

Verdict violation_verdict(const Formula& f, const Trace& tr,
                          unsigned long checked) {
  Verdict v{Verdict::Kind::Violated, tr, falsifying_assignments(f, tr), checked};
  return v;
}

}  // namespace

Verdict satisfies(const Protocol& p, const Formula& f, const Bounds& bounds,
                  const DeductionOptions& opts, unsigned jobs) {
  unsigned long checked = 0;
  std::optional<Verdict> found;

  if (jobs <= 1) {
    std::optional<std::pair<std::string, Trace>> error;
    enumerate_traces(
        p, bounds,
        [&](const Trace& tr) {
          ++checked;
          try {
            if (interpret(f, tr) == 0) {
              found = violation_verdict(f, tr, checked);
              return false;
            }
          } catch (const EvalError& e) {
            error = {e.what(), tr};
            return false;
          }
          return true;
        },
        opts);
    if (error) throw SatisfactionError(error->first, error->second);
    if (found) return *found;
    return Verdict{Verdict::Kind::HoldsWithinBounds, std::nullopt, {}, checked};
  }

  // Parallel evaluation in enumeration-order batches: the earliest
  // violating index inside a batch wins, so the result matches jobs == 1.
  const std::size_t batch_size = 256;
  std::vector<Trace> batch;
  std::optional<std::pair<std::string, Trace>> error;

  auto run_batch = [&]() -> bool {  // true to continue
    if (batch.empty()) return true;
    std::vector<int> results(batch.size(), 1);
    std::vector<std::string> errors(batch.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next.fetch_add(1); i < batch.size();
           i = next.fetch_add(1)) {
        try {
          results[i] = interpret(f, batch[i]);
        } catch (const EvalError& e) {
          results[i] = -1;
          errors[i] = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ++checked;
      if (results[i] == -1) {
        error = {errors[i], batch[i]};
        return false;
      }
      if (results[i] == 0) {
        found = violation_verdict(f, batch[i], checked);
        return false;
      }
    }
    batch.clear();
    return true;
  };

  bool keep_going = true;
  enumerate_traces(
      p, bounds,
      [&](const Trace& tr) {
        batch.push_back(tr);
        if (batch.size() >= batch_size) keep_going = run_batch();
        return keep_going;
      },
      opts);
  if (keep_going) run_batch();
  if (error) throw SatisfactionError(error->first, error->second);
  if (found) return *found;
  return Verdict{Verdict::Kind::HoldsWithinBounds, std::nullopt, {}, checked};
}

}  // namespace lsv

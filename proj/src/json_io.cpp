#include "lsv/json_io.hpp"

#include <sstream>

#include "lsv/parser.hpp"

namespace lsv {

using nlohmann::json;

namespace {

json event_to_json(const Event& e) {
  json j;
  if (const auto* c = std::get_if<CorruptEvent>(&e)) {
    j["type"] = "corrupt";
    j["ids"] = c->ids;
  } else if (const auto* n = std::get_if<NewEvent>(&e)) {
    j["type"] = "new";
    j["role"] = n->role;
    j["ids"] = n->ids;
  } else {
    const auto& s = std::get<SendEvent>(e);
    j["type"] = "send";
    j["sid"] = s.sid;
    j["message"] = s.message ? s.message->to_string() : "init";
  }
  return j;
}

Event event_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "corrupt")
    return CorruptEvent{j.at("ids").get<std::vector<std::string>>()};
  if (type == "new")
    return NewEvent{j.at("role").get<unsigned>(),
                    j.at("ids").get<std::vector<std::string>>()};
  if (type == "send") {
    const std::string m = j.at("message").get<std::string>();
    SendEvent s{j.at("sid").get<unsigned>(), std::nullopt};
    if (m != "init") s.message = parse_term(m);
    return s;
  }
  throw CorpusError("unknown event type '" + type + "'");
}

json state_to_json(const GlobalState& g) {
  json sessions = json::array();
  for (const SessionId& sid : g.sessions) {
    const LocalState& local = g.locals.at(sid.number);
    json bindings = json::object();
    for (const auto& [v, img] : local.sigma)
      bindings[v.name()] = img.to_string();
    sessions.push_back({{"sid", sid.number},
                        {"role", sid.role},
                        {"ids", sid.ids},
                        {"point", local.point},
                        {"bindings", bindings}});
  }
  json knowledge = json::array();
  for (const Term& t : g.knowledge.terms) knowledge.push_back(t.to_string());
  return {{"sessions", sessions},
          {"knowledge", knowledge},
          {"corrupted", std::vector<std::string>(g.knowledge.corrupted.begin(),
                                                 g.knowledge.corrupted.end())},
          {"universe", std::vector<std::string>(g.knowledge.universe.begin(),
                                                g.knowledge.universe.end())}};
}

GlobalState state_from_json(const json& j) {
  GlobalState g;
  for (const auto& s : j.at("sessions")) {
    SessionId sid{s.at("sid").get<unsigned>(), s.at("role").get<unsigned>(),
                  s.at("ids").get<std::vector<std::string>>()};
    LocalState local;
    local.role = sid.role;
    local.point = s.at("point").get<unsigned>();
    for (const auto& [name, img] : s.at("bindings").items())
      local.sigma.bind(parse_variable_name(name),
                       parse_term(img.get<std::string>()));
    g.locals.emplace(sid.number, std::move(local));
    g.sessions.push_back(std::move(sid));
  }
  for (const auto& t : j.at("knowledge"))
    g.knowledge.terms.insert(parse_term(t.get<std::string>()));
  for (const auto& a : j.at("corrupted"))
    g.knowledge.corrupted.insert(a.get<std::string>());
  for (const auto& a : j.at("universe"))
    g.knowledge.universe.insert(a.get<std::string>());
  return g;
}

}  // namespace

json trace_to_json(const Trace& tr, const std::string& protocol_name) {
  json events = json::array();
  for (const Event& e : tr.events) events.push_back(event_to_json(e));
  json states = json::array();
  for (const GlobalState& g : tr.states) states.push_back(state_to_json(g));
  json j = {{"events", events}, {"states", states}};
  if (!protocol_name.empty()) j["protocol"] = protocol_name;
  return j;
}

Trace trace_from_json(const json& j) {
  Trace tr;
  for (const auto& e : j.at("events")) tr.events.push_back(event_from_json(e));
  for (const auto& s : j.at("states")) tr.states.push_back(state_from_json(s));
  return tr;
}

json derivation_to_json(const Derivation& d) {
  json premises = json::array();
  for (const Derivation& p : d.premises) premises.push_back(derivation_to_json(p));
  return {{"rule", rule_name(d.rule)},
          {"conclusion", d.conclusion.to_string()},
          {"premises", premises}};
}

Derivation derivation_from_json(const json& j) {
  const std::string rule = j.at("rule").get<std::string>();
  std::optional<DeductionRule> parsed;
  for (DeductionRule r :
       {DeductionRule::Membership, DeductionRule::Initial, DeductionRule::Pair,
        DeductionRule::Unpair1, DeductionRule::Unpair2, DeductionRule::Enc,
        DeductionRule::Dec, DeductionRule::Sign, DeductionRule::SigOpen}) {
    if (rule == rule_name(r)) {
      parsed = r;
      break;
    }
  }
  if (!parsed) throw CorpusError("unknown deduction rule '" + rule + "'");
  Term conclusion = parse_term(j.at("conclusion").get<std::string>());
  std::vector<Derivation> premises;
  for (const auto& p : j.at("premises"))
    premises.push_back(derivation_from_json(p));
  return Derivation{*parsed, std::move(conclusion), std::move(premises)};
}

json verdict_to_json(const Verdict& v, const std::string& protocol_name,
                     const std::string& formula_text) {
  json j = {{"result", v.holds() ? "holds-within-bounds" : "violated"},
            {"protocol", protocol_name},
            {"formula", formula_text},
            {"traces-checked", v.traces_checked}};
  if (v.counterexample) {
    j["counterexample"] = trace_to_json(*v.counterexample, protocol_name);
    json witness = json::array();
    for (const WitnessBinding& w : v.witness) {
      json bindings = json::object();
      for (const auto& [var, img] : w.sigma) bindings[var.name()] = img.to_string();
      witness.push_back({{"subvar", w.subvar}, {"bindings", bindings}});
    }
    j["witness"] = witness;
  }
  return j;
}

std::string trace_to_text(const Trace& tr) {
  std::ostringstream os;
  auto print_state = [&](const GlobalState& g) {
    os << "(sessions:";
    if (g.sessions.empty()) os << " -";
    for (const SessionId& sid : g.sessions) {
      const LocalState& local = g.locals.at(sid.number);
      os << " [" << sid.number << ": role " << sid.role << " (";
      for (std::size_t i = 0; i < sid.ids.size(); ++i)
        os << (i ? ", " : "") << sid.ids[i];
      os << ") at " << local.point << " | " << local.sigma.to_string() << "]";
    }
    os << "; knowledge:";
    if (g.knowledge.terms.empty()) os << " -";
    for (const Term& t : g.knowledge.terms) os << ' ' << t;
    if (!g.knowledge.corrupted.empty()) {
      os << "; corrupted:";
      for (const std::string& a : g.knowledge.corrupted) os << ' ' << a;
    }
    os << ")\n";
  };
  if (tr.states.empty()) return "";
  print_state(tr.states.front());
  for (std::size_t i = 0; i < tr.events.size(); ++i) {
    os << "  --" << event_to_string(tr.events[i]) << "-->\n";
    print_state(tr.states[i + 1]);
  }
  return os.str();
}

}  // namespace lsv

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lsv/deduction.hpp"
#include "lsv/term.hpp"

namespace lsv {

// One role step: receive something matching `recv`, answer with `send`.
// A missing recv is the distinguished init token (first step only); a
// missing send is the stop token (last step only).
struct RoleStep {
  std::optional<Term> recv;
  std::optional<Term> send;
  bool operator==(const RoleStep&) const = default;
};

struct Role {
  std::vector<RoleStep> steps;
  bool operator==(const Role&) const = default;
};

struct Protocol {
  std::string name;
  unsigned parties = 2;
  std::vector<Role> roles;  // one per party, index 0 is role 1
  std::vector<std::string> universe;
  bool labeled = true;

  const Role& role(unsigned i) const { return roles.at(i - 1); }
  bool operator==(const Protocol&) const = default;
};

// Structural checks: role count, init/stop placement, label-mode
// discipline, variable ownership. Throws ExecError / SortError.
void validate_protocol(const Protocol& p);

Protocol erase(const Protocol& p);

// Nonce-variable indices occurring anywhere in the protocol (usually {1}).
std::vector<unsigned> nonce_indices(const Protocol& p);

struct SessionId {
  unsigned number = 0;
  unsigned role = 0;
  std::vector<std::string> ids;
  bool operator==(const SessionId&) const = default;
  auto operator<=>(const SessionId&) const = default;
};

struct LocalState {
  Substitution sigma;
  unsigned role = 0;
  unsigned point = 1;  // steps are 1-based; len+1 means finished
  bool operator==(const LocalState&) const = default;
};

struct GlobalState {
  std::vector<SessionId> sessions;          // ordered by session number
  std::map<unsigned, LocalState> locals;    // keyed by session number
  KnowledgeSet knowledge;

  static GlobalState initial(const Protocol& p);
  bool operator==(const GlobalState&) const = default;
};

struct CorruptEvent {
  std::vector<std::string> ids;
  bool operator==(const CorruptEvent&) const = default;
};
struct NewEvent {
  unsigned role = 0;
  std::vector<std::string> ids;
  bool operator==(const NewEvent&) const = default;
};
struct SendEvent {
  unsigned sid = 0;
  std::optional<Term> message;  // nullopt is the init ping
  bool operator==(const SendEvent&) const = default;
};
using Event = std::variant<CorruptEvent, NewEvent, SendEvent>;

std::string event_to_string(const Event& e);

// Alternating sequence of states and events; states.front() is the empty
// initial state and states.size() == events.size() + 1.
struct Trace {
  std::vector<GlobalState> states;
  std::vector<Event> events;

  const GlobalState& last() const { return states.back(); }
  bool operator==(const Trace&) const = default;
};

// Transition functions. They throw ExecError on structural misuse (bad
// role index, unknown session, corrupt after the start); a send that fails
// to match leaves the state unchanged, as the model prescribes.
GlobalState step_corrupt(const Protocol& p, const GlobalState& g,
                         const std::vector<std::string>& ids);
GlobalState step_new(const Protocol& p, const GlobalState& g, unsigned role,
                     const std::vector<std::string>& ids);
GlobalState step_send(const Protocol& p, const GlobalState& g, unsigned sid,
                      const std::optional<Term>& message);

GlobalState erase(const GlobalState& g);
Event erase(const Event& e);
Trace erase_trace(const Trace& tr);

struct ValidationResult {
  enum class Status { Valid, Invalid, Malformed } status;
  std::string reason;
  std::size_t event_index = 0;

  bool ok() const { return status == Status::Valid; }
};

// Replays a trace under the protocol: every recorded state must be the
// deterministic successor of its predecessor, and every sent message must
// be deducible (labeled or unlabeled per protocol mode) from the pre-state
// knowledge. Structural breakage reports Malformed, distinct from Invalid.
ValidationResult is_valid_trace(const Protocol& p, const Trace& tr,
                                const DeductionOptions& opts = {});

struct SessionTemplate {
  unsigned role = 0;
  std::vector<std::string> ids;
};

struct Bounds {
  unsigned max_sessions = 1;
  unsigned max_events = 16;
  unsigned msg_depth = 2;
  // Each entry is one corruption choice for the first event; the empty set
  // means "no corrupt event".
  std::vector<std::vector<std::string>> corrupt_options = {{}};
  // When non-empty, each template may be instantiated at most once;
  // otherwise new-events range over every role and identity tuple.
  std::vector<SessionTemplate> session_templates;
  unsigned sessions_per_role = 0;  // 0 = no per-role cap
  // Also emit one canonical non-matching send (an agent identity) per
  // pending step, as a leaf. Off by default.
  bool explore_failed_sends = false;
};

// Depth-first deterministic enumeration of the valid traces reachable
// within the bounds. Every emitted trace is valid by construction; prefixes
// are emitted before their extensions and the empty trace comes first.
// The visitor returns false to stop the enumeration early.
void enumerate_traces(const Protocol& p, const Bounds& bounds,
                      const std::function<bool(const Trace&)>& visit,
                      const DeductionOptions& opts = {});

std::vector<Trace> collect_traces(const Protocol& p, const Bounds& bounds,
                                  const DeductionOptions& opts = {});

}  // namespace lsv

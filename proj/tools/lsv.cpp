// lsv: bounded-session checker for labeled security protocols.
//
// Subcommands: check, traces, erase, derive, selfcheck, examples.
// Exit codes for check/derive: 0 = holds / derivable, 1 = violated /
// not derivable, 2 = usage or processing error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lsv/corpus.hpp"
#include "lsv/json_io.hpp"
#include "lsv/parser.hpp"
#include "lsv/schema.hpp"
#include "lsv/selfcheck.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// corpus:name resolves against LSV_CORPUS_DIR first, then the built-ins;
// anything else is a file path.
std::string resolve_source(const std::string& ref, lsv::CorpusEntry::Kind kind) {
  if (ref.rfind("corpus:", 0) == 0) {
    std::string name = ref.substr(7);
    if (const char* dir = std::getenv("LSV_CORPUS_DIR")) {
      lsv::CorpusEntry probe{name, kind, "", ""};
      fs::path candidate = fs::path(dir) / lsv::corpus_file_name(probe);
      if (fs::exists(candidate)) return slurp(candidate.string());
    }
    const lsv::CorpusEntry& e = lsv::corpus_get(name);
    if (e.kind != kind)
      throw std::runtime_error("corpus entry '" + name + "' has the wrong kind");
    return e.source;
  }
  return slurp(ref);
}

lsv::Protocol load_protocol(const std::string& ref) {
  return lsv::parse_protocol(resolve_source(ref, lsv::CorpusEntry::Kind::Protocol));
}

lsv::Formula load_formula(const std::string& ref) {
  return lsv::parse_formula(resolve_source(ref, lsv::CorpusEntry::Kind::Formula));
}

lsv::Trace load_trace(const std::string& ref) {
  return lsv::trace_from_json(
      json::parse(resolve_source(ref, lsv::CorpusEntry::Kind::Trace)));
}

std::vector<std::string> split_ids(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct BoundsFlags {
  unsigned sessions = 1;
  unsigned events = 12;
  unsigned depth = 2;
  unsigned per_role = 0;
  std::vector<std::string> corrupt;
  std::vector<std::string> templates;
  bool failed_sends = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--sessions", sessions, "max sessions to start");
    cmd->add_option("--events", events, "max events per trace");
    cmd->add_option("--depth", depth, "max depth of adversary-built fillings");
    cmd->add_option("--sessions-per-role", per_role,
                    "cap sessions per role (0 = unlimited)");
    cmd->add_option("--corrupt", corrupt,
                    "corruption option as comma-separated ids; repeatable; "
                    "'' for the honest option; default honest only");
    cmd->add_option("--session-template", templates,
                    "restrict new-events to 'role:id1,id2,...'; repeatable, "
                    "each used at most once");
    cmd->add_flag("--explore-failed-sends", failed_sends,
                  "also emit one canonical non-matching send per step");
  }

  lsv::Bounds to_bounds() const {
    lsv::Bounds b;
    b.max_sessions = sessions;
    b.max_events = events;
    b.msg_depth = depth;
    b.sessions_per_role = per_role;
    b.explore_failed_sends = failed_sends;
    if (!corrupt.empty()) {
      b.corrupt_options.clear();
      for (const std::string& c : corrupt) b.corrupt_options.push_back(split_ids(c));
    }
    for (const std::string& t : templates) {
      auto colon = t.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("bad --session-template '" + t + "'");
      lsv::SessionTemplate st;
      st.role = static_cast<unsigned>(std::stoul(t.substr(0, colon)));
      st.ids = split_ids(t.substr(colon + 1));
      b.session_templates.push_back(std::move(st));
    }
    return b;
  }
};

int cmd_check(const std::string& proto_ref, const std::string& formula_ref,
              const BoundsFlags& bf, bool unlabeled, bool no_sig_open,
              unsigned jobs, const std::string& format) {
  lsv::Protocol p = load_protocol(proto_ref);
  lsv::Formula f = load_formula(formula_ref);
  if (unlabeled) {
    p = lsv::erase(p);
    f = lsv::erase_formula(f);
  }
  lsv::DeductionOptions opts;
  opts.sig_open = !no_sig_open;
  lsv::Verdict v = lsv::satisfies(p, f, bf.to_bounds(), opts, jobs);
  if (format == "json") {
    std::cout << lsv::verdict_to_json(v, p.name, f.to_string()).dump(2) << "\n";
  } else {
    std::cout << (v.holds() ? "holds-within-bounds" : "violated") << " ("
              << v.traces_checked << " traces checked)\n";
    if (!v.holds()) {
      std::cout << "counterexample:\n" << lsv::trace_to_text(*v.counterexample);
      for (const lsv::WitnessBinding& w : v.witness)
        std::cout << "  " << w.subvar << " := { " << w.sigma.to_string()
                  << " }\n";
    }
  }
  return v.holds() ? 0 : 1;
}

int cmd_traces(const std::string& proto_ref, const BoundsFlags& bf,
               bool unlabeled, const std::string& format) {
  lsv::Protocol p = load_protocol(proto_ref);
  if (unlabeled) p = lsv::erase(p);
  unsigned long count = 0;
  lsv::enumerate_traces(p, bf.to_bounds(), [&](const lsv::Trace& tr) {
    if (format == "json")
      std::cout << lsv::trace_to_json(tr, p.name).dump() << "\n";
    else
      std::cout << "# trace " << count << "\n" << lsv::trace_to_text(tr);
    ++count;
    return true;
  });
  std::cerr << count << " traces\n";
  return 0;
}

int cmd_erase(const std::string& proto_ref, const std::string& formula_ref,
              const std::string& trace_ref) {
  if (!proto_ref.empty())
    std::cout << lsv::print_protocol(lsv::erase(load_protocol(proto_ref)));
  if (!formula_ref.empty())
    std::cout << lsv::print_formula(lsv::erase_formula(load_formula(formula_ref)))
              << "\n";
  if (!trace_ref.empty())
    std::cout << lsv::trace_to_json(lsv::erase_trace(load_trace(trace_ref)))
                     .dump(2)
              << "\n";
  return 0;
}

int cmd_derive(const std::string& goal_text, const std::string& knowledge_file,
               const std::string& universe_csv, const std::string& corrupt_csv,
               bool unlabeled, bool no_sig_open, const std::string& format) {
  lsv::KnowledgeSet ks;
  for (const std::string& a : split_ids(universe_csv)) ks.universe.insert(a);
  for (const std::string& a : split_ids(corrupt_csv)) ks.corrupt(a);
  if (!knowledge_file.empty()) {
    std::istringstream in(slurp(knowledge_file));
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      auto is_space = [](char c) {
        return std::isspace(static_cast<unsigned char>(c)) != 0;
      };
      line.erase(line.begin(), std::find_if_not(line.begin(), line.end(), is_space));
      while (!line.empty() && is_space(line.back())) line.pop_back();
      if (line.empty()) continue;
      ks.terms.insert(lsv::parse_term(line));
    }
  }
  lsv::Term goal = lsv::parse_term(goal_text);
  lsv::DeductionOptions opts;
  opts.sig_open = !no_sig_open;
  lsv::DeductionMode mode =
      unlabeled ? lsv::DeductionMode::Unlabeled : lsv::DeductionMode::Labeled;
  auto d = lsv::derive(ks, goal, mode, opts);
  if (format == "json") {
    json j;
    j["goal"] = goal.to_string();
    j["derivable"] = d.has_value();
    if (d) j["proof"] = lsv::derivation_to_json(*d);
    std::cout << j.dump(2) << "\n";
  } else if (d) {
    std::cout << d->to_text();
  } else {
    std::cout << "not derivable: " << goal << "\n";
  }
  return d ? 0 : 1;
}

int cmd_selfcheck(std::uint64_t seed, unsigned long cases) {
  auto results = lsv::run_all_suites(seed, cases);
  bool ok = true;
  for (const lsv::SuiteResult& r : results) {
    std::cout << r.name << ": " << (r.cases - r.failures) << "/" << r.cases
              << " passed\n";
    for (const std::string& n : r.notes) std::cout << "    " << n << "\n";
    ok = ok && r.ok();
  }
  return ok ? 0 : 1;
}

int cmd_examples(bool list, const std::string& show, const std::string& export_dir) {
  if (!show.empty()) {
    const lsv::CorpusEntry& e = lsv::corpus_get(show);
    std::cout << e.source;
    return 0;
  }
  if (!export_dir.empty()) {
    fs::create_directories(export_dir);
    for (const lsv::CorpusEntry& e : lsv::corpus_entries()) {
      std::ofstream out(fs::path(export_dir) / lsv::corpus_file_name(e));
      out << e.source;
    }
    std::ofstream(fs::path(export_dir) / "trace.schema.json")
        << lsv::trace_schema().dump(2) << "\n";
    std::ofstream(fs::path(export_dir) / "derivation.schema.json")
        << lsv::derivation_schema().dump(2) << "\n";
    std::ofstream(fs::path(export_dir) / "verdict.schema.json")
        << lsv::verdict_schema().dump(2) << "\n";
    std::cout << "exported " << lsv::corpus_entries().size()
              << " entries and 3 schemas to " << export_dir << "\n";
    return 0;
  }
  (void)list;
  for (const lsv::CorpusEntry& e : lsv::corpus_entries()) {
    const char* kind = e.kind == lsv::CorpusEntry::Kind::Protocol ? "protocol"
                       : e.kind == lsv::CorpusEntry::Kind::Formula ? "formula"
                                                                   : "trace";
    std::cout << e.name << "  [" << kind << "]  " << e.provenance << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bounded-session checker for labeled security protocols"};
  app.require_subcommand(1);

  std::string proto_ref, formula_ref, trace_ref, format = "text";
  std::string goal_text, knowledge_file, universe_csv, corrupt_csv;
  std::string show_name, export_dir;
  bool unlabeled = false, no_sig_open = false, list_flag = false;
  unsigned jobs = 1;
  std::uint64_t seed = 42;
  unsigned long cases = 1000;
  BoundsFlags bf;

  auto* check = app.add_subcommand("check", "check a formula against a protocol");
  check->add_option("--protocol", proto_ref, "protocol (corpus:name or file)")
      ->required();
  check->add_option("--formula", formula_ref, "formula (corpus:name or file)")
      ->required();
  bf.attach(check);
  check->add_flag("--unlabeled", unlabeled, "erase protocol and formula first");
  check->add_flag("--no-sig-open", no_sig_open,
                  "drop the signature message-recovery rule");
  check->add_option("--jobs", jobs, "parallel formula evaluation");
  check->add_option("--format", format, "text | json");

  auto* traces = app.add_subcommand("traces", "enumerate valid traces");
  traces->add_option("--protocol", proto_ref, "protocol (corpus:name or file)")
      ->required();
  bf.attach(traces);
  traces->add_flag("--unlabeled", unlabeled, "erase the protocol first");
  traces->add_option("--format", format, "text | json (one JSON object per line)");

  auto* erase_cmd = app.add_subcommand("erase", "print the label-erased form");
  erase_cmd->add_option("--protocol", proto_ref, "protocol to erase");
  erase_cmd->add_option("--formula", formula_ref, "formula to erase");
  erase_cmd->add_option("--trace", trace_ref, "trace (JSON) to erase");

  auto* derive_cmd = app.add_subcommand("derive", "derive a goal from knowledge");
  derive_cmd->add_option("--goal", goal_text, "goal term")->required();
  derive_cmd->add_option("--knowledge", knowledge_file,
                         "file with one term per line");
  derive_cmd->add_option("--universe", universe_csv, "agent ids, comma-separated");
  derive_cmd->add_option("--corrupt", corrupt_csv,
                         "corrupted agent ids, comma-separated");
  derive_cmd->add_flag("--unlabeled", unlabeled, "use the unlabeled relation");
  derive_cmd->add_flag("--no-sig-open", no_sig_open,
                       "drop the signature message-recovery rule");
  derive_cmd->add_option("--format", format, "text | json");

  auto* selfcheck = app.add_subcommand("selfcheck", "run the property suites");
  selfcheck->add_option("--seed", seed, "random seed");
  selfcheck->add_option("--cases", cases, "cases per suite");

  auto* examples = app.add_subcommand("examples", "list or export built-ins");
  examples->add_flag("--list", list_flag, "list entries (default)");
  examples->add_option("--show", show_name, "print one entry's source");
  examples->add_option("--export", export_dir, "write entries and schemas here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed())
      return cmd_check(proto_ref, formula_ref, bf, unlabeled, no_sig_open, jobs,
                       format);
    if (traces->parsed()) return cmd_traces(proto_ref, bf, unlabeled, format);
    if (erase_cmd->parsed()) {
      if (proto_ref.empty() && formula_ref.empty() && trace_ref.empty()) {
        std::cerr << "erase: nothing to erase\n";
        return 2;
      }
      return cmd_erase(proto_ref, formula_ref, trace_ref);
    }
    if (derive_cmd->parsed())
      return cmd_derive(goal_text, knowledge_file, universe_csv, corrupt_csv,
                        unlabeled, no_sig_open, format);
    if (selfcheck->parsed()) return cmd_selfcheck(seed, cases);
    if (examples->parsed()) return cmd_examples(list_flag, show_name, export_dir);
  } catch (const lsv::SatisfactionError& e) {
    std::cerr << "evaluation error: " << e.what() << "\non trace:\n"
              << lsv::trace_to_text(e.trace);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

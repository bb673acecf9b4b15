#include "summon/cli.hpp"

#include "summon/classical_sim.hpp"
#include "summon/errors.hpp"
#include "summon/feasibility.hpp"
#include "summon/protocol.hpp"
#include "summon/scenarios.hpp"
#include "summon/task_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace summon {

namespace {

constexpr double kFidelityThreshold = 1.0 - 1e-9;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SUMMON_SEED"); env != nullptr && *env != '\0') {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("SUMMON_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

Assignment parse_assignment(const std::string& text) {
  Assignment m;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      m.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw InvalidArgument("assignment must be comma-separated integers, got \"" + text + "\"");
    }
  }
  return m;
}

Json index_list(const std::vector<std::size_t>& v) {
  Json j = Json::array();
  for (std::size_t x : v) j.push_back(x + 1);
  return j;
}

Json screen_json(const ScreenResult& s) {
  Json j;
  j["name"] = s.name;
  j["applicable"] = s.applicable;
  j["informational"] = s.informational;
  j["passed"] = s.passed;
  j["detail"] = s.detail;
  if (!s.failing_returns.empty()) j["failing_returns"] = index_list(s.failing_returns);
  if (!s.failing_pairs.empty()) {
    Json pairs = Json::array();
    for (const auto& [a, b] : s.failing_pairs) pairs.push_back(Json::array({a + 1, b + 1}));
    j["failing_pairs"] = std::move(pairs);
  }
  if (s.exclusion_witness) {
    Json w;
    w["pair"] = Json::array({s.exclusion_witness->i + 1, s.exclusion_witness->j + 1});
    w["inputs"] = index_list(s.exclusion_witness->members);
    w["restriction"] = assignment_to_json(s.exclusion_witness->restriction);
    j["witness"] = std::move(w);
  }
  return j;
}

std::vector<ScreenResult> run_screens(const SummoningTask& task) {
  std::vector<ScreenResult> screens{check_reachability(task)};
  const Variant v = classify_variant(task);
  if (v.returns == ReturnVariant::kMultiple) {
    screens[0].informational = true;
    for (const char* name : {"common_past", "pairwise_exclusion"}) {
      ScreenResult s;
      s.name = name;
      s.applicable = false;
      s.detail = "not applicable to multiple-return tasks; determinize first";
      screens.push_back(std::move(s));
    }
    return screens;
  }
  screens.push_back(check_common_past(task));
  if (task.is_constrained()) {
    ScreenResult s;
    s.name = "pairwise_exclusion";
    s.applicable = false;
    s.informational = true;
    s.detail = "not defined for constrained inputs";
    screens.push_back(std::move(s));
  } else {
    screens.push_back(check_pairwise_exclusion(task));
  }
  return screens;
}

Json witness_json(const SummoningTask& task, const ImpossibilityWitness& w) {
  Json j;
  j["kind"] = to_string(w.kind);
  j["return"] = w.return_index + 1;
  if (!w.first.empty() || task.inputs.empty()) j["first"] = assignment_to_json(w.first);
  if (!w.second.empty()) j["second"] = assignment_to_json(w.second);
  j["detail"] = w.detail;
  return j;
}

Json rules_json(const std::vector<LocalDecisionRule>& rules) {
  Json out = Json::array();
  for (const auto& r : rules) {
    Json j;
    j["return"] = r.return_index + 1;
    j["reads"] = index_list(r.members);
    Json fire = Json::array();
    for (std::size_t c = 0; c < r.table.size(); ++c) {
      if (r.table[c] == Decision::kReturn) fire.push_back(assignment_to_json(r.domain.at(c)));
    }
    j["returns_on"] = std::move(fire);
    out.push_back(std::move(j));
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << content;
}

std::string fmt_set(const std::vector<std::size_t>& v) {
  std::string s = "{";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::string("Q") + std::to_string(v[k] + 1);
  return s + "}";
}

std::string fmt_opt(const std::optional<std::size_t>& v) {
  return v ? "Q" + std::to_string(*v + 1) : std::string("-");
}

std::string fmt_m(const Assignment& m) {
  std::string s = "(";
  for (std::size_t k = 0; k < m.size(); ++k) s += (k ? "," : "") + std::to_string(m[k]);
  return s + ")";
}

struct Options {
  std::string file;
  bool human = false;
  std::uint64_t seed = 0;
  std::string assignment;
  bool exhaustive = false;
  std::string trace;
  std::string classical;
  unsigned jobs = 0;
  int dim = 3;
  std::string out_file;
  std::string scenario;
  std::size_t returns = 0;
};

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int validate(const Options& o) {
    SummoningTask task = load_task(o.file);
    ValidationReport report = summon::validate(task);
    Json j;
    j["file"] = o.file;
    j["valid"] = report.valid();
    Json v = Json::array();
    for (const auto& x : report.violations) v.push_back(x.message);
    j["violations"] = std::move(v);
    if (o.human) {
      out_ << o.file << ": " << (report.valid() ? "valid" : "invalid") << "\n";
      for (const auto& x : report.violations) out_ << "  - " << x.message << "\n";
    } else {
      out_ << j.dump(2) << "\n";
    }
    return report.valid() ? kExitOk : kExitInvalid;
  }

  int check(const Options& o) {
    SummoningTask task = load_task(o.file);
    ValidationReport report = summon::validate(task);
    Json j;
    j["file"] = o.file;
    j["valid"] = report.valid();
    if (!report.valid()) {
      Json v = Json::array();
      for (const auto& x : report.violations) v.push_back(x.message);
      j["violations"] = std::move(v);
      emit(j, o.human);
      return kExitInvalid;
    }
    const Variant variant = classify_variant(task);
    j["variant"] = {{"returns", to_string(variant.returns)}, {"inputs", to_string(variant.inputs)}};
    Json screens = Json::array();
    for (const auto& s : run_screens(task)) screens.push_back(screen_json(s));
    j["screens"] = std::move(screens);
    FeasibilityVerdict verdict = classically_possible(task);
    Json v;
    v["possible"] = verdict.possible;
    if (verdict.witness) v["witness"] = witness_json(task, *verdict.witness);
    if (verdict.possible) v["rules"] = rules_json(verdict.rules);
    j["verdict"] = std::move(v);
    if (task.is_constrained()) j["note"] = "constrained inputs: screens are informational";
    emit(j, o.human);
    return verdict.possible ? kExitOk : kExitImpossible;
  }

  int synth(const Options& o) {
    SummoningTask task = load_task(o.file);
    require_valid_or_throw(task);
    ProtocolPlan plan = synthesize(task, {o.dim});
    Json j = plan.to_json();
    if (!o.out_file.empty()) write_file(o.out_file, j.dump(2) + "\n");
    if (o.human) {
      out_ << "plan: " << plan.task.return_count() << " return point(s), scheme " << plan.scheme.construction
           << " (d=" << plan.scheme.secret_dim << "), " << plan.routes.size() << " route(s)"
           << (plan.determinized ? ", determinized" : "") << "\n";
      for (const auto& r : plan.routes) {
        out_ << "  route " << r.name() << ": " << r.hops.size() << " hop(s), " << r.pair_count()
             << " pair(s) per register\n";
      }
    } else {
      out_ << j.dump(2) << "\n";
    }
    return kExitOk;
  }

  int run(const Options& o) {
    SummoningTask task = load_task(o.file);
    require_valid_or_throw(task);
    if (o.exhaustive == !o.assignment.empty()) throw InvalidArgument("give exactly one of --assignment or --exhaustive");
    std::vector<std::size_t> indices = selected_indices(task, o);
    if (o.classical == "token") return run_token(task, indices, o);
    if (!o.classical.empty() && o.classical != "simulate") {
      throw InvalidArgument("--classical must be token or simulate");
    }
    ProtocolPlan plan = synthesize(task, {o.dim});
    if (o.classical == "simulate") return run_simulate(plan, indices, o);
    return run_quantum(plan, indices, o);
  }

  int gen(const Options& o) {
    ScenarioParams params;
    params.seed = o.seed;
    params.returns = o.returns;
    SummoningTask task = make_scenario(o.scenario, params);
    const std::string text = dump_task(task);
    if (o.out_file.empty()) {
      out_ << text;
    } else {
      write_file(o.out_file, text);
    }
    return kExitOk;
  }

  int demo(const Options& o) {
    bool ok = true;
    auto line = [&](const std::string& what, bool pass) {
      out_ << (pass ? "ok    " : "FAIL  ") << what << "\n";
      ok = ok && pass;
    };
    SummoningTask g1 = make_scenario("g1");
    ExhaustiveReport r1 = run_exhaustive(synthesize(g1), o.seed, o.jobs);
    line("g1: quantum protocol returns the state at Q(m) for all 4 inputs, min fidelity " + fixed(r1.min_fidelity),
         r1.mismatches == 0 && r1.min_fidelity >= kFidelityThreshold && r1.audit_passed);

    SummoningTask t3 = make_scenario("t3");
    ExhaustiveReport r3 = run_exhaustive(synthesize(t3), o.seed, o.jobs);
    line("t3: three return points with ((2,3)) sharing, 9 inputs, min fidelity " + fixed(r3.min_fidelity),
         r3.mismatches == 0 && r3.min_fidelity >= kFidelityThreshold && r3.audit_passed);

    for (const char* name : {"no_summoning", "hayden_may"}) {
      SummoningTask t = make_scenario(name);
      const bool classical = classically_possible(t).possible;
      std::string reason;
      try {
        synthesize(t);
      } catch (const SynthesisRefused& e) {
        reason = e.what();
      }
      line(std::string(name) + ": classically possible, quantum synthesis refused (" + reason + ")",
           classical && !reason.empty());
    }

    SummoningTask multi = make_scenario("multi_call");
    ProtocolPlan plan = synthesize(multi);
    ExhaustiveReport rm = run_exhaustive(plan, o.seed, o.jobs);
    line("multi_call: determinized to " + std::to_string(plan.task.return_count()) +
             " return point(s), every call answered, min fidelity " + fixed(rm.min_fidelity),
         rm.mismatches == 0 && rm.min_fidelity >= kFidelityThreshold);
    return ok ? kExitOk : kExitFailure;
  }

 private:
  static std::string fixed(double v) {
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
  }

  void emit(const Json& j, bool human) {
    if (!human) {
      out_ << j.dump(2) << "\n";
      return;
    }
    out_ << j.at("file").get<std::string>() << ": " << (j.at("valid").get<bool>() ? "valid" : "invalid") << "\n";
    if (j.contains("violations")) {
      for (const auto& v : j.at("violations")) out_ << "  - " << v.get<std::string>() << "\n";
      return;
    }
    out_ << "variant: " << j["variant"]["returns"].get<std::string>() << ", " << j["variant"]["inputs"].get<std::string>()
         << "\n";
    for (const auto& s : j.at("screens")) {
      std::string status = !s["applicable"].get<bool>() ? "n/a " : s["passed"].get<bool>() ? "pass" : "FAIL";
      out_ << "  " << s["name"].get<std::string>() << "  " << status << (s["informational"].get<bool>() ? " (informational)" : "")
           << "  " << s["detail"].get<std::string>() << "\n";
    }
    const Json& v = j.at("verdict");
    out_ << "classically " << (v["possible"].get<bool>() ? "possible" : "impossible") << "\n";
    if (v.contains("witness")) out_ << "  witness: " << v["witness"]["detail"].get<std::string>() << "\n";
    if (j.contains("note")) out_ << "note: " << j["note"].get<std::string>() << "\n";
  }

  void require_valid_or_throw(const SummoningTask& task) {
    ValidationReport report = summon::validate(task);
    if (!report.valid()) throw InvalidArgument("invalid task: " + report.violations.front().message);
  }

  std::vector<std::size_t> selected_indices(const SummoningTask& task, const Options& o) {
    AssignmentSpace space = task.space();
    std::vector<std::size_t> out;
    if (!o.assignment.empty()) {
      Assignment m = parse_assignment(o.assignment);
      if (!space.in_range(m)) throw InvalidArgument("assignment " + fmt_m(m) + " is outside the input ranges");
      const std::size_t index = space.index_of(m);
      if (!task.is_allowed(index)) throw InvalidArgument("assignment " + fmt_m(m) + " is forbidden");
      out.push_back(index);
      return out;
    }
    for (std::size_t index = 0; index < space.size(); ++index) {
      if (task.is_allowed(index)) out.push_back(index);
    }
    return out;
  }

  int run_token(const SummoningTask& task, const std::vector<std::size_t>& indices, const Options& o) {
    FeasibilityVerdict verdict = classically_possible(task);
    if (!verdict.possible) {
      Json j;
      j["mode"] = "token";
      j["possible"] = false;
      if (verdict.witness) j["witness"] = witness_json(task, *verdict.witness);
      out_ << j.dump(2) << "\n";
      return kExitImpossible;
    }
    AssignmentSpace space = task.space();
    std::vector<ClassicalOutcome> rows(indices.size());
    parallel_for(indices.size(), o.jobs, [&](std::size_t k) {
      rows[k] = run_classical_token(task, verdict.rules, space.at(indices[k]));
    });
    std::size_t mismatches = 0;
    bool audit = true;
    Json table = Json::array();
    std::string traces;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const ReturnSet& q = task.map.at(indices[k]);
      const auto& d = rows[k].deliveries;
      const bool ok = q.empty() ? d.empty()
                                : d.size() == 1 && std::find(q.begin(), q.end(), d.front()) != q.end();
      mismatches += ok ? 0 : 1;
      audit = audit && rows[k].audit_passed;
      Json row = rows[k].to_json();
      row["designated"] = index_list(q);
      row["ok"] = ok;
      table.push_back(std::move(row));
      traces += tagged_trace(rows[k].trace, indices.size() > 1 ? std::optional<std::size_t>(indices[k]) : std::nullopt);
    }
    if (!o.trace.empty()) write_file(o.trace, traces);
    Json j;
    j["mode"] = "token";
    j["rows"] = rows.size();
    j["mismatches"] = mismatches;
    j["audit"] = audit;
    j["table"] = std::move(table);
    if (o.human) {
      out_ << "classical token protocol, " << rows.size() << " assignment(s)\n";
      for (const auto& r : j["table"]) {
        out_ << "  m=" << r["m"].dump() << "  designated " << r["designated"].dump() << "  delivered "
             << r["deliveries"].dump() << (r["ok"].get<bool>() ? "" : "  MISMATCH") << "\n";
      }
      out_ << "mismatches " << mismatches << ", audit " << (audit ? "pass" : "FAIL") << "\n";
    } else {
      out_ << j.dump(2) << "\n";
    }
    return mismatches == 0 && audit ? kExitOk : kExitFailure;
  }

  int run_quantum(const ProtocolPlan& plan, const std::vector<std::size_t>& indices, const Options& o) {
    ExhaustiveReport report;
    if (o.exhaustive) {
      report = run_exhaustive(plan, o.seed, o.jobs);
    } else {
      report.rows.push_back(summon::run(plan, plan.task.space().at(indices.front()), o.seed));
      const auto& row = report.rows.front();
      report.mismatches = row.matches() ? 0 : 1;
      report.audit_passed = row.audit_passed;
      if (row.fidelity) {
        report.returns = 1;
        report.min_fidelity = *row.fidelity;
      }
    }
    if (!o.trace.empty()) {
      std::string traces;
      for (std::size_t k = 0; k < report.rows.size(); ++k) {
        traces += tagged_trace(report.rows[k].trace, o.exhaustive ? std::optional<std::size_t>(k) : std::nullopt);
      }
      write_file(o.trace, traces);
    }
    const bool ok = report.mismatches == 0 && report.audit_passed && report.min_fidelity >= kFidelityThreshold;
    Json j = report.to_json();
    j["mode"] = "quantum";
    j["seed"] = o.seed;
    j["passed"] = ok;
    if (o.human) {
      out_ << "quantum protocol (" << plan.scheme.construction << ", d=" << plan.scheme.secret_dim << "), "
           << report.rows.size() << " assignment(s)\n";
      for (const auto& r : report.rows) {
        out_ << "  m=" << fmt_m(r.assignment) << "  expected " << fmt_opt(r.expected) << "  returned "
             << fmt_opt(r.returned_at);
        if (r.fidelity) out_ << "  fidelity " << fixed(*r.fidelity);
        out_ << (r.matches() ? "" : "  MISMATCH") << "\n";
      }
      out_ << "mismatches " << report.mismatches << ", min fidelity " << fixed(report.min_fidelity) << ", audit "
           << (report.audit_passed ? "pass" : "FAIL") << "\n";
    } else {
      out_ << j.dump(2) << "\n";
    }
    return ok ? kExitOk : kExitFailure;
  }

  int run_simulate(const ProtocolPlan& plan, const std::vector<std::size_t>& indices, const Options& o) {
    AssignmentSpace space = plan.task.space();
    struct Row {
      ClassicalOutcome classical;
      RunOutcome quantum;
    };
    std::vector<Row> rows(indices.size());
    parallel_for(indices.size(), o.jobs, [&](std::size_t k) {
      const Assignment m = space.at(indices[k]);
      rows[k].classical = simulate_classically(plan, m);
      rows[k].quantum = summon::run(plan, m, o.exhaustive ? derive_seed(o.seed, indices[k]) : o.seed);
    });
    std::size_t disagreements = 0;
    bool audit = true;
    Json table = Json::array();
    for (const auto& r : rows) {
      std::vector<std::size_t> quantum;
      if (r.quantum.returned_at) quantum.push_back(*r.quantum.returned_at);
      const bool agree = quantum == r.classical.deliveries;
      disagreements += agree ? 0 : 1;
      audit = audit && r.classical.audit_passed && r.quantum.audit_passed;
      Json row = r.classical.to_json();
      row["quantum"] = r.quantum.returned_at ? Json(*r.quantum.returned_at + 1) : Json(nullptr);
      row["agree"] = agree;
      table.push_back(std::move(row));
    }
    Json j;
    j["mode"] = "simulate";
    j["rows"] = rows.size();
    j["disagreements"] = disagreements;
    j["audit"] = audit;
    j["table"] = std::move(table);
    if (o.human) {
      out_ << "classical simulation of the quantum protocol, " << rows.size() << " assignment(s)\n";
      for (const auto& r : rows) {
        out_ << "  m=" << fmt_m(r.classical.assignment) << "  classical " << fmt_set(r.classical.deliveries)
             << "  quantum " << fmt_opt(r.quantum.returned_at) << "\n";
      }
      out_ << "disagreements " << disagreements << ", audit " << (audit ? "pass" : "FAIL") << "\n";
    } else {
      out_ << j.dump(2) << "\n";
    }
    return disagreements == 0 && audit ? kExitOk : kExitFailure;
  }

  static std::string tagged_trace(const Trace& trace, std::optional<std::size_t> run) {
    if (!run) return trace.to_jsonl();
    std::string out;
    for (const auto& e : trace.events()) {
      Json j;
      j["run"] = *run;
      Json ev = event_to_json(e);
      for (auto it = ev.begin(); it != ev.end(); ++it) j[it.key()] = it.value();
      out += j.dump();
      out += '\n';
    }
    return out;
  }

  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relativistic summoning tasks: feasibility, protocol synthesis and simulation", "summon"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed_env = 0;
  try {
    seed_env = default_seed();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  o.seed = seed_env;

  auto* validate = app.add_subcommand("validate", "check a task file against the task invariants");
  validate->add_option("file", o.file, "task file")->required();
  validate->add_flag("--human", o.human, "print text instead of JSON");

  auto* check = app.add_subcommand("check", "validation, variant, screens and classical verdict");
  check->add_option("file", o.file, "task file")->required();
  check->add_flag("--human", o.human, "print text instead of JSON");

  auto* synth = app.add_subcommand("synth", "synthesize the quantum protocol plan");
  synth->add_option("file", o.file, "task file")->required();
  synth->add_option("--dim", o.dim, "secret dimension")->check(CLI::Range(2, 16));
  synth->add_option("--out", o.out_file, "write the plan JSON here");
  synth->add_flag("--human", o.human, "print a summary instead of JSON");

  auto* run = app.add_subcommand("run", "run the quantum protocol or a classical mode");
  run->add_option("file", o.file, "task file")->required();
  run->add_option("--assignment", o.assignment, "comma-separated input values, e.g. 0,1");
  run->add_flag("--exhaustive", o.exhaustive, "run every allowed assignment");
  run->add_option("--seed", o.seed, "random seed (default: $SUMMON_SEED or 0)");
  run->add_option("--trace", o.trace, "write the JSON-lines trace here");
  run->add_option("--classical", o.classical, "token | simulate");
  run->add_option("--jobs", o.jobs, "worker threads (0: all cores)");
  run->add_option("--dim", o.dim, "secret dimension")->check(CLI::Range(2, 16));
  run->add_flag("--human", o.human, "print a table instead of JSON");

  auto* gen = app.add_subcommand("gen", "write a built-in scenario task file");
  gen->add_option("scenario", o.scenario, "g1 | t3 | no_summoning | hayden_may | multi_call | random_possible")
      ->required();
  gen->add_option("--seed", o.seed, "random seed (default: $SUMMON_SEED or 0)");
  gen->add_option("--returns", o.returns, "number of return points, where the scenario allows it");
  gen->add_option("--out", o.out_file, "output file (default: stdout)");

  auto* demo = app.add_subcommand("demo", "run the built-in scenarios end to end");
  demo->add_option("--seed", o.seed, "random seed (default: $SUMMON_SEED or 0)");
  demo->add_option("--jobs", o.jobs, "worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  Cli cli(out, err);
  try {
    if (*validate) return cli.validate(o);
    if (*check) return cli.check(o);
    if (*synth) return cli.synth(o);
    if (*run) return cli.run(o);
    if (*gen) return cli.gen(o);
    if (*demo) return cli.demo(o);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const SynthesisRefused& e) {
    Json j;
    j["refused"] = true;
    j["reason"] = e.what();
    out << j.dump(2) << "\n";
    err << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const Unsupported& e) {
    Json j;
    j["refused"] = true;
    j["reason"] = std::string("unsupported: ") + e.what();
    out << j.dump(2) << "\n";
    err << "unsupported: " << e.what() << "\n";
    return kExitRefused;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitInvalid;
}

}  // namespace summon

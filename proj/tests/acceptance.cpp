// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Tolerances, corpus sizes, seeds and time limits are pinned below.

#include "oracle.hpp"

#include "summon/classical_sim.hpp"
#include "summon/errors.hpp"
#include "summon/feasibility.hpp"
#include "summon/protocol.hpp"
#include "summon/qss.hpp"
#include "summon/qudit_sim.hpp"
#include "summon/scenarios.hpp"
#include "summon/task_io.hpp"

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace summon;

namespace {

constexpr std::uint64_t kSeed = 20261016;

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int number, const std::string& title, double limit_s, const std::function<Check()>& body) {
  const auto start = Clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c.fail(std::string("exception: ") + e.what());
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  if (limit_s > 0 && elapsed > limit_s) {
    std::ostringstream s;
    s << "runtime " << elapsed << " s over the " << limit_s << " s limit";
    c.fail(s.str());
  }
  if (!c.ok) ++failures;
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(2);
  line << (c.ok ? "PASS" : "FAIL") << " criterion " << number << " (" << title << "): " << c.detail << " ["
       << elapsed << " s]";
  std::cout << line.str() << std::endl;
}

SpacetimePoint random_exact_point(Rng& rng, std::size_t dim) {
  SpacetimePoint p;
  p.t = Coordinate(Rational(rng.uniform_int(-12, 12), 4));
  for (std::size_t k = 0; k < dim; ++k) p.x.push_back(Coordinate(Rational(rng.uniform_int(-8, 8), 4)));
  return p;
}

SpacetimePoint random_double_point(Rng& rng) {
  SpacetimePoint p;
  p.t = Coordinate(rng.uniform() * 10 - 5);
  p.x.push_back(Coordinate(rng.uniform() * 10 - 5));
  return p;
}

// ---- 1 ------------------------------------------------------------------

Check causal_order_laws() {
  Check c;
  Rng rng(derive_seed(kSeed, 1));
  std::size_t related = 0;
  for (std::size_t dim = 1; dim <= 3; ++dim) {
    for (int trial = 0; trial < 10000; ++trial) {
      const auto a = random_exact_point(rng, dim);
      const auto b = random_exact_point(rng, dim);
      const auto x = random_exact_point(rng, dim);
      if (!causally_precedes(a, a)) c.fail("reflexivity");
      const bool ab = causally_precedes(a, b);
      if (ab && causally_precedes(b, a) && !(a == b)) c.fail("antisymmetry");
      if (ab && causally_precedes(b, x) && !causally_precedes(a, x)) c.fail("transitivity");
      related += ab ? 1 : 0;
    }
  }
  std::size_t boosts = 0;
  while (boosts < 1000) {
    const auto a = random_double_point(rng);
    const auto b = random_double_point(rng);
    if (std::abs(causal_margin(a, b)) < 1e-6) continue;
    const double v = rng.uniform() * 1.8 - 0.9;
    const auto ba = summon::boost(a, v);
    const auto bb = summon::boost(b, v);
    const bool before = causally_precedes(a, b);
    if (causally_precedes(ba, bb, 1e-9) != before || causally_precedes(ba, bb, -1e-9) != before) {
      c.fail("boost changed a causal relation");
    }
    ++boosts;
  }
  if (c.ok) {
    c.detail = "3 x 10000 exact triples (" + std::to_string(related) + " related pairs), 1000 boosts";
  }
  return c;
}

// ---- 2 ------------------------------------------------------------------

Check teleportation() {
  Check c;
  Rng rng(derive_seed(kSeed, 2));
  double min_fid = 1.0;
  double max_dev = 0.0;
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const auto amps = random_amplitudes(d, rng);
      const auto state = tensor(StateVector::prepare({d}, amps), bell_pair(d));
      for (double p : bell_distribution(state, 0, 1)) max_dev = std::max(max_dev, std::abs(p - 1.0 / (d * d)));
      const auto t = teleport(state, 0, 1, 2, rng);
      const auto fixed = apply_correction(t.state, t.destination, t.outcome);
      min_fid = std::min(min_fid, fidelity(fixed, t.destination, amps));
    }
  }
  if (min_fid < 1.0 - 1e-10) c.fail("fidelity " + std::to_string(min_fid));
  if (max_dev > 1e-12) c.fail("outcome probability off by " + std::to_string(max_dev));
  if (c.ok) {
    std::ostringstream s;
    s << "2000 secrets, min fidelity " << min_fid << ", max |p - 1/d^2| " << max_dev;
    c.detail = s.str();
  }
  return c;
}

// ---- 3 ------------------------------------------------------------------

Check secret_sharing() {
  Check c;
  const auto scheme = make_star_scheme(3, 3);
  const auto v = validate_scheme(*scheme, 50, derive_seed(kSeed, 3));
  if (scheme->descriptor().construction != "qutrit-2-of-3") c.fail("unexpected construction");
  if (v.min_fidelity < 1.0 - 1e-10) c.fail("star fidelity " + std::to_string(v.min_fidelity));
  if (!v.secrecy_applicable || v.max_share_distance > 1e-9) {
    c.fail("single-share trace distance " + std::to_string(v.max_share_distance));
  }
  if (!v.passed()) c.fail("validate_scheme reported failure");
  if (c.ok) {
    std::ostringstream s;
    s << v.secrets_tested << " secrets, min fidelity " << v.min_fidelity << ", max share distance "
      << v.max_share_distance;
    c.detail = s.str();
  }
  return c;
}

// ---- 4 ------------------------------------------------------------------

RandomTaskOptions at_most_one_options() {
  RandomTaskOptions o;
  o.min_inputs = 1;
  o.max_inputs = 4;
  o.max_cardinality = 3;
  o.max_space = 64;
  o.min_returns = 1;
  o.max_returns = 3;
  o.variant = ReturnVariant::kAtMostOne;
  o.unreachable_probability = 0.15;
  return o;
}

Check screens_necessary() {
  Check c;
  // Single-return tasks pass every screen trivially, so the corpus starts at two.
  auto options = at_most_one_options();
  options.min_returns = 2;
  std::size_t pairs = 0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const auto task = random_possible_task(options, derive_seed(kSeed + 4, k));
    if (task.is_constrained() || classify_variant(task).returns == ReturnVariant::kMultiple) {
      c.fail("corpus task " + std::to_string(k) + " is outside the class");
      continue;
    }
    if (!classically_possible(task).possible) c.fail("corpus task " + std::to_string(k) + " not possible");
    for (const auto& s : {check_reachability(task), check_common_past(task), check_pairwise_exclusion(task)}) {
      if (!s.passed) c.fail("task " + std::to_string(k) + " fails screen " + s.name);
    }
    pairs += task.return_count() * (task.return_count() - 1) / 2;
  }
  if (c.ok) c.detail = "200 possible tasks (" + std::to_string(pairs) + " return pairs) pass all three screens";
  return c;
}

// ---- 5, 6, 7, 10 ---------------------------------------------------------

struct CorpusResult {
  Check end_to_end;
  Check equivalence;
  std::size_t runs = 0;
  std::size_t returns = 0;
  double min_fidelity = 1.0;
  std::string transcript;  // everything that must be reproducible
};

void check_plan(const SummoningTask& original, const ProtocolPlan& plan, std::uint64_t seed, unsigned jobs,
                const std::string& tag, CorpusResult& out) {
  const auto report = run_exhaustive(plan, seed, jobs);
  out.transcript += tag + " " + report.to_json().dump() + "\n";
  for (const auto& row : report.rows) out.transcript += row.trace.to_jsonl();
  if (report.mismatches != 0) out.end_to_end.fail(tag + ": " + std::to_string(report.mismatches) + " mismatches");
  if (report.min_fidelity < 1.0 - 1e-9) out.end_to_end.fail(tag + ": fidelity " + std::to_string(report.min_fidelity));
  if (!report.audit_passed) out.end_to_end.fail(tag + ": causal audit failed");
  out.min_fidelity = std::min(out.min_fidelity, report.min_fidelity);
  out.returns += report.returns;

  const auto space = original.space();
  for (const auto& row : report.rows) {
    ++out.runs;
    const std::size_t index = space.index_of(row.assignment);
    const auto& allowed = original.map.at(index);
    // The quantum run must honour the original map, not only the determinized one.
    if (allowed.empty() != !row.returned_at.has_value()) out.end_to_end.fail(tag + ": return presence differs from Q(m)");
    if (row.returned_at && std::find(allowed.begin(), allowed.end(), *row.returned_at) == allowed.end()) {
      out.end_to_end.fail(tag + ": returned outside Q(m)");
    }
    if (row.reconstruct_events > 1) out.end_to_end.fail(tag + ": more than one reconstruction");

    const auto classical = simulate_classically(plan, row.assignment);
    out.transcript += classical.to_json().dump() + "\n";
    std::vector<std::size_t> quantum;
    if (row.returned_at) quantum.push_back(*row.returned_at);
    if (classical.deliveries != quantum) out.equivalence.fail(tag + ": classical deliveries differ");
    if (!classical.audit_passed) out.equivalence.fail(tag + ": classical audit failed");
  }
}

// Criterion 5 corpus: classically possible unconstrained at-most-one tasks, N <= 3.
CorpusResult single_return_corpus(std::uint64_t seed, unsigned jobs) {
  CorpusResult out;
  auto options = at_most_one_options();
  options.min_returns = 2;
  options.unreachable_probability = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto task = random_possible_task(options, derive_seed(seed + 5, k));
    const auto plan = synthesize(task);
    check_plan(task, plan, derive_seed(seed + 50, k), jobs, "t5." + std::to_string(k), out);
  }
  return out;
}

// Criterion 6 corpus: classically possible multiple-return tasks.
CorpusResult multiple_return_corpus(std::uint64_t seed, unsigned jobs, Check* selection) {
  CorpusResult out;
  auto options = at_most_one_options();
  options.variant = ReturnVariant::kMultiple;
  options.min_returns = 2;
  options.unreachable_probability = 0.0;
  for (std::uint64_t k = 0; k < 25; ++k) {
    const auto task = random_possible_task(options, derive_seed(seed + 6, k));
    const std::string tag = "t6." + std::to_string(k);
    const auto plan = synthesize(task);
    if (selection != nullptr) {
      if (!plan.determinized) selection->fail(tag + ": plan not determinized");
      const auto space = task.space();
      for (std::size_t index = 0; index < space.size(); ++index) {
        const auto& q = task.map.at(index);
        const auto& picked = plan.task.map.at(index);
        if (picked.size() != (q.empty() ? 0U : 1U)) selection->fail(tag + ": determinized row is not a selection");
        for (std::size_t p : picked) {
          const std::size_t o = plan.return_origin.at(p);
          if (std::find(q.begin(), q.end(), o) == q.end()) selection->fail(tag + ": selection outside Q(m)");
        }
      }
    }
    check_plan(task, plan, derive_seed(seed + 60, k), jobs, tag, out);
  }
  return out;
}

// ---- 8 ------------------------------------------------------------------

struct Proc {
  int code = -1;
  std::string out;
};

Proc run_summon(const std::string& args) {
  const std::string cmd = std::string("\"") + SUMMON_BIN + "\" " + args + " 2>/dev/null";
  Proc p;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return p;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) p.out.append(buf.data(), n);
  const int status = pclose(pipe);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

Check no_summoning_demo() {
  Check c;
  const auto dir = std::filesystem::path(SUMMON_SOURCE_DIR) / "scenarios";
  for (const std::string name : {"no_summoning", "hayden_may"}) {
    const std::string file = "\"" + (dir / (name + ".json")).string() + "\"";
    const auto task = load_task(dir / (name + ".json"));
    if (!classically_possible(task).possible) c.fail(name + ": not classically possible");
    try {
      synthesize(task);
      c.fail(name + ": synthesis was not refused");
    } catch (const SynthesisRefused& e) {
      const std::string why = e.what();
      if (why.find("constrained") == std::string::npos) c.fail(name + ": refusal does not cite constrained inputs");
      if (name == "no_summoning" && why.find("S_12 is empty") == std::string::npos) {
        c.fail(name + ": refusal does not cite the empty S_12");
      }
    }
    const auto check = run_summon("check " + file);
    if (check.code != 0) c.fail(name + ": check exit " + std::to_string(check.code));
    else if (Json::parse(check.out)["verdict"]["possible"] != true) c.fail(name + ": check verdict not possible");
    const auto run = run_summon("run " + file + " --exhaustive");
    if (run.code != 4) c.fail(name + ": run exit " + std::to_string(run.code));
    else if (Json::parse(run.out)["refused"] != true) c.fail(name + ": run output lacks the refusal");
  }
  if (c.ok) c.detail = "both scenarios classically possible (exit 0) and refused for quantum synthesis (exit 4)";
  return c;
}

// ---- 9 ------------------------------------------------------------------

Check oracle_equivalence() {
  Check c;
  Rng rng(derive_seed(kSeed, 9));
  std::size_t literal = 0;
  std::size_t by_selection = 0;
  std::size_t possible = 0;
  std::size_t constrained = 0;
  std::size_t multiple = 0;
  for (int k = 0; k < 100; ++k) {
    RandomTaskOptions o;
    o.min_inputs = 1;
    o.max_inputs = 4;
    o.max_cardinality = 3;
    o.max_space = 16;
    o.min_returns = 1;
    o.max_returns = 3;
    o.variant = (k % 4 == 3) ? ReturnVariant::kMultiple : ReturnVariant::kAtMostOne;
    o.constrained_probability = 0.25;
    o.unreachable_probability = 0.15;
    const auto task = random_task(o, rng);
    const bool verdict = classically_possible(task).possible;
    // Exhaustive joint rule tables where they fit; the selection search is
    // equivalent and finishes where 2^bits does not.
    auto brute = oracle::rule_table_search(task, 22);
    if (brute) {
      ++literal;
    } else {
      brute = oracle::selection_search(task, 50'000'000);
      ++by_selection;
    }
    if (!brute) {
      c.fail("task " + std::to_string(k) + " too large for both oracles");
      continue;
    }
    if (*brute != verdict) c.fail("task " + std::to_string(k) + " disagrees with the brute-force oracle");
    possible += verdict ? 1 : 0;
    constrained += task.is_constrained() ? 1 : 0;
    multiple += classify_variant(task).returns == ReturnVariant::kMultiple ? 1 : 0;
  }
  if (possible == 0 || possible == 100) c.fail("corpus is one-sided");
  if (c.ok) {
    c.detail = "100 tasks agree (" + std::to_string(possible) + " possible, " + std::to_string(constrained) +
               " constrained, " + std::to_string(multiple) + " multiple-return; " + std::to_string(literal) +
               " by rule tables, " + std::to_string(by_selection) + " by selections)";
  }
  return c;
}

}  // namespace

int main() {
  std::cout << "acceptance seed " << kSeed << std::endl;
  report(1, "causal order laws", 5, causal_order_laws);
  report(2, "teleportation exactness", 30, teleportation);
  report(3, "((2,3)) qutrit secret sharing", 30, secret_sharing);
  report(4, "screens are necessary conditions", 60, screens_necessary);

  CorpusResult single;
  report(5, "single-return tasks end to end", 600, [&] {
    single = single_return_corpus(kSeed, 0);
    Check c = single.end_to_end;
    if (c.ok) {
      std::ostringstream s;
      s << "50 tasks, " << single.runs << " runs, " << single.returns << " returns, min fidelity " << single.min_fidelity;
      c.detail = s.str();
    }
    return c;
  });

  CorpusResult multi;
  report(6, "multiple-return tasks end to end", 600, [&] {
    Check selection;
    multi = multiple_return_corpus(kSeed, 0, &selection);
    Check c = multi.end_to_end;
    if (!selection.ok) c.fail(selection.detail);
    if (c.ok) {
      std::ostringstream s;
      s << "25 tasks, " << multi.runs << " runs, determinized maps are selections, min fidelity " << multi.min_fidelity;
      c.detail = s.str();
    }
    return c;
  });

  report(7, "classical simulation equals the quantum run", 0, [&] {
    Check c;
    if (!single.equivalence.ok) c.fail(single.equivalence.detail);
    if (!multi.equivalence.ok) c.fail(multi.equivalence.detail);
    if (single.runs + multi.runs == 0) c.fail("no runs to compare");
    if (c.ok) c.detail = std::to_string(single.runs + multi.runs) + " plan/assignment pairs, delivery sets equal";
    return c;
  });

  report(8, "no-summoning and constrained-call refusals", 60, no_summoning_demo);
  report(9, "feasibility agrees with brute force", 300, oracle_equivalence);

  report(10, "determinism", 1200, [&] {
    Check c;
    // Same seed, different thread count: the transcripts must be identical.
    const auto again5 = single_return_corpus(kSeed, 1);
    const auto again6 = multiple_return_corpus(kSeed, 1, nullptr);
    if (again5.transcript != single.transcript) c.fail("single-return transcript differs on rerun");
    if (again6.transcript != multi.transcript) c.fail("multiple-return transcript differs on rerun");
    if (c.ok) {
      c.detail = std::to_string(single.transcript.size() + multi.transcript.size()) +
                 " transcript bytes identical across reruns with 1 and all threads";
    }
    return c;
  });

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}

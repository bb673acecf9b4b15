#include "fixtures.hpp"

#include "summon/errors.hpp"
#include "summon/protocol.hpp"

#include <doctest.h>

#include <set>

using namespace summon;
using fixtures::pt;

namespace {

// Four return points behind two binary inputs; Q = 2 m_1 + m_2.
SummoningTask four_way() {
  SummoningTask task;
  task.start = pt("0", {"0"});
  task.inputs = {{pt("1", {"-1"}), 2}, {pt("1", {"1"}), 2}};
  task.returns = {pt("5", {"-3"}), pt("5", {"-1"}), pt("5", {"1"}), pt("5", {"3"})};
  fixtures::fill(task, [](const Assignment& m) { return ReturnSet{static_cast<std::size_t>(2 * m[0] + m[1])}; });
  return task;
}

void check_trace_shape(const Trace& trace) {
  static const std::set<std::string> kinds{"prepare", "teleport", "broadcast", "reconstruct", "deliver"};
  std::uint64_t seq = 0;
  for (const auto& e : trace.events()) {
    REQUIRE(kinds.count(e.kind) == 1);
    REQUIRE(e.seq == seq++);
  }
}

}  // namespace

TEST_CASE("synthesize G1: one pair, trivial sharing, one route") {
  const auto plan = synthesize(fixtures::g1());
  CHECK(plan.scheme.parties == 2);
  CHECK(plan.scheme.construction == "single-share");
  CHECK(plan.scheme.secret_dim == 3);
  CHECK(plan.routes.size() == 1);
  CHECK(plan.sites.size() == 2);
  CHECK_FALSE(plan.determinized);
  const auto j = plan.to_json();
  CHECK(j["scheme"]["construction"] == "single-share");
}

TEST_CASE("synthesize T3: three routes and the ((2,3)) scheme") {
  const auto plan = synthesize(fixtures::t3());
  CHECK(plan.scheme.construction == "qutrit-2-of-3");
  REQUIRE(plan.routes.size() == 3);
  CHECK(plan.routes[0].name() == "1-2");
  CHECK(plan.routes[1].name() == "1-3");
  CHECK(plan.routes[2].name() == "2-3");
  for (const auto& r : plan.routes) CHECK(r.hops == std::vector<std::size_t>{0, 1});
  // Each share label in exactly one route, matching the sites.
  CHECK(plan.sites[0].labels == std::vector<std::size_t>{0, 1});
  CHECK(plan.sites[1].labels == std::vector<std::size_t>{0, 2});
  CHECK(plan.sites[2].labels == std::vector<std::size_t>{1, 2});
}

TEST_CASE("synthesis refusals") {
  try {
    synthesize(fixtures::g0_unconstrained());
    FAIL("expected a refusal");
  } catch (const SynthesisRefused& e) {
    CHECK(std::string(e.what()).find("Q2") != std::string::npos);
  }
  try {
    synthesize(fixtures::g0_constrained());
    FAIL("expected a refusal");
  } catch (const SynthesisRefused& e) {
    const std::string why = e.what();
    CHECK(why.find("constrained") != std::string::npos);
    CHECK(why.find("S_12 is empty") != std::string::npos);
  }
  CHECK_THROWS_AS(synthesize(four_way(), {3}), Unsupported);
  auto invalid = fixtures::g1();
  invalid.inputs[0].cardinality = 1;
  CHECK_THROWS_AS(synthesize(invalid), InvalidArgument);
}

TEST_CASE("run on G1 returns at the designated point") {
  const auto plan = synthesize(fixtures::g1());
  const auto r = run(plan, {0, 1}, 7);
  CHECK(r.expected == std::optional<std::size_t>{1});
  CHECK(r.returned_at == std::optional<std::size_t>{1});
  REQUIRE(r.fidelity);
  CHECK(*r.fidelity >= 1.0 - 1e-9);
  CHECK(r.reconstruct_events == 1);
  CHECK(r.audit_passed);
  CHECK(r.matches());
  check_trace_shape(r.trace);
}

TEST_CASE("an empty row returns nothing anywhere") {
  auto task = fixtures::g1_geometry();
  summon::reset_map(task);
  set_row(task, std::vector<int>{0, 0}, {});
  set_row(task, std::vector<int>{0, 1}, {1});
  set_row(task, std::vector<int>{1, 0}, {0});
  set_row(task, std::vector<int>{1, 1}, {0});
  const auto plan = synthesize(task);
  const auto r = run(plan, {0, 0}, 3);
  CHECK_FALSE(r.expected);
  CHECK_FALSE(r.returned_at);
  CHECK_FALSE(r.fidelity);
  CHECK(r.trace.count("reconstruct") == 0);
  CHECK(r.matches());
}

TEST_CASE("exhaustive runs on T3 and G1") {
  const auto t3 = run_exhaustive(synthesize(fixtures::t3()), 11, 2);
  CHECK(t3.rows.size() == 9);
  CHECK(t3.mismatches == 0);
  CHECK(t3.returns == 9);
  CHECK(t3.min_fidelity >= 1.0 - 1e-9);
  CHECK(t3.audit_passed);
  for (const auto& row : t3.rows) {
    CHECK(row.returned_at == std::optional<std::size_t>{static_cast<std::size_t>((row.assignment[0] + row.assignment[1]) % 3)});
    CHECK(row.trace.count("reconstruct") == 1);
    check_trace_shape(row.trace);
  }

  const auto g1 = run_exhaustive(synthesize(fixtures::g1()), 12);
  CHECK(g1.rows.size() == 4);
  CHECK(g1.mismatches == 0);
}

TEST_CASE("secret dimension 2 through the embedded qutrit scheme") {
  const auto plan = synthesize(fixtures::t3(), {2});
  CHECK(plan.scheme.construction == "qutrit-2-of-3-embedded");
  const auto report = run_exhaustive(plan, 13);
  CHECK(report.mismatches == 0);
  CHECK(report.min_fidelity >= 1.0 - 1e-9);
}

TEST_CASE("four return points with star splitting") {
  const auto plan = synthesize(four_way(), {2});
  CHECK(plan.scheme.construction == "star-split");
  CHECK(plan.routes.size() == 6);
  const auto report = run_exhaustive(plan, 14);
  CHECK(report.rows.size() == 4);
  CHECK(report.mismatches == 0);
  CHECK(report.min_fidelity >= 1.0 - 1e-9);
  CHECK(report.audit_passed);
}

TEST_CASE("a single return point needs no sharing or routing") {
  const auto task = fixtures::trivial(pt("2", {"1"}));
  const auto plan = synthesize(task);
  CHECK(plan.scheme.construction == "direct");
  CHECK(plan.routes.empty());
  const auto r = run(plan, {}, 1);
  CHECK(r.returned_at == std::optional<std::size_t>{0});
  CHECK(*r.fidelity >= 1.0 - 1e-12);
}

TEST_CASE("multiple-return tasks are determinized first") {
  // Q_1 sees both inputs, Q_2 only m_2; the selection is forced to follow m_2.
  SummoningTask task = fixtures::g1_geometry();
  task.returns = {pt("3", {"0"}), pt("2", {"2"})};
  summon::reset_map(task);
  set_row(task, std::vector<int>{0, 0}, {0, 1});
  set_row(task, std::vector<int>{0, 1}, {0});
  set_row(task, std::vector<int>{1, 0}, {1});
  set_row(task, std::vector<int>{1, 1}, {0, 1});
  const auto plan = synthesize(task);
  CHECK(plan.determinized);
  CHECK(plan.return_origin == std::vector<std::size_t>{0, 1});
  const auto report = run_exhaustive(plan, 15);
  CHECK(report.mismatches == 0);
  const std::vector<std::size_t> expected{1, 0, 1, 0};
  for (std::size_t k = 0; k < 4; ++k) CHECK(report.rows[k].returned_at == std::optional<std::size_t>{expected[k]});

  // All-{Q_1,Q_2}: Q_2 is never used and disappears from the plan.
  auto both = fixtures::g1();
  fixtures::fill(both, [](const Assignment&) { return ReturnSet{0, 1}; });
  const auto p2 = synthesize(both);
  CHECK(p2.task.return_count() == 1);
  CHECK(p2.return_origin == std::vector<std::size_t>{0});
  CHECK(p2.scheme.construction == "direct");
  for (const auto& row : run_exhaustive(p2, 16).rows) CHECK(row.returned_at == std::optional<std::size_t>{0});
}

TEST_CASE("reconstruction at a point without its star is a protocol error") {
  auto plan = synthesize(fixtures::t3());
  // Mutation: Q_1 always decides to reconstruct.
  for (auto& cell : plan.rules[0].table) cell = Decision::kReturn;
  CHECK_THROWS_AS(run(plan, {1, 0}, 1), ProtocolError);
  // Where Q_1 is designated anyway, the second decision is the problem.
  for (auto& cell : plan.rules[1].table) cell = Decision::kReturn;
  CHECK_THROWS_AS(run(plan, {0, 0}, 1), ProtocolError);
}

TEST_CASE("exhaustive reports are deterministic and independent of the job count") {
  const auto plan = synthesize(fixtures::t3());
  const auto a = run_exhaustive(plan, 99, 1).to_json().dump();
  const auto b = run_exhaustive(plan, 99, 4).to_json().dump();
  const auto c = run_exhaustive(plan, 99, 0).to_json().dump();
  CHECK(a == b);
  CHECK(a == c);
  std::string ta;
  std::string tb;
  for (const auto& row : run_exhaustive(plan, 99, 1).rows) ta += row.trace.to_jsonl();
  for (const auto& row : run_exhaustive(plan, 99, 3).rows) tb += row.trace.to_jsonl();
  CHECK(ta == tb);
  std::string tc;
  for (const auto& row : run_exhaustive(plan, 100, 1).rows) tc += row.trace.to_jsonl();
  CHECK(ta != tc);
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 8, [&](std::size_t k) { hits[k] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t k) {
                    if (k == 7) throw ProtocolError("boom");
                  }),
                  ProtocolError);
}

#pragma once

// Hand-built tasks shared by the unit tests. These are written out here
// rather than taken from the scenario library so that the scenario code is
// checked against them, not the other way round.

#include "summon/task.hpp"

#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace fixtures {

using summon::Coordinate;
using summon::SpacetimePoint;
using summon::SummoningTask;

inline SpacetimePoint pt(const std::string& t, std::initializer_list<const char*> x) {
  SpacetimePoint p;
  p.t = Coordinate::parse(t);
  for (const char* c : x) p.x.push_back(Coordinate::parse(c));
  return p;
}

inline SpacetimePoint ptd(double t, std::initializer_list<double> x) {
  SpacetimePoint p;
  p.t = Coordinate(t);
  for (double c : x) p.x.push_back(Coordinate(c));
  return p;
}

/// Fills the table from a function of the assignment.
inline void fill(SummoningTask& task, const std::function<summon::ReturnSet(const summon::Assignment&)>& f) {
  summon::reset_map(task);
  const auto space = task.space();
  for (std::size_t k = 0; k < space.size(); ++k) task.map.set(k, f(space.at(k)));
}

/// P=(0,[0]); P_1=(1,[-1]), P_2=(1,[1]); Q_1=(3,[-1]), Q_2=(3,[1]).
inline SummoningTask g1_geometry() {
  SummoningTask task;
  task.start = pt("0", {"0"});
  task.inputs = {{pt("1", {"-1"}), 2}, {pt("1", {"1"}), 2}};
  task.returns = {pt("3", {"-1"}), pt("3", {"1"})};
  return task;
}

/// G1 with Q(m) = Q_1 if m1 xor m2 = 0, else Q_2.
inline SummoningTask g1() {
  SummoningTask task = g1_geometry();
  fill(task, [](const summon::Assignment& m) { return summon::ReturnSet{(m[0] ^ m[1]) == 0 ? 0u : 1u}; });
  return task;
}

/// P=(0,[0]); P_1=(1,[-1]), P_2=(1,[1]); Q_1=(3/2,[-1]), Q_2=(3/2,[1]).
inline SummoningTask g0_geometry() {
  SummoningTask task;
  task.start = pt("0", {"0"});
  task.inputs = {{pt("1", {"-1"}), 2}, {pt("1", {"1"}), 2}};
  task.returns = {pt("3/2", {"-1"}), pt("3/2", {"1"})};
  return task;
}

/// The constrained no-summoning task: exactly one call, (1,0) -> Q_1, (0,1) -> Q_2.
inline SummoningTask g0_constrained() {
  SummoningTask task = g0_geometry();
  summon::reset_map(task);
  summon::set_row(task, std::vector<int>{1, 0}, {0});
  summon::set_row(task, std::vector<int>{0, 1}, {1});
  summon::set_row(task, std::vector<int>{0, 0}, {});
  summon::set_row(task, std::vector<int>{1, 1}, {});
  summon::forbid(task, std::vector<int>{0, 0});
  summon::forbid(task, std::vector<int>{1, 1});
  return task;
}

/// G0 with all four assignments allowed; Q(0,0) is empty and Q(1,1) = Q_1.
inline SummoningTask g0_unconstrained() {
  SummoningTask task = g0_geometry();
  summon::reset_map(task);
  summon::set_row(task, std::vector<int>{1, 0}, {0});
  summon::set_row(task, std::vector<int>{0, 1}, {1});
  summon::set_row(task, std::vector<int>{0, 0}, {});
  summon::set_row(task, std::vector<int>{1, 1}, {0});
  return task;
}

/// Three returns at (4,-2), (4,0), (4,2) behind two ternary inputs; Q = (m1+m2) mod 3.
inline SummoningTask t3() {
  SummoningTask task;
  task.start = pt("0", {"0"});
  task.inputs = {{pt("1", {"-1"}), 3}, {pt("1", {"1"}), 3}};
  task.returns = {pt("4", {"-2"}), pt("4", {"0"}), pt("4", {"2"})};
  fill(task, [](const summon::Assignment& m) {
    return summon::ReturnSet{static_cast<std::size_t>((m[0] + m[1]) % 3)};
  });
  return task;
}

/// No inputs, one return point at `q`.
inline SummoningTask trivial(const SpacetimePoint& q) {
  SummoningTask task;
  task.start = pt("0", {"0"});
  task.returns = {q};
  fill(task, [](const summon::Assignment&) { return summon::ReturnSet{0}; });
  return task;
}

}  // namespace fixtures

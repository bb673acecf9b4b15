#include "summon/scenarios.hpp"

#include "summon/errors.hpp"
#include "summon/feasibility.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace summon {

namespace {

Coordinate half(int twice) { return Coordinate(Rational(twice) / 2); }

SpacetimePoint pt(int t, int x) { return {Coordinate(t), {Coordinate(x)}}; }

SpacetimePoint half_pt(int twice_t, int twice_x) { return {half(twice_t), {half(twice_x)}}; }

SummoningTask base_task(std::vector<InputPoint> inputs, std::vector<SpacetimePoint> returns) {
  SummoningTask task;
  task.dimension = 1;
  task.start = pt(0, 0);
  task.inputs = std::move(inputs);
  task.returns = std::move(returns);
  reset_map(task);
  return task;
}

SummoningTask g1() {
  SummoningTask task = base_task({{pt(1, -1), 2}, {pt(1, 1), 2}}, {pt(3, -1), pt(3, 1)});
  AssignmentSpace space = task.space();
  for (std::size_t index = 0; index < space.size(); ++index) {
    Assignment m = space.at(index);
    task.map.set(index, {(m[0] ^ m[1]) == 0 ? std::size_t{0} : std::size_t{1}});
  }
  return task;
}

SummoningTask t3() {
  SummoningTask task = base_task({{pt(1, -1), 3}, {pt(1, 1), 3}}, {pt(4, -2), pt(4, 0), pt(4, 2)});
  AssignmentSpace space = task.space();
  for (std::size_t index = 0; index < space.size(); ++index) {
    Assignment m = space.at(index);
    task.map.set(index, {static_cast<std::size_t>((m[0] + m[1]) % 3)});
  }
  return task;
}

// One call is made, at P_1 (m = (1,0)) or at P_2 (m = (0,1)); each return
// point sees only its own call point.
SummoningTask no_summoning() {
  SummoningTask task = base_task({{pt(1, -1), 2}, {pt(1, 1), 2}}, {half_pt(3, -2), half_pt(3, 2)});
  set_row(task, std::vector<int>{1, 0}, {0});
  set_row(task, std::vector<int>{0, 1}, {1});
  forbid(task, std::vector<int>{0, 0});
  forbid(task, std::vector<int>{1, 1});
  return task;
}

// Call points c_i at (1, x_i) all lie in the causal past of every return
// point r_i at (3, x_i).
std::vector<int> call_positions(std::size_t n) {
  if (n < 2 || n > 5) throw InvalidArgument("call scenarios support 2 to 5 call points");
  std::vector<int> xs;
  const int offset = static_cast<int>(n) - 1;  // positions 2k - (n-1) in half units
  for (std::size_t k = 0; k < n; ++k) xs.push_back(2 * static_cast<int>(k) - offset);
  return xs;
}

SummoningTask call_task(std::size_t n) {
  std::vector<int> xs = call_positions(n);
  std::vector<InputPoint> inputs;
  std::vector<SpacetimePoint> returns;
  for (int x : xs) {
    inputs.push_back({half_pt(2, x), 2});
    returns.push_back(half_pt(2 + 2 * static_cast<int>(n), x));
  }
  return base_task(std::move(inputs), std::move(returns));
}

SummoningTask hayden_may(std::size_t n) {
  SummoningTask task = call_task(n);
  AssignmentSpace space = task.space();
  for (std::size_t index = 0; index < space.size(); ++index) {
    Assignment m = space.at(index);
    if (std::count(m.begin(), m.end(), 1) == 1) {
      task.map.set(index, {static_cast<std::size_t>(std::find(m.begin(), m.end(), 1) - m.begin())});
    } else {
      forbid(task, m);
    }
  }
  return task;
}

SummoningTask multi_call(std::size_t n) {
  SummoningTask task = call_task(n);
  AssignmentSpace space = task.space();
  for (std::size_t index = 0; index < space.size(); ++index) {
    Assignment m = space.at(index);
    ReturnSet set;
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k] == 1) set.push_back(k);
    }
    task.map.set(index, std::move(set));
  }
  return task;
}

// ---- random generation ---------------------------------------------------

std::vector<int> random_cardinalities(const RandomTaskOptions& o, Rng& rng) {
  const int lo = static_cast<int>(o.min_inputs);
  const int hi = static_cast<int>(o.max_inputs);
  const std::size_t count = static_cast<std::size_t>(rng.uniform_int(lo, hi));
  std::vector<int> n(count);
  for (int& v : n) v = rng.uniform_int(2, std::max(2, o.max_cardinality));
  auto product = [&] {
    std::size_t p = 1;
    for (int v : n) p *= static_cast<std::size_t>(v);
    return p;
  };
  // Shrink the largest cardinalities, then drop inputs, until the space fits.
  while (product() > o.max_space) {
    auto it = std::max_element(n.begin(), n.end());
    if (*it > 2) {
      --*it;
    } else {
      n.pop_back();
    }
  }
  return n;
}

/// Removes return points no allowed row designates and renumbers the map.
void drop_undesignated(SummoningTask& task) {
  std::vector<bool> used(task.returns.size(), false);
  for (std::size_t index = 0; index < task.map.size(); ++index) {
    if (task.is_allowed(index) && task.map.has(index)) {
      for (std::size_t j : task.map.at(index)) used[j] = true;
    }
  }
  std::map<std::size_t, std::size_t> renumber;
  std::vector<SpacetimePoint> kept;
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (used[j]) {
      renumber[j] = kept.size();
      kept.push_back(task.returns[j]);
    }
  }
  ReturnMap map(task.space());
  for (std::size_t index = 0; index < task.map.size(); ++index) {
    if (!task.map.has(index)) continue;
    ReturnSet set;
    for (std::size_t j : task.map.at(index)) set.push_back(renumber.at(j));
    map.set(index, std::move(set));
  }
  task.returns = std::move(kept);
  task.map = std::move(map);
}

std::optional<std::size_t> random_target(const RandomTaskOptions& o, std::size_t n, Rng& rng) {
  if (rng.bernoulli(o.empty_row_probability)) return std::nullopt;
  return static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
}

/// Single-valued map, possibly empty rows, indexed by assignment.
using Selection = std::vector<std::optional<std::size_t>>;

// Q(m) depends only on inputs every return point sees.
Selection common_past_map(const SummoningTask& task, const RandomTaskOptions& o, Rng& rng) {
  std::vector<std::size_t> common;
  for (std::size_t k = 0; k < task.inputs.size(); ++k) {
    bool everywhere = true;
    for (std::size_t j = 0; j < task.return_count(); ++j) everywhere = everywhere && past_input_set(task, j).contains(k);
    if (everywhere) common.push_back(k);
  }
  AssignmentSpace space = task.space();
  AssignmentSpace sub = space.subspace(common);
  Selection table(sub.size());
  for (auto& t : table) t = random_target(o, task.return_count(), rng);
  Selection out(space.size());
  for (std::size_t index = 0; index < space.size(); ++index) {
    out[index] = table[space.restriction_index(space.at(index), common)];
  }
  return out;
}

// Return points take turns claiming whole restriction classes of their own
// past that nobody has claimed yet, so every indicator factors by design.
Selection layered_map(const SummoningTask& task, const RandomTaskOptions& o, Rng& rng) {
  AssignmentSpace space = task.space();
  Selection out(space.size());
  std::vector<std::size_t> order(task.return_count());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::shuffle(order.begin(), order.end(), rng.engine());
  const double claim = 1.0 - o.empty_row_probability;
  for (std::size_t turn = 0; turn < order.size(); ++turn) {
    const std::size_t j = order[turn];
    std::vector<std::size_t> members = past_input_set(task, j).members;
    AssignmentSpace sub = space.subspace(members);
    std::vector<bool> blocked(sub.size(), false);
    for (std::size_t index = 0; index < space.size(); ++index) {
      if (task.is_allowed(index) && out[index]) blocked[space.restriction_index(space.at(index), members)] = true;
    }
    const double p = turn + 1 == order.size() ? claim : claim / static_cast<double>(order.size() - turn);
    std::vector<bool> fire(sub.size(), false);
    for (std::size_t c = 0; c < sub.size(); ++c) fire[c] = !blocked[c] && rng.bernoulli(p);
    for (std::size_t index = 0; index < space.size(); ++index) {
      if (task.is_allowed(index) && fire[space.restriction_index(space.at(index), members)]) out[index] = j;
    }
  }
  return out;
}

Selection free_map(const SummoningTask& task, const RandomTaskOptions& o, Rng& rng) {
  Selection out(task.space().size());
  for (auto& t : out) t = random_target(o, task.return_count(), rng);
  return out;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"g1", "t3", "no_summoning", "hayden_may", "multi_call", "random_possible"};
}

SummoningTask make_scenario(const std::string& name, const ScenarioParams& params) {
  if (name == "g1") return g1();
  if (name == "t3") return t3();
  if (name == "no_summoning") return no_summoning();
  if (name == "hayden_may") return hayden_may(params.returns == 0 ? 3 : params.returns);
  if (name == "multi_call") return multi_call(params.returns == 0 ? 3 : params.returns);
  if (name == "random_possible") {
    RandomTaskOptions o;
    o.min_returns = 2;
    if (params.returns != 0) o.min_returns = o.max_returns = params.returns;
    return random_possible_task(o, params.seed);
  }
  std::string known;
  for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown scenario \"" + name + "\" (known: " + known + ")");
}

SummoningTask random_task(const RandomTaskOptions& o, Rng& rng) {
  if (o.min_returns < 1 || o.max_returns < o.min_returns || o.max_inputs < o.min_inputs) {
    throw InvalidArgument("inconsistent random task options");
  }
  std::vector<int> cards = random_cardinalities(o, rng);
  std::vector<InputPoint> inputs;
  for (int n : cards) inputs.push_back({half_pt(rng.uniform_int(0, 4), rng.uniform_int(-4, 4)), n});
  const std::size_t n_returns =
      static_cast<std::size_t>(rng.uniform_int(static_cast<int>(o.min_returns), static_cast<int>(o.max_returns)));
  std::vector<SpacetimePoint> returns;
  for (std::size_t j = 0; j < n_returns; ++j) {
    const int t = rng.uniform_int(3, 10);
    if (rng.bernoulli(o.unreachable_probability)) {
      const int x = rng.uniform_int(t + 1, t + 4);
      returns.push_back(half_pt(t, rng.bernoulli(0.5) ? x : -x));
    } else {
      returns.push_back(half_pt(t, rng.uniform_int(-t, t)));
    }
  }
  SummoningTask task = base_task(std::move(inputs), std::move(returns));
  AssignmentSpace space = task.space();

  if (rng.bernoulli(o.constrained_probability) && space.size() > 1) {
    task.forbidden.assign(space.size(), false);
    std::size_t allowed = space.size();
    for (std::size_t index = 0; index < space.size(); ++index) {
      if (allowed > 1 && rng.bernoulli(0.35)) {
        task.forbidden[index] = true;
        --allowed;
      }
    }
    if (allowed == space.size()) task.forbidden[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(space.size()) - 1))] = true;
  }

  const double family = rng.uniform();
  Selection base = family < 0.35 ? common_past_map(task, o, rng) : family < 0.8 ? layered_map(task, o, rng)
                                                                                 : free_map(task, o, rng);
  std::vector<ReturnSet> rows(space.size());
  for (std::size_t index = 0; index < space.size(); ++index) {
    if (base[index]) rows[index] = {*base[index]};
  }

  if (o.variant == ReturnVariant::kMultiple && task.return_count() >= 2) {
    std::vector<std::size_t> candidates;
    for (std::size_t index = 0; index < space.size(); ++index) {
      if (task.is_allowed(index)) candidates.push_back(index);
    }
    std::shuffle(candidates.begin(), candidates.end(), rng.engine());
    std::size_t multi = 0;
    const bool free_sets = rng.bernoulli(0.3);
    for (std::size_t index : candidates) {
      if (multi >= o.max_multi_rows) break;
      if (!rng.bernoulli(0.6)) continue;
      ReturnSet set = free_sets ? ReturnSet{} : rows[index];
      for (std::size_t j = 0; j < task.return_count(); ++j) {
        if (rng.bernoulli(0.5)) set.push_back(j);
      }
      std::sort(set.begin(), set.end());
      set.erase(std::unique(set.begin(), set.end()), set.end());
      if (set.size() > 1) ++multi;
      rows[index] = std::move(set);
    }
  }

  for (std::size_t index = 0; index < space.size(); ++index) {
    if (task.is_allowed(index)) task.map.set(index, rows[index]);
  }
  drop_undesignated(task);
  if (task.returns.empty()) {
    // Nothing was ever designated; fall back to a single always-called point.
    task.returns.push_back(half_pt(4, 0));
    task.map = ReturnMap(space);
    for (std::size_t index = 0; index < space.size(); ++index) {
      if (task.is_allowed(index)) task.map.set(index, {0});
    }
  }
  return task;
}

SummoningTask random_possible_task(const RandomTaskOptions& options, std::uint64_t seed, std::size_t max_attempts) {
  Rng rng(seed);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    SummoningTask task = random_task(options, rng);
    if (task.return_count() < options.min_returns || !validate(task).valid()) continue;
    const bool multiple = classify_variant(task).returns == ReturnVariant::kMultiple;
    if (multiple != (options.variant == ReturnVariant::kMultiple)) continue;
    if (classically_possible(task).possible) return task;
  }
  throw Error("no classically possible task found after " + std::to_string(max_attempts) + " attempts");
}

}  // namespace summon

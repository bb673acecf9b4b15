#include "summon/feasibility.hpp"

#include "summon/errors.hpp"

#include <algorithm>
#include <map>

namespace summon {

namespace {

bool contains(const ReturnSet& set, std::size_t j) {
  return std::binary_search(set.begin(), set.end(), j);
}

std::string pair_label(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

void check_cap(const SummoningTask& task, std::size_t cap) {
  if (task.space().size() > cap) {
    throw CapacityExceeded("input space has " + std::to_string(task.space().size()) +
                           " assignments, above the cap of " + std::to_string(cap) +
                           "; reduce input cardinalities or the number of input points");
  }
}

// Per-return restriction bookkeeping shared by both deciders.
struct ReturnClasses {
  std::vector<std::size_t> members;
  AssignmentSpace domain;
  std::vector<std::size_t> class_of;  // assignment index -> restriction index
  std::vector<bool> realized;
};

std::vector<ReturnClasses> build_classes(const SummoningTask& task) {
  AssignmentSpace space = task.space();
  std::vector<ReturnClasses> out(task.returns.size());
  for (std::size_t j = 0; j < task.returns.size(); ++j) {
    auto& rc = out[j];
    rc.members = past_input_set(task, j).members;
    rc.domain = space.subspace(rc.members);
    rc.class_of.resize(space.size());
    rc.realized.assign(rc.domain.size(), false);
    for (std::size_t index = 0; index < space.size(); ++index) {
      Assignment m = space.at(index);
      rc.class_of[index] = space.restriction_index(m, rc.members);
      if (task.is_allowed(index)) rc.realized[rc.class_of[index]] = true;
    }
  }
  return out;
}

// Backtracking search for a causal selection in a multiple-return task.
// cell value: -1 unknown, 0 silent, 1 return.
class SelectionSearch {
 public:
  SelectionSearch(const SummoningTask& task, const std::vector<ReturnClasses>& classes,
                  const std::vector<bool>& reachable)
      : task_(task), classes_(classes) {
    cells_.resize(classes.size());
    for (std::size_t j = 0; j < classes.size(); ++j) {
      cells_[j].assign(classes[j].domain.size(), reachable[j] ? -1 : 0);
    }
    for (std::size_t index = 0; index < task.map.size(); ++index) {
      if (!task.is_allowed(index)) continue;
      const ReturnSet& q = task.map.at(index);
      for (std::size_t j = 0; j < classes.size(); ++j) {
        if (!contains(q, j)) cells_[j][classes[j].class_of[index]] = 0;
      }
      if (!q.empty()) rows_.push_back(index);
    }
  }

  bool solve() { return search(cells_, 0); }

  const std::vector<std::vector<int>>& cells() const { return solution_; }
  std::size_t stuck_row() const { return stuck_row_; }

 private:
  int& cell(std::vector<std::vector<int>>& cells, std::size_t j, std::size_t index) const {
    return cells[j][classes_[j].class_of[index]];
  }

  // Unit propagation; returns false on conflict.
  bool propagate(std::vector<std::vector<int>>& cells, std::size_t depth) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t index : rows_) {
        const ReturnSet& q = task_.map.at(index);
        int ones = 0;
        std::size_t open = 0;
        std::size_t last_open = 0;
        for (std::size_t j : q) {
          int v = cell(cells, j, index);
          if (v == 1) ++ones;
          if (v == -1) {
            ++open;
            last_open = j;
          }
        }
        if (ones > 1 || (ones == 0 && open == 0)) {
          note_stuck(index, depth);
          return false;
        }
        if (ones == 1 && open > 0) {
          for (std::size_t j : q) {
            if (cell(cells, j, index) == -1) cell(cells, j, index) = 0;
          }
          changed = true;
        } else if (ones == 0 && open == 1) {
          cell(cells, last_open, index) = 1;
          changed = true;
        }
      }
    }
    return true;
  }

  bool search(std::vector<std::vector<int>> cells, std::size_t depth) {
    if (!propagate(cells, depth)) return false;
    for (std::size_t index : rows_) {
      const ReturnSet& q = task_.map.at(index);
      bool decided = std::any_of(q.begin(), q.end(),
                                 [&](std::size_t j) { return cell(cells, j, index) == 1; });
      if (decided) continue;
      for (std::size_t j : q) {
        if (cell(cells, j, index) != -1) continue;
        auto trial = cells;
        cell(trial, j, index) = 1;
        if (search(std::move(trial), depth + 1)) return true;
      }
      note_stuck(index, depth);
      return false;
    }
    solution_ = std::move(cells);
    return true;
  }

  void note_stuck(std::size_t index, std::size_t depth) {
    if (!have_stuck_ || depth > stuck_depth_) {
      have_stuck_ = true;
      stuck_depth_ = depth;
      stuck_row_ = index;
    }
  }

  const SummoningTask& task_;
  const std::vector<ReturnClasses>& classes_;
  std::vector<std::vector<int>> cells_;
  std::vector<std::size_t> rows_;
  std::vector<std::vector<int>> solution_;
  bool have_stuck_ = false;
  std::size_t stuck_depth_ = 0;
  std::size_t stuck_row_ = 0;
};

LocalDecisionRule make_rule(std::size_t j, const ReturnClasses& rc) {
  LocalDecisionRule rule;
  rule.return_index = j;
  rule.members = rc.members;
  rule.domain = rc.domain;
  rule.table.assign(rc.domain.size(), std::nullopt);
  return rule;
}

}  // namespace

Decision LocalDecisionRule::evaluate(const Assignment& m) const {
  std::size_t c = 0;
  for (std::size_t pos = 0; pos < members.size(); ++pos) {
    c = c * static_cast<std::size_t>(domain.cardinalities()[pos]) + static_cast<std::size_t>(m.at(members[pos]));
  }
  const auto& entry = table.at(c);
  if (!entry) {
    throw InvalidArgument("decision rule for return point " + std::to_string(return_index + 1) +
                          " has no entry for this restriction");
  }
  return *entry;
}

ScreenResult check_reachability(const SummoningTask& task) {
  require_valid(task);
  ScreenResult r;
  r.name = "reachable";
  r.informational = task.is_constrained();
  for (std::size_t j = 0; j < task.returns.size(); ++j) {
    if (!task.precedes(task.start, task.returns[j])) r.failing_returns.push_back(j);
  }
  r.passed = r.failing_returns.empty();
  r.detail = r.passed ? "every return point is in the causal future of the start point"
                      : std::to_string(r.failing_returns.size()) + " return point(s) outside the future of P";
  return r;
}

ScreenResult check_common_past(const SummoningTask& task) {
  require_valid(task);
  ScreenResult r;
  r.name = "common_past";
  r.informational = task.is_constrained();
  for (std::size_t i = 0; i < task.returns.size(); ++i) {
    for (std::size_t j = i + 1; j < task.returns.size(); ++j) {
      if (common_past_input_set(task, i, j).empty()) r.failing_pairs.emplace_back(i, j);
    }
  }
  r.passed = r.failing_pairs.empty();
  if (task.returns.size() < 2) {
    r.detail = "single return point: vacuous";
  } else if (r.passed) {
    r.detail = "every pair of return points has a common past input point";
  } else {
    r.detail = "empty common past for pair " + pair_label(r.failing_pairs[0].first, r.failing_pairs[0].second);
  }
  return r;
}

ScreenResult check_pairwise_exclusion(const SummoningTask& task) {
  require_valid(task);
  if (task.is_constrained()) throw InvalidArgument("pairwise exclusion screen is undefined for constrained inputs");
  if (classify_variant(task).returns == ReturnVariant::kMultiple) {
    throw InvalidArgument("pairwise exclusion screen is undefined for multiple-return tasks; determinize first");
  }
  ScreenResult r;
  r.name = "pairwise_exclusion";
  AssignmentSpace space = task.space();
  for (std::size_t i = 0; i < task.returns.size() && !r.exclusion_witness; ++i) {
    for (std::size_t j = i + 1; j < task.returns.size() && !r.exclusion_witness; ++j) {
      std::vector<std::size_t> members = common_past_input_set(task, i, j).members;
      AssignmentSpace sub = space.subspace(members);
      std::vector<bool> to_i(sub.size(), false);
      std::vector<bool> to_j(sub.size(), false);
      for (std::size_t index = 0; index < space.size(); ++index) {
        Assignment m = space.at(index);
        std::size_t c = space.restriction_index(m, members);
        const ReturnSet& q = task.map.at(index);
        if (contains(q, i)) to_i[c] = true;
        if (contains(q, j)) to_j[c] = true;
      }
      for (std::size_t c = 0; c < sub.size(); ++c) {
        if (to_i[c] && to_j[c]) {
          r.exclusion_witness = ScreenResult::ExclusionWitness{i, j, members, sub.at(c)};
          break;
        }
      }
    }
  }
  r.passed = !r.exclusion_witness;
  r.detail = r.passed ? "inputs on every common past exclude one point of each pair"
                      : "restriction on S" + pair_label(r.exclusion_witness->i, r.exclusion_witness->j) +
                            " is consistent with both return points";
  return r;
}

FeasibilityVerdict classically_possible(const SummoningTask& task, std::size_t cap) {
  require_valid(task);
  check_cap(task, cap);

  FeasibilityVerdict verdict;
  verdict.variant = classify_variant(task);
  const bool multiple = verdict.variant.returns == ReturnVariant::kMultiple;
  const bool constrained = task.is_constrained();

  ScreenResult reach_screen = check_reachability(task);
  ScreenResult past_screen = check_common_past(task);
  if (multiple) {
    reach_screen.informational = true;
    past_screen.applicable = false;
  }
  verdict.screens.push_back(reach_screen);
  verdict.screens.push_back(past_screen);
  if (!constrained && !multiple) {
    verdict.screens.push_back(check_pairwise_exclusion(task));
  } else {
    ScreenResult exclusion;
    exclusion.name = "pairwise_exclusion";
    exclusion.applicable = false;
    exclusion.detail = constrained ? "not applicable to constrained inputs" : "not applicable to multiple-return maps";
    verdict.screens.push_back(exclusion);
  }

  AssignmentSpace space = task.space();
  std::vector<ReturnClasses> classes = build_classes(task);
  std::vector<bool> reachable(task.returns.size());
  for (std::size_t j = 0; j < task.returns.size(); ++j) reachable[j] = task.precedes(task.start, task.returns[j]);

  if (!multiple) {
    // Every return point is designated, so each must be reachable from P.
    for (std::size_t j = 0; j < task.returns.size(); ++j) {
      if (!reachable[j]) {
        ImpossibilityWitness w;
        w.kind = ImpossibilityWitness::Kind::kUnreachable;
        w.return_index = j;
        w.detail = "return point " + std::to_string(j + 1) + " is not in the causal future of the start point";
        verdict.witness = w;
        return verdict;
      }
    }
    std::vector<LocalDecisionRule> rules;
    for (std::size_t j = 0; j < task.returns.size(); ++j) {
      const ReturnClasses& rc = classes[j];
      LocalDecisionRule rule = make_rule(j, rc);
      std::vector<std::size_t> representative(rc.domain.size(), 0);
      for (std::size_t index = 0; index < space.size(); ++index) {
        if (!task.is_allowed(index)) continue;
        Decision d = contains(task.map.at(index), j) ? Decision::kReturn : Decision::kSilent;
        std::size_t c = rc.class_of[index];
        if (!rule.table[c]) {
          rule.table[c] = d;
          representative[c] = index;
        } else if (*rule.table[c] != d) {
          ImpossibilityWitness w;
          w.kind = ImpossibilityWitness::Kind::kDependence;
          w.return_index = j;
          w.first = space.at(representative[c]);
          w.second = space.at(index);
          w.detail = "whether to return at Q" + std::to_string(j + 1) +
                     " depends on inputs outside its causal past";
          verdict.witness = w;
          return verdict;
        }
      }
      rules.push_back(std::move(rule));
    }
    verdict.possible = true;
    verdict.rules = std::move(rules);
    verdict.selection.assign(space.size(), std::nullopt);
    for (std::size_t index = 0; index < space.size(); ++index) {
      if (task.is_allowed(index) && !task.map.at(index).empty()) verdict.selection[index] = task.map.at(index).front();
    }
    return verdict;
  }

  SelectionSearch search(task, classes, reachable);
  if (!search.solve()) {
    ImpossibilityWitness w;
    w.kind = ImpossibilityWitness::Kind::kNoSelection;
    w.first = space.at(search.stuck_row());
    w.detail = "no selection of one valid return point per input set factors through the causal pasts";
    verdict.witness = w;
    return verdict;
  }
  const auto& cells = search.cells();
  verdict.possible = true;
  for (std::size_t j = 0; j < task.returns.size(); ++j) {
    LocalDecisionRule rule = make_rule(j, classes[j]);
    for (std::size_t c = 0; c < rule.table.size(); ++c) {
      if (classes[j].realized[c]) rule.table[c] = cells[j][c] == 1 ? Decision::kReturn : Decision::kSilent;
    }
    verdict.rules.push_back(std::move(rule));
  }
  verdict.selection.assign(space.size(), std::nullopt);
  for (std::size_t index = 0; index < space.size(); ++index) {
    if (!task.is_allowed(index)) continue;
    for (std::size_t j = 0; j < task.returns.size(); ++j) {
      if (cells[j][classes[j].class_of[index]] == 1) verdict.selection[index] = j;
    }
  }
  return verdict;
}

bool rules_are_sound(const SummoningTask& task, const std::vector<LocalDecisionRule>& rules) {
  if (rules.size() != task.returns.size()) return false;
  AssignmentSpace space = task.space();
  for (std::size_t index = 0; index < space.size(); ++index) {
    if (!task.is_allowed(index)) continue;
    Assignment m = space.at(index);
    std::vector<std::size_t> fired;
    for (const auto& rule : rules) {
      try {
        if (rule.evaluate(m) == Decision::kReturn) fired.push_back(rule.return_index);
      } catch (const InvalidArgument&) {
        return false;
      }
    }
    const ReturnSet& q = task.map.at(index);
    if (q.empty() ? !fired.empty() : (fired.size() != 1 || !contains(q, fired[0]))) return false;
  }
  return true;
}

std::vector<std::size_t> determinized_return_origin(const SummoningTask& task,
                                                    const FeasibilityVerdict& verdict) {
  if (!verdict.possible) throw InvalidArgument("cannot determinize a task that is not classically possible");
  std::vector<std::size_t> used;
  if (verdict.variant.returns != ReturnVariant::kMultiple) {
    for (std::size_t j = 0; j < task.returns.size(); ++j) used.push_back(j);
    return used;
  }
  std::vector<bool> seen(task.returns.size(), false);
  for (const auto& f : verdict.selection) {
    if (f) seen[*f] = true;
  }
  for (std::size_t j = 0; j < seen.size(); ++j) {
    if (seen[j]) used.push_back(j);
  }
  return used;
}

SummoningTask determinize(const SummoningTask& task, const FeasibilityVerdict& verdict) {
  std::vector<std::size_t> used = determinized_return_origin(task, verdict);
  if (verdict.variant.returns != ReturnVariant::kMultiple) return task;

  std::map<std::size_t, std::size_t> renumber;
  for (std::size_t k = 0; k < used.size(); ++k) renumber[used[k]] = k;

  SummoningTask out = task;
  out.returns.clear();
  for (std::size_t j : used) out.returns.push_back(task.returns[j]);
  out.map = ReturnMap(task.space());
  for (std::size_t index = 0; index < task.map.size(); ++index) {
    if (task.is_allowed(index)) {
      const auto& f = verdict.selection.at(index);
      out.map.set(index, f ? ReturnSet{renumber.at(*f)} : ReturnSet{});
    } else if (task.map.has(index)) {
      out.map.set(index, {});
    }
  }
  return out;
}

std::string to_string(ImpossibilityWitness::Kind kind) {
  switch (kind) {
    case ImpossibilityWitness::Kind::kUnreachable: return "unreachable";
    case ImpossibilityWitness::Kind::kDependence: return "dependence";
    case ImpossibilityWitness::Kind::kNoSelection: return "no_selection";
  }
  return "?";
}

}  // namespace summon

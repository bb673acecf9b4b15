#include "summon/task.hpp"

#include "summon/errors.hpp"

#include <algorithm>
#include <limits>

namespace summon {

AssignmentSpace::AssignmentSpace(std::vector<int> cardinalities)
    : cardinalities_(std::move(cardinalities)) {
  size_ = 1;
  for (int n : cardinalities_) {
    if (n <= 0) {
      size_ = 0;
      return;
    }
    if (size_ > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(n)) {
      size_ = std::numeric_limits<std::size_t>::max();
      return;
    }
    size_ *= static_cast<std::size_t>(n);
  }
}

bool AssignmentSpace::in_range(std::span<const int> values) const {
  if (values.size() != cardinalities_.size()) return false;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] < 0 || values[k] >= cardinalities_[k]) return false;
  }
  return true;
}

std::size_t AssignmentSpace::index_of(std::span<const int> values) const {
  if (!in_range(values)) throw InvalidArgument("assignment out of range");
  std::size_t index = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    index = index * static_cast<std::size_t>(cardinalities_[k]) + static_cast<std::size_t>(values[k]);
  }
  return index;
}

Assignment AssignmentSpace::at(std::size_t index) const {
  if (index >= size_) throw InvalidArgument("assignment index out of range");
  Assignment values(cardinalities_.size());
  for (std::size_t k = cardinalities_.size(); k-- > 0;) {
    const auto n = static_cast<std::size_t>(cardinalities_[k]);
    values[k] = static_cast<int>(index % n);
    index /= n;
  }
  return values;
}

std::size_t AssignmentSpace::restriction_index(std::span<const int> values,
                                               std::span<const std::size_t> members) const {
  std::size_t index = 0;
  for (std::size_t k : members) {
    index = index * static_cast<std::size_t>(cardinalities_.at(k)) + static_cast<std::size_t>(values[k]);
  }
  return index;
}

AssignmentSpace AssignmentSpace::subspace(std::span<const std::size_t> members) const {
  std::vector<int> sub;
  sub.reserve(members.size());
  for (std::size_t k : members) sub.push_back(cardinalities_.at(k));
  return AssignmentSpace(std::move(sub));
}

ReturnMap::ReturnMap(const AssignmentSpace& space) : rows_(space.size()) {}

void ReturnMap::set(std::size_t index, ReturnSet returns) {
  if (index >= rows_.size()) throw InvalidArgument("return map row out of range");
  std::sort(returns.begin(), returns.end());
  returns.erase(std::unique(returns.begin(), returns.end()), returns.end());
  rows_[index] = std::move(returns);
}

const ReturnSet& ReturnMap::at(std::size_t index) const {
  const auto& row = rows_.at(index);
  if (!row) throw InvalidArgument("return map row " + std::to_string(index) + " is not set");
  return *row;
}

std::vector<int> SummoningTask::cardinalities() const {
  std::vector<int> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(in.cardinality);
  return out;
}

bool SummoningTask::is_constrained() const {
  return std::find(forbidden.begin(), forbidden.end(), true) != forbidden.end();
}

void reset_map(SummoningTask& task, std::size_t cap) {
  AssignmentSpace space = task.space();
  if (space.size() > cap) {
    throw CapacityExceeded("input space has " + std::to_string(space.size()) +
                           " assignments, above the cap of " + std::to_string(cap) +
                           "; reduce input cardinalities or the number of input points");
  }
  task.map = ReturnMap(space);
  task.forbidden.clear();
}

void set_row(SummoningTask& task, std::span<const int> values, ReturnSet returns) {
  task.map.set(task.space().index_of(values), std::move(returns));
}

void forbid(SummoningTask& task, std::span<const int> values) {
  AssignmentSpace space = task.space();
  std::size_t index = space.index_of(values);
  if (task.forbidden.empty()) task.forbidden.assign(space.size(), false);
  task.forbidden[index] = true;
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate(const SummoningTask& task) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::string message) {
    report.violations.push_back({kind, std::move(message)});
  };

  if (task.dimension < 1) add(ViolationKind::kDimensionMismatch, "spatial dimension must be at least 1");
  if (task.returns.empty()) add(ViolationKind::kNoReturns, "task has no return points");

  auto check_point = [&](const SpacetimePoint& p, const std::string& name) {
    if (p.dimension() != task.dimension) {
      add(ViolationKind::kDimensionMismatch, name + " has " + std::to_string(p.dimension()) +
                                                 " spatial coordinates, expected " +
                                                 std::to_string(task.dimension));
    }
    if (!p.is_finite()) add(ViolationKind::kNonFiniteCoordinate, name + " has a non-finite coordinate");
  };
  check_point(task.start, "start point");
  for (std::size_t k = 0; k < task.inputs.size(); ++k) {
    check_point(task.inputs[k].point, "input point " + std::to_string(k + 1));
    if (task.inputs[k].cardinality < 2) {
      add(ViolationKind::kCardinalityTooSmall, "input " + std::to_string(k + 1) + " has cardinality " +
                                                   std::to_string(task.inputs[k].cardinality) +
                                                   " (must be at least 2)");
    }
  }
  for (std::size_t j = 0; j < task.returns.size(); ++j) {
    check_point(task.returns[j], "return point " + std::to_string(j + 1));
  }
  for (const auto& problem : task.load_problems) add(ViolationKind::kLoadProblem, problem);

  AssignmentSpace space = task.space();
  if (space.size() == 0 || task.map.size() != space.size()) {
    add(ViolationKind::kMapShape, "return map does not match the input product space");
    return report;
  }
  if (!task.forbidden.empty() && task.forbidden.size() != space.size()) {
    add(ViolationKind::kMapShape, "forbidden table does not match the input product space");
    return report;
  }

  std::vector<bool> designated(task.returns.size(), false);
  bool any_allowed = false;
  for (std::size_t index = 0; index < space.size(); ++index) {
    if (!task.is_allowed(index)) continue;
    any_allowed = true;
    const auto& row = task.map.row(index);
    if (!row) {
      Assignment m = space.at(index);
      std::string text;
      for (std::size_t k = 0; k < m.size(); ++k) text += (k ? "," : "") + std::to_string(m[k]);
      add(ViolationKind::kMissingAssignment, "no return map row for assignment (" + text + ")");
      continue;
    }
    for (std::size_t r : *row) {
      if (r >= task.returns.size()) {
        add(ViolationKind::kReturnIndexOutOfRange,
            "return index " + std::to_string(r + 1) + " out of range in row " + std::to_string(index));
      } else {
        designated[r] = true;
      }
    }
  }
  if (!any_allowed) add(ViolationKind::kNothingAllowed, "every assignment is forbidden");
  for (std::size_t j = 0; j < designated.size(); ++j) {
    if (!designated[j]) {
      add(ViolationKind::kUndesignatedReturn,
          "return point " + std::to_string(j + 1) + " is not designated by any allowed assignment");
    }
  }
  return report;
}

void require_valid(const SummoningTask& task) {
  ValidationReport report = validate(task);
  if (!report.valid()) throw InvalidArgument("invalid task: " + report.violations.front().message);
}

std::vector<EnumeratedAssignment> enumerate_assignments(const SummoningTask& task, std::size_t cap) {
  AssignmentSpace space = task.space();
  if (space.size() > cap) {
    throw CapacityExceeded("input space has " + std::to_string(space.size()) +
                           " assignments, above the cap of " + std::to_string(cap) +
                           "; reduce input cardinalities or the number of input points");
  }
  std::vector<EnumeratedAssignment> out;
  out.reserve(space.size());
  for (std::size_t index = 0; index < space.size(); ++index) {
    out.push_back({space.at(index), !task.is_allowed(index)});
  }
  return out;
}

Variant classify_variant(const SummoningTask& task) {
  Variant variant;
  variant.inputs = task.is_constrained() ? InputConstraint::kConstrained : InputConstraint::kUnconstrained;
  bool any_empty = false;
  bool any_multiple = false;
  for (std::size_t index = 0; index < task.map.size(); ++index) {
    if (!task.is_allowed(index)) continue;
    std::size_t n = task.map.at(index).size();
    any_empty = any_empty || n == 0;
    any_multiple = any_multiple || n > 1;
  }
  if (any_multiple) {
    variant.returns = ReturnVariant::kMultiple;
  } else if (any_empty) {
    variant.returns = ReturnVariant::kAtMostOne;
  } else {
    variant.returns = ReturnVariant::kOneReturn;
  }
  return variant;
}

std::string to_string(ReturnVariant v) {
  switch (v) {
    case ReturnVariant::kOneReturn: return "one-return";
    case ReturnVariant::kAtMostOne: return "at-most-one";
    case ReturnVariant::kMultiple: return "multiple";
  }
  return "?";
}

std::string to_string(InputConstraint c) {
  return c == InputConstraint::kConstrained ? "constrained" : "unconstrained";
}

}  // namespace summon

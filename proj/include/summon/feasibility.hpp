#pragma once

#include "summon/spacetime.hpp"
#include "summon/task.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace summon {

enum class Decision { kSilent, kReturn };

/// What the agent at return point j does, as a function of the inputs in the
/// causal past of Q_j. Entries for restrictions never realized by an allowed
/// assignment are empty.
struct LocalDecisionRule {
  std::size_t return_index = 0;
  std::vector<std::size_t> members;  // S_j, ascending input indices
  AssignmentSpace domain;            // cardinalities of the members
  std::vector<std::optional<Decision>> table;

  /// Throws InvalidArgument when the restriction of `m` has no entry.
  Decision evaluate(const Assignment& m) const;
};

/// Outcome of one necessary-condition screen.
struct ScreenResult {
  std::string name;            // "reachable", "common_past", "pairwise_exclusion"
  bool passed = true;
  bool informational = false;  // constrained tasks: the screens are not necessary conditions there
  bool applicable = true;
  std::vector<std::size_t> failing_returns;                       // reachable
  std::vector<std::pair<std::size_t, std::size_t>> failing_pairs;  // common_past
  struct ExclusionWitness {
    std::size_t i = 0;
    std::size_t j = 0;
    std::vector<std::size_t> members;  // S_ij
    std::vector<int> restriction;      // values on S_ij
  };
  std::optional<ExclusionWitness> exclusion_witness;
  std::string detail;
};

ScreenResult check_reachability(const SummoningTask& task);
ScreenResult check_common_past(const SummoningTask& task);
/// Throws InvalidArgument for constrained or multiple-return tasks.
ScreenResult check_pairwise_exclusion(const SummoningTask& task);

/// Why a task is not classically possible.
struct ImpossibilityWitness {
  enum class Kind {
    kUnreachable,  // a designated return point is outside the future of P
    kDependence,   // two assignments agree on S_j but disagree on returning at Q_j
    kNoSelection,  // multiple-return: no causal selection exists
  };
  Kind kind = Kind::kDependence;
  std::size_t return_index = 0;
  Assignment first;   // kDependence: the pair of assignments; kNoSelection: the
  Assignment second;  // assignment at which the search was stuck deepest
  std::string detail;
};

struct FeasibilityVerdict {
  bool possible = false;
  Variant variant;
  std::vector<LocalDecisionRule> rules;             // one per return point, when possible
  std::vector<std::optional<std::size_t>> selection;  // f(m) per assignment index, when possible
  std::optional<ImpossibilityWitness> witness;
  std::vector<ScreenResult> screens;
};

/// Decides whether a copyable token can always be returned at precisely one
/// valid return point (none when the map is empty) using light-speed broadcast.
/// Every return indicator must factor through the inputs in the causal past of
/// its return point. Multiple-return tasks are decided by a backtracking
/// search for such a selection f(m) in Q(m).
/// Throws CapacityExceeded when the input space exceeds `cap`.
FeasibilityVerdict classically_possible(const SummoningTask& task,
                                        std::size_t cap = kDefaultEnumerationCap);

/// Replaces the return map by m -> {f(m)} (or the empty set), deletes return
/// points f never uses and compacts indices. At-most-one and one-return tasks
/// pass through unchanged. Throws InvalidArgument unless verdict.possible.
SummoningTask determinize(const SummoningTask& task, const FeasibilityVerdict& verdict);

/// Return indices of `task` kept by determinize, in their new order.
std::vector<std::size_t> determinized_return_origin(const SummoningTask& task,
                                                    const FeasibilityVerdict& verdict);

/// Re-checks a verdict's rules against every allowed assignment: exactly one
/// Return event, at a point of Q(m), when Q(m) is non-empty; none otherwise.
bool rules_are_sound(const SummoningTask& task, const std::vector<LocalDecisionRule>& rules);

std::string to_string(ImpossibilityWitness::Kind kind);

}  // namespace summon

#pragma once

#include "summon/spacetime.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace summon {

/// Return indices are 0-based in the API and 1-based in files and reports.
using ReturnSet = std::vector<std::size_t>;

/// One concrete choice m_1..m_M of every classical input.
using Assignment = std::vector<int>;

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 20;

/// Mixed-radix indexing of the input product space. Index 0 is the all-zero
/// assignment and the first input is the most significant digit, so index
/// order is lexicographic order.
class AssignmentSpace {
 public:
  AssignmentSpace() = default;
  explicit AssignmentSpace(std::vector<int> cardinalities);

  /// Product of cardinalities, saturated at SIZE_MAX on overflow.
  std::size_t size() const { return size_; }
  std::size_t input_count() const { return cardinalities_.size(); }
  const std::vector<int>& cardinalities() const { return cardinalities_; }

  bool in_range(std::span<const int> values) const;
  std::size_t index_of(std::span<const int> values) const;
  Assignment at(std::size_t index) const;

  /// Index of the restriction of `values` to `members`, within the subspace
  /// spanned by those inputs (members in the order given).
  std::size_t restriction_index(std::span<const int> values,
                                std::span<const std::size_t> members) const;
  AssignmentSpace subspace(std::span<const std::size_t> members) const;

 private:
  std::vector<int> cardinalities_;
  std::size_t size_ = 1;
};

/// Explicit table from every in-range assignment to a (possibly empty) set of
/// return indices.
class ReturnMap {
 public:
  ReturnMap() = default;
  explicit ReturnMap(const AssignmentSpace& space);

  std::size_t size() const { return rows_.size(); }

  /// Stores a row; the set is sorted and deduplicated.
  /// Throws InvalidArgument when `index` is outside the table.
  void set(std::size_t index, ReturnSet returns);
  bool has(std::size_t index) const { return rows_.at(index).has_value(); }

  /// Throws InvalidArgument for rows never set.
  const ReturnSet& at(std::size_t index) const;
  const std::optional<ReturnSet>& row(std::size_t index) const { return rows_.at(index); }

  friend bool operator==(const ReturnMap&, const ReturnMap&) = default;

 private:
  std::vector<std::optional<ReturnSet>> rows_;
};

struct InputPoint {
  SpacetimePoint point;
  int cardinality = 2;
};

/// Start point, input points with bounded integer inputs, return points and
/// the return map. `forbidden` is empty for unconstrained tasks; otherwise it
/// is indexed by assignment index and marks inputs that never arise.
struct SummoningTask {
  std::size_t dimension = 1;
  SpacetimePoint start;
  std::vector<InputPoint> inputs;
  std::vector<SpacetimePoint> returns;
  ReturnMap map;
  std::vector<bool> forbidden;
  double causal_tolerance = 0.0;

  /// Problems detected while building the task (out-of-range keys, duplicate
  /// rows) that cannot be represented in the dense table. Reported by validate.
  std::vector<std::string> load_problems;

  std::vector<int> cardinalities() const;
  AssignmentSpace space() const { return AssignmentSpace(cardinalities()); }
  std::size_t return_count() const { return returns.size(); }

  bool is_constrained() const;
  bool is_allowed(std::size_t index) const { return forbidden.empty() || !forbidden[index]; }
  const ReturnSet& returns_for(std::size_t index) const { return map.at(index); }

  /// Causal order with this task's tolerance.
  bool precedes(const SpacetimePoint& a, const SpacetimePoint& b) const {
    return causally_precedes(a, b, causal_tolerance);
  }
};

/// Allocates an empty table for the task's current inputs. Throws
/// CapacityExceeded when the product space exceeds `cap`.
void reset_map(SummoningTask& task, std::size_t cap = kDefaultEnumerationCap);

/// Convenience setters used by builders and generators.
void set_row(SummoningTask& task, std::span<const int> values, ReturnSet returns);
void forbid(SummoningTask& task, std::span<const int> values);

enum class ViolationKind {
  kNoReturns,
  kCardinalityTooSmall,
  kDimensionMismatch,
  kNonFiniteCoordinate,
  kLoadProblem,
  kMissingAssignment,
  kReturnIndexOutOfRange,
  kUndesignatedReturn,
  kNothingAllowed,
  kMapShape,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

ValidationReport validate(const SummoningTask& task);

/// Throws InvalidArgument with the first violation when the task is invalid.
void require_valid(const SummoningTask& task);

struct EnumeratedAssignment {
  Assignment values;
  bool forbidden = false;
};

/// All assignments in lexicographic order with their forbidden flag.
/// Throws CapacityExceeded when the product exceeds `cap`.
std::vector<EnumeratedAssignment> enumerate_assignments(const SummoningTask& task,
                                                        std::size_t cap = kDefaultEnumerationCap);

enum class ReturnVariant { kOneReturn, kAtMostOne, kMultiple };
enum class InputConstraint { kUnconstrained, kConstrained };

struct Variant {
  ReturnVariant returns = ReturnVariant::kOneReturn;
  InputConstraint inputs = InputConstraint::kUnconstrained;

  friend bool operator==(const Variant&, const Variant&) = default;
};

/// Classified over allowed assignments only.
Variant classify_variant(const SummoningTask& task);

std::string to_string(ReturnVariant v);
std::string to_string(InputConstraint c);

}  // namespace summon

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace summon {

using Rational = boost::multiprecision::cpp_rational;

/// One coordinate value. Coordinates read as integers or rational strings keep
/// an exact value so that lightlike relations are decided without rounding;
/// coordinates read as floating point numbers are inexact.
class Coordinate {
 public:
  Coordinate() : Coordinate(Rational(0)) {}
  Coordinate(int value) : Coordinate(Rational(value)) {}  // NOLINT: integers are exact
  Coordinate(double value);                                // NOLINT: inexact
  explicit Coordinate(Rational value);

  /// Accepts "p", "p/q", "-p/q" and plain decimals such as "1.25"; all exact.
  static Coordinate parse(std::string_view text);

  bool is_exact() const { return exact_.has_value(); }
  double value() const { return value_; }
  const Rational& rational() const;

  /// Integer or "p/q" for exact values, shortest round-trip decimal otherwise.
  std::string to_string() const;

  friend bool operator==(const Coordinate& a, const Coordinate& b);

 private:
  std::optional<Rational> exact_;
  double value_ = 0.0;
};

/// A point of Minkowski space with c = 1.
struct SpacetimePoint {
  Coordinate t;
  std::vector<Coordinate> x;

  std::size_t dimension() const { return x.size(); }
  bool is_exact() const;
  bool is_finite() const;

  friend bool operator==(const SpacetimePoint& a, const SpacetimePoint& b);
};

std::string to_string(const SpacetimePoint& p);

/// True iff b lies in the closed causal future of a: (b.t - a.t) >= |b.x - a.x|.
/// Exact arithmetic is used when both points are exact; otherwise the test is
/// (dt - |dx|) >= -tolerance in double precision.
/// Throws InvalidArgument on dimension mismatch.
bool causally_precedes(const SpacetimePoint& a, const SpacetimePoint& b, double tolerance = 0.0);

/// dt - |dx| in double precision (positive: timelike future, 0: lightlike).
double causal_margin(const SpacetimePoint& a, const SpacetimePoint& b);

/// Lorentz boost with velocity v (|v| < 1) along the first spatial axis.
/// The result is inexact.
SpacetimePoint boost(const SpacetimePoint& p, double velocity);

struct SummoningTask;

/// Input points in the causal past of one return point (S_j), or of two (S_ij).
struct PastInputSet {
  std::vector<std::size_t> return_indices;  // one entry for S_j, two for S_ij
  std::vector<std::size_t> members;         // sorted input indices

  bool empty() const { return members.empty(); }
  bool contains(std::size_t input) const;
};

PastInputSet past_input_set(const SummoningTask& task, std::size_t return_index);
PastInputSet common_past_input_set(const SummoningTask& task, std::size_t i, std::size_t j);

}  // namespace summon

#pragma once

#include "summon/rng.hpp"
#include "summon/task.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace summon {

/// Knobs shared by the built-in scenarios. Zero means "scenario default".
struct ScenarioParams {
  std::uint64_t seed = 0;
  std::size_t returns = 0;
};

/// g1, t3, no_summoning, hayden_may, multi_call, random_possible.
std::vector<std::string> scenario_names();

/// Throws InvalidArgument for an unknown name or unusable parameters.
SummoningTask make_scenario(const std::string& name, const ScenarioParams& params = {});

/// Shape of randomly generated tasks. Geometry is 1+1 dimensional with
/// coordinates on a half-integer grid, so every causal relation is exact.
struct RandomTaskOptions {
  std::size_t min_inputs = 1;
  std::size_t max_inputs = 4;
  int max_cardinality = 3;
  std::size_t max_space = 64;  // bound on the product of cardinalities
  std::size_t min_returns = 1;
  std::size_t max_returns = 3;
  /// kOneReturn and kAtMostOne both accept any single-valued map; kMultiple
  /// requires some assignment with two or more return points.
  ReturnVariant variant = ReturnVariant::kAtMostOne;
  double empty_row_probability = 0.2;
  double constrained_probability = 0.0;
  /// Chance that a return point is placed outside the future of P.
  double unreachable_probability = 0.0;
  /// Upper bound on the number of rows with more than one return point.
  std::size_t max_multi_rows = 64;
};

/// One random valid task, classically possible or not. Undesignated return
/// points are dropped, so the result always validates.
SummoningTask random_task(const RandomTaskOptions& options, Rng& rng);

/// Rejection-samples random_task until the result is classically possible
/// and matches the requested variant. Throws Error after `max_attempts`.
SummoningTask random_possible_task(const RandomTaskOptions& options, std::uint64_t seed,
                                   std::size_t max_attempts = 100000);

}  // namespace summon

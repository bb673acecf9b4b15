#pragma once

#include "summon/feasibility.hpp"
#include "summon/message_store.hpp"
#include "summon/qudit_sim.hpp"
#include "summon/task.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace summon {

/// Which member of a return pair (i, j), i < j, the inputs on S_ij rule out.
enum class Exclusion { kExcludesFirst, kExcludesSecond, kExcludesBoth };

enum class Delivery { kFirst, kSecond, kRetained };

/// Where the final hop takes its delivery decision from. Plans built here
/// always use the inputs; the other value exists to exercise the
/// determinism checks.
enum class DeliverySource { kInputs, kBellOutcome };

std::string to_string(Exclusion e);
std::string to_string(Delivery d);

/// Exclusion per restriction of an assignment to S_ij.
struct ExclusionRule {
  std::size_t first = 0;
  std::size_t second = 0;
  std::vector<std::size_t> members;  // S_ij, ascending
  AssignmentSpace domain;
  std::vector<std::optional<Exclusion>> table;

  /// Throws InvalidArgument when the restriction of `m` has no entry.
  Exclusion at(const Assignment& m) const;
};

/// For each restriction r on S_ij, Q_i counts as designated when some
/// allowed extension of r makes the rule at Q_i return, and likewise Q_j.
/// Throws InvalidArgument when a restriction designates both (the rules then
/// cannot come from a possible task), when S_ij is empty or i >= j.
ExclusionRule derive_exclusion_rule(const SummoningTask& task, const std::vector<LocalDecisionRule>& rules,
                                    std::size_t i, std::size_t j);

/// Teleportation chain for one share: P, then every input point of S_ij in
/// ascending order. Link 0 is a single pair from P to the first hop. Bank l
/// (l >= 1) runs from hop l to hop l + 1 and holds one pair per history of
/// the first l hop inputs. The last hop forwards each incoming half according
/// to `delivery`, indexed by the full history (= restriction to S_ij).
struct RoutingPlan {
  std::size_t first = 0;
  std::size_t second = 0;
  SpacetimePoint start;
  SpacetimePoint first_point;
  SpacetimePoint second_point;
  std::vector<std::size_t> hops;
  std::vector<SpacetimePoint> hop_points;
  std::vector<int> hop_cardinalities;
  std::vector<Delivery> delivery;
  DeliverySource source = DeliverySource::kInputs;
  double causal_tolerance = 0.0;

  /// Pairs in link/bank l (0 <= l < hops.size()).
  std::size_t bank_size(std::size_t l) const;
  /// Entangled pairs used per routed register.
  std::size_t pair_count() const;
  /// "i-j" with 1-based return indices.
  std::string name() const;

  Json to_json() const;
};

/// Throws InvalidArgument when S_ij is empty, a restriction lacks an
/// exclusion entry, or a hop or P fails to precede both return points.
RoutingPlan plan_pair_route(const SummoningTask& task, const ExclusionRule& rule);

struct DeliveryRecord {
  std::size_t first = 0;
  std::size_t second = 0;
  Delivery delivery = Delivery::kRetained;
  std::optional<std::size_t> return_index;
  SpacetimePoint site;                 // where the live share ends up
  std::vector<RegisterId> registers;   // corrected share registers (empty if retained)
  std::vector<BellOutcome> outcomes;   // live-chain outcomes, register-major

  Json to_json() const;
};

/// Broadcast key of the Bell outcome of register `reg` at hop `hop` for the
/// incoming half labelled `label`.
std::string outcome_key(const RoutingPlan& plan, std::size_t reg, std::size_t hop, std::size_t label);

/// Broadcasts every input value from its input point.
void broadcast_inputs(const SummoningTask& task, const Assignment& m, MessageStore& store);

/// Runs the chain for every register of `share`. Inputs must already be in
/// the store. The recipient reads inputs and Bell outcomes from the store at
/// the delivery point and applies the corrections in reverse hop order.
/// Throws CausalityViolation if any datum or system would leave a light cone.
DeliveryRecord execute_pair_route(const RoutingPlan& plan, const std::vector<RegisterId>& share, const Assignment& m,
                                  QuantumSystem& sys, MessageStore& store, Trace* trace = nullptr);

}  // namespace summon

#pragma once

#include "summon/feasibility.hpp"
#include "summon/message_store.hpp"
#include "summon/qss.hpp"
#include "summon/routing.hpp"
#include "summon/task.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace summon {

/// Return point k reconstructs from the shares of star k.
struct ReconstructionSite {
  std::size_t return_index = 0;
  std::vector<std::size_t> labels;  // share label indices, star order
};

/// Everything Alice needs to run the quantum protocol for one task.
struct ProtocolPlan {
  SummoningTask task;                     // at-most-one task actually routed
  std::vector<std::size_t> return_origin;  // plan return index -> original index
  bool determinized = false;
  std::vector<LocalDecisionRule> rules;    // one per plan return point
  SchemeDescriptor scheme;                 // construction "direct" when N = 1
  std::shared_ptr<const StarScheme> sharing;
  std::vector<RoutingPlan> routes;         // one per share label, label order
  std::vector<ReconstructionSite> sites;

  Json to_json() const;
};

struct SynthesisOptions {
  int secret_dim = 3;
  std::size_t cap = kDefaultEnumerationCap;
};

/// Validates, refuses constrained tasks and classically impossible ones
/// (SynthesisRefused with the reason), determinizes multiple-return tasks and
/// builds the star scheme and one route per pair of return points.
/// Throws InvalidArgument for invalid tasks and Unsupported when no star
/// scheme exists for the number of return points and secret dimension.
ProtocolPlan synthesize(const SummoningTask& task, const SynthesisOptions& options = {});

/// What Alice's agents did during one execution.
struct Execution {
  std::optional<std::size_t> returned_at;  // plan return index
  std::optional<RegisterId> output;
  std::vector<DeliveryRecord> deliveries;
  std::size_t reconstruct_events = 0;
};

/// Alice's side only: she receives `secret` at P and never sees its
/// description. Broadcasts the inputs, encodes, routes every share and lets
/// each return point decide from causally available data whether to
/// reconstruct. Throws ProtocolError when a return point decides to
/// reconstruct without holding its star.
Execution execute_protocol(const ProtocolPlan& plan, const Assignment& m, QuantumSystem& sys, RegisterId secret,
                           MessageStore& store, Trace* trace = nullptr);

struct RunOutcome {
  Assignment assignment;
  std::optional<std::size_t> expected;     // original return index
  std::optional<std::size_t> returned_at;  // original return index
  std::optional<double> fidelity;
  std::size_t reconstruct_events = 0;
  bool audit_passed = true;
  Trace trace;

  bool matches() const { return returned_at == expected && reconstruct_events <= 1; }
  Json to_json() const;
};

/// Harness run: draws Bob's random secret from `seed`, hands Alice only the
/// register, and compares what comes back with the reference copy.
RunOutcome run(const ProtocolPlan& plan, const Assignment& m, std::uint64_t seed);

struct ExhaustiveReport {
  std::vector<RunOutcome> rows;  // allowed assignments, lexicographic
  double min_fidelity = 1.0;
  std::size_t mismatches = 0;
  std::size_t returns = 0;
  bool audit_passed = true;

  Json to_json() const;
};

/// One run per allowed assignment with seed derive_seed(seed, index).
/// `jobs` = 0 uses the hardware concurrency; results do not depend on it.
ExhaustiveReport run_exhaustive(const ProtocolPlan& plan, std::uint64_t seed, unsigned jobs = 1);

/// Runs fn(index) for index in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace summon

#pragma once

#include "summon/feasibility.hpp"
#include "summon/message_store.hpp"
#include "summon/protocol.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace summon {

/// A classical state is fully described by bytes, so copying it is free.
struct ClassicalToken {
  std::string description;

  friend bool operator==(const ClassicalToken&, const ClassicalToken&) = default;
};

struct ClassicalOutcome {
  Assignment assignment;
  std::vector<std::size_t> deliveries;  // return indices, ascending
  std::vector<ClassicalToken> delivered;
  bool audit_passed = true;
  Trace trace;

  Json to_json() const;
};

/// The token's description is broadcast from P and every input from its
/// input point. The agent at Q_j reads the inputs of S_j there, evaluates its
/// rule and hands over a copy of the token when the rule says Return.
ClassicalOutcome run_classical_token(const SummoningTask& task, const std::vector<LocalDecisionRule>& rules,
                                     const Assignment& m, const ClassicalToken& token = {"token"});

enum class OperationKind { kApplyUnitary, kPrepareState, kMeasure, kBroadcast, kDeliver };

std::string to_string(OperationKind kind);

/// Classical description of one operation of the quantum protocol.
/// Measurement outcomes appear only as symbols such as "o[route/1-2/r0/hop0/h0]".
struct OperationDescriptor {
  SpacetimePoint site;
  OperationKind kind = OperationKind::kApplyUnitary;
  std::string label;
  Json params;
  std::vector<std::string> depends_on;  // broadcast keys read at `site`

  Json to_json() const;
};

/// Every operation the plan performs for assignment m, in execution order.
/// Throws NotDeterministic when a route takes its delivery decision from a
/// measurement outcome.
std::vector<OperationDescriptor> extract_deterministic_trace(const ProtocolPlan& plan, const Assignment& m);

/// Broadcasts the extracted descriptors from their sites. The agent at each
/// return point looks only at descriptors in its causal past and hands over
/// a token copy iff they show that the quantum protocol would reconstruct
/// the state there. Deliveries use the original task's return indices.
ClassicalOutcome simulate_classically(const ProtocolPlan& plan, const Assignment& m);

}  // namespace summon

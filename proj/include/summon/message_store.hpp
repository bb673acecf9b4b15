#pragma once

#include "summon/spacetime.hpp"
#include "summon/task_io.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace summon {

/// One ordered event of a protocol execution, serialized as a JSON line
/// {"seq", "point", "kind", "data"}.
struct TraceEvent {
  std::uint64_t seq = 0;
  SpacetimePoint point;
  std::string kind;  // prepare, teleport, broadcast, reconstruct, deliver
  Json data;
};

class Trace {
 public:
  void add(const SpacetimePoint& point, std::string kind, Json data);

  const std::vector<TraceEvent>& events() const { return events_; }
  std::size_t count(const std::string& kind) const;

  /// One compact JSON object per line.
  std::string to_jsonl() const;

 private:
  std::vector<TraceEvent> events_;
};

Json event_to_json(const TraceEvent& e);

/// A classical datum broadcast at light speed from `emitted`.
struct BroadcastMessage {
  std::uint64_t seq = 0;
  std::string key;
  SpacetimePoint emitted;
  Json payload;
};

/// Record of one consumption of a classical datum or one quantum transport.
struct AuditEntry {
  std::string key;
  SpacetimePoint emitted;
  SpacetimePoint consumed;
  bool causal = true;
};

/// Append-only broadcast log. A message emitted at X can be read at Y only
/// when X precedes Y; anything else raises CausalityViolation. Every read and
/// every checked transport is recorded for the audit.
class MessageStore {
 public:
  explicit MessageStore(double causal_tolerance = 0.0, Trace* trace = nullptr)
      : tolerance_(causal_tolerance), trace_(trace) {}

  /// Throws ProtocolError when the key was already broadcast.
  void broadcast(const std::string& key, const SpacetimePoint& at, Json payload);

  bool has(const std::string& key) const { return index_.count(key) != 0; }
  /// Readability without recording a read.
  bool available(const std::string& key, const SpacetimePoint& at) const;

  /// Throws ProtocolError for an unknown key and CausalityViolation when the
  /// emission point does not precede `at`.
  const Json& read(const std::string& key, const SpacetimePoint& at);

  /// Checks that a physical system may travel from `from` to `to`.
  void check_transport(const std::string& what, const SpacetimePoint& from, const SpacetimePoint& to);

  const std::vector<BroadcastMessage>& messages() const { return messages_; }
  const std::vector<AuditEntry>& audit() const { return audit_; }
  bool audit_passed() const;

 private:
  double tolerance_;
  Trace* trace_;
  std::vector<BroadcastMessage> messages_;
  std::map<std::string, std::size_t> index_;
  std::vector<AuditEntry> audit_;
};

/// Key under which the value of input k (0-based) is broadcast from P_k.
std::string input_key(std::size_t k);

}  // namespace summon

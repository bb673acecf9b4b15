#include "summon/message_store.hpp"

#include "summon/errors.hpp"

namespace summon {

void Trace::add(const SpacetimePoint& point, std::string kind, Json data) {
  events_.push_back({events_.size(), point, std::move(kind), std::move(data)});
}

std::size_t Trace::count(const std::string& kind) const {
  std::size_t n = 0;
  for (const auto& e : events_) n += e.kind == kind ? 1 : 0;
  return n;
}

Json event_to_json(const TraceEvent& e) {
  Json j;
  j["seq"] = e.seq;
  j["point"] = point_to_json(e.point);
  j["kind"] = e.kind;
  j["data"] = e.data;
  return j;
}

std::string Trace::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) {
    out += event_to_json(e).dump();
    out += '\n';
  }
  return out;
}

void MessageStore::broadcast(const std::string& key, const SpacetimePoint& at, Json payload) {
  if (has(key)) throw ProtocolError("message \"" + key + "\" broadcast twice");
  index_[key] = messages_.size();
  if (trace_ != nullptr) {
    Json data;
    data["key"] = key;
    data["payload"] = payload;
    trace_->add(at, "broadcast", std::move(data));
  }
  messages_.push_back({messages_.size(), key, at, std::move(payload)});
}

bool MessageStore::available(const std::string& key, const SpacetimePoint& at) const {
  auto it = index_.find(key);
  return it != index_.end() && causally_precedes(messages_[it->second].emitted, at, tolerance_);
}

const Json& MessageStore::read(const std::string& key, const SpacetimePoint& at) {
  auto it = index_.find(key);
  if (it == index_.end()) throw ProtocolError("message \"" + key + "\" was never broadcast");
  const BroadcastMessage& m = messages_[it->second];
  const bool ok = causally_precedes(m.emitted, at, tolerance_);
  audit_.push_back({key, m.emitted, at, ok});
  if (!ok) {
    throw CausalityViolation("message \"" + key + "\" emitted at " + to_string(m.emitted) + " read at " +
                             to_string(at) + " outside its future light cone");
  }
  return m.payload;
}

void MessageStore::check_transport(const std::string& what, const SpacetimePoint& from, const SpacetimePoint& to) {
  const bool ok = causally_precedes(from, to, tolerance_);
  audit_.push_back({what, from, to, ok});
  if (!ok) {
    throw CausalityViolation(what + " cannot travel from " + to_string(from) + " to " + to_string(to));
  }
}

bool MessageStore::audit_passed() const {
  for (const auto& e : audit_) {
    if (!e.causal) return false;
  }
  return true;
}

std::string input_key(std::size_t k) { return "input/" + std::to_string(k + 1); }

}  // namespace summon

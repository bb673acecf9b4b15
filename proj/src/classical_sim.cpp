#include "summon/classical_sim.hpp"

#include "summon/errors.hpp"

#include <algorithm>
#include <map>

namespace summon {

Json ClassicalOutcome::to_json() const {
  Json j;
  j["m"] = assignment_to_json(assignment);
  Json sites = Json::array();
  for (std::size_t k : deliveries) sites.push_back(k + 1);
  j["deliveries"] = std::move(sites);
  j["audit"] = audit_passed;
  return j;
}

ClassicalOutcome run_classical_token(const SummoningTask& task, const std::vector<LocalDecisionRule>& rules,
                                     const Assignment& m, const ClassicalToken& token) {
  if (rules.size() != task.return_count()) throw InvalidArgument("one decision rule per return point is required");
  ClassicalOutcome out;
  out.assignment = m;
  MessageStore store(task.causal_tolerance, &out.trace);
  Json description;
  description["description"] = token.description;
  store.broadcast("token", task.start, std::move(description));
  broadcast_inputs(task, m, store);

  for (std::size_t j = 0; j < task.return_count(); ++j) {
    const SpacetimePoint& here = task.returns[j];
    Assignment local(m.size(), 0);
    for (std::size_t k : rules[j].members) local[k] = store.read(input_key(k), here).at("m").get<int>();
    if (rules[j].evaluate(local) != Decision::kReturn) continue;
    ClassicalToken copy{store.read("token", here).at("description").get<std::string>()};
    Json data;
    data["return"] = j + 1;
    out.trace.add(here, "deliver", std::move(data));
    out.deliveries.push_back(j);
    out.delivered.push_back(std::move(copy));
  }
  out.audit_passed = store.audit_passed();
  return out;
}

std::string to_string(OperationKind kind) {
  switch (kind) {
    case OperationKind::kApplyUnitary: return "apply_unitary";
    case OperationKind::kPrepareState: return "prepare_state";
    case OperationKind::kMeasure: return "measure";
    case OperationKind::kBroadcast: return "broadcast";
    case OperationKind::kDeliver: return "deliver";
  }
  return "?";
}

Json OperationDescriptor::to_json() const {
  Json j;
  j["site"] = point_to_json(site);
  j["kind"] = to_string(kind);
  j["label"] = label;
  j["params"] = params;
  j["depends_on"] = depends_on;
  return j;
}

namespace {

std::string symbol(const std::string& key) { return "o[" + key + "]"; }

class Extractor {
 public:
  explicit Extractor(const ProtocolPlan& plan) : plan_(plan) {}

  std::vector<OperationDescriptor> run(const Assignment& m) {
    const SummoningTask& task = plan_.task;
    for (const auto& route : plan_.routes) {
      if (route.source != DeliverySource::kInputs) {
        throw NotDeterministic("route " + route.name() + " decides its delivery from a measurement outcome");
      }
    }
    if (!task.space().in_range(m)) throw InvalidArgument("assignment is outside the input ranges");

    for (std::size_t k = 0; k < m.size(); ++k) {
      Json p;
      p["input"] = k + 1;
      p["value"] = m[k];
      emit(task.inputs[k].point, OperationKind::kBroadcast, "input", std::move(p), {});
    }
    Json secret;
    secret["dim"] = plan_.scheme.secret_dim;
    emit(task.start, OperationKind::kPrepareState, "secret", std::move(secret), {});

    if (plan_.sharing) {
      Json enc;
      enc["construction"] = plan_.scheme.construction;
      emit(task.start, OperationKind::kApplyUnitary, "encode", std::move(enc), {});
      auto dims = plan_.sharing->share_dims();
      for (std::size_t l = 0; l < plan_.routes.size(); ++l) {
        for (std::size_t reg = 0; reg < dims[l].size(); ++reg) route(plan_.routes[l], reg, dims[l][reg], m);
      }
    }

    for (const auto& site : plan_.sites) {
      const std::size_t k = site.return_index;
      std::vector<std::string> deps;
      for (std::size_t i : plan_.rules[k].members) deps.push_back(input_key(i));
      if (plan_.rules[k].evaluate(m) != Decision::kReturn) continue;
      if (!plan_.sharing) {
        Json t;
        t["to"] = k;
        emit(task.start, OperationKind::kDeliver, "transport", std::move(t), {});
      }
      Json dec;
      dec["return"] = k;
      dec["star"] = site.labels;
      emit(task.returns[k], OperationKind::kApplyUnitary, "decode", std::move(dec), deps);
      Json ret;
      ret["return"] = k;
      emit(task.returns[k], OperationKind::kDeliver, "return", std::move(ret), deps);
    }
    return std::move(ops_);
  }

 private:
  void emit(const SpacetimePoint& site, OperationKind kind, std::string label, Json params,
            std::vector<std::string> deps) {
    ops_.push_back({site, kind, std::move(label), std::move(params), std::move(deps)});
  }

  void measure(const RoutingPlan& route, std::size_t reg, std::size_t hop, std::size_t label,
               const SpacetimePoint& at, std::vector<std::string> deps) {
    const std::string key = outcome_key(route, reg, hop, label);
    Json p;
    p["route"] = route.name();
    p["register"] = reg;
    p["hop"] = hop;
    p["label"] = label;
    p["outcome"] = symbol(key);
    emit(at, OperationKind::kMeasure, "bell", p, deps);
    Json b;
    b["key"] = key;
    b["payload"] = symbol(key);
    emit(at, OperationKind::kBroadcast, "outcome", std::move(b), {});
  }

  void route(const RoutingPlan& route, std::size_t reg, int d, const Assignment& m) {
    const std::size_t hops = route.hops.size();
    for (std::size_t l = 0; l < hops; ++l) {
      Json p;
      p["route"] = route.name();
      p["register"] = reg;
      p["bank"] = l;
      p["pairs"] = route.bank_size(l);
      p["dim"] = d;
      emit(l == 0 ? route.start : route.hop_points[l - 1], OperationKind::kPrepareState, "bell_pairs", std::move(p), {});
    }
    measure(route, reg, 0, 0, route.start, {});
    for (std::size_t l = 1; l < hops; ++l) {
      for (std::size_t h = 0; h < route.bank_size(l - 1); ++h) {
        measure(route, reg, l, h, route.hop_points[l - 1], {input_key(route.hops[l - 1])});
      }
    }

    // Forwarding at the last hop depends on the local input only.
    const std::size_t n = static_cast<std::size_t>(route.hop_cardinalities.back());
    const std::size_t local = static_cast<std::size_t>(m.at(route.hops.back()));
    Json halves = Json::array();
    std::vector<std::optional<std::size_t>> to(route.bank_size(hops - 1));
    for (std::size_t h = 0; h < to.size(); ++h) {
      switch (route.delivery[h * n + local]) {
        case Delivery::kFirst: to[h] = route.first; break;
        case Delivery::kSecond: to[h] = route.second; break;
        case Delivery::kRetained: break;
      }
      halves.push_back(to[h] ? Json(*to[h]) : Json(nullptr));
    }
    Json f;
    f["route"] = route.name();
    f["register"] = reg;
    f["halves"] = std::move(halves);
    emit(route.hop_points.back(), OperationKind::kDeliver, "forward", std::move(f), {input_key(route.hops.back())});

    // Correction at the receiving end of the live half.
    std::size_t live = 0;
    std::vector<std::string> deps;
    std::vector<std::string> outcomes{symbol(outcome_key(route, reg, 0, 0))};
    deps.push_back(outcome_key(route, reg, 0, 0));
    for (std::size_t l = 1; l < hops; ++l) {
      deps.push_back(outcome_key(route, reg, l, live));
      outcomes.push_back(symbol(outcome_key(route, reg, l, live)));
      live = live * static_cast<std::size_t>(route.hop_cardinalities[l - 1]) + static_cast<std::size_t>(m.at(route.hops[l - 1]));
    }
    for (std::size_t k : route.hops) deps.push_back(input_key(k));
    if (!to[live]) return;
    Json c;
    c["route"] = route.name();
    c["register"] = reg;
    std::reverse(outcomes.begin(), outcomes.end());
    c["corrections"] = outcomes;
    emit(plan_.task.returns[*to[live]], OperationKind::kApplyUnitary, "correct", std::move(c), std::move(deps));
  }

  const ProtocolPlan& plan_;
  std::vector<OperationDescriptor> ops_;
};

}  // namespace

std::vector<OperationDescriptor> extract_deterministic_trace(const ProtocolPlan& plan, const Assignment& m) {
  return Extractor(plan).run(m);
}

ClassicalOutcome simulate_classically(const ProtocolPlan& plan, const Assignment& m) {
  std::vector<OperationDescriptor> ops = extract_deterministic_trace(plan, m);
  ClassicalOutcome out;
  out.assignment = m;
  const SummoningTask& task = plan.task;
  MessageStore store(task.causal_tolerance);
  for (std::size_t i = 0; i < ops.size(); ++i) store.broadcast("op/" + std::to_string(i), ops[i].site, ops[i].to_json());

  for (std::size_t k = 0; k < task.return_count(); ++k) {
    const SpacetimePoint& here = task.returns[k];
    // Everything this agent can know: the descriptors in its causal past.
    std::map<std::size_t, int> inputs;
    std::map<std::pair<std::string, std::size_t>, Json> forwards;
    bool decode_here = false;
    bool transported_here = false;
    for (const auto& msg : store.messages()) {
      if (!store.available(msg.key, here)) continue;
      const Json& op = store.read(msg.key, here);
      const std::string label = op.at("label").get<std::string>();
      const Json& p = op.at("params");
      if (label == "input") {
        inputs[p.at("input").get<std::size_t>() - 1] = p.at("value").get<int>();
      } else if (label == "forward") {
        forwards[{p.at("route").get<std::string>(), p.at("register").get<std::size_t>()}] = p.at("halves");
      } else if (label == "decode" && p.at("return").get<std::size_t>() == k) {
        decode_here = true;
      } else if (label == "transport" && p.at("to").get<std::size_t>() == k) {
        transported_here = true;
      }
    }
    if (!decode_here) continue;

    bool holds_state = true;
    if (!plan.sharing) {
      holds_state = transported_here;
    } else {
      auto dims = plan.sharing->share_dims();
      for (std::size_t l : plan.sites[k].labels) {
        const RoutingPlan& route = plan.routes[l];
        for (std::size_t reg = 0; reg < dims[l].size() && holds_state; ++reg) {
          auto it = forwards.find({route.name(), reg});
          if (it == forwards.end()) {
            holds_state = false;
            break;
          }
          std::size_t live = 0;
          for (std::size_t h = 0; h + 1 < route.hops.size(); ++h) {
            auto in = inputs.find(route.hops[h]);
            if (in == inputs.end()) {
              holds_state = false;
              break;
            }
            live = live * static_cast<std::size_t>(route.hop_cardinalities[h]) + static_cast<std::size_t>(in->second);
          }
          if (!holds_state) break;
          const Json& to = it->second.at(live);
          holds_state = !to.is_null() && to.get<std::size_t>() == k;
        }
      }
    }
    if (!holds_state) continue;
    out.deliveries.push_back(plan.return_origin.at(k));
    out.delivered.push_back({"token"});
    Json data;
    data["return"] = plan.return_origin.at(k) + 1;
    out.trace.add(here, "deliver", std::move(data));
  }
  std::sort(out.deliveries.begin(), out.deliveries.end());
  out.audit_passed = store.audit_passed();
  return out;
}

}  // namespace summon

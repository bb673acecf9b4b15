#include "summon/routing.hpp"

#include "summon/errors.hpp"

namespace summon {

std::string to_string(Exclusion e) {
  switch (e) {
    case Exclusion::kExcludesFirst: return "excludes-first";
    case Exclusion::kExcludesSecond: return "excludes-second";
    case Exclusion::kExcludesBoth: return "excludes-both";
  }
  return "?";
}

std::string to_string(Delivery d) {
  switch (d) {
    case Delivery::kFirst: return "first";
    case Delivery::kSecond: return "second";
    case Delivery::kRetained: return "retained";
  }
  return "?";
}

Exclusion ExclusionRule::at(const Assignment& m) const {
  std::size_t index = 0;
  for (std::size_t p = 0; p < members.size(); ++p) {
    if (members[p] >= m.size()) throw InvalidArgument("assignment is shorter than the exclusion rule expects");
    index = index * static_cast<std::size_t>(domain.cardinalities()[p]) + static_cast<std::size_t>(m[members[p]]);
  }
  if (index >= table.size() || !table[index]) {
    throw InvalidArgument("exclusion rule has no entry for this restriction");
  }
  return *table[index];
}

ExclusionRule derive_exclusion_rule(const SummoningTask& task, const std::vector<LocalDecisionRule>& rules,
                                    std::size_t i, std::size_t j) {
  if (i >= j || j >= task.return_count()) throw InvalidArgument("exclusion rule needs return indices i < j");
  if (rules.size() != task.return_count()) throw InvalidArgument("one decision rule per return point is required");
  ExclusionRule rule;
  rule.first = i;
  rule.second = j;
  rule.members = common_past_input_set(task, i, j).members;
  if (rule.members.empty()) {
    throw InvalidArgument("Q_" + std::to_string(i + 1) + " and Q_" + std::to_string(j + 1) +
                          " have no common past input point");
  }
  const AssignmentSpace space = task.space();
  rule.domain = space.subspace(rule.members);
  std::vector<char> seen(rule.domain.size(), 0);
  std::vector<char> designates_first(rule.domain.size(), 0);
  std::vector<char> designates_second(rule.domain.size(), 0);
  for (const auto& a : enumerate_assignments(task)) {
    if (a.forbidden) continue;
    const std::size_t r = space.restriction_index(a.values, rule.members);
    seen[r] = 1;
    if (rules[i].evaluate(a.values) == Decision::kReturn) designates_first[r] = 1;
    if (rules[j].evaluate(a.values) == Decision::kReturn) designates_second[r] = 1;
  }
  rule.table.resize(rule.domain.size());
  for (std::size_t r = 0; r < rule.domain.size(); ++r) {
    if (!seen[r]) continue;
    if (designates_first[r] && designates_second[r]) {
      throw InvalidArgument("restriction on S_" + std::to_string(i + 1) + std::to_string(j + 1) +
                            " extends to assignments designating both return points");
    }
    if (designates_first[r]) {
      rule.table[r] = Exclusion::kExcludesSecond;
    } else if (designates_second[r]) {
      rule.table[r] = Exclusion::kExcludesFirst;
    } else {
      rule.table[r] = Exclusion::kExcludesBoth;
    }
  }
  return rule;
}

std::size_t RoutingPlan::bank_size(std::size_t l) const {
  std::size_t n = 1;
  for (std::size_t t = 0; t < l; ++t) n *= static_cast<std::size_t>(hop_cardinalities[t]);
  return n;
}

std::size_t RoutingPlan::pair_count() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l < hops.size(); ++l) total += bank_size(l);
  return total;
}

std::string RoutingPlan::name() const { return std::to_string(first + 1) + "-" + std::to_string(second + 1); }

Json RoutingPlan::to_json() const {
  Json j;
  j["pair"] = Json::array({first + 1, second + 1});
  Json hop_list = Json::array();
  for (std::size_t l = 0; l < hops.size(); ++l) {
    Json h;
    h["input"] = hops[l] + 1;
    h["point"] = point_to_json(hop_points[l]);
    h["cardinality"] = hop_cardinalities[l];
    h["incoming_pairs"] = bank_size(l);
    hop_list.push_back(std::move(h));
  }
  j["hops"] = std::move(hop_list);
  j["pairs_per_register"] = pair_count();
  AssignmentSpace domain(hop_cardinalities);
  Json table = Json::array();
  for (std::size_t r = 0; r < delivery.size(); ++r) {
    Json row;
    row["m"] = assignment_to_json(domain.at(r));
    switch (delivery[r]) {
      case Delivery::kFirst: row["to"] = "Q" + std::to_string(first + 1); break;
      case Delivery::kSecond: row["to"] = "Q" + std::to_string(second + 1); break;
      case Delivery::kRetained: row["to"] = "retained"; break;
    }
    table.push_back(std::move(row));
  }
  j["delivery"] = std::move(table);
  return j;
}

RoutingPlan plan_pair_route(const SummoningTask& task, const ExclusionRule& rule) {
  if (rule.members.empty()) throw InvalidArgument("cannot route a share without common past input points");
  RoutingPlan plan;
  plan.first = rule.first;
  plan.second = rule.second;
  plan.start = task.start;
  plan.first_point = task.returns.at(rule.first);
  plan.second_point = task.returns.at(rule.second);
  plan.causal_tolerance = task.causal_tolerance;
  plan.hops = rule.members;
  for (std::size_t k : plan.hops) {
    plan.hop_points.push_back(task.inputs.at(k).point);
    plan.hop_cardinalities.push_back(task.inputs.at(k).cardinality);
  }
  auto check = [&](const SpacetimePoint& p, const std::string& what) {
    if (!task.precedes(p, plan.first_point) || !task.precedes(p, plan.second_point)) {
      throw InvalidArgument(what + " does not precede both Q_" + std::to_string(plan.first + 1) + " and Q_" +
                            std::to_string(plan.second + 1));
    }
  };
  check(plan.start, "the start point");
  for (std::size_t l = 0; l < plan.hops.size(); ++l) check(plan.hop_points[l], "P_" + std::to_string(plan.hops[l] + 1));

  plan.delivery.resize(rule.domain.size());
  for (std::size_t r = 0; r < rule.domain.size(); ++r) {
    if (!rule.table[r]) {
      throw InvalidArgument("exclusion rule for pair " + plan.name() + " is missing a restriction class");
    }
    switch (*rule.table[r]) {
      case Exclusion::kExcludesFirst: plan.delivery[r] = Delivery::kSecond; break;
      case Exclusion::kExcludesSecond: plan.delivery[r] = Delivery::kFirst; break;
      case Exclusion::kExcludesBoth: plan.delivery[r] = Delivery::kRetained; break;
    }
  }
  return plan;
}

Json DeliveryRecord::to_json() const {
  Json j;
  j["pair"] = Json::array({first + 1, second + 1});
  j["delivery"] = to_string(delivery);
  j["site"] = point_to_json(site);
  if (return_index) {
    j["return"] = *return_index + 1;
  } else {
    j["return"] = nullptr;
  }
  return j;
}

std::string outcome_key(const RoutingPlan& plan, std::size_t reg, std::size_t hop, std::size_t label) {
  return "route/" + plan.name() + "/r" + std::to_string(reg) + "/hop" + std::to_string(hop) + "/h" +
         std::to_string(label);
}

void broadcast_inputs(const SummoningTask& task, const Assignment& m, MessageStore& store) {
  if (m.size() != task.inputs.size()) throw InvalidArgument("assignment length does not match the input count");
  for (std::size_t k = 0; k < m.size(); ++k) {
    Json payload;
    payload["m"] = m[k];
    store.broadcast(input_key(k), task.inputs[k].point, std::move(payload));
  }
}

namespace {

Json outcome_json(BellOutcome o) {
  Json j;
  j["a"] = o.a;
  j["b"] = o.b;
  return j;
}

BellOutcome outcome_from(const Json& j) { return {j.at("a").get<int>(), j.at("b").get<int>()}; }

int read_input(MessageStore& store, std::size_t k, const SpacetimePoint& at) {
  return store.read(input_key(k), at).at("m").get<int>();
}

struct Pair {
  RegisterId near;
  RegisterId far;
};

}  // namespace

DeliveryRecord execute_pair_route(const RoutingPlan& plan, const std::vector<RegisterId>& share, const Assignment& m,
                                  QuantumSystem& sys, MessageStore& store, Trace* trace) {
  if (plan.hops.empty()) throw InvalidArgument("routing plan has no hops");
  if (plan.delivery.size() != plan.bank_size(plan.hops.size())) throw InvalidArgument("delivery table has the wrong size");
  const std::size_t hop_count = plan.hops.size();
  const SpacetimePoint& last_hop = plan.hop_points.back();

  DeliveryRecord record;
  record.first = plan.first;
  record.second = plan.second;

  auto destination = [&](Delivery d) -> const SpacetimePoint& {
    return d == Delivery::kFirst ? plan.first_point : d == Delivery::kSecond ? plan.second_point : last_hop;
  };

  std::vector<RegisterId> live_final;
  std::optional<Delivery> live_delivery;
  for (std::size_t reg = 0; reg < share.size(); ++reg) {
    const int d = sys.dim(share[reg]);

    // Pre-shared entanglement: link 0 plus one bank per later hop.
    std::vector<std::vector<Pair>> banks(hop_count);
    for (std::size_t l = 0; l < hop_count; ++l) {
      for (std::size_t p = 0; p < plan.bank_size(l); ++p) {
        auto [near, far] = sys.add_bell_pair(d);
        banks[l].push_back({near, far});
      }
      if (trace != nullptr) {
        Json data;
        data["route"] = plan.name();
        data["register"] = reg;
        data["bank"] = l;
        data["pairs"] = banks[l].size();
        data["dim"] = d;
        trace->add(l == 0 ? plan.start : plan.hop_points[l - 1], "prepare", std::move(data));
      }
    }

    auto teleport = [&](RegisterId src, const Pair& pair, const SpacetimePoint& at, std::size_t hop,
                        std::size_t label) {
      BellOutcome o = sys.teleport(src, pair.near);
      if (trace != nullptr) {
        Json data;
        data["route"] = plan.name();
        data["register"] = reg;
        data["hop"] = hop;
        data["label"] = label;
        data["outcome"] = outcome_json(o);
        trace->add(at, "teleport", std::move(data));
      }
      store.broadcast(outcome_key(plan, reg, hop, label), at, outcome_json(o));
      return o;
    };

    // Hop 0: Alice at P sends the share into link 0.
    BellOutcome last_outcome = teleport(share[reg], banks[0][0], plan.start, 0, 0);
    std::vector<RegisterId> incoming{banks[0][0].far};
    std::vector<BellOutcome> incoming_outcomes{last_outcome};

    // Hops 1..L-1: every incoming half h goes onto pair (h, m_k) of the next bank.
    for (std::size_t l = 1; l < hop_count; ++l) {
      const SpacetimePoint& here = plan.hop_points[l - 1];
      const int local = read_input(store, plan.hops[l - 1], here);
      const std::size_t n = static_cast<std::size_t>(plan.hop_cardinalities[l - 1]);
      std::vector<RegisterId> next(banks[l].size());
      std::vector<BellOutcome> next_outcomes(banks[l].size());
      for (std::size_t h = 0; h < incoming.size(); ++h) {
        const std::size_t label = h * n + static_cast<std::size_t>(local);
        next_outcomes[label] = teleport(incoming[h], banks[l][label], here, l, h);
      }
      for (std::size_t p = 0; p < banks[l].size(); ++p) next[p] = banks[l][p].far;
      incoming = std::move(next);
      incoming_outcomes = std::move(next_outcomes);
    }

    // Last hop: forward each incoming half by (history, local input).
    const int local = read_input(store, plan.hops.back(), last_hop);
    const std::size_t n = static_cast<std::size_t>(plan.hop_cardinalities.back());
    std::vector<Delivery> sent(incoming.size());
    for (std::size_t h = 0; h < incoming.size(); ++h) {
      if (plan.source == DeliverySource::kInputs) {
        sent[h] = plan.delivery[h * n + static_cast<std::size_t>(local)];
      } else {
        const BellOutcome o = incoming_outcomes[h];
        sent[h] = (o.a + o.b) % 2 == 0 ? Delivery::kFirst : Delivery::kSecond;
      }
      if (sent[h] != Delivery::kRetained) {
        store.check_transport("share " + plan.name() + " register " + std::to_string(reg), last_hop,
                              destination(sent[h]));
      }
    }
    if (trace != nullptr) {
      Json data;
      data["route"] = plan.name();
      data["register"] = reg;
      Json to = Json::array();
      for (Delivery dl : sent) to.push_back(to_string(dl));
      data["halves"] = std::move(to);
      trace->add(last_hop, "deliver", std::move(data));
    }

    // Simulator bookkeeping: the half that physically carries the share is
    // the one labelled by the true history of the first L-1 hop inputs.
    std::size_t live = 0;
    for (std::size_t l = 0; l + 1 < hop_count; ++l) {
      live = live * static_cast<std::size_t>(plan.hop_cardinalities[l]) + static_cast<std::size_t>(m.at(plan.hops[l]));
    }
    const Delivery where = sent[live];
    const SpacetimePoint& site = destination(where);
    if (live_delivery && *live_delivery != where) throw ProtocolError("share registers of one pair took different paths");
    live_delivery = where;
    record.site = site;
    if (where == Delivery::kRetained) continue;

    // The recipient learns the history from the input broadcasts.
    std::vector<int> history(hop_count);
    for (std::size_t l = 0; l < hop_count; ++l) history[l] = read_input(store, plan.hops[l], site);
    std::vector<BellOutcome> chain;
    chain.push_back(outcome_from(store.read(outcome_key(plan, reg, 0, 0), site)));
    std::size_t prefix = 0;
    for (std::size_t l = 1; l < hop_count; ++l) {
      chain.push_back(outcome_from(store.read(outcome_key(plan, reg, l, prefix), site)));
      prefix = prefix * static_cast<std::size_t>(plan.hop_cardinalities[l - 1]) + static_cast<std::size_t>(history[l - 1]);
    }
    if (prefix != live) throw ProtocolError("recipient of share " + plan.name() + " selected the wrong half");
    const RegisterId held = incoming[prefix];
    for (std::size_t c = chain.size(); c-- > 0;) sys.apply_correction(held, chain[c]);
    live_final.push_back(held);
    record.outcomes.insert(record.outcomes.end(), chain.begin(), chain.end());
  }

  record.delivery = live_delivery.value_or(Delivery::kRetained);
  if (record.delivery == Delivery::kFirst) record.return_index = plan.first;
  if (record.delivery == Delivery::kSecond) record.return_index = plan.second;
  if (record.delivery != Delivery::kRetained) record.registers = std::move(live_final);
  return record;
}

}  // namespace summon

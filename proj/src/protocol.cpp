#include "summon/protocol.hpp"

#include "summon/errors.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace summon {

namespace {

std::string point_name(std::size_t j) { return "Q_" + std::to_string(j + 1); }

std::string refusal_for_constrained(const SummoningTask& task) {
  std::string reason = "constrained inputs: the pairwise exclusion guarantee needed for routing holds only when "
                       "every input combination can occur";
  ScreenResult screen = check_common_past(task);
  if (!screen.passed) {
    const auto& [i, j] = screen.failing_pairs.front();
    reason += "; S_" + std::to_string(i + 1) + std::to_string(j + 1) + " is empty (" + point_name(i) + " and " +
              point_name(j) + " share no past input point)";
  }
  return reason;
}

std::string describe_witness(const ImpossibilityWitness& w) {
  std::string s = "classically impossible (" + to_string(w.kind) + ")";
  if (!w.detail.empty()) s += ": " + w.detail;
  return s;
}

/// Values of the members of `members` read at `at`; other entries stay 0.
Assignment read_local_inputs(const std::vector<std::size_t>& members, std::size_t input_count, MessageStore& store,
                             const SpacetimePoint& at) {
  Assignment local(input_count, 0);
  for (std::size_t k : members) local[k] = store.read(input_key(k), at).at("m").get<int>();
  return local;
}

}  // namespace

ProtocolPlan synthesize(const SummoningTask& task, const SynthesisOptions& options) {
  require_valid(task);
  if (task.is_constrained()) throw SynthesisRefused(refusal_for_constrained(task));

  FeasibilityVerdict verdict = classically_possible(task, options.cap);
  if (!verdict.possible) {
    throw SynthesisRefused(verdict.witness ? describe_witness(*verdict.witness) : "classically impossible");
  }

  ProtocolPlan plan;
  plan.determinized = verdict.variant.returns == ReturnVariant::kMultiple;
  plan.return_origin = determinized_return_origin(task, verdict);
  plan.task = determinize(task, verdict);
  if (plan.determinized) {
    FeasibilityVerdict again = classically_possible(plan.task, options.cap);
    if (!again.possible) throw ProtocolError("determinized task lost classical possibility");
    plan.rules = std::move(again.rules);
  } else {
    plan.rules = std::move(verdict.rules);
  }

  const std::size_t n = plan.task.return_count();
  if (n == 1) {
    if (options.secret_dim < 2) throw InvalidArgument("secret dimension must be at least 2");
    plan.scheme = {1, options.secret_dim, "direct"};
    plan.sites.push_back({0, {}});
    return plan;
  }

  std::shared_ptr<const StarScheme> sharing = make_star_scheme(n, options.secret_dim);
  plan.scheme = sharing->descriptor();
  plan.sharing = sharing;
  const AccessStructure& access = sharing->access();
  for (const ShareLabel& label : access.labels) {
    ExclusionRule rule = derive_exclusion_rule(plan.task, plan.rules, label.i, label.j);
    plan.routes.push_back(plan_pair_route(plan.task, rule));
  }
  for (std::size_t k = 0; k < n; ++k) plan.sites.push_back({k, access.stars[k]});
  return plan;
}

Json ProtocolPlan::to_json() const {
  Json j;
  j["returns"] = task.return_count();
  j["determinized"] = determinized;
  Json origin = Json::array();
  for (std::size_t o : return_origin) origin.push_back(o + 1);
  j["return_origin"] = std::move(origin);
  Json s;
  s["parties"] = scheme.parties;
  s["secret_dim"] = scheme.secret_dim;
  s["construction"] = scheme.construction;
  j["scheme"] = std::move(s);
  Json routes_json = Json::array();
  for (const auto& r : routes) routes_json.push_back(r.to_json());
  j["routes"] = std::move(routes_json);
  Json sites_json = Json::array();
  for (const auto& site : sites) {
    Json e;
    e["return"] = return_origin[site.return_index] + 1;
    Json shares = Json::array();
    for (std::size_t l : site.labels) {
      const RoutingPlan& r = routes[l];
      shares.push_back(Json::array({return_origin[r.first] + 1, return_origin[r.second] + 1}));
    }
    e["star"] = std::move(shares);
    sites_json.push_back(std::move(e));
  }
  j["sites"] = std::move(sites_json);
  return j;
}

Execution execute_protocol(const ProtocolPlan& plan, const Assignment& m, QuantumSystem& sys, RegisterId secret,
                           MessageStore& store, Trace* trace) {
  const SummoningTask& task = plan.task;
  const AssignmentSpace space = task.space();
  if (!space.in_range(m)) throw InvalidArgument("assignment is outside the input ranges");
  if (!task.is_allowed(space.index_of(m))) throw InvalidArgument("assignment is forbidden");

  Execution ex;
  broadcast_inputs(task, m, store);

  if (trace != nullptr) {
    Json data;
    data["register"] = "secret";
    data["dim"] = sys.dim(secret);
    trace->add(task.start, "prepare", std::move(data));
  }

  auto decide = [&](std::size_t k) {
    const SpacetimePoint& here = task.returns[k];
    Assignment local = read_local_inputs(plan.rules[k].members, m.size(), store, here);
    return plan.rules[k].evaluate(local) == Decision::kReturn;
  };
  auto record_return = [&](std::size_t k, RegisterId out) {
    ++ex.reconstruct_events;
    if (ex.returned_at) throw ProtocolError("second reconstruction at " + point_name(k));
    ex.returned_at = k;
    ex.output = out;
    if (trace != nullptr) {
      Json data;
      data["return"] = plan.return_origin[k] + 1;
      data["construction"] = plan.scheme.construction;
      trace->add(task.returns[k], "reconstruct", std::move(data));
    }
  };

  if (!plan.sharing) {
    // A single return point: carry the state there directly when it is called.
    if (decide(0)) {
      store.check_transport("secret", task.start, task.returns[0]);
      record_return(0, secret);
    }
    return ex;
  }

  ShareRegisters shares = plan.sharing->encode(sys, secret);
  if (trace != nullptr) {
    Json data;
    data["construction"] = plan.scheme.construction;
    data["shares"] = shares.size();
    trace->add(task.start, "prepare", std::move(data));
  }
  for (std::size_t l = 0; l < plan.routes.size(); ++l) {
    ex.deliveries.push_back(execute_pair_route(plan.routes[l], shares[l], m, sys, store, trace));
  }

  for (const ReconstructionSite& site : plan.sites) {
    const std::size_t k = site.return_index;
    if (!decide(k)) continue;
    ShareRegisters star;
    for (std::size_t l : site.labels) {
      const DeliveryRecord& rec = ex.deliveries[l];
      if (rec.return_index != k) {
        throw ProtocolError("reconstruction attempted at " + point_name(k) + " but share " + plan.routes[l].name() +
                            " was not delivered there");
      }
      star.push_back(rec.registers);
    }
    record_return(k, plan.sharing->reconstruct(sys, k, star));
  }
  return ex;
}

Json RunOutcome::to_json() const {
  Json j;
  j["m"] = assignment_to_json(assignment);
  j["expected"] = expected ? Json(*expected + 1) : Json(nullptr);
  j["returned"] = returned_at ? Json(*returned_at + 1) : Json(nullptr);
  j["fidelity"] = fidelity ? Json(*fidelity) : Json(nullptr);
  j["reconstructions"] = reconstruct_events;
  j["audit"] = audit_passed;
  return j;
}

RunOutcome run(const ProtocolPlan& plan, const Assignment& m, std::uint64_t seed) {
  RunOutcome out;
  out.assignment = m;
  const AssignmentSpace space = plan.task.space();
  if (!space.in_range(m)) throw InvalidArgument("assignment is outside the input ranges");
  const ReturnSet& designated = plan.task.map.at(space.index_of(m));
  if (!designated.empty()) out.expected = plan.return_origin.at(designated.front());

  // Bob's reference copy lives only here.
  Rng bob(derive_seed(seed, 1));
  const int d = plan.scheme.secret_dim;
  const std::vector<Amplitude> reference = random_amplitudes(d, bob);

  QuantumSystem sys(derive_seed(seed, 2));
  RegisterId secret = sys.add(StateVector::prepare({d}, reference))[0];
  MessageStore store(plan.task.causal_tolerance, &out.trace);
  Execution ex = execute_protocol(plan, m, sys, secret, store, &out.trace);

  out.reconstruct_events = ex.reconstruct_events;
  out.audit_passed = store.audit_passed();
  if (ex.returned_at) {
    out.returned_at = plan.return_origin.at(*ex.returned_at);
    out.fidelity = sys.fidelity(*ex.output, reference);
  }
  return out;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1U, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

Json ExhaustiveReport::to_json() const {
  Json j;
  j["rows"] = rows.size();
  j["returns"] = returns;
  j["mismatches"] = mismatches;
  j["min_fidelity"] = min_fidelity;
  j["audit"] = audit_passed;
  Json table = Json::array();
  for (const auto& r : rows) table.push_back(r.to_json());
  j["table"] = std::move(table);
  return j;
}

ExhaustiveReport run_exhaustive(const ProtocolPlan& plan, std::uint64_t seed, unsigned jobs) {
  const auto assignments = enumerate_assignments(plan.task);
  std::vector<std::size_t> allowed;
  for (std::size_t index = 0; index < assignments.size(); ++index) {
    if (!assignments[index].forbidden) allowed.push_back(index);
  }
  ExhaustiveReport report;
  report.rows.resize(allowed.size());
  parallel_for(allowed.size(), jobs, [&](std::size_t k) {
    const std::size_t index = allowed[k];
    report.rows[k] = run(plan, assignments[index].values, derive_seed(seed, index));
  });
  for (const auto& row : report.rows) {
    if (!row.matches()) ++report.mismatches;
    if (row.fidelity) {
      ++report.returns;
      report.min_fidelity = std::min(report.min_fidelity, *row.fidelity);
    }
    report.audit_passed = report.audit_passed && row.audit_passed;
  }
  return report;
}

}  // namespace summon

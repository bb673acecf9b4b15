#include "summon/qudit_sim.hpp"

#include "summon/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace summon {

class StateVectorAccess {
 public:
  static StateVector make(std::vector<int> dims, std::vector<Amplitude> amplitudes) {
    StateVector s;
    s.dims_ = std::move(dims);
    s.amplitudes_ = std::move(amplitudes);
    return s;
  }
  static std::vector<Amplitude>& amplitudes(StateVector& s) { return s.amplitudes_; }
};

namespace {

std::size_t product(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

Amplitude root_of_unity(int d, long long k) {
  long long r = ((k % d) + d) % d;
  double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(d);
  return {std::cos(angle), std::sin(angle)};
}

void check_reg(const StateVector& s, std::size_t reg) {
  if (reg >= s.register_count()) throw InvalidArgument("register index out of range");
}

void check_pair(const StateVector& s, std::size_t a, std::size_t b) {
  check_reg(s, a);
  check_reg(s, b);
  if (a == b) throw InvalidArgument("Bell measurement needs two distinct registers");
  if (s.dim(a) != s.dim(b)) throw InvalidArgument("Bell measurement needs registers of equal dimension");
}

// Calls fn(rest_index, base_offset) for every basis state of the registers
// other than `excluded`, in row-major order of the remaining registers.
template <typename Fn>
void for_each_rest(const StateVector& s, std::span<const std::size_t> excluded, Fn&& fn) {
  std::vector<std::size_t> rest;
  for (std::size_t r = 0; r < s.register_count(); ++r) {
    if (std::find(excluded.begin(), excluded.end(), r) == excluded.end()) rest.push_back(r);
  }
  std::vector<int> counter(rest.size(), 0);
  std::size_t total = 1;
  for (std::size_t r : rest) total *= static_cast<std::size_t>(s.dim(r));
  std::vector<std::size_t> strides;
  for (std::size_t r : rest) strides.push_back(s.stride(r));
  std::size_t base = 0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    fn(idx, base);
    for (std::size_t p = rest.size(); p-- > 0;) {
      ++counter[p];
      base += strides[p];
      if (counter[p] < s.dim(rest[p])) break;
      base -= strides[p] * static_cast<std::size_t>(counter[p]);
      counter[p] = 0;
    }
  }
}

std::vector<int> dims_without(const std::vector<int>& dims, std::size_t a, std::size_t b) {
  std::vector<int> out;
  for (std::size_t r = 0; r < dims.size(); ++r) {
    if (r != a && r != b) out.push_back(dims[r]);
  }
  return out;
}

std::vector<Amplitude> bell_projection(const StateVector& s, std::size_t a, std::size_t b, BellOutcome o) {
  const int d = s.dim(a);
  const std::size_t sa = s.stride(a);
  const std::size_t sb = s.stride(b);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Amplitude> phase(d);
  for (int q = 0; q < d; ++q) phase[q] = std::conj(root_of_unity(d, static_cast<long long>(o.a) * q)) * scale;
  std::vector<Amplitude> out(s.size() / (static_cast<std::size_t>(d) * d));
  const std::size_t excluded[] = {a, b};
  auto amps = s.amplitudes();
  for_each_rest(s, excluded, [&](std::size_t rest, std::size_t base) {
    Amplitude acc = 0.0;
    for (int q = 0; q < d; ++q) {
      acc += phase[q] * amps[base + q * sa + ((q + o.b) % d) * sb];
    }
    out[rest] = acc;
  });
  return out;
}

double squared_norm(std::span<const Amplitude> v) {
  double n = 0.0;
  for (const auto& x : v) n += std::norm(x);
  return n;
}

}  // namespace

std::size_t StateVector::stride(std::size_t reg) const {
  std::size_t s = 1;
  for (std::size_t r = dims_.size(); r-- > reg + 1;) s *= static_cast<std::size_t>(dims_[r]);
  return s;
}

double StateVector::norm() const { return std::sqrt(squared_norm(amplitudes_)); }

StateVector StateVector::prepare(std::vector<int> dims, std::vector<Amplitude> amplitudes) {
  for (int d : dims) {
    if (d < 2) throw InvalidArgument("register dimension must be at least 2");
  }
  if (amplitudes.size() != product(dims)) {
    throw InvalidArgument("amplitude count " + std::to_string(amplitudes.size()) +
                          " does not match the product of dimensions " + std::to_string(product(dims)));
  }
  double n = std::sqrt(squared_norm(amplitudes));
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("cannot normalize a zero or non-finite vector");
  for (auto& x : amplitudes) x /= n;
  return StateVectorAccess::make(std::move(dims), std::move(amplitudes));
}

StateVector StateVector::basis(std::vector<int> dims, std::span<const int> values) {
  if (values.size() != dims.size()) throw InvalidArgument("basis label length mismatch");
  std::vector<Amplitude> amps(product(dims), 0.0);
  std::size_t index = 0;
  for (std::size_t r = 0; r < dims.size(); ++r) {
    if (values[r] < 0 || values[r] >= dims[r]) throw InvalidArgument("basis label out of range");
    index = index * static_cast<std::size_t>(dims[r]) + static_cast<std::size_t>(values[r]);
  }
  amps[index] = 1.0;
  return prepare(std::move(dims), std::move(amps));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  std::vector<Amplitude> amps(a.size() * b.size());
  auto aa = a.amplitudes();
  auto bb = b.amplitudes();
  for (std::size_t i = 0; i < aa.size(); ++i) {
    for (std::size_t j = 0; j < bb.size(); ++j) amps[i * bb.size() + j] = aa[i] * bb[j];
  }
  return StateVectorAccess::make(std::move(dims), std::move(amps));
}

StateVector bell_pair(int d) {
  if (d < 2) throw InvalidArgument("Bell pair dimension must be at least 2");
  std::vector<Amplitude> amps(static_cast<std::size_t>(d) * d, 0.0);
  for (int q = 0; q < d; ++q) amps[static_cast<std::size_t>(q) * d + q] = 1.0;
  return StateVector::prepare({d, d}, std::move(amps));
}

std::vector<double> bell_distribution(const StateVector& state, std::size_t reg_a, std::size_t reg_b) {
  check_pair(state, reg_a, reg_b);
  const int d = state.dim(reg_a);
  std::vector<double> probs(static_cast<std::size_t>(d) * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      probs[static_cast<std::size_t>(a) * d + b] = squared_norm(bell_projection(state, reg_a, reg_b, {a, b}));
    }
  }
  return probs;
}

StateVector project_bell(const StateVector& state, std::size_t reg_a, std::size_t reg_b, BellOutcome outcome) {
  check_pair(state, reg_a, reg_b);
  const int d = state.dim(reg_a);
  if (outcome.a < 0 || outcome.a >= d || outcome.b < 0 || outcome.b >= d) {
    throw InvalidArgument("Bell outcome out of range");
  }
  std::vector<Amplitude> amps = bell_projection(state, reg_a, reg_b, outcome);
  double n = std::sqrt(squared_norm(amps));
  if (n < 1e-15) throw InvalidArgument("Bell outcome has zero probability");
  for (auto& x : amps) x /= n;
  return StateVectorAccess::make(dims_without(state.dims(), reg_a, reg_b), std::move(amps));
}

BellMeasurement bell_measure(const StateVector& state, std::size_t reg_a, std::size_t reg_b, Rng& rng) {
  std::vector<double> probs = bell_distribution(state, reg_a, reg_b);
  const int d = state.dim(reg_a);
  double total = 0.0;
  for (double p : probs) total += p;
  const double u = rng.uniform() * total;
  std::size_t pick = probs.size();
  double cumulative = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    cumulative += probs[k];
    pick = k;
    if (u < cumulative) break;
  }
  if (pick == probs.size()) throw InvalidArgument("state has zero norm");
  BellOutcome outcome{static_cast<int>(pick / d), static_cast<int>(pick % d)};
  return {outcome, probs[pick] / total, project_bell(state, reg_a, reg_b, outcome)};
}

StateVector apply_shift(StateVector state, std::size_t reg, int k) {
  check_reg(state, reg);
  const int d = state.dim(reg);
  const std::size_t s = state.stride(reg);
  const int shift = ((k % d) + d) % d;
  if (shift == 0) return state;
  auto& amps = StateVectorAccess::amplitudes(state);
  std::vector<Amplitude> out(amps.size());
  const std::size_t block = s * static_cast<std::size_t>(d);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    std::size_t q = (i / s) % static_cast<std::size_t>(d);
    std::size_t target = i - q * s + ((q + static_cast<std::size_t>(shift)) % d) * s;
    (void)block;
    out[target] = amps[i];
  }
  amps = std::move(out);
  return state;
}

StateVector apply_phase(StateVector state, std::size_t reg, int k) {
  check_reg(state, reg);
  const int d = state.dim(reg);
  const std::size_t s = state.stride(reg);
  std::vector<Amplitude> phase(d);
  for (int q = 0; q < d; ++q) phase[q] = root_of_unity(d, static_cast<long long>(k) * q);
  auto& amps = StateVectorAccess::amplitudes(state);
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= phase[(i / s) % static_cast<std::size_t>(d)];
  return state;
}

StateVector apply_correction(StateVector state, std::size_t reg, BellOutcome outcome) {
  state = apply_shift(std::move(state), reg, -outcome.b);
  return apply_phase(std::move(state), reg, outcome.a);
}

Teleported teleport(const StateVector& state, std::size_t src, std::size_t pair_near, std::size_t pair_far,
                    Rng& rng) {
  check_pair(state, src, pair_near);
  check_reg(state, pair_far);
  if (pair_far == src || pair_far == pair_near) throw InvalidArgument("teleport registers must be distinct");
  if (state.dim(pair_far) != state.dim(src)) throw InvalidArgument("teleport pair dimension mismatch");
  BellMeasurement m = bell_measure(state, src, pair_near, rng);
  std::size_t dest = pair_far;
  if (src < pair_far) --dest;
  if (pair_near < pair_far) --dest;
  return {m.outcome, std::move(m.post), dest};
}

StateVector apply_basis_map(const StateVector& state, std::span<const std::size_t> regs,
                            const std::function<void(std::span<int>)>& map) {
  for (std::size_t r : regs) check_reg(state, r);
  const std::size_t n = state.size();
  std::vector<Amplitude> out(n, 0.0);
  std::vector<bool> hit(n, false);
  std::vector<int> values(regs.size());
  auto amps = state.amplitudes();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t base = i;
    for (std::size_t p = 0; p < regs.size(); ++p) {
      const std::size_t s = state.stride(regs[p]);
      values[p] = static_cast<int>((i / s) % static_cast<std::size_t>(state.dim(regs[p])));
      base -= static_cast<std::size_t>(values[p]) * s;
    }
    map(values);
    std::size_t target = base;
    for (std::size_t p = 0; p < regs.size(); ++p) {
      if (values[p] < 0 || values[p] >= state.dim(regs[p])) throw InvalidArgument("basis map leaves the register range");
      target += static_cast<std::size_t>(values[p]) * state.stride(regs[p]);
    }
    if (hit[target]) throw InvalidArgument("basis map is not a bijection");
    hit[target] = true;
    out[target] = amps[i];
  }
  return StateVectorAccess::make(state.dims(), std::move(out));
}

StateVector apply_isometry(const StateVector& state, std::size_t reg, const std::vector<int>& out_dims,
                           const std::vector<IsometryColumn>& columns) {
  check_reg(state, reg);
  const int d = state.dim(reg);
  if (static_cast<int>(columns.size()) != d) throw InvalidArgument("isometry column count must equal the register dimension");
  for (int od : out_dims) {
    if (od < 2) throw InvalidArgument("register dimension must be at least 2");
  }
  const std::size_t out_size = product(out_dims);
  const std::size_t s = state.stride(reg);
  const std::size_t prefix_count = state.size() / (s * static_cast<std::size_t>(d));
  std::vector<int> dims;
  dims.insert(dims.end(), state.dims().begin(), state.dims().begin() + static_cast<long>(reg));
  dims.insert(dims.end(), out_dims.begin(), out_dims.end());
  dims.insert(dims.end(), state.dims().begin() + static_cast<long>(reg) + 1, state.dims().end());
  std::vector<Amplitude> out(prefix_count * out_size * s, 0.0);
  auto amps = state.amplitudes();
  for (std::size_t prefix = 0; prefix < prefix_count; ++prefix) {
    for (int q = 0; q < d; ++q) {
      for (std::size_t suffix = 0; suffix < s; ++suffix) {
        const Amplitude a = amps[(prefix * d + q) * s + suffix];
        if (a == Amplitude(0.0)) continue;
        for (const auto& [k, w] : columns[q]) {
          if (k >= out_size) throw InvalidArgument("isometry output index out of range");
          out[(prefix * out_size + k) * s + suffix] += w * a;
        }
      }
    }
  }
  return StateVectorAccess::make(std::move(dims), std::move(out));
}

StateVector restrict_register(const StateVector& state, std::size_t reg, int new_dim, double leak_tolerance) {
  check_reg(state, reg);
  const int d = state.dim(reg);
  if (new_dim < 2 || new_dim > d) throw InvalidArgument("restricted dimension out of range");
  const std::size_t s = state.stride(reg);
  const std::size_t prefix_count = state.size() / (s * static_cast<std::size_t>(d));
  std::vector<int> dims = state.dims();
  dims[reg] = new_dim;
  std::vector<Amplitude> out(prefix_count * static_cast<std::size_t>(new_dim) * s);
  double leaked = 0.0;
  auto amps = state.amplitudes();
  for (std::size_t prefix = 0; prefix < prefix_count; ++prefix) {
    for (int q = 0; q < d; ++q) {
      for (std::size_t suffix = 0; suffix < s; ++suffix) {
        const Amplitude a = amps[(prefix * d + q) * s + suffix];
        if (q < new_dim) {
          out[(prefix * new_dim + q) * s + suffix] = a;
        } else {
          leaked += std::norm(a);
        }
      }
    }
  }
  if (leaked > leak_tolerance) {
    throw InvalidArgument("register has weight " + std::to_string(leaked) + " outside the restricted subspace");
  }
  double n = std::sqrt(squared_norm(out));
  for (auto& x : out) x /= n;
  return StateVectorAccess::make(std::move(dims), std::move(out));
}

Eigen::MatrixXcd reduced_density(const StateVector& state, std::span<const std::size_t> regs) {
  for (std::size_t r : regs) check_reg(state, r);
  std::size_t kept = 1;
  for (std::size_t r : regs) kept *= static_cast<std::size_t>(state.dim(r));
  const std::size_t rest = state.size() / kept;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(rest));
  auto amps = state.amplitudes();
  // Enumerate kept multi-indices in the order given by `regs`.
  std::vector<int> counter(regs.size(), 0);
  for (std::size_t k = 0; k < kept; ++k) {
    std::size_t offset = 0;
    for (std::size_t p = 0; p < regs.size(); ++p) offset += static_cast<std::size_t>(counter[p]) * state.stride(regs[p]);
    for_each_rest(state, regs, [&](std::size_t r, std::size_t base) {
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) = amps[base + offset];
    });
    for (std::size_t p = regs.size(); p-- > 0;) {
      if (++counter[p] < state.dim(regs[p])) break;
      counter[p] = 0;
    }
  }
  return m * m.adjoint();
}

double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) throw InvalidArgument("density matrix size mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho - sigma, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double fidelity(const StateVector& state, std::size_t reg, std::span<const Amplitude> target) {
  check_reg(state, reg);
  if (static_cast<int>(target.size()) != state.dim(reg)) throw InvalidArgument("target dimension mismatch");
  const std::size_t regs[] = {reg};
  Eigen::MatrixXcd rho = reduced_density(state, regs);
  Eigen::VectorXcd t(static_cast<Eigen::Index>(target.size()));
  double n = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    t(static_cast<Eigen::Index>(k)) = target[k];
    n += std::norm(target[k]);
  }
  return std::real((t.adjoint() * rho * t)(0, 0)) / n;
}

double overlap_fidelity(const StateVector& a, const StateVector& b) {
  if (a.dims() != b.dims()) throw InvalidArgument("overlap of states with different dimensions");
  Amplitude acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a.amplitude(i)) * b.amplitude(i);
  return std::norm(acc);
}

std::vector<Amplitude> random_amplitudes(int d, Rng& rng) {
  std::vector<Amplitude> v(static_cast<std::size_t>(d));
  double n = 0.0;
  do {
    n = 0.0;
    for (auto& x : v) {
      double re = rng.normal();
      double im = rng.normal();
      x = {re, im};
      n += std::norm(x);
    }
  } while (n < 1e-12);
  for (auto& x : v) x /= std::sqrt(n);
  return v;
}

QuantumSystem::QuantumSystem(std::uint64_t seed, std::size_t max_dimension)
    : rng_(seed), max_dimension_(max_dimension) {}

std::vector<RegisterId> QuantumSystem::add(StateVector state) {
  if (state.size() > max_dimension_) throw CapacityExceeded("state exceeds the Hilbert dimension cap");
  Component c;
  c.state = std::move(state);
  for (std::size_t r = 0; r < c.state.register_count(); ++r) c.ids.push_back(fresh_id());
  std::vector<RegisterId> ids = c.ids;
  std::uint64_t key = next_component_++;
  for (RegisterId id : ids) location_[id] = key;
  components_.emplace(key, std::move(c));
  return ids;
}

std::pair<RegisterId, RegisterId> QuantumSystem::add_bell_pair(int d) {
  auto ids = add(bell_pair(d));
  return {ids[0], ids[1]};
}

int QuantumSystem::dim(RegisterId id) const {
  const Component& c = components_.at(location_.at(id));
  return c.state.dim(position(c, id));
}

std::size_t QuantumSystem::component_dimension(RegisterId id) const {
  auto it = location_.find(id);
  if (it == location_.end()) throw InvalidArgument("unknown register");
  return components_.at(it->second).state.size();
}

std::size_t QuantumSystem::position(const Component& c, RegisterId id) const {
  auto it = std::find(c.ids.begin(), c.ids.end(), id);
  if (it == c.ids.end()) throw InvalidArgument("register not in component");
  return static_cast<std::size_t>(it - c.ids.begin());
}

std::uint64_t QuantumSystem::merge(std::span<const RegisterId> ids) {
  std::vector<std::uint64_t> keys;
  for (RegisterId id : ids) {
    auto it = location_.find(id);
    if (it == location_.end()) throw InvalidArgument("unknown register " + std::to_string(id.value));
    if (std::find(keys.begin(), keys.end(), it->second) == keys.end()) keys.push_back(it->second);
  }
  std::uint64_t target = keys.front();
  std::size_t total = 1;
  for (std::uint64_t k : keys) total *= components_.at(k).state.size();
  if (total > max_dimension_) {
    throw CapacityExceeded("merged state of dimension " + std::to_string(total) + " exceeds the cap of " +
                           std::to_string(max_dimension_));
  }
  for (std::size_t n = 1; n < keys.size(); ++n) {
    Component other = std::move(components_.at(keys[n]));
    components_.erase(keys[n]);
    Component& base = components_.at(target);
    base.state = tensor(base.state, other.state);
    for (RegisterId id : other.ids) {
      base.ids.push_back(id);
      location_[id] = target;
    }
  }
  return target;
}

void QuantumSystem::reindex(std::uint64_t component) {
  Component& c = components_.at(component);
  if (c.ids.empty()) components_.erase(component);
}

BellOutcome QuantumSystem::bell_measure(RegisterId a, RegisterId b) {
  const RegisterId ids[] = {a, b};
  std::uint64_t key = merge(ids);
  Component& c = components_.at(key);
  std::size_t pa = position(c, a);
  std::size_t pb = position(c, b);
  BellMeasurement m = summon::bell_measure(c.state, pa, pb, rng_);
  c.state = std::move(m.post);
  std::erase(c.ids, a);
  std::erase(c.ids, b);
  location_.erase(a);
  location_.erase(b);
  reindex(key);
  return m.outcome;
}

BellOutcome QuantumSystem::teleport(RegisterId src, RegisterId pair_near) {
  if (dim(src) != dim(pair_near)) throw InvalidArgument("teleport pair dimension mismatch");
  return bell_measure(src, pair_near);
}

void QuantumSystem::apply_correction(RegisterId id, BellOutcome outcome) {
  Component& c = components_.at(location_.at(id));
  c.state = summon::apply_correction(std::move(c.state), position(c, id), outcome);
}

void QuantumSystem::apply_basis_map(std::span<const RegisterId> ids, const std::function<void(std::span<int>)>& map) {
  std::uint64_t key = merge(ids);
  Component& c = components_.at(key);
  std::vector<std::size_t> regs;
  for (RegisterId id : ids) regs.push_back(position(c, id));
  c.state = summon::apply_basis_map(c.state, regs, map);
}

std::vector<RegisterId> QuantumSystem::apply_isometry(RegisterId id, const std::vector<int>& out_dims,
                                                      const std::vector<IsometryColumn>& columns) {
  std::uint64_t key = location_.at(id);
  Component& c = components_.at(key);
  std::size_t out_size = product(out_dims);
  if (c.state.size() / static_cast<std::size_t>(dim(id)) * out_size > max_dimension_) {
    throw CapacityExceeded("encoded state exceeds the Hilbert dimension cap");
  }
  std::size_t pos = position(c, id);
  c.state = summon::apply_isometry(c.state, pos, out_dims, columns);
  std::vector<RegisterId> fresh;
  for (std::size_t k = 0; k < out_dims.size(); ++k) fresh.push_back(fresh_id());
  c.ids.erase(c.ids.begin() + static_cast<long>(pos));
  c.ids.insert(c.ids.begin() + static_cast<long>(pos), fresh.begin(), fresh.end());
  location_.erase(id);
  for (RegisterId f : fresh) location_[f] = key;
  return fresh;
}

void QuantumSystem::restrict_register(RegisterId id, int new_dim, double leak_tolerance) {
  Component& c = components_.at(location_.at(id));
  c.state = summon::restrict_register(c.state, position(c, id), new_dim, leak_tolerance);
}

StateVector QuantumSystem::joint_state(std::span<const RegisterId> ids) const {
  std::vector<std::uint64_t> keys;
  for (RegisterId id : ids) {
    auto it = location_.find(id);
    if (it == location_.end()) throw InvalidArgument("unknown register " + std::to_string(id.value));
    if (std::find(keys.begin(), keys.end(), it->second) == keys.end()) keys.push_back(it->second);
  }
  StateVector joint;
  std::vector<RegisterId> order;
  for (std::uint64_t k : keys) {
    const Component& c = components_.at(k);
    joint = tensor(joint, c.state);
    order.insert(order.end(), c.ids.begin(), c.ids.end());
  }
  // Move the requested registers to the front, in order.
  std::vector<std::size_t> perm;
  for (RegisterId id : ids) perm.push_back(static_cast<std::size_t>(std::find(order.begin(), order.end(), id) - order.begin()));
  for (std::size_t p = 0; p < order.size(); ++p) {
    if (std::find(perm.begin(), perm.end(), p) == perm.end()) perm.push_back(p);
  }
  std::vector<int> dims;
  for (std::size_t p : perm) dims.push_back(joint.dim(p));
  std::vector<Amplitude> amps(joint.size());
  StateVector shape = StateVectorAccess::make(dims, std::vector<Amplitude>(1));
  for (std::size_t i = 0; i < joint.size(); ++i) {
    std::size_t target = 0;
    for (std::size_t q = 0; q < perm.size(); ++q) {
      std::size_t v = (i / joint.stride(perm[q])) % static_cast<std::size_t>(joint.dim(perm[q]));
      target = target * static_cast<std::size_t>(dims[q]) + v;
    }
    amps[target] = joint.amplitude(i);
  }
  (void)shape;
  return StateVectorAccess::make(std::move(dims), std::move(amps));
}

Eigen::MatrixXcd QuantumSystem::reduced_density(std::span<const RegisterId> ids) const {
  StateVector joint = joint_state(ids);
  std::vector<std::size_t> regs(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) regs[k] = k;
  return summon::reduced_density(joint, regs);
}

double QuantumSystem::fidelity(RegisterId id, std::span<const Amplitude> target) const {
  const Component& c = components_.at(location_.at(id));
  return summon::fidelity(c.state, position(c, id), target);
}

}  // namespace summon

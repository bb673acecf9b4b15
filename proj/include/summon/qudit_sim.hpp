#pragma once

#include "summon/rng.hpp"

#include <Eigen/Dense>

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace summon {

using Amplitude = std::complex<double>;

inline constexpr std::size_t kMaxHilbertDimension = std::size_t{1} << 20;

/// Pure state over an ordered list of qudit registers of mixed dimension.
/// Amplitudes are stored row-major with register 0 most significant.
class StateVector {
 public:
  /// The empty product: no registers, amplitude 1.
  StateVector() : amplitudes_{Amplitude(1.0)} {}

  /// Normalizes `amplitudes`. Throws InvalidArgument on a length mismatch,
  /// a dimension below 2 or a zero vector.
  static StateVector prepare(std::vector<int> dims, std::vector<Amplitude> amplitudes);

  /// Basis state |values>.
  static StateVector basis(std::vector<int> dims, std::span<const int> values);

  const std::vector<int>& dims() const { return dims_; }
  std::size_t register_count() const { return dims_.size(); }
  std::size_t size() const { return amplitudes_.size(); }
  int dim(std::size_t reg) const { return dims_.at(reg); }
  std::size_t stride(std::size_t reg) const;

  std::span<const Amplitude> amplitudes() const { return amplitudes_; }
  Amplitude amplitude(std::size_t index) const { return amplitudes_.at(index); }
  double norm() const;

 private:
  friend class StateVectorAccess;
  std::vector<int> dims_;
  std::vector<Amplitude> amplitudes_;
};

StateVector tensor(const StateVector& a, const StateVector& b);

/// (1/sqrt d) sum_q |q>|q> on two d-dimensional registers.
StateVector bell_pair(int d);

/// Generalized Bell measurement result; the basis is
/// |Phi_ab> = (1/sqrt d) sum_q w^(a q) |q>|q + b mod d>, w = exp(2 pi i / d).
struct BellOutcome {
  int a = 0;
  int b = 0;

  friend bool operator==(const BellOutcome&, const BellOutcome&) = default;
};

/// Exact outcome probabilities, indexed a * d + b.
std::vector<double> bell_distribution(const StateVector& state, std::size_t reg_a, std::size_t reg_b);

/// Post-measurement state for a given outcome with both registers removed.
/// Throws InvalidArgument when the outcome has zero probability.
StateVector project_bell(const StateVector& state, std::size_t reg_a, std::size_t reg_b, BellOutcome outcome);

struct BellMeasurement {
  BellOutcome outcome;
  double probability = 0.0;
  StateVector post;  // registers reg_a and reg_b removed
};

BellMeasurement bell_measure(const StateVector& state, std::size_t reg_a, std::size_t reg_b, Rng& rng);

/// X^k |q> = |q + k mod d>.
StateVector apply_shift(StateVector state, std::size_t reg, int k);
/// Z^k |q> = w^(k q) |q>.
StateVector apply_phase(StateVector state, std::size_t reg, int k);

/// Undoes the Pauli frame X^b Z^-a that teleportation leaves on the output:
/// applies Z^a X^-b.
StateVector apply_correction(StateVector state, std::size_t reg, BellOutcome outcome);

struct Teleported {
  BellOutcome outcome;
  StateVector state;
  std::size_t destination = 0;  // index of the far pair half after removal
};

/// Bell-measures (src, pair_near); the quantum information then sits on
/// pair_far up to correction by the returned outcome.
Teleported teleport(const StateVector& state, std::size_t src, std::size_t pair_near, std::size_t pair_far, Rng& rng);

/// Reversible relabelling of basis states on the listed registers. `map`
/// rewrites the register values in place and must be a bijection.
StateVector apply_basis_map(const StateVector& state, std::span<const std::size_t> regs,
                            const std::function<void(std::span<int>)>& map);

/// Sparse isometry column: output basis index -> coefficient.
using IsometryColumn = std::vector<std::pair<std::size_t, Amplitude>>;

/// Replaces register `reg` (dimension = columns.size()) by registers of
/// dimensions `out_dims` placed at the same position.
StateVector apply_isometry(const StateVector& state, std::size_t reg, const std::vector<int>& out_dims,
                           const std::vector<IsometryColumn>& columns);

/// Projects register `reg` onto its first `new_dim` levels. Throws
/// InvalidArgument when more than `leak_tolerance` of the norm is outside.
StateVector restrict_register(const StateVector& state, std::size_t reg, int new_dim, double leak_tolerance = 1e-10);

/// Reduced density matrix of the listed registers (in that order).
Eigen::MatrixXcd reduced_density(const StateVector& state, std::span<const std::size_t> regs);

double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

/// <target| rho_reg |target> for a single register; global phase drops out.
double fidelity(const StateVector& state, std::size_t reg, std::span<const Amplitude> target);

/// |<a|b>|^2 for states with equal dims.
double overlap_fidelity(const StateVector& a, const StateVector& b);

/// Haar-like random pure state of one register (normalized complex Gaussian).
std::vector<Amplitude> random_amplitudes(int d, Rng& rng);

/// Stable name of a simulated register.
struct RegisterId {
  std::uint64_t value = 0;
  auto operator<=>(const RegisterId&) const = default;
};

/// A collection of registers held as a product of independent components.
/// Operations spanning several components merge them; measured registers
/// are removed. Idle entangled pairs therefore cost nothing until touched.
class QuantumSystem {
 public:
  explicit QuantumSystem(std::uint64_t seed, std::size_t max_dimension = kMaxHilbertDimension);

  std::vector<RegisterId> add(StateVector state);
  std::pair<RegisterId, RegisterId> add_bell_pair(int d);

  bool contains(RegisterId id) const { return location_.count(id) != 0; }
  int dim(RegisterId id) const;
  /// Hilbert dimension of the component holding `id`.
  std::size_t component_dimension(RegisterId id) const;
  std::size_t component_count() const { return components_.size(); }

  BellOutcome bell_measure(RegisterId a, RegisterId b);
  /// Teleports src through the pair whose near half is `pair_near`.
  BellOutcome teleport(RegisterId src, RegisterId pair_near);
  void apply_correction(RegisterId id, BellOutcome outcome);

  void apply_basis_map(std::span<const RegisterId> ids, const std::function<void(std::span<int>)>& map);
  std::vector<RegisterId> apply_isometry(RegisterId id, const std::vector<int>& out_dims,
                                         const std::vector<IsometryColumn>& columns);
  void restrict_register(RegisterId id, int new_dim, double leak_tolerance = 1e-10);

  Eigen::MatrixXcd reduced_density(std::span<const RegisterId> ids) const;
  double fidelity(RegisterId id, std::span<const Amplitude> target) const;

  /// Joint state of the listed registers' components with the listed
  /// registers first, in order (other registers of those components follow).
  StateVector joint_state(std::span<const RegisterId> ids) const;

  Rng& rng() { return rng_; }

 private:
  struct Component {
    StateVector state;
    std::vector<RegisterId> ids;
  };

  RegisterId fresh_id() { return RegisterId{next_id_++}; }
  std::uint64_t merge(std::span<const RegisterId> ids);
  std::size_t position(const Component& c, RegisterId id) const;
  void reindex(std::uint64_t component);

  Rng rng_;
  std::size_t max_dimension_;
  std::uint64_t next_id_ = 0;
  std::uint64_t next_component_ = 0;
  std::map<std::uint64_t, Component> components_;
  std::map<RegisterId, std::uint64_t> location_;
};

}  // namespace summon

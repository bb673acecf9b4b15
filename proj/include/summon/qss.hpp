#pragma once

#include "summon/qudit_sim.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace summon {

/// Unordered pair of parties {i, j} stored with i < j (0-based).
struct ShareLabel {
  std::size_t i = 0;
  std::size_t j = 0;

  friend bool operator==(const ShareLabel&, const ShareLabel&) = default;
};

/// Position of {i, j} in the lexicographic list of pairs of n parties.
std::size_t label_index(std::size_t n, std::size_t i, std::size_t j);

/// Share labels are all pairs of n parties in lexicographic order. The
/// minimal authorized sets are the stars: star i holds every label containing
/// i, listed by the other party ascending.
struct AccessStructure {
  std::size_t parties = 0;
  std::vector<ShareLabel> labels;
  std::vector<std::vector<std::size_t>> stars;  // label indices

  /// True iff `held` (label indices) contains some star.
  bool is_authorized(const std::vector<std::size_t>& held) const;
};

/// Throws InvalidArgument for n < 2.
AccessStructure star_structure(std::size_t n);

/// Every pair of minimal authorized sets intersects, so no two disjoint
/// sets of shares can both be authorized.
bool stars_pairwise_intersect(const AccessStructure& access);

/// Checks upward closure of is_authorized by brute force over all label
/// subsets. Intended for small n (2^(n(n-1)/2) subsets).
bool is_monotone(const AccessStructure& access);

struct SchemeDescriptor {
  std::size_t parties = 0;
  int secret_dim = 0;
  std::string construction;
};

/// Share registers of one encoded secret, indexed like AccessStructure::labels.
using ShareRegisters = std::vector<std::vector<RegisterId>>;

/// A quantum secret sharing scheme for the star access structure.
class StarScheme {
 public:
  virtual ~StarScheme() = default;

  virtual SchemeDescriptor descriptor() const = 0;

  /// Dimensions of the registers making up each share.
  virtual std::vector<std::vector<int>> share_dims() const = 0;

  /// Consumes `secret` (dimension secret_dim) and returns the share registers.
  virtual ShareRegisters encode(QuantumSystem& sys, RegisterId secret) const = 0;

  /// Decodes from the shares of star `star` only, given in star order. The
  /// returned register holds the secret; the rest is left as junk.
  /// Throws InvalidArgument when a share register is missing.
  virtual RegisterId reconstruct(QuantumSystem& sys, std::size_t star, const ShareRegisters& star_shares) const = 0;

  const AccessStructure& access() const { return access_; }

 protected:
  explicit StarScheme(std::size_t n) : access_(star_structure(n)) {}

  void check_star(const QuantumSystem& sys, std::size_t star, const ShareRegisters& star_shares) const;

 private:
  AccessStructure access_;
};

/// Picks the construction for n parties and secret dimension d:
///   n = 2      the secret itself is the only share;
///   n = 3      the ((2,3)) qutrit threshold scheme, qubits padded to qutrits;
///   n >= 4     additive star splitting, while the encoded state stays small.
/// Throws Unsupported for any other combination.
std::unique_ptr<StarScheme> make_star_scheme(std::size_t n, int d);

/// Hilbert dimension of one encoded secret.
std::size_t encoded_dimension(const StarScheme& scheme);

struct SchemeValidation {
  SchemeDescriptor scheme;
  std::size_t secrets_tested = 0;
  double min_fidelity = 1.0;
  struct FidelityWitness {
    std::size_t secret = 0;
    std::size_t star = 0;
    double fidelity = 0.0;
  };
  std::optional<FidelityWitness> worst;
  /// Largest trace distance between a single share's reduced states for two
  /// different secrets. Not applicable when the single share is the secret.
  double max_share_distance = 0.0;
  bool secrecy_applicable = true;
  bool stars_intersect = true;
  bool monotone = true;
  double fidelity_tolerance = 1e-10;
  double secrecy_tolerance = 1e-9;

  bool passed() const;
};

/// Encodes the d basis states and `trials` random secrets, reconstructs each
/// from every star, and compares single-share reduced states across secrets.
SchemeValidation validate_scheme(const StarScheme& scheme, std::size_t trials, std::uint64_t seed);

}  // namespace summon

#include "summon/qss.hpp"

#include "summon/errors.hpp"

#include <algorithm>
#include <cmath>

namespace summon {

std::size_t label_index(std::size_t n, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  if (i == j || j >= n) throw InvalidArgument("share label needs two distinct parties below " + std::to_string(n));
  // Pairs (0,1)..(0,n-1) come first, then (1,2).., so skip i rows of
  // decreasing length before offsetting within row i.
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

bool AccessStructure::is_authorized(const std::vector<std::size_t>& held) const {
  for (const auto& star : stars) {
    bool all = std::all_of(star.begin(), star.end(), [&](std::size_t l) {
      return std::find(held.begin(), held.end(), l) != held.end();
    });
    if (all) return true;
  }
  return false;
}

AccessStructure star_structure(std::size_t n) {
  if (n < 2) throw InvalidArgument("the star structure needs at least two parties");
  AccessStructure a;
  a.parties = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) a.labels.push_back({i, j});
  }
  a.stars.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t w = 0; w < n; ++w) {
      if (w != i) a.stars[i].push_back(label_index(n, i, w));
    }
  }
  return a;
}

bool stars_pairwise_intersect(const AccessStructure& access) {
  for (std::size_t x = 0; x < access.stars.size(); ++x) {
    for (std::size_t y = x + 1; y < access.stars.size(); ++y) {
      const auto& a = access.stars[x];
      const auto& b = access.stars[y];
      bool meet = std::any_of(a.begin(), a.end(), [&](std::size_t l) { return std::find(b.begin(), b.end(), l) != b.end(); });
      if (!meet) return false;
    }
  }
  return true;
}

bool is_monotone(const AccessStructure& access) {
  const std::size_t count = access.labels.size();
  if (count > 20) throw InvalidArgument("monotonicity check is limited to 20 labels");
  auto members = [&](std::size_t mask) {
    std::vector<std::size_t> held;
    for (std::size_t l = 0; l < count; ++l) {
      if (mask >> l & 1U) held.push_back(l);
    }
    return held;
  };
  for (std::size_t mask = 0; mask < (std::size_t{1} << count); ++mask) {
    if (!access.is_authorized(members(mask))) continue;
    for (std::size_t l = 0; l < count; ++l) {
      if (!access.is_authorized(members(mask | (std::size_t{1} << l)))) return false;
    }
  }
  return true;
}

void StarScheme::check_star(const QuantumSystem& sys, std::size_t star, const ShareRegisters& star_shares) const {
  if (star >= access_.parties) throw InvalidArgument("star index out of range");
  if (star_shares.size() != access_.stars[star].size()) {
    throw InvalidArgument("star " + std::to_string(star + 1) + " needs " + std::to_string(access_.stars[star].size()) +
                          " shares, got " + std::to_string(star_shares.size()));
  }
  auto dims = share_dims();
  for (std::size_t k = 0; k < star_shares.size(); ++k) {
    const auto& expected = dims[access_.stars[star][k]];
    if (star_shares[k].size() != expected.size()) throw InvalidArgument("share has the wrong number of registers");
    for (std::size_t r = 0; r < expected.size(); ++r) {
      if (!sys.contains(star_shares[k][r])) throw InvalidArgument("share register is missing");
      if (sys.dim(star_shares[k][r]) != expected[r]) throw InvalidArgument("share register has the wrong dimension");
    }
  }
}

namespace {

int mod(int v, int d) { return ((v % d) + d) % d; }

/// Two parties: both stars are the single share, which is the secret itself.
class SingleShareScheme final : public StarScheme {
 public:
  explicit SingleShareScheme(int d) : StarScheme(2), d_(d) {}

  SchemeDescriptor descriptor() const override { return {2, d_, "single-share"}; }
  std::vector<std::vector<int>> share_dims() const override { return {{d_}}; }

  ShareRegisters encode(QuantumSystem& sys, RegisterId secret) const override {
    if (sys.dim(secret) != d_) throw InvalidArgument("secret dimension mismatch");
    return {{secret}};
  }

  RegisterId reconstruct(QuantumSystem& sys, std::size_t star, const ShareRegisters& star_shares) const override {
    check_star(sys, star, star_shares);
    return star_shares[0][0];
  }

 private:
  int d_;
};

/// Three parties, shares at positions {12}->0, {13}->1, {23}->2 each holding
/// one qutrit. |s> maps to (1/sqrt 3) sum_j |j, j+s, j+2s>; position p holds
/// j + p s. Two positions p < q determine s = (x_q - x_p)(q - p)^-1 and leave
/// the remaining qutrits maximally entangled. Qubit secrets use the first two
/// columns of the same isometry.
class QutritThresholdScheme final : public StarScheme {
 public:
  explicit QutritThresholdScheme(int d) : StarScheme(3), d_(d) {}

  SchemeDescriptor descriptor() const override {
    return {3, d_, d_ == 3 ? "qutrit-2-of-3" : "qutrit-2-of-3-embedded"};
  }
  std::vector<std::vector<int>> share_dims() const override { return {{3}, {3}, {3}}; }

  ShareRegisters encode(QuantumSystem& sys, RegisterId secret) const override {
    if (sys.dim(secret) != d_) throw InvalidArgument("secret dimension mismatch");
    const double w = 1.0 / std::sqrt(3.0);
    std::vector<IsometryColumn> columns(static_cast<std::size_t>(d_));
    for (int s = 0; s < d_; ++s) {
      for (int j = 0; j < 3; ++j) {
        std::size_t index = static_cast<std::size_t>(mod(j, 3) * 9 + mod(j + s, 3) * 3 + mod(j + 2 * s, 3));
        columns[s].push_back({index, Amplitude(w)});
      }
    }
    auto regs = sys.apply_isometry(secret, {3, 3, 3}, columns);
    return {{regs[0]}, {regs[1]}, {regs[2]}};
  }

  RegisterId reconstruct(QuantumSystem& sys, std::size_t star, const ShareRegisters& star_shares) const override {
    check_star(sys, star, star_shares);
    const auto& labels = access().stars[star];
    const int p = static_cast<int>(labels[0]);
    const int q = static_cast<int>(labels[1]);
    const int r = 3 - p - q;
    const int inverse = (q - p) == 1 ? 1 : 2;  // inverses mod 3
    const RegisterId regs[] = {star_shares[0][0], star_shares[1][0]};
    sys.apply_basis_map(regs, [=](std::span<int> x) {
      const int s = mod((x[1] - x[0]) * inverse, 3);
      const int j = mod(x[0] - p * s, 3);
      x[0] = s;
      x[1] = mod(j + r * s, 3);
    });
    if (d_ < 3) sys.restrict_register(regs[0], d_);
    return regs[0];
  }

 private:
  int d_;
};

/// Each party v splits the secret additively into parts u(v,w), one per other
/// party w, with sum_w u(v,w) = s mod d. Share {v,w} holds [u(v,w), u(w,v)]
/// with the smaller party first, and the code word is the uniform
/// superposition over all consistent splittings. Star i reads every part of
/// its own splitting, which gives s, and then removes s from the parts u(w,i)
/// it holds for the other splittings so that what remains is independent of s.
class StarSplitScheme final : public StarScheme {
 public:
  StarSplitScheme(std::size_t n, int d) : StarScheme(n), n_(n), d_(d) {}

  SchemeDescriptor descriptor() const override { return {n_, d_, "star-split"}; }
  std::vector<std::vector<int>> share_dims() const override {
    return std::vector<std::vector<int>>(access().labels.size(), std::vector<int>{d_, d_});
  }

  ShareRegisters encode(QuantumSystem& sys, RegisterId secret) const override {
    if (sys.dim(secret) != d_) throw InvalidArgument("secret dimension mismatch");
    const std::size_t registers = n_ * (n_ - 1);
    const std::size_t free_digits = n_ * (n_ - 2);
    std::size_t terms = 1;
    for (std::size_t k = 0; k < free_digits; ++k) terms *= static_cast<std::size_t>(d_);
    const Amplitude w(1.0 / std::sqrt(static_cast<double>(terms)));

    std::vector<IsometryColumn> columns(static_cast<std::size_t>(d_));
    std::vector<int> digits(free_digits, 0);
    std::vector<int> values(registers, 0);
    for (int s = 0; s < d_; ++s) {
      std::fill(digits.begin(), digits.end(), 0);
      for (std::size_t t = 0; t < terms; ++t) {
        std::size_t next = 0;
        for (std::size_t v = 0; v < n_; ++v) {
          int sum = 0;
          std::size_t last = v + 1 == n_ ? n_ - 2 : n_ - 1;  // largest other party
          for (std::size_t other = 0; other < n_; ++other) {
            if (other == v || other == last) continue;
            int u = digits[next++];
            values[slot(v, other)] = u;
            sum += u;
          }
          values[slot(v, last)] = mod(s - sum, d_);
        }
        std::size_t index = 0;
        for (int value : values) index = index * static_cast<std::size_t>(d_) + static_cast<std::size_t>(value);
        columns[s].push_back({index, w});
        for (std::size_t k = free_digits; k-- > 0;) {
          if (++digits[k] < d_) break;
          digits[k] = 0;
        }
      }
    }
    auto regs = sys.apply_isometry(secret, std::vector<int>(registers, d_), columns);
    ShareRegisters shares(access().labels.size());
    for (std::size_t l = 0; l < shares.size(); ++l) shares[l] = {regs[2 * l], regs[2 * l + 1]};
    return shares;
  }

  RegisterId reconstruct(QuantumSystem& sys, std::size_t star, const ShareRegisters& star_shares) const override {
    check_star(sys, star, star_shares);
    // Star shares are ordered by the other party ascending; within share
    // {v,w} the smaller party's part comes first.
    std::vector<RegisterId> regs;
    std::vector<std::size_t> own;      // positions of u(star, w) in regs
    std::vector<std::size_t> foreign;  // positions of u(w, star) in regs
    std::size_t k = 0;
    for (std::size_t other = 0; other < n_; ++other) {
      if (other == star) continue;
      const bool star_first = star < other;
      regs.push_back(star_shares[k][0]);
      regs.push_back(star_shares[k][1]);
      own.push_back(regs.size() - (star_first ? 2 : 1));
      foreign.push_back(regs.size() - (star_first ? 1 : 2));
      ++k;
    }
    const int d = d_;
    sys.apply_basis_map(regs, [own, foreign, d](std::span<int> x) {
      int s = 0;
      for (std::size_t p : own) s += x[p];
      s = mod(s, d);
      x[own[0]] = s;
      for (std::size_t p : foreign) x[p] = mod(x[p] - s, d);
    });
    return regs[own[0]];
  }

 private:
  std::size_t slot(std::size_t v, std::size_t w) const {
    std::size_t l = label_index(n_, v, w);
    return 2 * l + (v < w ? 0 : 1);
  }

  std::size_t n_;
  int d_;
};

bool fits(int d, std::size_t exponent) {
  std::size_t total = 1;
  for (std::size_t k = 0; k < exponent; ++k) {
    total *= static_cast<std::size_t>(d);
    if (total > kMaxHilbertDimension) return false;
  }
  return true;
}

}  // namespace

std::unique_ptr<StarScheme> make_star_scheme(std::size_t n, int d) {
  if (d < 2) throw InvalidArgument("secret dimension must be at least 2");
  if (n == 2) return std::make_unique<SingleShareScheme>(d);
  if (n == 3) {
    if (d > 3) throw Unsupported("the ((2,3)) scheme supports secret dimensions 2 and 3, got " + std::to_string(d));
    return std::make_unique<QutritThresholdScheme>(d);
  }
  if (n >= 4) {
    // Room for the code word plus one Bell pair during routing.
    if (!fits(d, n * (n - 1) + 2)) {
      throw Unsupported("star splitting for " + std::to_string(n) + " parties with secret dimension " +
                        std::to_string(d) + " exceeds the simulator's Hilbert dimension cap");
    }
    return std::make_unique<StarSplitScheme>(n, d);
  }
  throw Unsupported("secret sharing needs at least two parties");
}

std::size_t encoded_dimension(const StarScheme& scheme) {
  std::size_t total = 1;
  for (const auto& share : scheme.share_dims()) {
    for (int d : share) total *= static_cast<std::size_t>(d);
  }
  return total;
}

bool SchemeValidation::passed() const {
  bool secrecy = !secrecy_applicable || max_share_distance <= secrecy_tolerance;
  return min_fidelity >= 1.0 - fidelity_tolerance && secrecy && stars_intersect && monotone;
}

SchemeValidation validate_scheme(const StarScheme& scheme, std::size_t trials, std::uint64_t seed) {
  SchemeValidation report;
  report.scheme = scheme.descriptor();
  const int d = report.scheme.secret_dim;
  const AccessStructure& access = scheme.access();
  report.stars_intersect = stars_pairwise_intersect(access);
  report.monotone = access.labels.size() > 20 || is_monotone(access);
  report.secrecy_applicable = access.parties >= 3;

  Rng secrets(derive_seed(seed, 0));
  std::vector<std::vector<Amplitude>> inputs;
  for (int s = 0; s < d; ++s) {
    std::vector<Amplitude> v(static_cast<std::size_t>(d), 0.0);
    v[static_cast<std::size_t>(s)] = 1.0;
    inputs.push_back(std::move(v));
  }
  for (std::size_t t = 0; t < trials; ++t) inputs.push_back(random_amplitudes(d, secrets));
  report.secrets_tested = inputs.size();

  std::vector<Eigen::MatrixXcd> reference;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const std::vector<int> dims{d};
    for (std::size_t star = 0; star < access.parties; ++star) {
      QuantumSystem sys(derive_seed(seed, 1 + k * access.parties + star));
      RegisterId secret = sys.add(StateVector::prepare(dims, inputs[k]))[0];
      ShareRegisters shares = scheme.encode(sys, secret);
      ShareRegisters star_shares;
      for (std::size_t l : access.stars[star]) star_shares.push_back(shares[l]);
      RegisterId out = scheme.reconstruct(sys, star, star_shares);
      double f = sys.fidelity(out, inputs[k]);
      if (!report.worst || f < report.worst->fidelity) report.worst = SchemeValidation::FidelityWitness{k, star, f};
      report.min_fidelity = std::min(report.min_fidelity, f);
    }
    if (!report.secrecy_applicable) continue;
    QuantumSystem sys(derive_seed(seed, 1 + inputs.size() * access.parties + k));
    RegisterId secret = sys.add(StateVector::prepare(dims, inputs[k]))[0];
    ShareRegisters shares = scheme.encode(sys, secret);
    for (std::size_t l = 0; l < shares.size(); ++l) {
      Eigen::MatrixXcd rho = sys.reduced_density(shares[l]);
      if (k == 0) {
        reference.push_back(std::move(rho));
      } else {
        report.max_share_distance = std::max(report.max_share_distance, trace_distance(rho, reference[l]));
      }
    }
  }
  return report;
}

}  // namespace summon

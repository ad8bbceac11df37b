#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace mmwshare {

/// Mixes a parent seed with a stream index (splitmix64 finalizer applied to
/// the pair). Child seeds depend only on (parent, index), never on the
/// order in which streams are created, so Monte Carlo runs can be executed
/// by any number of workers and still draw identical numbers.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// Seeded randomness stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the distributions below are written
/// out explicitly because the std:: ones are implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Independent child stream, see derive_seed().
  RandomStream child(std::uint64_t index) const { return RandomStream(derive_seed(seed_, index)); }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), rejection sampled (no modulo bias).
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller (spare value cached).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mmwshare

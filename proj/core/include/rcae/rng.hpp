#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rcae/matrix.hpp"

namespace rcae {

/// Deterministic random source. All distributions are implemented on top of
/// the raw mt19937_64 stream so that sequences are identical across
/// platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [a, b).
  double uniform(double a, double b);
  /// Standard normal via Box-Muller (pairs; the second draw is cached).
  double normal();
  double normal(double mean, double stddev);
  /// Uniform integer in [0, n). n must be positive.
  uint64_t uniform_int(uint64_t n);

  Vec uniform_vec(int n, double a, double b);
  Vec normal_vec(int n, double stddev = 1.0);
  /// Unit vector uniform on the sphere (normalized Gaussian).
  Vec unit_vec(int n);

  /// M distinct indices drawn uniformly from [0, n), returned sorted.
  std::vector<int> sample_without_replacement(int n, int m);

  /// Independent child stream; depends only on this Rng's construction seed
  /// and the stream id, never on how much of the parent stream was consumed.
  Rng derive(uint64_t stream) const;

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

/// splitmix64 mixing step, used for stream derivation.
uint64_t splitmix64(uint64_t x);

}  // namespace rcae

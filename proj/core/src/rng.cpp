#include "rcae/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rcae {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Rng::Rng(uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

double Rng::uniform() {
  // 53 random bits -> [0, 1)
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * 3.14159265358979323846 * u2;
  cached_normal_ = r * std::sin(t);
  has_cached_normal_ = true;
  return r * std::cos(t);
}

double Rng::normal(double mean, double stddev) { return mean + stddev * normal(); }

uint64_t Rng::uniform_int(uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = gen_();
  } while (v >= limit);
  return v % n;
}

Vec Rng::uniform_vec(int n, double a, double b) {
  Vec v(n);
  for (double& x : v) x = uniform(a, b);
  return v;
}

Vec Rng::normal_vec(int n, double stddev) {
  Vec v(n);
  for (double& x : v) x = stddev * normal();
  return v;
}

Vec Rng::unit_vec(int n) {
  Vec v;
  double nv = 0.0;
  do {
    v = normal_vec(n);
    nv = norm(v);
  } while (nv < 1e-12);
  return vec_scale(v, 1.0 / nv);
}

std::vector<int> Rng::sample_without_replacement(int n, int m) {
  if (m > n) throw std::invalid_argument("sample_without_replacement: m > n");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < m; ++i) {
    const int j = i + static_cast<int>(uniform_int(static_cast<uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Rng Rng::derive(uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ splitmix64(stream ^ 0xA5A5A5A55A5A5A5Aull)));
}

}  // namespace rcae

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "robin/types.hpp"

namespace robin {

// Deterministic seeded generator. Normal deviates use explicit Box-Muller so
// that streams do not depend on the standard library's distribution
// implementations.
class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : gen_(seed) {}

  double uniform() {
    // 53-bit mantissa uniform in [0,1)
    return (gen_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  double chi2(int k) {
    double s = 0;
    for (int i = 0; i < k; ++i) {
      const double z = normal();
      s += z * z;
    }
    return s;
  }

  CVector complex_gaussian(int n) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v[i] = Complex(normal(), normal());
    return v;
  }

  RVector gaussian(int d) {
    RVector v(d);
    for (int i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

  uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_cached_ = false;
  double cached_ = 0;
};

// splitmix64 step; used to derive independent substreams from one seed.
inline uint64_t split_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace robin

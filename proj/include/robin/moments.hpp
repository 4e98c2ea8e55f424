#pragma once

#include <cstdint>
#include <string>

#include "robin/domain.hpp"
#include "robin/types.hpp"

namespace robin {

// Exact rational with gcd normalization.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}
  Rational(long long n, long long d);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  bool operator==(const Rational& o) const {
    return num == o.num && den == o.den;
  }
  double value() const { return double(num) / double(den); }
  std::string str() const;
};

// q * pi^p
struct PiRat {
  Rational q;
  int pi_pow = 0;

  PiRat operator*(const PiRat& o) const { return {q * o.q, pi_pow + o.pi_pow}; }
  PiRat operator/(const PiRat& o) const { return {q / o.q, pi_pow - o.pi_pow}; }
  double value() const;
};

// Surface area of the unit sphere in R^m: 2 pi^{m/2} / Gamma(m/2).
PiRat sphere_area(int m);

// I(m, k) = int_0^inf r^m (r^2 + 1/4)^{-k} dr for even m >= 0, k > (m+1)/2.
PiRat radial_integral(int m, int k);

// Normalized hyperplane moments over the boundary of the model half space
// {2 Re w_n < 1}, all divided by sphere_area(2n):
//   ZetaN4n   : int zeta_n |zeta|^{-4n}          -> 1
//   XConst    : int |zeta|^{-4n}                 -> 2
//   AConst    : int x_1^2 |zeta|^{-4n-2}         -> 1/(2n)
//   BConst    : int |zeta|^{-4n-2}               -> 2(2n+1)/n
//   AbsZnSq   : int |zeta_n|^2 |zeta|^{-4n-2}    -> (n+1)/n
//   ZbarSq    : int conj(zeta_n)^2 |zeta|^{-4n-2}-> 1
//   TangentSq : int |zeta_1|^2 |zeta|^{-4n-2}    -> 1/n
//   MixedZero : int zeta_n zeta_1 |zeta|^{-4n-2} -> 0
enum class MomentKind {
  ZetaN4n,
  XConst,
  AConst,
  BConst,
  AbsZnSq,
  ZbarSq,
  TangentSq,
  MixedZero,
};

const char* moment_kind_name(MomentKind k);
MomentKind moment_kind_from_name(const std::string& s);
constexpr int kMomentKindCount = 8;

Rational moment_exact(MomentKind kind, int n);

struct QuadratureEstimate {
  Complex value;
  double stderr_ = 0;
  long long samples = 0;
  uint64_t seed = 0;
};

QuadratureEstimate moment_mc(MomentKind kind, int n, long long samples,
                             uint64_t seed);

// Deterministic seed-split sharding: the result depends on (seed, shards)
// only, never on the worker count.
QuadratureEstimate moment_mc_sharded(MomentKind kind, int n, long long samples,
                                     uint64_t seed, int shards, int threads);

// lambda_a(0) for the normalized setup, via the first-variation surface
// integral with kernel k1 built from the second derivatives of psi at 0.
// Requires a != n, nbar.
QuadratureEstimate lambda_a_quadrature(const DefiningEval& at0, int a,
                                       long long samples, uint64_t seed);
Complex lambda_a_closed(const DefiningEval& at0, int a);

// d^2 g / dw_c dpbar_beta (0,0) for the model half space, by Monte Carlo on
// the explicit hyperplane integrals; beta in I, beta != n.
QuadratureEstimate mixed_second_derivative_quadrature(const DefiningEval& at0,
                                                      int c, int beta,
                                                      long long samples,
                                                      uint64_t seed);
Complex mixed_second_derivative_closed(const DefiningEval& at0, int c,
                                       int beta);

}  // namespace robin

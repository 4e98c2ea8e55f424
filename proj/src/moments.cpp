#include "robin/moments.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "robin/rng.hpp"

namespace robin {

namespace {

long long gcd_ll(long long a, long long b) {
  while (b) {
    const long long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

}  // namespace

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = gcd_ll(num == 0 ? den : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational Rational::operator+(const Rational& o) const {
  return Rational(num * o.den + o.num * den, den * o.den);
}
Rational Rational::operator-(const Rational& o) const {
  return Rational(num * o.den - o.num * den, den * o.den);
}
Rational Rational::operator*(const Rational& o) const {
  return Rational(num * o.num, den * o.den);
}
Rational Rational::operator/(const Rational& o) const {
  if (o.num == 0) throw std::invalid_argument("division by zero");
  return Rational(num * o.den, den * o.num);
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

double PiRat::value() const { return q.value() * std::pow(M_PI, pi_pow); }

PiRat sphere_area(int m) {
  if (m < 1) throw std::invalid_argument("sphere dimension must be positive");
  if (m % 2 == 0) {
    // 2 pi^l / (l-1)!
    const int l = m / 2;
    Rational f(1);
    for (int k = 2; k < l; ++k) f = f * Rational(k);
    return {Rational(2) / f, l};
  }
  // m = 2l+1: 2 * 4^l * l! / (2l)! * pi^l
  const int l = (m - 1) / 2;
  Rational r(2);
  for (int k = 0; k < l; ++k) r = r * Rational(4);
  for (int k = 2; k <= l; ++k) r = r * Rational(k);
  Rational fact(1);
  for (int k = 2; k <= 2 * l; ++k) fact = fact * Rational(k);
  return {r / fact, l};
}

PiRat radial_integral(int m, int k) {
  if (m % 2 != 0 || m < 0) throw std::invalid_argument("even m required");
  if (2 * k <= m + 1) throw std::invalid_argument("integral diverges");
  if (m == 0) {
    // I(0,k) = 4^{k-1} pi (2k-3)!!/(2k-2)!!
    Rational r(1);
    for (int i = 1; i < k; ++i) r = r * Rational(4);
    for (int i = 2 * k - 3; i >= 1; i -= 2) r = r * Rational(i);
    for (int i = 2 * k - 2; i >= 2; i -= 2) r = r / Rational(i);
    return {r, 1};
  }
  // integration by parts: I(m,k) = (m-1)/(2(k-1)) I(m-2, k-1)
  PiRat inner = radial_integral(m - 2, k - 1);
  return {inner.q * Rational(m - 1, 2 * (k - 1)), inner.pi_pow};
}

const char* moment_kind_name(MomentKind k) {
  switch (k) {
    case MomentKind::ZetaN4n: return "zeta_n_first";
    case MomentKind::XConst: return "x_const";
    case MomentKind::AConst: return "a_const";
    case MomentKind::BConst: return "b_const";
    case MomentKind::AbsZnSq: return "abs_zn_sq";
    case MomentKind::ZbarSq: return "zbar_sq";
    case MomentKind::TangentSq: return "tangent_sq";
    case MomentKind::MixedZero: return "mixed_zero";
  }
  return "?";
}

MomentKind moment_kind_from_name(const std::string& s) {
  for (int i = 0; i < kMomentKindCount; ++i) {
    const auto k = static_cast<MomentKind>(i);
    if (s == moment_kind_name(k)) return k;
  }
  throw std::invalid_argument("unknown moment kind: " + s);
}

Rational moment_exact(MomentKind kind, int n) {
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  const PiRat ratio = sphere_area(2 * n - 1) / sphere_area(2 * n);
  const PiRat X = ratio * radial_integral(2 * n - 2, 2 * n);
  const PiRat B = ratio * radial_integral(2 * n - 2, 2 * n + 1);
  if (X.pi_pow != 0 || B.pi_pow != 0)
    throw NumericalError("pi powers did not cancel");
  const Rational A = X.q * Rational(1, 4 * n);
  switch (kind) {
    case MomentKind::ZetaN4n: return X.q * Rational(1, 2);
    case MomentKind::XConst: return X.q;
    case MomentKind::AConst: return A;
    case MomentKind::BConst: return B.q;
    case MomentKind::AbsZnSq: return B.q * Rational(1, 4) + A;
    case MomentKind::ZbarSq: return B.q * Rational(1, 4) - A;
    case MomentKind::TangentSq: return A * Rational(2);
    case MomentKind::MixedZero: return Rational(0);
  }
  throw std::invalid_argument("unknown moment kind");
}

namespace {

// Monte Carlo over the hyperplane {Re zeta_n = 1/2} in the free coordinates
// (x_1, y_1, ..., x_{n-1}, y_{n-1}, y_n), with a heavy-tailed multivariate-t
// proposal (nu = 3, nu s^2 = 1/4) matching the scale of the integrands.
template <class F>
QuadratureEstimate hyperplane_mc(int n, long long samples, uint64_t seed,
                                 F&& integrand) {
  if (samples < 1000) throw std::invalid_argument("need at least 1e3 samples");
  const int d = 2 * n - 1;
  const double nu = 3.0;
  const double s = 0.5 / std::sqrt(nu);
  const double log_cq = std::lgamma(0.5 * (nu + d)) - std::lgamma(0.5 * nu) -
                        0.5 * d * std::log(nu * M_PI) - d * std::log(s);
  const double sigma2n = sphere_area(2 * n).value();

  SeededRng rng(seed);
  double sum_re = 0, sum_im = 0, sum_sq_re = 0, sum_sq_im = 0;
  CVector zeta(n);
  RVector v(d);
  for (long long i = 0; i < samples; ++i) {
    const double w = rng.chi2(3);
    const double scale = s * std::sqrt(nu / w);
    double r2 = 0;
    for (int j = 0; j < d; ++j) {
      v[j] = scale * rng.normal();
      r2 += v[j] * v[j];
    }
    const double log_q =
        log_cq - 0.5 * (nu + d) * std::log1p(r2 / (nu * s * s));
    for (int j = 0; j < n - 1; ++j) zeta[j] = Complex(v[2 * j], v[2 * j + 1]);
    zeta[n - 1] = Complex(0.5, v[d - 1]);
    const Complex f = integrand(zeta, r2 + 0.25);
    const Complex weight = f * std::exp(-log_q);
    sum_re += weight.real();
    sum_im += weight.imag();
    sum_sq_re += weight.real() * weight.real();
    sum_sq_im += weight.imag() * weight.imag();
  }
  const double inv_n = 1.0 / double(samples);
  const double mean_re = sum_re * inv_n;
  const double mean_im = sum_im * inv_n;
  const double var_re = std::max(0.0, sum_sq_re * inv_n - mean_re * mean_re);
  const double var_im = std::max(0.0, sum_sq_im * inv_n - mean_im * mean_im);
  QuadratureEstimate est;
  est.value = Complex(mean_re, mean_im) / sigma2n;
  est.stderr_ = std::sqrt((var_re + var_im) * inv_n) / sigma2n;
  est.samples = samples;
  est.seed = seed;
  return est;
}

}  // namespace

QuadratureEstimate moment_mc(MomentKind kind, int n, long long samples,
                             uint64_t seed) {
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  return hyperplane_mc(
      n, samples, seed, [kind, n](const CVector& zeta, double z2) -> Complex {
        const double w4n = pow_int(z2, -2 * n);
        switch (kind) {
          case MomentKind::ZetaN4n: return zeta[n - 1] * w4n;
          case MomentKind::XConst: return Complex(w4n, 0);
          case MomentKind::AConst: {
            const double x1 = zeta[0].real();
            return Complex(x1 * x1 * w4n / z2, 0);
          }
          case MomentKind::BConst: return Complex(w4n / z2, 0);
          case MomentKind::AbsZnSq:
            return Complex(std::norm(zeta[n - 1]) * w4n / z2, 0);
          case MomentKind::ZbarSq: {
            const Complex zb = std::conj(zeta[n - 1]);
            return zb * zb * w4n / z2;
          }
          case MomentKind::TangentSq:
            return Complex(std::norm(zeta[0]) * w4n / z2, 0);
          case MomentKind::MixedZero:
            return zeta[n - 1] * zeta[0] * w4n / z2;
        }
        return Complex(0, 0);
      });
}

QuadratureEstimate moment_mc_sharded(MomentKind kind, int n, long long samples,
                                     uint64_t seed, int shards, int threads) {
  if (shards < 1) shards = 1;
  std::vector<QuadratureEstimate> parts(shards);
  const long long chunk = samples / shards;
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= shards) return;
      const long long ns = (i == shards - 1) ? samples - chunk * (shards - 1) : chunk;
      parts[i] = moment_mc(kind, n, ns, split_seed(seed, 1000 + i));
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::max(1, std::min(threads, shards));
  for (int i = 0; i < workers - 1; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  QuadratureEstimate out;
  out.samples = samples;
  out.seed = seed;
  double var = 0;
  for (const auto& p : parts) {
    const double w = double(p.samples) / double(samples);
    out.value += w * p.value;
    var += w * w * p.stderr_ * p.stderr_;
  }
  out.stderr_ = std::sqrt(var);
  return out;
}

namespace {

// k1^(a)(0, zeta) = sum_j (zeta_j psi_{aj}(0) + conj(zeta_j) psi_{a jbar}(0))
Complex kernel_k1(const DefiningEval& e, int a, const CVector& zeta) {
  const int n = e.n();
  Complex s(0, 0);
  for (int j = 0; j < n; ++j)
    s += zeta[j] * e.d2(a, j) + std::conj(zeta[j]) * e.d2(a, j + n);
  return s;
}

}  // namespace

Complex lambda_a_closed(const DefiningEval& at0, int a) {
  const int n = at0.n();
  return -(n - 1.0) * (at0.d2(a, n - 1) + at0.d2(a, 2 * n - 1));
}

QuadratureEstimate lambda_a_quadrature(const DefiningEval& at0, int a,
                                       long long samples, uint64_t seed) {
  const int n = at0.n();
  if (a == n - 1 || a == 2 * n - 1)
    throw std::invalid_argument("index a must differ from n and nbar");
  QuadratureEstimate est = hyperplane_mc(
      n, samples, seed, [&](const CVector& zeta, double z2) -> Complex {
        return kernel_k1(at0, a, zeta) * pow_int(z2, -2 * n);
      });
  est.value *= -(n - 1.0);
  est.stderr_ *= (n - 1.0);
  return est;
}

Complex mixed_second_derivative_closed(const DefiningEval& at0, int c,
                                       int beta) {
  const int n = at0.n();
  if (beta < 0 || beta >= n - 1)
    throw std::invalid_argument("beta must be in I and differ from n");
  const int cb = windex_base(c, n);
  if (cb != n - 1) {
    return -(n - 1.0) * at0.d2(beta + n, c);
  }
  return -(n - 1.0) * ((n + 0.5) * at0.d2(beta + n, c) +
                       (n - 0.5) * at0.d2(beta + n, windex_conj(c, n)));
}

QuadratureEstimate mixed_second_derivative_quadrature(const DefiningEval& at0,
                                                      int c, int beta,
                                                      long long samples,
                                                      uint64_t seed) {
  const int n = at0.n();
  if (beta < 0 || beta >= n - 1)
    throw std::invalid_argument("beta must be in I and differ from n");
  const bool cbar = windex_bar(c, n);
  const int cb = windex_base(c, n);
  const double dc = (cb == n - 1) ? 0.5 : 0.0;  // d Re w_n / d w_c
  return hyperplane_mc(
      n, samples, seed, [&](const CVector& zeta, double z2) -> Complex {
        Complex k(0, 0);
        for (int j = 0; j < n; ++j)
          k += zeta[j] * at0.d2(beta + n, j) +
               std::conj(zeta[j]) * at0.d2(beta + n, j + n);
        const Complex zc = cbar ? zeta[cb] : std::conj(zeta[cb]);
        const double w4n = pow_int(z2, -2 * n);
        return -(n - 1.0) * k * (double(n) * zc * w4n / z2 - dc * w4n);
      });
}

}  // namespace robin

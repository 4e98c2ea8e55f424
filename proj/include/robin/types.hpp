#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace robin {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// Derivative indices run over I u Ibar: codes 0..n-1 mean d/dz_j,
// codes n..2n-1 mean d/dzbar_{j-n}.
inline bool windex_bar(int a, int n) { return a >= n; }
inline int windex_base(int a, int n) { return a < n ? a : a - n; }
inline int windex_conj(int a, int n) { return a < n ? a + n : a - n; }

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense symmetric-by-construction tensor of third Wirtinger derivatives,
// indexed by three codes in [0, 2n).
class ThirdTensor {
 public:
  ThirdTensor() = default;
  explicit ThirdTensor(int n) : n_(n), v_(8 * n * n * n, Complex(0, 0)) {}

  Complex& at(int a, int b, int c) { return v_[idx(a, b, c)]; }
  const Complex& at(int a, int b, int c) const { return v_[idx(a, b, c)]; }
  bool empty() const { return v_.empty(); }
  int n() const { return n_; }

 private:
  int idx(int a, int b, int c) const {
    const int m = 2 * n_;
    return (a * m + b) * m + c;
  }
  int n_ = 0;
  std::vector<Complex> v_;
};

// Value plus Wirtinger derivatives up to order 3 of a real-valued function.
// d1/d2/d3 are indexed by codes in [0, 2n); entries satisfy the conjugation
// symmetry f_abar = conj(f_a) etc. whenever they were filled consistently.
struct Jet3 {
  int n = 0;
  int order = 0;
  double f = 0;
  CVector d1;        // size 2n
  CMatrix d2;        // (2n) x (2n)
  ThirdTensor d3;

  Jet3() = default;
  Jet3(int n_, int order_) : n(n_), order(order_) {
    if (order >= 1) d1 = CVector::Zero(2 * n);
    if (order >= 2) d2 = CMatrix::Zero(2 * n, 2 * n);
    if (order >= 3) d3 = ThirdTensor(n);
  }
};

// Fills d2/d3 of a jet from a compute function over canonical index tuples,
// deriving the remaining entries by permutation symmetry and exact
// conjugation (conj toggles the bar on every index). Keeps the stored tables
// bitwise conjugation-symmetric.
template <class F2>
void fill_d2_conj_symmetric(Jet3& out, F2&& compute) {
  const int n = out.n;
  const int m = 2 * n;
  auto flip = [n](int a) { return a < n ? a + n : a - n; };
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      int pa = flip(a), pb = flip(b);
      if (pa > pb) std::swap(pa, pb);
      Complex v;
      if (pa < a || (pa == a && pb < b)) {
        v = std::conj(out.d2(pa, pb));
      } else {
        v = compute(a, b);
        if (pa == a && pb == b) v = Complex(v.real(), 0);
      }
      out.d2(a, b) = v;
      out.d2(b, a) = v;
    }
}

template <class F3>
void fill_d3_conj_symmetric(Jet3& out, F3&& compute) {
  const int n = out.n;
  const int m = 2 * n;
  auto flip = [n](int a) { return a < n ? a + n : a - n; };
  auto assign_all = [&](int a, int b, int c, const Complex& v) {
    out.d3.at(a, b, c) = v;
    out.d3.at(a, c, b) = v;
    out.d3.at(b, a, c) = v;
    out.d3.at(b, c, a) = v;
    out.d3.at(c, a, b) = v;
    out.d3.at(c, b, a) = v;
  };
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b)
      for (int c = b; c < m; ++c) {
        int p[3] = {flip(a), flip(b), flip(c)};
        std::sort(p, p + 3);
        const bool partner_first =
            std::tie(p[0], p[1], p[2]) < std::tie(a, b, c);
        const Complex v = partner_first
                              ? std::conj(out.d3.at(p[0], p[1], p[2]))
                              : compute(a, b, c);
        assign_all(a, b, c, v);
      }
}

inline double pow_int(double x, int k) {
  if (k < 0) return 1.0 / pow_int(x, -k);
  double r = 1.0;
  while (k) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

}  // namespace robin

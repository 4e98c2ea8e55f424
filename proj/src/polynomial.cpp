#include "robin/polynomial.hpp"

#include <map>

namespace robin {

namespace {

using Key = std::pair<std::vector<int>, std::vector<int>>;

}  // namespace

HermitianPoly::HermitianPoly(int n, std::vector<Monomial> terms) : n_(n) {
  if (n < 1 || n > 16) throw std::invalid_argument("polynomial dimension out of range");
  // Symmetrize: store (P + conj(P))/2 so the value is real by construction.
  std::map<Key, Complex> table;
  for (auto& t : terms) {
    if ((int)t.ez.size() != n || (int)t.ezb.size() != n)
      throw std::invalid_argument("monomial exponent size mismatch");
    table[{t.ez, t.ezb}] += 0.5 * t.c;
    table[{t.ezb, t.ez}] += 0.5 * std::conj(t.c);
  }
  for (auto& [k, c] : table) {
    if (std::abs(c) == 0.0) continue;
    terms_.push_back(Monomial{c, k.first, k.second});
  }
}

double HermitianPoly::eval(const CVector& z) const {
  Complex s(0, 0);
  for (const auto& t : terms_) {
    Complex m = t.c;
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; k < t.ez[j]; ++k) m *= z[j];
      for (int k = 0; k < t.ezb[j]; ++k) m *= std::conj(z[j]);
    }
    s += m;
  }
  return s.real();
}

Complex HermitianPoly::eval_deriv(const CVector& z, const int* codes,
                                  int count) const {
  Complex s(0, 0);
  for (const auto& t : terms_) {
    double factor = 1.0;
    // copy exponents, apply each derivative
    int ez[16], ezb[16];
    for (int j = 0; j < n_; ++j) {
      ez[j] = t.ez[j];
      ezb[j] = t.ezb[j];
    }
    bool dead = false;
    for (int k = 0; k < count && !dead; ++k) {
      const int a = codes[k];
      if (a < n_) {
        if (ez[a] == 0) {
          dead = true;
        } else {
          factor *= ez[a];
          --ez[a];
        }
      } else {
        const int j = a - n_;
        if (ezb[j] == 0) {
          dead = true;
        } else {
          factor *= ezb[j];
          --ezb[j];
        }
      }
    }
    if (dead) continue;
    Complex m = t.c * factor;
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; k < ez[j]; ++k) m *= z[j];
      for (int k = 0; k < ezb[j]; ++k) m *= std::conj(z[j]);
    }
    s += m;
  }
  return s;
}

Jet3 HermitianPoly::jet(const CVector& z, int order) const {
  if (order < 0 || order > 3)
    throw std::invalid_argument("derivative order must be in 0..3");
  Jet3 out(n_, order);
  out.f = eval(z);
  if (order >= 1) {
    for (int a = 0; a < n_; ++a) {
      out.d1[a] = eval_deriv(z, &a, 1);
      out.d1[a + n_] = std::conj(out.d1[a]);
    }
  }
  if (order >= 2) {
    fill_d2_conj_symmetric(out, [&](int a, int b) {
      int codes[2] = {a, b};
      return eval_deriv(z, codes, 2);
    });
  }
  if (order >= 3) {
    fill_d3_conj_symmetric(out, [&](int a, int b, int c) {
      int codes[3] = {a, b, c};
      return eval_deriv(z, codes, 3);
    });
  }
  return out;
}

HermitianPoly HermitianPoly::scaled(double s) const {
  HermitianPoly out = *this;
  for (auto& t : out.terms_) t.c *= s;
  return out;
}

}  // namespace robin

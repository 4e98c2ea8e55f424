#pragma once

#include <vector>

#include "robin/types.hpp"

namespace robin {

// One monomial c * z^ez * zbar^ezb of a real-valued polynomial in (z, zbar).
struct Monomial {
  Complex c;
  std::vector<int> ez;
  std::vector<int> ezb;
};

// Real-valued polynomial in z and conj(z), stored as a Hermitian coefficient
// table: for every stored term (c, e, f) the term (conj(c), f, e) is also
// present, which makes the value real and all conjugation symmetries of the
// derivatives exact.
class HermitianPoly {
 public:
  HermitianPoly() = default;
  HermitianPoly(int n, std::vector<Monomial> terms);

  int dim() const { return n_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  double eval(const CVector& z) const;

  // Wirtinger derivative of given codes (each in [0,2n)), evaluated at z.
  Complex eval_deriv(const CVector& z, const int* codes, int count) const;

  Jet3 jet(const CVector& z, int order) const;

  HermitianPoly scaled(double s) const;

 private:
  int n_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace robin

#pragma once

#include <functional>

#include "robin/types.hpp"

namespace robin {

// Step policy for numerical differentiation of fields that blow up toward
// the boundary: h = max(h_rel * dist, h_min), 4th-order central stencils,
// optionally one Richardson level on top.
struct FdPolicy {
  double h_rel = 0.02;
  double h_min = 1e-4;
  int richardson = 1;

  double step(double dist) const {
    const double h = h_rel * dist;
    return h > h_min ? h : h_min;
  }
};

using RealField = std::function<double(const RVector&)>;

// Nested 4th-order central differences; `axes` lists differentiation axes
// with multiplicity. With richardson=1, combines steps h and h/2.
double fd_partial(const RealField& f, const RVector& x,
                  const std::vector<int>& axes, double h, int richardson);

// All Wirtinger derivatives up to `order` of a real scalar field over C^n,
// assembled from real partials at p. The field is evaluated at interleaved
// real coordinates (x1, y1, ..., xn, yn).
Jet3 wirtinger_fd(const RealField& f, const CVector& p, int order, double h,
                  int richardson);

}  // namespace robin

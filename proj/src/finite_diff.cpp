#include "robin/finite_diff.hpp"

#include <algorithm>

namespace robin {

namespace {

// 4th-order central first derivative along one axis of a nested evaluator.
double d1_stencil(const std::function<double(const RVector&)>& f,
                  const RVector& x, int axis, double h) {
  RVector y = x;
  auto at = [&](double off) {
    y[axis] = x[axis] + off;
    return f(y);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

double nested(const RealField& f, const RVector& x,
              const std::vector<int>& axes, size_t k, double h) {
  if (k == 0) return f(x);
  auto inner = [&](const RVector& y) { return nested(f, y, axes, k - 1, h); };
  return d1_stencil(inner, x, axes[k - 1], h);
}

}  // namespace

double fd_partial(const RealField& f, const RVector& x,
                  const std::vector<int>& axes, double h, int richardson) {
  const double d_h = nested(f, x, axes, axes.size(), h);
  if (richardson <= 0 || axes.empty()) return d_h;
  const double d_h2 = nested(f, x, axes, axes.size(), h / 2);
  // leading error of the 4th-order stencil is O(h^4)
  return (16.0 * d_h2 - d_h) / 15.0;
}

Jet3 wirtinger_fd(const RealField& f, const CVector& p, int order, double h,
                  int richardson) {
  const int n = (int)p.size();
  const int d = 2 * n;
  RVector x(d);
  for (int i = 0; i < n; ++i) {
    x[2 * i] = p[i].real();
    x[2 * i + 1] = p[i].imag();
  }

  Jet3 out(n, order);
  out.f = f(x);
  if (order < 1) return out;

  // real partial tensors (symmetric)
  RVector r1(d);
  for (int i = 0; i < d; ++i) r1[i] = fd_partial(f, x, {i}, h, richardson);

  RMatrix r2;
  std::vector<double> r3;
  if (order >= 2) {
    r2 = RMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        const double v = fd_partial(f, x, {i, j}, h, richardson);
        r2(i, j) = v;
        r2(j, i) = v;
      }
  }
  if (order >= 3) {
    r3.assign(d * d * d, 0.0);
    auto put = [&](int i, int j, int k, double v) {
      int idx[3] = {i, j, k};
      std::sort(idx, idx + 3);
      // fill all permutations
      const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                               {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      for (auto& pm : perms)
        r3[(idx[pm[0]] * d + idx[pm[1]]) * d + idx[pm[2]]] = v;
    };
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        for (int k = j; k < d; ++k)
          put(i, j, k, fd_partial(f, x, {i, j, k}, h, richardson));
  }

  // Wirtinger assembly: d/dz_a = (d/dx_a - i d/dy_a)/2,
  // d/dzbar_a = (d/dx_a + i d/dy_a)/2.
  auto axis_re = [&](int code) { return 2 * windex_base(code, n); };
  auto axis_im = [&](int code) { return 2 * windex_base(code, n) + 1; };
  auto cfac = [&](int code) {
    return windex_bar(code, n) ? Complex(0, 0.5) : Complex(0, -0.5);
  };

  for (int a = 0; a < d; ++a)
    out.d1[a] = 0.5 * r1[axis_re(a)] + cfac(a) * r1[axis_im(a)];

  if (order >= 2) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        Complex s(0, 0);
        for (int ua = 0; ua < 2; ++ua)
          for (int ub = 0; ub < 2; ++ub) {
            const Complex w = (ua ? cfac(a) : Complex(0.5, 0)) *
                              (ub ? cfac(b) : Complex(0.5, 0));
            s += w * r2(ua ? axis_im(a) : axis_re(a),
                        ub ? axis_im(b) : axis_re(b));
          }
        out.d2(a, b) = s;
      }
  }
  if (order >= 3) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) {
          Complex s(0, 0);
          for (int ua = 0; ua < 2; ++ua)
            for (int ub = 0; ub < 2; ++ub)
              for (int uc = 0; uc < 2; ++uc) {
                const Complex w = (ua ? cfac(a) : Complex(0.5, 0)) *
                                  (ub ? cfac(b) : Complex(0.5, 0)) *
                                  (uc ? cfac(c) : Complex(0.5, 0));
                const int i = ua ? axis_im(a) : axis_re(a);
                const int j = ub ? axis_im(b) : axis_re(b);
                const int k = uc ? axis_im(c) : axis_re(c);
                s += w * r3[(i * d + j) * d + k];
              }
          out.d3.at(a, b, c) = s;
        }
  }
  return out;
}

}  // namespace robin

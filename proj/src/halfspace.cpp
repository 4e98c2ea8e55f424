#include "robin/halfspace.hpp"

#include <cmath>

namespace robin {

namespace {

double dist_pow(const CVector& a, const CVector& b, int expo) {
  // |a-b|^expo for even negative exponents via squared norm
  const double r2 = (a - b).squaredNorm();
  return pow_int(r2, expo / 2);
}

double plane_value(const HalfSpaceModel& m, const CVector& p) {
  Complex s(0, 0);
  for (int i = 0; i < m.n; ++i) s += m.b[i] * p[i];
  return 2 * s.real() - 1;
}

}  // namespace

HalfSpaceModel make_halfspace_model(const CVector& b) {
  HalfSpaceModel m;
  m.b = b;
  m.n = (int)b.size();
  m.grad_norm = b.norm();
  if (m.grad_norm == 0) throw std::invalid_argument("normal must be nonzero");
  m.star0 = b.conjugate() / (m.grad_norm * m.grad_norm);
  return m;
}

CVector symmetric_point(const HalfSpaceModel& m, const CVector& p) {
  const double t = plane_value(m, p) / (m.grad_norm * m.grad_norm);
  return p - t * m.b.conjugate();
}

double halfspace_green(const HalfSpaceModel& m, const CVector& p,
                       const CVector& z) {
  if ((z - p).norm() == 0) throw NumericalError("coincident pole");
  const CVector ps = symmetric_point(m, p);
  const int e = -2 * m.n + 2;
  return dist_pow(z, p, e) - dist_pow(z, ps, e);
}

double halfspace_robin(const HalfSpaceModel& m, const CVector& p) {
  const double t = plane_value(m, p);
  if (t == 0) throw NumericalError("Robin function is infinite on the boundary");
  const int e = 2 * m.n - 2;
  return -pow_int(m.grad_norm, e) / pow_int(t, e);
}

Complex g0_eval(const HalfSpaceModel& m, const CVector& w) {
  const CVector& s = m.star0;
  const double r2 = (w - s).squaredNorm();
  if (r2 == 0) throw NumericalError("g0 evaluated at the reflected origin");
  Complex acc = -Complex(s.squaredNorm(), 0);
  for (int i = 0; i < m.n; ++i) acc += s[i] * std::conj(w[i]);
  return pow_int(r2, -m.n) * acc;
}

Complex g0_raw_eval(const HalfSpaceModel& m, const CVector& w) {
  // g + (1/(n-1)) sum w_i dg/dw_i with g(w) = |w|^{-2n+2} - |w-0*|^{-2n+2};
  // the two |w|-singular pieces cancel analytically.
  const int n = m.n;
  const CVector& s = m.star0;
  const double g = dist_pow(w, CVector::Zero(n), -2 * n + 2) -
                   dist_pow(w, s, -2 * n + 2);
  Complex radial(0, 0);
  const double w2n = pow_int(w.squaredNorm(), -n);
  const double ws2n = pow_int((w - s).squaredNorm(), -n);
  for (int i = 0; i < n; ++i) {
    const Complex dg = -(n - 1.0) * (std::conj(w[i]) * w2n -
                                     (std::conj(w[i]) - std::conj(s[i])) * ws2n);
    radial += w[i] * dg;
  }
  return g + radial / (n - 1.0);
}

Complex g0_sum_derivative(const HalfSpaceModel& m, int c) {
  const int n = m.n;
  const int base = windex_base(c, n);
  const bool bar = windex_bar(c, n);
  const double s2n = pow_int(m.star0.squaredNorm(), -n);
  const Complex v = -(2.0 * n - 1.0) * std::conj(m.star0[base]) * s2n;
  return bar ? std::conj(v) : v;
}

Complex g_alpha_eval(const HalfSpaceModel& m, int alpha, const CVector& w) {
  const Complex g0 = g0_eval(m, w);
  return -(m.n - 1.0) * m.b[alpha] * (g0 + std::conj(g0));
}

Complex g_alpha_w_derivative(const HalfSpaceModel& m, int alpha, int c) {
  return -(m.n - 1.0) * m.b[alpha] * g0_sum_derivative(m, c);
}

double variation_f(const Domain& d, const CVector& p, const CVector& w) {
  const DefiningEval ep = d.eval(p, 1);
  const double psi = ep.psi();
  if (psi < -1e-14) {
    return d.psi(p - psi * w) / (-psi);
  }
  // boundary limit: 2 Re sum w_a psi_a(p) - 1
  Complex s(0, 0);
  for (int a = 0; a < d.dim(); ++a) s += w[a] * ep.grad()[a];
  return 2 * s.real() - 1;
}

double variation_f_quadrature(const Domain& d, const CVector& p,
                              const CVector& w, int points) {
  // f(p,w) = 2 Re sum_a int_0^1 w_a psi_a(p - psi(p) t w) dt - 1,
  // by the 16-point Gauss-Legendre rule mapped to [0,1].
  static const double gx[8] = {0.0950125098376374, 0.2816035507792589,
                               0.4580167776572274, 0.6178762444026438,
                               0.7554044083550030, 0.8656312023878318,
                               0.9445750230732326, 0.9894009349916499};
  static const double gw[8] = {0.1894506104550685, 0.1826034150449236,
                               0.1691565193950025, 0.1495959888165767,
                               0.1246289712555339, 0.0951585116824928,
                               0.0622535239386479, 0.0271524594117541};
  if (points != 16)
    throw std::invalid_argument("only the 16-point rule is provided");
  const double psi = d.psi(p);
  double acc = 0;
  for (int k = 0; k < 8; ++k) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      const double t = 0.5 + 0.5 * sgn * gx[k];
      const DefiningEval e = d.eval(p - psi * t * w, 1);
      Complex s(0, 0);
      for (int a = 0; a < d.dim(); ++a) s += w[a] * e.grad()[a];
      acc += 0.5 * gw[k] * 2.0 * s.real();
    }
  }
  return acc - 1.0;
}

Complex variation_df_dp(const Domain& d, const CVector& p, const CVector& zeta,
                        int a) {
  const int n = d.dim();
  const DefiningEval ep = d.eval(p, 1);
  const double psi = ep.psi();
  const Complex psi_a = ep.d1(a);

  if (psi < -1e-14) {
    // f = psi(z)/(-psi(p)), z = p - psi(p) zeta
    const CVector z = p - psi * zeta;
    const DefiningEval ez = d.eval(z, 1);
    Complex radial(0, 0);
    for (int i = 0; i < n; ++i)
      radial += zeta[i] * ez.d1(i) + std::conj(zeta[i]) * ez.d1(i + n);
    const Complex dz_psi = ez.d1(a) - psi_a * radial;
    return dz_psi / (-psi) + ez.psi() * psi_a / (psi * psi);
  }

  // boundary p: z_t = p for all t in the line integral
  const DefiningEval e = d.eval(p, 2);
  Complex first(0, 0);
  for (int i = 0; i < 2 * n; ++i) {
    const Complex zi = i < n ? zeta[i] : std::conj(zeta[i - n]);
    first += zi * e.d2(i, a);
  }
  Complex quad(0, 0);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) {
      const Complex zi = i < n ? zeta[i] : std::conj(zeta[i - n]);
      const Complex zj = j < n ? zeta[j] : std::conj(zeta[j - n]);
      quad += zi * zj * e.d2(i, j);
    }
  return first - 0.5 * psi_a * quad;
}

double variation_dzeta_norm(const Domain& d, const CVector& p,
                            const CVector& zeta) {
  const double psi = d.psi(p);
  const CVector z = p - psi * zeta;
  return d.eval(z, 1).grad_norm();
}

Complex variation_k1(const Domain& d, const CVector& p, const CVector& zeta,
                     int a) {
  return variation_df_dp(d, p, zeta, a) / variation_dzeta_norm(d, p, zeta);
}

}  // namespace robin

#include "robin/metric.hpp"

namespace robin {

MetricData metric_tensor(const RobinEval& re) {
  if (re.order < 2) throw std::invalid_argument("metric needs second derivatives");
  const int n = re.n;
  const double L = re.lambda_big();
  MetricData m;
  m.n = n;
  m.g = CMatrix(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      m.g(a, b) = re.d2(a, b + n) / L - re.d1(a) * re.d1(b + n) / (L * L);
  // enforce exact Hermitian symmetry (kills FD roundoff asymmetry)
  m.g = 0.5 * (m.g + m.g.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.g);
  m.min_eigenvalue = es.eigenvalues().minCoeff();
  m.positive_definite = m.min_eigenvalue > 0;
  return m;
}

void metric_derivative(const RobinEval& re, MetricData& m) {
  if (re.order < 3) throw std::invalid_argument("metric derivative needs third derivatives");
  const int n = re.n;
  const double L = re.lambda_big();
  m.dg.assign(n, CMatrix(n, n));
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const Complex Labc = re.d3(a, b + n, c);
        const Complex Lab = re.d2(a, b + n);
        const Complex Lac = re.d2(a, c);
        const Complex Lbc = re.d2(b + n, c);
        m.dg[c](a, b) = Labc / L -
                        (Lab * re.d1(c) + Lac * re.d1(b + n) + Lbc * re.d1(a)) /
                            (L * L) +
                        2.0 * re.d1(a) * re.d1(b + n) * re.d1(c) / (L * L * L);
      }
}

namespace {

Complex minor_det(const CMatrix& g, int row, int col) {
  const int n = (int)g.rows();
  CMatrix sub(n - 1, n - 1);
  int ii = 0;
  for (int i = 0; i < n; ++i) {
    if (i == row) continue;
    int jj = 0;
    for (int j = 0; j < n; ++j) {
      if (j == col) continue;
      sub(ii, jj++) = g(i, j);
    }
    ++ii;
  }
  if (n == 1) return Complex(1, 0);
  if (n == 2) return sub(0, 0);
  return sub.partialPivLu().determinant();
}

}  // namespace

void inverse_det_cofactors(MetricData& m) {
  const int n = m.n;
  const Complex det_c = m.g.partialPivLu().determinant();
  m.det = det_c.real();
  if (std::abs(det_c.imag()) > 1e-8 * std::abs(det_c))
    throw NumericalError("determinant of a Hermitian matrix must be real");
  if (m.det == 0) throw NumericalError("singular metric");

  m.cofactors = CMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m.cofactors(i, j) = (((i + j) % 2) ? -1.0 : 1.0) * minor_det(m.g, i, j);

  // adjugate / determinant; adj = cofactors^T
  m.g_inv = m.cofactors.transpose() / det_c;

  // row-n cofactor expansion must reproduce the determinant
  Complex expansion(0, 0);
  for (int b = 0; b < n; ++b) expansion += m.g(n - 1, b) * m.cofactors(n - 1, b);
  if (std::abs(expansion - det_c) > 1e-8 * std::abs(det_c))
    throw NumericalError("cofactor expansion disagrees with LU determinant");
}

MetricData metric_data(const RobinEval& re, bool with_derivative) {
  MetricData m = metric_tensor(re);
  inverse_det_cofactors(m);
  if (with_derivative) metric_derivative(re, m);
  return m;
}

double affine_pullback_deviation(const MetricData& g_src,
                                 const MetricData& g_img, const CMatrix& U) {
  const CMatrix pulled = U.transpose() * g_img.g * U.conjugate();
  const double scale = g_src.g.norm();
  return (pulled - g_src.g).norm() / (scale > 0 ? scale : 1.0);
}

}  // namespace robin

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robin/finite_diff.hpp"
#include "robin/metric.hpp"
#include "robin/rng.hpp"

using namespace robin;

namespace {

CVector cpoint(std::initializer_list<Complex> entries) {
  CVector v((int)entries.size());
  int i = 0;
  for (const auto& e : entries) v[i++] = e;
  return v;
}

}  // namespace

TEST_CASE("metric of the ball at the center is 2(n-1) I") {
  for (int n : {2, 3}) {
    auto ball = make_ball(n, 1.0);
    auto backend = make_ball_robin(n, 1.0);
    const RobinEval re = robin_derivatives(*backend, *ball, CVector::Zero(n), 2);
    const MetricData md = metric_tensor(re);
    CHECK((md.g - (2.0 * n - 2.0) * CMatrix::Identity(n, n)).norm() < 1e-12);
    CHECK(md.positive_definite);
  }
}

TEST_CASE("half-space metric is rank one and flagged") {
  const CVector b = cpoint({Complex(0, 0), Complex(1, 0)});
  auto backend = make_halfspace_robin(b);
  auto spec = make_halfspace(b);
  const CVector p = cpoint({Complex(0.2, 0.1), Complex(-0.4, 0.2)});
  const RobinEval re = robin_derivatives(*backend, *spec, p, 2);
  const MetricData md = metric_tensor(re);
  CHECK(!md.positive_definite);
  CHECK(std::abs(md.g(0, 0)) < 1e-13);
  CHECK(std::abs(md.g(0, 1)) < 1e-13);
  const double t = 2 * p[1].real() - 1;
  CHECK(md.g(1, 1).real() == doctest::Approx(2.0 / (t * t)));
}

TEST_CASE("scaled identities along the inner normal of the ball") {
  for (int n : {2, 3}) {
    auto ball = make_ball(n, 1.0);
    auto backend = make_ball_robin(n, 1.0);
    const double m = 2.0 * n - 2.0;
    for (double t : {0.1, 0.5, 0.9, 0.999}) {
      CVector p = CVector::Zero(n);
      p[n - 1] = t;
      const RobinEval re = robin_derivatives(*backend, *ball, p, 2);
      MetricData md = metric_tensor(re);
      inverse_det_cofactors(md);
      const double psi = ball->psi(p);
      CHECK(md.g(n - 1, n - 1).real() * psi * psi ==
            doctest::Approx(m).epsilon(1e-12));
      const double sign = (n % 2 == 0) ? -1.0 : 1.0;
      CHECK(md.det * pow_int(psi, n + 1) ==
            doctest::Approx(sign * pow_int(m, n)).epsilon(1e-11));
      CHECK(md.g_inv(n - 1, n - 1).real() / (psi * psi) ==
            doctest::Approx(1.0 / m).epsilon(1e-11));
    }
  }
}

TEST_CASE("derivative tensor: zero at the center, symmetric, matches fd") {
  const int n = 2;
  auto ball = make_ball(n, 1.0);
  auto backend = make_ball_robin(n, 1.0);

  {
    const RobinEval re = robin_derivatives(*backend, *ball, CVector::Zero(n), 3);
    MetricData md = metric_data(re, true);
    for (const auto& plane : md.dg) CHECK(plane.norm() < 1e-13);
  }

  SeededRng rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const CVector p = 0.6 * rng.uniform() * rng.complex_gaussian(n).normalized();
    const RobinEval re = robin_derivatives(*backend, *ball, p, 3);
    MetricData md = metric_data(re, true);

    // Kahler symmetry dg[c](a,b) = dg[a](c,b)
    double sym = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          sym = std::max(sym, std::abs(md.dg[c](a, b) - md.dg[a](c, b)));
    CHECK(sym < 1e-10);

    // finite difference of the metric entries along p_c
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          auto re_field = [&](const RVector& x) {
            CVector z(n);
            for (int k = 0; k < n; ++k) z[k] = Complex(x[2 * k], x[2 * k + 1]);
            const RobinEval r2 = robin_derivatives(*backend, *ball, z, 2);
            return metric_tensor(r2).g(a, b).real();
          };
          auto im_field = [&](const RVector& x) {
            CVector z(n);
            for (int k = 0; k < n; ++k) z[k] = Complex(x[2 * k], x[2 * k + 1]);
            const RobinEval r2 = robin_derivatives(*backend, *ball, z, 2);
            return metric_tensor(r2).g(a, b).imag();
          };
          RVector x(2 * n);
          for (int k = 0; k < n; ++k) {
            x[2 * k] = p[k].real();
            x[2 * k + 1] = p[k].imag();
          }
          const Complex dre(fd_partial(re_field, x, {2 * c}, 1e-3, 1),
                            fd_partial(im_field, x, {2 * c}, 1e-3, 1));
          const Complex dim(fd_partial(re_field, x, {2 * c + 1}, 1e-3, 1),
                            fd_partial(im_field, x, {2 * c + 1}, 1e-3, 1));
          const Complex fd = 0.5 * (dre - Complex(0, 1) * dim);
          CHECK(std::abs(fd - md.dg[c](a, b)) <=
                1e-7 * std::max(1.0, std::abs(md.dg[c](a, b))));
        }
  }
}

TEST_CASE("inverse, determinant, cofactors") {
  // hand-checkable 2x2 case: g = 2I
  MetricData md;
  md.n = 2;
  md.g = 2.0 * CMatrix::Identity(2, 2);
  inverse_det_cofactors(md);
  CHECK(md.det == doctest::Approx(4.0));
  CHECK((md.g_inv - 0.5 * CMatrix::Identity(2, 2)).norm() < 1e-14);
  CHECK(std::abs(md.cofactors(0, 0) - Complex(2, 0)) < 1e-14);

  // random Hermitian positive definite, n = 3
  SeededRng rng(29);
  CMatrix a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
  md.n = 3;
  md.g = a * a.adjoint() + CMatrix::Identity(3, 3);
  inverse_det_cofactors(md);
  CHECK((md.g * md.g_inv - CMatrix::Identity(3, 3)).norm() < 1e-10);
  // adjugate relation det * g_inv = cofactors^T
  CHECK((md.det * md.g_inv - md.cofactors.transpose()).norm() <
        1e-8 * std::abs(md.det));
}

TEST_CASE("metric is independent of the defining-function scaling") {
  // replacing psi by c psi changes lambda_small but not the metric
  const int n = 2;
  auto ball = make_ball(n, 1.0);
  auto scaled = make_transformed(ball, AffineMap{CVector::Zero(n),
                                                 CMatrix::Identity(n, n), 3.7});
  auto backend = make_ball_robin(n, 1.0);
  const CVector p = cpoint({Complex(0.2, 0.1), Complex(-0.3, 0.05)});
  const RobinEval r1 = robin_derivatives(*backend, *ball, p, 2);
  const RobinEval r2 = robin_derivatives(*backend, *scaled, p, 2);
  CHECK(r1.lambda_small != doctest::Approx(r2.lambda_small));
  CHECK((metric_tensor(r1).g - metric_tensor(r2).g).norm() == 0.0);
}

TEST_CASE("affine pullback under a closed-form rotation") {
  const int n = 2;
  auto ball = make_ball(n, 1.0);
  auto backend = make_ball_robin(n, 1.0);
  SeededRng rng(37);

  // random unitary from gram-schmidt on a random complex matrix
  CMatrix raw(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) raw(i, j) = Complex(rng.normal(), rng.normal());
  const Eigen::HouseholderQR<CMatrix> qr(raw);
  CMatrix U = qr.householderQ();

  AffineMap am;
  am.b = CVector::Zero(n);
  am.A = U.adjoint();
  am.scale = 1.0;
  auto rotated = make_transformed(ball, am);
  auto rotated_backend = make_transformed_robin(backend, am);

  for (int i = 0; i < 5; ++i) {
    CVector p = 0.7 * rng.uniform() * rng.complex_gaussian(n).normalized();
    const RobinEval rs = robin_derivatives(*backend, *ball, p, 2);
    const RobinEval ri = robin_derivatives(*rotated_backend, *rotated, U * p, 2);
    CHECK(affine_pullback_deviation(metric_tensor(rs), metric_tensor(ri), U) <
          1e-10);
  }
}

TEST_CASE("degenerate determinant diagnosis at the boundary") {
  // the naive product psi_a psi_bbar has rank one, while the scaled limit of
  // det(g) is nonzero
  const int n = 3;
  auto ball = make_ball(n, 1.0);
  CVector q = CVector::Zero(n);
  q[n - 1] = 1;
  const DefiningEval eq = ball->eval(q, 1);
  CMatrix naive(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) naive(a, b) = eq.d1(a) * std::conj(eq.d1(b));
  const Eigen::JacobiSVD<CMatrix> svd(naive);
  int rank = 0;
  for (int i = 0; i < n; ++i)
    if (svd.singularValues()[i] > 1e-12) ++rank;
  CHECK(rank == 1);

  auto backend = make_ball_robin(n, 1.0);
  CVector p = q;
  p[n - 1] = 0.999;
  const RobinEval re = robin_derivatives(*backend, *ball, p, 2);
  MetricData md = metric_tensor(re);
  inverse_det_cofactors(md);
  const double psi = ball->psi(p);
  CHECK(std::abs(md.det * pow_int(psi, n + 1)) > 1.0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robin/domain.hpp"
#include "robin/finite_diff.hpp"
#include "robin/rng.hpp"

using namespace robin;

namespace {

CVector cpoint(std::initializer_list<Complex> entries) {
  CVector v((int)entries.size());
  int i = 0;
  for (const auto& e : entries) v[i++] = e;
  return v;
}

// analytic derivatives vs central differences with one Richardson level
void check_fd_consistency(const Domain& d, const CVector& p, double tol) {
  const int n = d.dim();
  const DefiningEval e = d.eval(p, 3);
  auto field = [&](const RVector& x) {
    CVector z(n);
    for (int k = 0; k < n; ++k) z[k] = Complex(x[2 * k], x[2 * k + 1]);
    return d.psi(z);
  };
  const Jet3 fd = wirtinger_fd(field, p, 3, 1e-2, 1);
  for (int a = 0; a < 2 * n; ++a) {
    CHECK(std::abs(fd.d1[a] - e.d1(a)) <= tol * std::max(1.0, std::abs(e.d1(a))));
    for (int b = 0; b < 2 * n; ++b) {
      CHECK(std::abs(fd.d2(a, b) - e.d2(a, b)) <=
            tol * std::max(1.0, std::abs(e.d2(a, b))));
      for (int c = 0; c < 2 * n; ++c)
        CHECK(std::abs(fd.d3.at(a, b, c) - e.d3(a, b, c)) <=
              tol * std::max(1.0, std::abs(e.d3(a, b, c))));
    }
  }
}

}  // namespace

TEST_CASE("ball defining function values") {
  auto ball = make_ball(3, 1.0);
  const CVector zero = CVector::Zero(3);
  DefiningEval e = ball->eval(zero, 1);
  CHECK(e.psi() == doctest::Approx(-1.0));
  CHECK(e.grad().norm() == doctest::Approx(0.0));

  CVector q = CVector::Zero(3);
  q[2] = 1;
  e = ball->eval(q, 1);
  CHECK(e.psi() == doctest::Approx(0.0));
  CHECK(std::abs(e.grad()[2] - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(e.grad()[0]) < 1e-14);
}

TEST_CASE("ellipsoid defining function values") {
  auto ell = make_ellipsoid({2.0, 1.0});
  const CVector p = cpoint({Complex(0.5, 0), Complex(0, 0)});
  const DefiningEval e = ell->eval(p, 1);
  CHECK(e.psi() == doctest::Approx(-0.5));
  CHECK(std::abs(e.d1(0) - Complex(1.0, 0)) < 1e-14);
}

TEST_CASE("unsupported evaluation order") {
  auto ball = make_ball(2, 1.0);
  CHECK_THROWS(ball->eval(CVector::Zero(2), 4));
}

TEST_CASE("conjugation symmetry is exact") {
  SeededRng rng(7);
  for (auto d : {make_ball(2, 1.0), make_ellipsoid({2.0, 1.0}),
                 make_perturbed_ball(2, 0.1, 0), make_perturbed_ball(2, 0.1, 1)}) {
    for (int i = 0; i < 10; ++i) {
      CVector p = 0.5 * rng.complex_gaussian(2).normalized() * rng.uniform();
      const DefiningEval e = d->eval(p, 2);
      for (int a = 0; a < 2; ++a) {
        CHECK(e.d1(a + 2) == std::conj(e.d1(a)));
        for (int b = 0; b < 2; ++b)
          CHECK(e.d2(a, b + 2) == std::conj(e.d2(a + 2, b)));
      }
    }
  }
}

TEST_CASE("finite-difference cross-check of all builtin kinds") {
  SeededRng rng(11);
  std::vector<DomainPtr> domains = {
      make_ball(2, 1.0),
      make_ellipsoid({2.0, 1.0}),
      make_perturbed_ball(2, 0.08, 0),
      make_perturbed_ball(2, 0.08, 2),
      make_halfspace(cpoint({Complex(0, 0), Complex(1, 0)})),
  };
  // a polynomial kind with third derivatives: cross terms on top of the ball
  std::vector<Monomial> terms{
      {Complex(1, 0), {1, 0}, {1, 0}},
      {Complex(1, 0), {0, 1}, {0, 1}},
      {Complex(-1, 0), {0, 0}, {0, 0}},
      {Complex(0.2, 0.1), {2, 1}, {0, 0}},
      {Complex(0.1, 0), {1, 1}, {0, 1}},
  };
  domains.push_back(make_polynomial(2, terms, CVector::Zero(2)));

  for (const auto& d : domains) {
    for (int i = 0; i < 3; ++i) {
      const CVector p = 0.4 * rng.uniform() * rng.complex_gaussian(2).normalized();
      check_fd_consistency(*d, p, 1e-7);
    }
  }
}

TEST_CASE("levi form") {
  auto ball = make_ball(2, 1.0);
  const CVector p = cpoint({Complex(0.3, 0.1), Complex(0, 0.2)});
  CVector v = cpoint({Complex(1, 0), Complex(0, 0)});
  CHECK(levi_form(ball->eval(p, 2), v) == doctest::Approx(1.0));
  CHECK(levi_form(ball->eval(p, 2), CVector::Zero(2)) == doctest::Approx(0.0));

  auto ell = make_ellipsoid({2.0, 1.0});
  CHECK(levi_form(ell->eval(p, 2), v) == doctest::Approx(2.0));
}

TEST_CASE("strong pseudoconvexity check") {
  const auto ball_rep = strong_pseudoconvexity_check(*make_ball(2, 1.0), 100, 3);
  CHECK(ball_rep.pass);
  CHECK(ball_rep.min_levi == doctest::Approx(1.0).epsilon(1e-10));

  const auto ell_rep =
      strong_pseudoconvexity_check(*make_ellipsoid({2.0, 1.0}), 400, 3);
  CHECK(ell_rep.pass);
  CHECK(ell_rep.min_levi == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(ell_rep.min_levi >= 1.0 - 1e-6);

  CHECK_THROWS_AS(strong_pseudoconvexity_check(
                      *make_halfspace(cpoint({Complex(0, 0), Complex(1, 0)})),
                      10, 3),
                  NumericalError);
}

TEST_CASE("boundary projection on the ball") {
  auto ball = make_ball(3, 1.0);
  CVector p = CVector::Zero(3);
  p[2] = 0.9;
  const auto proj = boundary_project(*ball, p);
  CHECK(proj.distance == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(std::abs(proj.point[2] - Complex(1, 0)) < 1e-9);
  CHECK(proj.psi_residual < 1e-10);
  CHECK(proj.unique);

  // degenerate center: some boundary point at distance 1, flagged non-unique
  const auto center = boundary_project(*ball, CVector::Zero(3));
  CHECK(center.distance == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(!center.unique);
}

TEST_CASE("boundary projection on the ellipsoid satisfies the Lagrange condition") {
  auto ell = make_ellipsoid({2.0, 1.0});
  const CVector p = cpoint({Complex(0.6, 0), Complex(0, 0)});
  const auto proj = boundary_project(*ell, p);
  CHECK(proj.psi_residual < 1e-10);
  CHECK(proj.alignment_residual < 1e-8);

  // tangential perturbations of the foot point never decrease the distance
  SeededRng rng(5);
  const DefiningEval eq = ell->eval(proj.point, 1);
  const CVector nrm = outward_normal(eq);
  for (int i = 0; i < 20; ++i) {
    CVector t = rng.complex_gaussian(2);
    Complex ip(0, 0);
    for (int k = 0; k < 2; ++k) ip += t[k] * std::conj(nrm[k]);
    t -= ip.real() * nrm;  // real-orthogonal part
    t /= t.norm();
    const CVector moved = project_to_boundary_near(*ell, proj.point + 1e-4 * t);
    CHECK((moved - p).norm() >= proj.distance - 1e-12);
  }
}

TEST_CASE("dagger normalization of the ball at the pole") {
  auto ball = make_ball(2, 1.0);
  CVector q = CVector::Zero(2);
  q[1] = 1;
  auto [map, nspec] = normalize_dagger(ball, q);

  CHECK((map.U * map.U.adjoint() - CMatrix::Identity(2, 2)).norm() < 1e-12);

  const DefiningEval e0 = nspec->eval(CVector::Zero(2), 1);
  CHECK(std::abs(e0.psi()) < 1e-14);
  CHECK(std::abs(e0.grad()[1] - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(e0.grad()[0]) < 1e-12);

  // psi_tilde(w) = |w|^2 + 2 Re w_n
  SeededRng rng(2);
  for (int i = 0; i < 5; ++i) {
    const CVector w = 0.3 * rng.complex_gaussian(2);
    const double expected = w.squaredNorm() + 2 * w[1].real();
    CHECK(nspec->psi(w) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("dagger normalization rotates an off-axis gradient onto e_n") {
  auto ball = make_ball(3, 1.0);
  CVector q = CVector::Zero(3);
  q[0] = 1;
  auto [map, nspec] = normalize_dagger(ball, q);
  const DefiningEval e0 = nspec->eval(CVector::Zero(3), 1);
  CHECK(std::abs(e0.grad()[2] - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(e0.grad()[0]) < 1e-12);
  CHECK(std::abs(e0.grad()[1]) < 1e-12);
}

TEST_CASE("dagger normalization is idempotent") {
  auto ball = make_ball(2, 1.0);
  CVector q = CVector::Zero(2);
  q[1] = 1;
  auto [map1, nspec] = normalize_dagger(ball, q);
  auto [map2, renorm] = normalize_dagger(nspec, CVector::Zero(2));
  CHECK((map2.U - CMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK(map2.q.norm() < 1e-12);
  CHECK(map2.scale == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rescaled domain") {
  auto ball = make_ball(2, 1.0);

  // at the center the map is the identity
  const auto map0 = rescale_domain(*ball, CVector::Zero(2));
  CHECK(map0.factor == doctest::Approx(1.0));
  auto image0 = rescaled_image(ball, map0);
  SeededRng rng(9);
  for (int i = 0; i < 5; ++i) {
    const CVector w = 0.7 * rng.uniform() * rng.complex_gaussian(2).normalized();
    CHECK(image0->psi(w) == doctest::Approx(ball->psi(w)).epsilon(1e-12));
  }

  // near the boundary the image approaches {2 Re w_n < 1}
  const double delta = 1e-3;
  CVector p = CVector::Zero(2);
  p[1] = 1 - delta;
  const auto map1 = rescale_domain(*ball, p);
  auto image1 = rescaled_image(ball, map1);
  for (int i = 0; i < 5; ++i) {
    const CVector w = rng.complex_gaussian(2).normalized();
    const double halfspace_value = 2 * (std::conj(p[1]) * w[1]).real() - 1;
    CHECK(std::abs(image1->psi(w) - halfspace_value) < 20 * delta);
  }

  CHECK_THROWS(rescale_domain(*ball, cpoint({Complex(2, 0), Complex(0, 0)})));
}

TEST_CASE("affine invariance of the defining jet transform") {
  // transformed evaluation agrees with direct evaluation through the map
  auto ell = make_ellipsoid({2.0, 1.0});
  AffineMap am;
  am.b = cpoint({Complex(0.1, 0.05), Complex(-0.02, 0.03)});
  CMatrix A(2, 2);
  A << Complex(0.8, 0.1), Complex(0.1, -0.2), Complex(-0.1, 0.15), Complex(0.9, 0);
  am.A = A;
  am.scale = 1.7;
  auto t = make_transformed(ell, am);
  SeededRng rng(3);
  for (int i = 0; i < 4; ++i) {
    const CVector w = 0.3 * rng.complex_gaussian(2);
    CHECK(t->psi(w) ==
          doctest::Approx(ell->psi(am.b + A * w) / am.scale).epsilon(1e-12));
    check_fd_consistency(*t, w, 1e-6);
  }
}

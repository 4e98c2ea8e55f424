#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robin/moments.hpp"
#include "robin/rng.hpp"

using namespace robin;

TEST_CASE("rational arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(3, 4) * Rational(2, 9) == Rational(1, 6));
  CHECK((Rational(1, 2) / Rational(1, 4)) == Rational(2));
  CHECK(Rational(-1, -2) == Rational(1, 2));
  CHECK(Rational(1, -2).num == -1);
}

TEST_CASE("sphere areas") {
  CHECK(sphere_area(2).value() == doctest::Approx(2 * M_PI));
  CHECK(sphere_area(3).value() == doctest::Approx(4 * M_PI));
  CHECK(sphere_area(4).value() == doctest::Approx(2 * M_PI * M_PI));
  CHECK(sphere_area(6).value() == doctest::Approx(M_PI * M_PI * M_PI));
}

TEST_CASE("radial integrals against direct quadrature") {
  // crude trapezoid sanity check of I(m, k)
  auto direct = [](int m, int k) {
    double acc = 0;
    const double dr = 1e-4;
    for (double r = dr / 2; r < 60.0; r += dr)
      acc += std::pow(r, m) * std::pow(r * r + 0.25, -k) * dr;
    return acc;
  };
  CHECK(radial_integral(0, 3).value() == doctest::Approx(direct(0, 3)).epsilon(1e-6));
  CHECK(radial_integral(2, 4).value() == doctest::Approx(direct(2, 4)).epsilon(1e-6));
  CHECK(radial_integral(4, 7).value() == doctest::Approx(direct(4, 7)).epsilon(1e-6));
}

TEST_CASE("exact moment values") {
  for (int n = 2; n <= 4; ++n) {
    CHECK(moment_exact(MomentKind::XConst, n) == Rational(2));
    CHECK(moment_exact(MomentKind::AConst, n) == Rational(1, 2 * n));
    CHECK(moment_exact(MomentKind::BConst, n) == Rational(2 * (2 * n + 1), n));
    CHECK(moment_exact(MomentKind::ZetaN4n, n) == Rational(1));
    CHECK(moment_exact(MomentKind::AbsZnSq, n) == Rational(n + 1, n));
    CHECK(moment_exact(MomentKind::ZbarSq, n) == Rational(1));
    CHECK(moment_exact(MomentKind::TangentSq, n) == Rational(1, n));
    CHECK(moment_exact(MomentKind::MixedZero, n) == Rational(0));
  }
}

TEST_CASE("moment consistency web") {
  for (int n = 2; n <= 4; ++n) {
    const Rational A = moment_exact(MomentKind::AConst, n);
    const Rational B = moment_exact(MomentKind::BConst, n);
    CHECK(B * Rational(1, 4) - A == moment_exact(MomentKind::ZbarSq, n));
    CHECK(B * Rational(1, 4) + A == moment_exact(MomentKind::AbsZnSq, n));
    CHECK(A * Rational(2 * n) == moment_exact(MomentKind::ZetaN4n, n));
  }
}

TEST_CASE("monte carlo agrees with exact within 4 standard errors") {
  for (int n = 2; n <= 4; ++n) {
    for (int k = 0; k < kMomentKindCount; ++k) {
      const auto kind = static_cast<MomentKind>(k);
      const auto est = moment_mc(kind, n, 200000, split_seed(99, 16 * n + k));
      const double exact = moment_exact(kind, n).value();
      const double err = std::abs(est.value - Complex(exact, 0));
      INFO(moment_kind_name(kind), " n=", n, " err=", err, " se=", est.stderr_);
      CHECK(err <= 4 * est.stderr_);
      CHECK(est.stderr_ > 0);
    }
  }
}

TEST_CASE("monte carlo is deterministic per seed") {
  const auto a = moment_mc(MomentKind::XConst, 2, 5000, 1234);
  const auto b = moment_mc(MomentKind::XConst, 2, 5000, 1234);
  CHECK(a.value == b.value);
  CHECK(a.stderr_ == b.stderr_);
  const auto c = moment_mc(MomentKind::XConst, 2, 5000, 1235);
  CHECK(a.value != c.value);

  // sharded estimate is independent of the worker count
  const auto s1 = moment_mc_sharded(MomentKind::BConst, 2, 40000, 7, 8, 1);
  const auto s4 = moment_mc_sharded(MomentKind::BConst, 2, 40000, 7, 8, 4);
  CHECK(s1.value == s4.value);
  CHECK(s1.stderr_ == s4.stderr_);
}

namespace {

DefiningEval hess_eval(int n,
                       const std::vector<std::tuple<int, int, Complex>>& entries) {
  DefiningEval e;
  e.jet = Jet3(n, 2);
  e.jet.d1[n - 1] = 1;
  e.jet.d1[2 * n - 1] = 1;
  for (const auto& [a, b, v] : entries) {
    e.jet.d2(a, b) = v;
    e.jet.d2(b, a) = v;
    e.jet.d2(windex_conj(a, n), windex_conj(b, n)) = std::conj(v);
    e.jet.d2(windex_conj(b, n), windex_conj(a, n)) = std::conj(v);
  }
  return e;
}

}  // namespace

TEST_CASE("lambda_a quadrature vs closed form") {
  // n=2, psi_{1n} = 0.3, psi_{1 nbar} = 0.1 -> -(n-1)*0.4 = -0.4
  {
    const auto e = hess_eval(2, {{0, 1, {0.3, 0}}, {0, 3, {0.1, 0}}});
    CHECK(std::abs(lambda_a_closed(e, 0) - Complex(-0.4, 0)) < 1e-15);
    const auto est = lambda_a_quadrature(e, 0, 200000, 4242);
    CHECK(std::abs(est.value - Complex(-0.4, 0)) <= 5 * est.stderr_);
  }
  // zero kernel
  {
    const auto e = hess_eval(2, {});
    const auto est = lambda_a_quadrature(e, 0, 10000, 4243);
    CHECK(std::abs(est.value) <= 1e-12);
  }
  // n=3, psi_{1n} = 1 -> -2
  {
    const auto e = hess_eval(3, {{0, 2, {1, 0}}});
    CHECK(std::abs(lambda_a_closed(e, 0) - Complex(-2, 0)) < 1e-15);
    const auto est = lambda_a_quadrature(e, 0, 200000, 4244);
    CHECK(std::abs(est.value - Complex(-2, 0)) <= 5 * est.stderr_);
  }
  // complex-valued hessian row, barred index
  {
    const auto e = hess_eval(2, {{2, 1, {0.2, 0.1}}, {2, 3, {-0.1, 0.05}}});
    const Complex target = lambda_a_closed(e, 2);
    const auto est = lambda_a_quadrature(e, 2, 200000, 4245);
    CHECK(std::abs(est.value - target) <= 5 * est.stderr_);
  }
  // index n is outside the hypothesis
  {
    const auto e = hess_eval(2, {});
    CHECK_THROWS(lambda_a_quadrature(e, 1, 10000, 1));
    CHECK_THROWS(lambda_a_quadrature(e, 3, 10000, 1));
  }
}

TEST_CASE("mixed second derivative quadrature vs the two closed cases") {
  const int n = 2;
  // case c != n: psi_{1bar 1} = 1 -> -(n-1) = -1
  {
    const auto e = hess_eval(n, {{2, 0, {1, 0}}});
    CHECK(std::abs(mixed_second_derivative_closed(e, 0, 0) - Complex(-1, 0)) <
          1e-15);
    const auto est = mixed_second_derivative_quadrature(e, 0, 0, 200000, 777);
    CHECK(std::abs(est.value - Complex(-1, 0)) <= 5 * est.stderr_);
  }
  // case c = n with psi_{1bar n} = 1 -> -(n-1)(n+1/2) = -2.5
  {
    const auto e = hess_eval(n, {{2, 1, {1, 0}}});
    CHECK(std::abs(mixed_second_derivative_closed(e, 1, 0) - Complex(-2.5, 0)) <
          1e-15);
    const auto est = mixed_second_derivative_quadrature(e, 1, 0, 400000, 778);
    CHECK(std::abs(est.value - Complex(-2.5, 0)) <= 5 * est.stderr_);
  }
  // case c = n with psi_{1bar nbar} = 1 -> -(n-1)(n-1/2) = -1.5
  {
    const auto e = hess_eval(n, {{2, 3, {1, 0}}});
    CHECK(std::abs(mixed_second_derivative_closed(e, 1, 0) - Complex(-1.5, 0)) <
          1e-15);
    const auto est = mixed_second_derivative_quadrature(e, 1, 0, 400000, 779);
    CHECK(std::abs(est.value - Complex(-1.5, 0)) <= 5 * est.stderr_);
  }
  // all second derivatives zero
  {
    const auto e = hess_eval(n, {});
    const auto est = mixed_second_derivative_quadrature(e, 0, 0, 10000, 780);
    CHECK(std::abs(est.value) < 1e-12);
  }
  // invalid beta
  {
    const auto e = hess_eval(n, {});
    CHECK_THROWS(mixed_second_derivative_quadrature(e, 0, n - 1, 10000, 1));
  }
}

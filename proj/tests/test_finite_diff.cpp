#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "robin/finite_diff.hpp"

using namespace robin;

TEST_CASE("nested stencils on a polynomial are near-exact") {
  // f(x,y) = x^3 y + 2 x y^2
  RealField f = [](const RVector& x) {
    return x[0] * x[0] * x[0] * x[1] + 2 * x[0] * x[1] * x[1];
  };
  RVector x(2);
  x << 1.2, -0.7;
  CHECK(fd_partial(f, x, {0}, 1e-2, 1) ==
        doctest::Approx(3 * 1.2 * 1.2 * (-0.7) + 2 * 0.49).epsilon(1e-10));
  CHECK(fd_partial(f, x, {0, 1}, 1e-2, 1) ==
        doctest::Approx(3 * 1.2 * 1.2 + 4 * (-0.7)).epsilon(1e-9));
  CHECK(fd_partial(f, x, {0, 0, 1}, 1e-2, 1) ==
        doctest::Approx(6 * 1.2).epsilon(1e-7));
}

TEST_CASE("wirtinger assembly matches hand values for |z|^2 and Re z^2") {
  // f(z) = |z_1|^2 + Re(z_1^2): f_1 = zbar_1 + z_1, f_{1 1bar} = 1, f_{11} = 1
  RealField f = [](const RVector& x) {
    return x[0] * x[0] + x[1] * x[1] + (x[0] * x[0] - x[1] * x[1]);
  };
  CVector p(1);
  p[0] = Complex(0.4, -0.3);
  const Jet3 jet = wirtinger_fd(f, p, 2, 1e-3, 1);
  const Complex expected_d1 = std::conj(p[0]) + p[0];
  CHECK(std::abs(jet.d1[0] - expected_d1) < 1e-9);
  CHECK(std::abs(jet.d1[1] - std::conj(expected_d1)) < 1e-9);
  CHECK(std::abs(jet.d2(0, 1) - Complex(1, 0)) < 1e-8);
  CHECK(std::abs(jet.d2(0, 0) - Complex(1, 0)) < 1e-8);
}

TEST_CASE("wirtinger third derivatives of a cubic") {
  // f = Re(z^3): f_{111} = 3! / 2^0... derivative d^3/dz^3 of (z^3+zbar^3)/2 = 3
  RealField f = [](const RVector& x) {
    const Complex z(x[0], x[1]);
    return (z * z * z + std::conj(z * z * z)).real() / 2.0;
  };
  CVector p(1);
  p[0] = Complex(0.2, 0.1);
  const Jet3 jet = wirtinger_fd(f, p, 3, 1e-2, 1);
  CHECK(std::abs(jet.d3.at(0, 0, 0) - Complex(3, 0)) < 1e-7);
  CHECK(std::abs(jet.d3.at(0, 0, 1)) < 1e-7);
  CHECK(std::abs(jet.d3.at(1, 1, 1) - Complex(3, 0)) < 1e-7);
}

TEST_CASE("richardson level improves a stiff profile") {
  // f(t) = (1 - t)^{-2} near t = 0.9: relative accuracy of f'
  RealField f = [](const RVector& x) { return std::pow(1.0 - x[0], -2.0); };
  RVector x(1);
  x << 0.9;
  const double exact = 2.0 * std::pow(0.1, -3.0);
  const double plain = fd_partial(f, x, {0}, 5e-3, 0);
  const double extrapolated = fd_partial(f, x, {0}, 5e-3, 1);
  CHECK(std::abs(extrapolated - exact) < std::abs(plain - exact));
  CHECK(std::abs(extrapolated - exact) / exact < 1e-7);
}

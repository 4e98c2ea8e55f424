#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robin/geodesic.hpp"
#include "robin/rng.hpp"

using namespace robin;

namespace {

CVector cpoint(std::initializer_list<Complex> entries) {
  CVector v((int)entries.size());
  int i = 0;
  for (const auto& e : entries) v[i++] = e;
  return v;
}

MetricSource ball_source(int n) {
  return MetricSource{make_ball_robin(n, 1.0), make_ball(n, 1.0),
                      DerivMode::Analytic, FdPolicy{}};
}

}  // namespace

TEST_CASE("acceleration vanishes at the center and is radial on a radius") {
  const auto src = ball_source(2);
  CHECK(geodesic_accel(src, CVector::Zero(2),
                       cpoint({Complex(1, 0), Complex(0.3, 0.2)}))
            .norm() < 1e-13);

  const CVector p = cpoint({Complex(0.3, 0), Complex(0, 0)});
  const CVector a = geodesic_accel(src, p, cpoint({Complex(1, 0), Complex(0, 0)}));
  CHECK(std::abs(a[1]) < 1e-13);
  CHECK(std::abs(a[0].imag()) < 1e-13);
  CHECK(a[0].real() < 0);  // decelerates toward the boundary
}

TEST_CASE("degenerate half-space metric is refused") {
  const CVector b = cpoint({Complex(0, 0), Complex(1, 0)});
  MetricSource src{make_halfspace_robin(b), make_halfspace(b),
                   DerivMode::Analytic, FdPolicy{}};
  CHECK_THROWS_AS(geodesic_accel(src, cpoint({Complex(0, 0), Complex(-0.2, 0)}),
                                 cpoint({Complex(1, 0), Complex(0, 0)})),
                  NumericalError);
}

TEST_CASE("real-form equivalence: complexified equation matches the real one") {
  // assemble the real 4x4 metric G_R from g and differentiate it numerically;
  // the real geodesic equation must reproduce the complexified acceleration
  const auto src = ball_source(2);
  const int n = 2;
  auto real_metric = [&](const RVector& x) {
    CVector z(n);
    for (int k = 0; k < n; ++k) z[k] = Complex(x[2 * k], x[2 * k + 1]);
    const RobinEval re = robin_derivatives(*src.backend, *src.spec, z, 2);
    const CMatrix g = metric_tensor(re).g;
    RMatrix GR(2 * n, 2 * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double A = g(a, b).real(), B = g(a, b).imag();
        // 2 Re sum g_{ab-} dz_a dzbar_b in coordinates (x1,y1,x2,y2)
        GR(2 * a, 2 * b) = 2 * A;
        GR(2 * a + 1, 2 * b + 1) = 2 * A;
        GR(2 * a, 2 * b + 1) = 2 * B;
        GR(2 * a + 1, 2 * b) = -2 * B;
      }
    return GR;
  };

  const CVector p = cpoint({Complex(0.25, 0.1), Complex(-0.1, 0.2)});
  const CVector v = cpoint({Complex(0.4, -0.3), Complex(0.2, 0.5)});
  RVector x(2 * n), vx(2 * n);
  for (int k = 0; k < n; ++k) {
    x[2 * k] = p[k].real();
    x[2 * k + 1] = p[k].imag();
    vx[2 * k] = v[k].real();
    vx[2 * k + 1] = v[k].imag();
  }

  // real Christoffels by central differences of G_R
  const int d = 2 * n;
  const double h = 1e-4;
  std::vector<RMatrix> dG(d);
  for (int i = 0; i < d; ++i) {
    RVector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    dG[i] = (real_metric(xp) - real_metric(xm)) / (2 * h);
  }
  const RMatrix G0 = real_metric(x);
  RVector rhs = RVector::Zero(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        rhs[i] += 0.5 * (dG[j](i, k) + dG[k](i, j) - dG[i](j, k)) * vx[j] * vx[k];
  const RVector accel_real = -G0.ldlt().solve(rhs);

  const CVector accel_c = geodesic_accel(src, p, v);
  for (int k = 0; k < n; ++k) {
    CHECK(accel_real[2 * k] == doctest::Approx(accel_c[k].real()).epsilon(1e-6));
    CHECK(accel_real[2 * k + 1] == doctest::Approx(accel_c[k].imag()).epsilon(1e-6));
  }
}

TEST_CASE("integration basics") {
  const auto src = ball_source(2);

  // zero velocity stays put
  {
    GeodesicState s0{cpoint({Complex(0.2, 0.1), Complex(0, 0)}),
                     CVector::Zero(2), 0};
    IntegrateOptions io;
    io.T = 1.0;
    const Trajectory tr = integrate(src, s0, io);
    CHECK((tr.states.back().p - s0.p).norm() < 1e-12);
  }

  // a radial start stays on the real axis
  {
    GeodesicState s0{CVector::Zero(2), cpoint({Complex(1, 0), Complex(0, 0)}), 0};
    IntegrateOptions io;
    io.T = 3.0;
    const Trajectory tr = integrate(src, s0, io);
    for (const auto& st : tr.states) {
      CHECK(std::abs(st.p[0].imag()) < 1e-9);
      CHECK(std::abs(st.p[1]) < 1e-9);
    }
    CHECK(tr.states.back().p[0].real() < 1.0);
  }

  // energy conservation on a generic trajectory
  {
    GeodesicState s0{cpoint({Complex(0.2, 0.0), Complex(0.1, 0.05)}),
                     cpoint({Complex(0.3, 0.1), Complex(-0.2, 0.4)}), 0};
    IntegrateOptions io;
    io.T = 5.0;
    const Trajectory tr = integrate(src, s0, io);
    const double e0 = src.energy(tr.states.front().p, tr.states.front().v);
    for (const auto& st : tr.states)
      CHECK(std::abs(src.energy(st.p, st.v) - e0) / e0 < 1e-8 * io.T);
  }
}

TEST_CASE("time reversal") {
  const auto src = ball_source(2);
  GeodesicState s0{cpoint({Complex(0.1, 0.2), Complex(-0.2, 0.1)}),
                   cpoint({Complex(0.5, -0.1), Complex(0.2, 0.3)}), 0};
  IntegrateOptions io;
  io.T = 2.0;
  io.output_times = {2.0};
  const Trajectory fwd = integrate(src, s0, io);
  GeodesicState back{fwd.states.back().p, -fwd.states.back().v, 0};
  const Trajectory rev = integrate(src, back, io);
  CHECK((rev.states.back().p - s0.p).norm() < 1e-7);
  CHECK((rev.states.back().v + s0.v).norm() < 1e-7);
}

TEST_CASE("unitary equivariance of trajectories") {
  const auto src = ball_source(2);
  SeededRng rng(43);
  CMatrix raw(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) raw(i, j) = Complex(rng.normal(), rng.normal());
  const CMatrix U = Eigen::HouseholderQR<CMatrix>(raw).householderQ();

  GeodesicState s0{cpoint({Complex(0.3, 0.05), Complex(-0.1, 0.15)}),
                   cpoint({Complex(0.2, 0.4), Complex(0.5, -0.3)}), 0};
  GeodesicState s0u{U * s0.p, U * s0.v, 0};
  IntegrateOptions io;
  io.T = 2.0;
  io.output_times = {0.5, 1.0, 1.5, 2.0};
  const Trajectory a = integrate(src, s0, io);
  const Trajectory b = integrate(src, s0u, io);
  REQUIRE(a.states.size() == b.states.size());
  for (size_t i = 0; i < a.states.size(); ++i)
    CHECK((U * a.states[i].p - b.states[i].p).norm() < 1e-8);
}

TEST_CASE("substitution formula for (psi o gamma)''") {
  const auto src = ball_source(2);
  auto ball = src.spec;

  // at the center with tangential v = e_1: 0 + 0 + 2*Levi = 2
  {
    GeodesicState s{CVector::Zero(2), cpoint({Complex(1, 0), Complex(0, 0)}), 0};
    CHECK(psi_second_derivative(*ball, src, s) == doctest::Approx(2.0));
  }
  // zero velocity
  {
    GeodesicState s{cpoint({Complex(0.3, 0), Complex(0, 0)}), CVector::Zero(2), 0};
    CHECK(psi_second_derivative(*ball, src, s) == doctest::Approx(0.0));
  }
  // near-boundary tangential launch stays within 5% of the limit 2
  {
    CVector q = CVector::Zero(2);
    q[1] = 1;
    const GeodesicState s =
        tangential_launch(*ball, q, 1e-3, cpoint({Complex(1, 0), Complex(0, 0)}));
    const double val = psi_second_derivative(*ball, src, s);
    CHECK(std::abs(val - 2.0) <= 0.1);
    CHECK(std::abs(psi_first_derivative(*ball, s)) < 1e-10);
  }
}

TEST_CASE("tangential launch projects and normalizes") {
  auto ball = make_ball(2, 1.0);
  CVector q = CVector::Zero(2);
  q[1] = 1;
  // direction with a normal component gets projected
  const GeodesicState s = tangential_launch(
      *ball, q, 0.1, cpoint({Complex(0.5, 0.3), Complex(0.4, -0.2)}));
  CHECK(s.v.norm() == doctest::Approx(1.0));
  CHECK(std::abs(psi_first_derivative(*ball, s)) < 1e-10);
  CHECK(std::abs(s.p[1] - Complex(0.9, 0)) < 1e-14);

  // purely normal direction cannot be projected
  CHECK_THROWS(tangential_launch(*ball, q, 0.1,
                                 cpoint({Complex(0, 0), Complex(1, 0)})));
}

TEST_CASE("band scan certifies positivity on the ball") {
  const auto src = ball_source(2);
  const BandScanReport rep = band_scan(*src.spec, src, {0.05, 0.1, 0.2}, 6, 10,
                                       12345, CVector::Zero(2));
  CHECK(rep.negatives == 0);
  CHECK(rep.certified_epsilon == doctest::Approx(0.2));
  CHECK(rep.epsilon1 == doctest::Approx(0.1));  // min(0.2, 1)/2
  CHECK(rep.records.size() == 3 * 6 * 10);
  for (const auto& rec : rep.records) {
    CHECK(std::abs(rec.dpsi) < 1e-10);
    CHECK(rec.d2psi > 0);
  }
}

TEST_CASE("escape certificate") {
  const auto src = ball_source(2);

  // radial geodesic: psi monotone, no interior maximum
  {
    GeodesicState s0{CVector::Zero(2), cpoint({Complex(1, 0), Complex(0, 0)}), 0};
    IntegrateOptions io;
    io.T = 3.0;
    const Trajectory tr = integrate(src, s0, io);
    const EscapeVerdict v = escape_certificate(*src.spec, src, tr, 0.1);
    CHECK(v.pass);
    CHECK(v.maxima.empty());
  }

  // tangential launch: psi o gamma has a minimum at t = 0 and then grows
  // monotonically (no interior maximum anywhere on the ball)
  {
    const CVector q = cpoint({Complex(0, 0), Complex(1, 0)});
    GeodesicState s0 = tangential_launch(*src.spec, q, 0.35,
                                         cpoint({Complex(1, 0), Complex(0, 0)}));
    IntegrateOptions io;
    io.T = 6.0;
    const Trajectory tr = integrate(src, s0, io);
    const EscapeVerdict v = escape_certificate(*src.spec, src, tr, 0.1);
    CHECK(v.pass);
    CHECK(v.maxima.empty());
    CHECK(src.spec->psi(tr.states.back().p) > src.spec->psi(s0.p));
  }

  // synthetic out-and-back trajectory: the certificate must locate the
  // turning point and judge it against the band level
  {
    Trajectory synth;
    for (int i = 0; i <= 40; ++i) {
      const double t = i / 40.0;
      GeodesicState st;
      st.p = CVector::Zero(2);
      // radius rises to 0.8 and falls back
      st.p[0] = 0.8 * std::sin(M_PI * t);
      st.v = cpoint({Complex(1, 0), Complex(0, 0)});
      st.t = t;
      synth.states.push_back(st);
    }
    // max radius 0.8 -> psi = -0.36: inside an eps1 = 0.5 band, outside 0.1
    const EscapeVerdict tight = escape_certificate(*src.spec, src, synth, 0.5);
    CHECK(!tight.pass);
    REQUIRE(!tight.maxima.empty());
    CHECK(tight.maxima.front().psi == doctest::Approx(-0.36).epsilon(1e-6));
    const EscapeVerdict loose = escape_certificate(*src.spec, src, synth, 0.1);
    CHECK(loose.pass);
    CHECK(!loose.maxima.empty());
  }

  // constant path: no maxima
  {
    GeodesicState s0{cpoint({Complex(0.2, 0), Complex(0, 0)}), CVector::Zero(2), 0};
    IntegrateOptions io;
    io.T = 1.0;
    const Trajectory tr = integrate(src, s0, io);
    const EscapeVerdict v = escape_certificate(*src.spec, src, tr, 0.1);
    CHECK(v.pass);
    CHECK(v.maxima.empty());
  }
}

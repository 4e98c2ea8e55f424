#include "robin/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "robin/asymptotics.hpp"
#include "robin/config.hpp"
#include "robin/geodesic.hpp"
#include "robin/halfspace.hpp"
#include "robin/metric.hpp"
#include "robin/moments.hpp"
#include "robin/rng.hpp"

namespace robin {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

// Hessian data at the normalized boundary origin, for the quadrature
// oracles: entries are (code_a, code_b, value) of psi_{ab}.
DefiningEval eval_with_hessian(
    int n, const std::vector<std::tuple<int, int, Complex>>& entries) {
  DefiningEval e;
  e.jet = Jet3(n, 2);
  e.jet.d1[n - 1] = 1;           // dpsi(0) = (0,...,0,1)
  e.jet.d1[2 * n - 1] = 1;
  for (const auto& [a, b, v] : entries) {
    e.jet.d2(a, b) = v;
    e.jet.d2(b, a) = v;
    // conjugation partner
    const int ac = windex_conj(a, n), bc = windex_conj(b, n);
    e.jet.d2(ac, bc) = std::conj(v);
    e.jet.d2(bc, ac) = std::conj(v);
  }
  return e;
}

// Two-pass finite differences against an MFS model: records the stencil,
// solves all poles in one blocked least-squares pass, then re-runs the
// stencil against the cached values.
Jet3 mfs_fd_jet(const MfsModel& model, const CVector& p, int order, double h,
                int richardson) {
  const int n = (int)p.size();
  std::vector<RVector> points;
  RealField recorder = [&](const RVector& x) {
    points.push_back(x);
    return 1.0;
  };
  (void)wirtinger_fd(recorder, p, order, h, richardson);

  auto key_of = [](const RVector& x) {
    return std::string(reinterpret_cast<const char*>(x.data()),
                       sizeof(double) * x.size());
  };
  std::unordered_map<std::string, double> cache;
  std::vector<CVector> poles;
  std::vector<std::string> keys;
  for (const auto& x : points) {
    std::string k = key_of(x);
    if (cache.emplace(k, 0.0).second) {
      CVector z(n);
      for (int i = 0; i < n; ++i) z[i] = Complex(x[2 * i], x[2 * i + 1]);
      poles.push_back(std::move(z));
      keys.push_back(std::move(k));
    }
  }
  const std::vector<double> values = mfs_robin_batch(model, poles);
  for (size_t i = 0; i < keys.size(); ++i) cache[keys[i]] = values[i];
  RealField lookup = [&](const RVector& x) { return cache.at(key_of(x)); };
  return wirtinger_fd(lookup, p, order, h, richardson);
}

RobinEval mfs_robin_eval(const MfsModel& model, const Domain& spec,
                         const CVector& p, int order, const FdPolicy& policy) {
  RobinEval out;
  out.n = spec.dim();
  out.order = order;
  const double dist = boundary_distance(spec, p);
  if (dist < model.trust_floor)
    throw NumericalError("point inside the refused band");
  out.lam = mfs_fd_jet(model, p, order, policy.step(dist), policy.richardson);
  out.lambda_small = out.lam.f * pow_int(spec.psi(p), 2 * spec.dim() - 2);
  return out;
}

CVector unit(std::initializer_list<Complex> entries) {
  CVector v((int)entries.size());
  int i = 0;
  for (const auto& e : entries) v[i++] = e;
  return v / v.norm();
}

// ---------------------------------------------------------------------------
// criterion 1: hyperplane moment integrals, exact and Monte Carlo
CriterionResult criterion_moments(const AcceptanceOptions& opts) {
  CriterionResult r{1, "moment-integrals", true, "", 0};
  std::ostringstream detail;
  double worst_margin = 0;
  double slowest = 0;
  for (int n = 2; n <= 4; ++n) {
    const Rational expected[] = {
        Rational(1),            // ZetaN4n
        Rational(2),            // XConst
        Rational(1, 2 * n),     // AConst
        Rational(2 * (2 * n + 1), n),
        Rational(n + 1, n),     // AbsZnSq
        Rational(1),            // ZbarSq
        Rational(1, n),         // TangentSq
        Rational(0),
    };
    for (int k = 0; k < kMomentKindCount; ++k) {
      const auto kind = static_cast<MomentKind>(k);
      if (!(moment_exact(kind, n) == expected[k])) {
        r.pass = false;
        detail << " exact mismatch " << moment_kind_name(kind) << " n=" << n
               << ";";
      }
      const auto t0 = Clock::now();
      const auto est = moment_mc_sharded(kind, n, 1000000,
                                         split_seed(opts.seed, 16 * n + k), 8,
                                         opts.threads);
      const double dt = seconds_since(t0);
      slowest = std::max(slowest, dt);
      const double err = std::abs(est.value - Complex(expected[k].value(), 0));
      const double z = err / est.stderr_;
      worst_margin = std::max(worst_margin, z);
      if (err > 4 * est.stderr_) {
        r.pass = false;
        detail << " mc outlier " << moment_kind_name(kind) << " n=" << n
               << " z=" << fmt(z) << ";";
      }
      if (dt > 30) {
        r.pass = false;
        detail << " slow kind " << moment_kind_name(kind) << " (" << fmt(dt)
               << "s);";
      }
    }
  }
  detail << " worst z=" << fmt(worst_margin) << ", slowest kind "
         << fmt(slowest) << "s";
  r.detail = detail.str();
  return r;
}

// criterion 2: lambda_a(0) quadrature vs closed form
CriterionResult criterion_lambda_a(const AcceptanceOptions& opts) {
  CriterionResult r{2, "lambda-a-quadrature", true, "", 0};
  std::ostringstream detail;
  struct Case {
    int n;
    Complex psi_1n, psi_1nbar;
  };
  const Case cases[] = {{2, {0.3, 0}, {0.1, 0}}, {3, {1, 0}, {0, 0}}};
  double worst = 0;
  for (const auto& c : cases) {
    const auto e = eval_with_hessian(
        c.n, {{0, c.n - 1, c.psi_1n}, {0, 2 * c.n - 1, c.psi_1nbar}});
    const Complex closed = lambda_a_closed(e, 0);
    const auto est =
        lambda_a_quadrature(e, 0, 1000000, split_seed(opts.seed, 100 + c.n));
    const double rel = std::abs(est.value - closed) / std::abs(closed);
    worst = std::max(worst, rel);
    if (rel > 0.02) {
      r.pass = false;
      detail << " n=" << c.n << " rel=" << fmt(rel) << ";";
    }
  }
  detail << " worst rel err=" << fmt(worst);
  r.detail = detail.str();
  return r;
}

// criterion 3: mixed second-derivative quadrature vs the two closed cases
CriterionResult criterion_mixed_quadrature(const AcceptanceOptions& opts) {
  CriterionResult r{3, "mixed-derivative-quadrature", true, "", 0};
  std::ostringstream detail;
  const int n = 2;
  struct Case {
    const char* tag;
    int c;
    std::vector<std::tuple<int, int, Complex>> hess;
    // expected filled from the closed form
  };
  const Case cases[] = {
      {"caseI", 0, {{n, 0, Complex(1, 0)}}},
      {"caseII-holo", n - 1, {{n, n - 1, Complex(1, 0)}}},
      {"caseII-anti", n - 1, {{n, 2 * n - 1, Complex(1, 0)}}},
  };
  double worst = 0;
  int idx = 0;
  for (const auto& c : cases) {
    const auto e = eval_with_hessian(n, c.hess);
    const Complex closed = mixed_second_derivative_closed(e, c.c, 0);
    const auto est = mixed_second_derivative_quadrature(
        e, c.c, 0, 1000000, split_seed(opts.seed, 200 + idx++));
    const double rel = std::abs(est.value - closed) / std::abs(closed);
    worst = std::max(worst, rel);
    if (rel > 0.02) {
      r.pass = false;
      detail << " " << c.tag << " rel=" << fmt(rel) << ";";
    }
  }
  detail << " worst rel err=" << fmt(worst);
  r.detail = detail.str();
  return r;
}

// criterion 4: fundamental-solutions backend against the ball closed form
CriterionResult criterion_mfs_vs_ball(const AcceptanceOptions& opts) {
  CriterionResult r{4, "mfs-vs-ball", true, "", 0};
  const auto t0 = Clock::now();
  const int n = 2;
  auto ball = make_ball(n, 1.0);
  MfsOptions mo;
  mo.collocation = 1400;
  mo.charges = 800;
  mo.seed = split_seed(opts.seed, 400);
  const MfsModel model = mfs_build(ball, mo);
  const auto closed = make_ball_robin(n, 1.0);

  const CVector dirs[5] = {
      unit({Complex(1, 0), Complex(0, 0)}), unit({Complex(0, 0), Complex(1, 0)}),
      unit({Complex(1, 0), Complex(1, 0)}), unit({Complex(0, 1), Complex(1, 0)}),
      unit({Complex(0.6, 0.8), Complex(0, 0)})};
  double worst = 0;
  for (int ri = 0; ri < 5; ++ri) {
    const double rad = 0.12 * (ri + 1);
    for (const auto& d : dirs) {
      const CVector p = rad * d;
      const double exact = closed->lambda(p);
      const double approx = mfs_robin(model, p);
      worst = std::max(worst, std::abs(approx - exact) / std::abs(exact));
    }
  }
  const double dt = seconds_since(t0);
  if (worst > 1e-5 || dt > 120) r.pass = false;
  r.detail = " max rel err=" + fmt(worst) + " over 25 points, " + fmt(dt) +
             "s (limit 120s), base residual=" + fmt(model.base_residual);
  return r;
}

// criterion 5: exact scaled identities on the normalized ball
CriterionResult criterion_ball_identities(const AcceptanceOptions&) {
  CriterionResult r{5, "ball-exact-identities", true, "", 0};
  std::ostringstream detail;
  double worst = 0;
  for (int n = 2; n <= 3; ++n) {
    CVector q = CVector::Zero(n);
    q[n - 1] = 1;
    auto [map, nspec] = normalize_dagger(make_ball(n, 1.0), q);
    auto backend = backend_for_domain(nspec, "ball", MfsOptions{});
    const double m = 2.0 * n - 2.0;
    for (const double delta : {0.3, 0.1, 0.01, 1e-4}) {
      CVector p = CVector::Zero(n);
      p[n - 1] = -delta;
      const RobinEval re = robin_derivatives(*backend, *nspec, p, 2);
      MetricData md = metric_tensor(re);
      inverse_det_cofactors(md);
      const double psi = nspec->psi(p);
      const double id1 = re.lambda_big() * pow_int(psi, 2 * n - 2) + 1.0;
      const double id2 = md.g(n - 1, n - 1).real() * psi * psi - m;
      const double sign = (n % 2 == 0) ? -1.0 : 1.0;
      const double id3 = md.det * pow_int(psi, n + 1) - sign * pow_int(m, n);
      const double id4 = md.g_inv(n - 1, n - 1).real() / (psi * psi) - 1.0 / m;
      const double rel = std::max({std::abs(id1), std::abs(id2) / m,
                                   std::abs(id3) / pow_int(m, n),
                                   std::abs(id4) * m});
      worst = std::max(worst, rel);
      if (rel > 1e-12) {
        r.pass = false;
        detail << " n=" << n << " delta=" << delta << " rel=" << fmt(rel) << ";";
      }
    }
  }
  detail << " worst residual=" << fmt(worst);
  r.detail = detail.str();
  return r;
}

// criterion 6: corollary limits on the normalized ball, derivatives by
// finite differences of the closed-form Robin function
CriterionResult criterion_corollary_limits(const AcceptanceOptions&) {
  CriterionResult r{6, "corollary-limits-fd", true, "", 0};
  const auto t0 = Clock::now();
  std::ostringstream detail;
  const std::vector<double> deltas = {3e-2, 1e-2, 3e-3, 1e-3};
  double worst = 0;
  for (int n = 2; n <= 3; ++n) {
    CVector q = CVector::Zero(n);
    q[n - 1] = 1;
    auto [map, nspec] = normalize_dagger(make_ball(n, 1.0), q);
    auto backend = backend_for_domain(nspec, "ball", MfsOptions{});
    const int nc = n - 1;  // code of the index n
    const std::vector<KindSpec> kinds = {
        {AsymptoticKind::LA1, {nc, -1, -1}},
        {AsymptoticKind::LA2, {nc, nc, -1}},
        {AsymptoticKind::LA3, {nc, nc, nc}},
        {AsymptoticKind::DG_SCALE, {nc, nc, nc}},
        {AsymptoticKind::FINE_LA1, {0, -1, -1}},
        {AsymptoticKind::FINE_LA2, {0, n, -1}},
        {AsymptoticKind::FINE_G, {0, 0, -1}},
        {AsymptoticKind::THIRD_LA, {nc, 0, 0}},
        {AsymptoticKind::THIRD_LA, {0, 0, nc}},
        {AsymptoticKind::DG_FINE, {nc, 0, 0}},
        {AsymptoticKind::DG_FINE, {0, 0, nc}},
    };
    CVector zero = CVector::Zero(n);
    for (const auto& ks : kinds) {
      const auto rep =
          convergence_report(ks, *nspec, *backend, zero, deltas,
                             DerivMode::FiniteDifference, FdPolicy{}, 0.02);
      const double scale = std::max(1.0, std::abs(rep.target));
      worst = std::max(worst, rep.final_err / scale);
      if (!rep.pass) {
        r.pass = false;
        detail << " " << asymptotic_kind_name(ks.kind) << "(n=" << n
               << ") err=" << fmt(rep.final_err) << " order=" << fmt(rep.est_order)
               << ";";
      }
    }
  }
  const double dt = seconds_since(t0);
  if (dt > 60) r.pass = false;
  detail << " worst rel err=" << fmt(worst) << ", " << fmt(dt) << "s (limit 60s)";
  r.detail = detail.str();
  return r;
}

// criterion 7: MFS pipeline boundary asymptotics on the ellipsoid
CriterionResult criterion_mfs_asymptotics(const AcceptanceOptions& opts) {
  CriterionResult r{7, "mfs-ellipsoid-gscale", true, "", 0};
  const int n = 2;
  auto ell = make_ellipsoid({2.0, 1.0});
  CVector inner(n);
  inner << Complex(0, 0), Complex(0.95, 0);
  const CVector q = boundary_project(*ell, inner).point;

  MfsOptions mo;
  mo.collocation = 1400;
  mo.charges = 800;
  mo.seed = split_seed(opts.seed, 700);
  mo.near = MfsNearAnchor{q, 0.05};
  auto model = std::make_shared<MfsModel>(mfs_build(ell, mo));

  const DefiningEval eq = ell->eval(q, 2);
  const KindSpec ks{AsymptoticKind::G_SCALE, {n - 1, n - 1, -1}};
  const Complex target = evaluate_limit(ks, eq, n);

  double final_rel = 0;
  std::vector<double> errs;
  for (const double delta : {0.2, 0.1, 0.05}) {
    const CVector p = normal_sequence(*ell, q, {delta})[0];
    const RobinEval re = mfs_robin_eval(*model, *ell, p, 2, FdPolicy{});
    const DefiningEval at_p = ell->eval(p, 1);
    const Complex val = scaled_quantity(ks, *ell, re, at_p);
    errs.push_back(std::abs(val - target));
    final_rel = std::abs(val - target) / std::abs(target);
  }
  const bool shrinking = errs.front() > errs.back();
  if (final_rel > 0.05 || !shrinking) r.pass = false;
  r.detail = " target=" + fmt(target.real()) + ", rel err at delta=0.05: " +
             fmt(final_rel) + (shrinking ? " (errors shrinking)" : " (not shrinking)");
  return r;
}

// criterion 8: geodesic integrator quality on the ball
CriterionResult criterion_geodesics(const AcceptanceOptions& opts) {
  CriterionResult r{8, "geodesics-ball", true, "", 0};
  std::ostringstream detail;
  const int n = 2;
  MetricSource src{make_ball_robin(n, 1.0), make_ball(n, 1.0),
                   DerivMode::Analytic, FdPolicy{}};

  // energy drift over T = 5
  {
    GeodesicState s0;
    s0.p = CVector(n);
    s0.p << Complex(0.2, 0.0), Complex(0.1, 0.05);
    s0.v = CVector(n);
    s0.v << Complex(0.3, 0.1), Complex(-0.2, 0.4);
    IntegrateOptions io;
    io.T = 5;
    const Trajectory traj = integrate(src, s0, io);
    const double e0 = src.energy(traj.states.front().p, traj.states.front().v);
    double drift = 0;
    for (const auto& st : traj.states)
      drift = std::max(drift, std::abs(src.energy(st.p, st.v) - e0) / e0);
    if (traj.truncated || drift > 1e-8 * io.T) {
      r.pass = false;
      detail << " drift=" << fmt(drift) << ";";
    } else {
      detail << " drift=" << fmt(drift) << " over T=5;";
    }
  }

  // substitution formula vs second difference of psi along the flow
  {
    SeededRng rng(split_seed(opts.seed, 800));
    double worst = 0;
    const double tau = 2e-3;
    for (int i = 0; i < 100; ++i) {
      CVector p = rng.complex_gaussian(n);
      p *= 0.7 * std::pow(rng.uniform(), 1.0 / (2 * n)) / p.norm();
      CVector v = rng.complex_gaussian(n);
      v /= v.norm();
      GeodesicState s0{p, v, 0};
      IntegrateOptions io;
      io.T = tau;
      io.output_times = {tau};
      const Trajectory fwd = integrate(src, s0, io);
      GeodesicState s0b{p, -v, 0};
      const Trajectory bwd = integrate(src, s0b, io);
      const double psi0 = src.spec->psi(p);
      const double psif = src.spec->psi(fwd.states.back().p);
      const double psib = src.spec->psi(bwd.states.back().p);
      const double fd2 = (psif - 2 * psi0 + psib) / (tau * tau);
      const double formula = psi_second_derivative(*src.spec, src, s0);
      worst = std::max(worst,
                       std::abs(fd2 - formula) / std::max(1.0, std::abs(formula)));
    }
    if (worst > 1e-4) {
      r.pass = false;
      detail << " lemma fd mismatch=" << fmt(worst) << ";";
    } else {
      detail << " lemma-vs-fd worst=" << fmt(worst) << ";";
    }
  }

  // a radial start stays on the real axis
  {
    GeodesicState s0;
    s0.p = CVector::Zero(n);
    s0.v = CVector::Zero(n);
    s0.v[0] = 1;
    IntegrateOptions io;
    io.T = 3;
    const Trajectory traj = integrate(src, s0, io);
    double off = 0;
    for (const auto& st : traj.states) {
      double o = std::abs(st.p[0].imag());
      for (int j = 1; j < n; ++j) o += std::abs(st.p[j]);
      off = std::max(off, o);
    }
    if (off > 1e-9) {
      r.pass = false;
      detail << " radial off-axis=" << fmt(off) << ";";
    } else {
      detail << " radial off-axis=" << fmt(off);
    }
  }
  r.detail = detail.str();
  return r;
}

// criterion 9: tangential second-derivative limit and the band scan
CriterionResult criterion_band_scan(const AcceptanceOptions& opts) {
  CriterionResult r{9, "band-scan", true, "", 0};
  const auto t0 = Clock::now();
  std::ostringstream detail;
  const int n = 2;
  auto ball = make_ball(n, 1.0);
  MetricSource src{make_ball_robin(n, 1.0), ball, DerivMode::Analytic,
                   FdPolicy{}};

  // normalized tangential launch at depth 1e-3: limit 2 psi_{1 1bar}(0) = 2
  {
    CVector q = CVector::Zero(n);
    q[n - 1] = 1;
    CVector u = CVector::Zero(n);
    u[0] = 1;
    const GeodesicState st = tangential_launch(*ball, q, 1e-3, u);
    const double val = psi_second_derivative(*ball, src, st) / st.v.squaredNorm();
    if (std::abs(val - 2.0) > 0.05 * 2.0) {
      r.pass = false;
      detail << " limit value=" << fmt(val) << ";";
    } else {
      detail << " (psi o gamma)''/|v|^2=" << fmt(val) << ";";
    }
  }

  // scan: 3 grid levels x 14 boundary points x 24 directions = 1008 launches
  CVector p0 = CVector::Zero(n);
  const BandScanReport rep =
      band_scan(*ball, src, {0.05, 0.1, 0.2}, 24, 14,
                split_seed(opts.seed, 900), p0);
  const double dt = seconds_since(t0);
  if (rep.negatives != 0 || rep.certified_epsilon <= 0 ||
      (int)rep.records.size() < 1000 || dt > 120) {
    r.pass = false;
  }
  detail << " launches=" << rep.records.size()
         << ", negatives=" << rep.negatives
         << ", certified eps=" << fmt(rep.certified_epsilon)
         << ", eps1=" << fmt(rep.epsilon1) << ", " << fmt(dt) << "s";
  r.detail = detail.str();
  return r;
}

// criterion 10: property suites
CriterionResult criterion_properties(const AcceptanceOptions& opts) {
  CriterionResult r{10, "property-suites", true, "", 0};
  std::ostringstream detail;
  const int n = 2;

  auto ball = make_ball(n, 1.0);
  auto ball_backend = make_ball_robin(n, 1.0);
  auto ell = make_ellipsoid({2.0, 1.0});

  MfsOptions mo;
  mo.collocation = 1200;
  mo.charges = 700;
  mo.seed = split_seed(opts.seed, 1000);
  auto ball_model = std::make_shared<MfsModel>(mfs_build(ball, mo));
  mo.seed = split_seed(opts.seed, 1001);
  auto ell_model = std::make_shared<MfsModel>(mfs_build(ell, mo));

  // strict plurisubharmonicity: min eigenvalue of g over random points
  {
    double min_eig_closed = 1e300, min_eig_mfs = 1e300;
    SeededRng rng(split_seed(opts.seed, 1002));
    for (int i = 0; i < 1000; ++i) {
      CVector p = rng.complex_gaussian(n);
      p *= 0.85 * std::pow(rng.uniform(), 1.0 / (2 * n)) / p.norm();
      const RobinEval re = robin_derivatives(*ball_backend, *ball, p, 2);
      min_eig_closed = std::min(min_eig_closed, metric_tensor(re).min_eigenvalue);

      const CVector pe = 0.9 * p;  // also interior for the ellipsoid
      for (const auto& [model, dom] :
           {std::pair{ball_model, ball}, std::pair{ell_model, ell}}) {
        if (boundary_distance(*dom, pe) < model->trust_floor + 0.01) continue;
        const RobinEval rm = mfs_robin_eval(*model, *dom, pe, 2, FdPolicy{});
        min_eig_mfs = std::min(min_eig_mfs, metric_tensor(rm).min_eigenvalue);
      }
    }
    if (min_eig_closed <= 0 || min_eig_mfs <= 0) {
      r.pass = false;
      detail << " psh failure;";
    }
    detail << " min eig closed=" << fmt(min_eig_closed)
           << " mfs=" << fmt(min_eig_mfs) << ";";
  }

  // conjugation / Hermitian symmetry of the derivative data
  {
    SeededRng rng(split_seed(opts.seed, 1003));
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
      CVector p = rng.complex_gaussian(n);
      p *= 0.8 * rng.uniform() / p.norm();
      const RobinEval re = robin_derivatives(*ball_backend, *ball, p, 2);
      for (int a = 0; a < n; ++a) {
        worst = std::max(worst,
                         std::abs(re.d1(a + n) - std::conj(re.d1(a))));
        for (int b = 0; b < n; ++b)
          worst = std::max(worst, std::abs(re.d2(a, b + n) -
                                           std::conj(re.d2(b, a + n))));
      }
      const DefiningEval de = ball->eval(p, 2);
      for (int a = 0; a < n; ++a)
        worst = std::max(worst, std::abs(de.d1(a + n) - std::conj(de.d1(a))));
    }
    if (worst > 1e-10) {
      r.pass = false;
      detail << " conjugation residual=" << fmt(worst) << ";";
    } else {
      detail << " conjugation residual=" << fmt(worst) << ";";
    }
  }

  // affine pullback: closed form under a rotation, MFS under rotation and
  // under the axis swap between the two ellipsoid labelings
  {
    CMatrix U(n, n);
    const double th = 0.7;
    U << Complex(std::cos(th), 0), Complex(-std::sin(th), 0.0),
        Complex(std::sin(th), 0), Complex(std::cos(th), 0);
    // mix in a complex phase to exercise the unitary (not just orthogonal) case
    U.col(0) *= Complex(std::cos(0.3), std::sin(0.3));
    AffineMap am;
    am.b = CVector::Zero(n);
    am.A = U.adjoint();  // z = U^* w  <=>  w = U z
    am.scale = 1.0;

    auto rotated_ball_backend = make_transformed_robin(ball_backend, am);
    double worst_closed = 0;
    for (const double rad : {0.2, 0.5}) {
      CVector p(n);
      p << Complex(rad, 0.1), Complex(-0.1, rad / 2);
      const RobinEval rs = robin_derivatives(*ball_backend, *ball, p, 2);
      const CVector w = U * p;
      auto rotated_ball = make_transformed(ball, am);
      const RobinEval ri = robin_derivatives(*rotated_ball_backend, *rotated_ball, w, 2);
      worst_closed = std::max(
          worst_closed, affine_pullback_deviation(metric_tensor(rs),
                                                  metric_tensor(ri), U));
    }

    double worst_mfs = 0;
    {
      // same ball seen through the rotation; MFS on both sides
      auto rotated_ball = make_transformed(ball, am);
      MfsOptions mr = mo;
      mr.seed = split_seed(opts.seed, 1004);
      auto rot_model = std::make_shared<MfsModel>(mfs_build(rotated_ball, mr));
      CVector p(n);
      p << Complex(0.3, 0.05), Complex(0.1, -0.2);
      const RobinEval rs = mfs_robin_eval(*ball_model, *ball, p, 2, FdPolicy{});
      const RobinEval ri =
          mfs_robin_eval(*rot_model, *rotated_ball, U * p, 2, FdPolicy{});
      worst_mfs = std::max(worst_mfs,
                           affine_pullback_deviation(metric_tensor(rs),
                                                     metric_tensor(ri), U));
    }
    {
      // ellipsoid(2,1) -> ellipsoid(1,2) under the axis swap
      auto ell12 = make_ellipsoid({1.0, 2.0});
      CMatrix S = CMatrix::Zero(n, n);
      S(0, 1) = 1;
      S(1, 0) = 1;
      AffineMap swap_map;
      swap_map.b = CVector::Zero(n);
      swap_map.A = S;  // z = S w (S is its own inverse)
      swap_map.scale = 1.0;
      MfsOptions ms = mo;
      ms.seed = split_seed(opts.seed, 1005);
      auto ell12_model = std::make_shared<MfsModel>(mfs_build(ell12, ms));
      CVector p(n);
      p << Complex(0.25, 0.1), Complex(-0.15, 0.3);
      const RobinEval rs = mfs_robin_eval(*ell_model, *ell, p, 2, FdPolicy{});
      const RobinEval ri =
          mfs_robin_eval(*ell12_model, *ell12, S * p, 2, FdPolicy{});
      worst_mfs = std::max(worst_mfs,
                           affine_pullback_deviation(metric_tensor(rs),
                                                     metric_tensor(ri), S));
    }
    if (worst_closed > 1e-10 || worst_mfs > 1e-4) {
      r.pass = false;
      detail << " pullback closed=" << fmt(worst_closed)
             << " mfs=" << fmt(worst_mfs) << ";";
    } else {
      detail << " pullback closed=" << fmt(worst_closed)
             << " mfs=" << fmt(worst_mfs) << ";";
    }
  }

  // normalized-Robin differentiation identities, with lambda derivatives by
  // finite differences of normalized_robin along a nonconstant psi
  {
    // psi2 = (|z|^2 - 1)(2 + Re z_1): same ball, different defining function
    std::vector<Monomial> terms;
    auto zeros = [&](int) { return std::vector<int>(n, 0); };
    for (int j = 0; j < n; ++j) {
      auto ez = zeros(n), ezb = zeros(n);
      ez[j] = 1;
      ezb[j] = 1;
      terms.push_back({Complex(2, 0), ez, ezb});
      // |z|^2 * Re z_1 = |z|^2 (z_1 + conj z_1)/2
      auto ez2 = ez, ezb2 = ezb;
      ez2[0] += 1;
      terms.push_back({Complex(0.5, 0), ez2, ezb2});
      auto ez3 = ez, ezb3 = ezb;
      ezb3[0] += 1;
      terms.push_back({Complex(0.5, 0), ez3, ezb3});
    }
    terms.push_back({Complex(-2, 0), zeros(n), zeros(n)});
    {
      auto ez = zeros(n);
      ez[0] = 1;
      terms.push_back({Complex(-0.5, 0), ez, zeros(n)});
      auto ezb = zeros(n);
      ezb[0] = 1;
      terms.push_back({Complex(-0.5, 0), zeros(n), ezb});
    }
    auto spec2 = make_polynomial(n, terms, CVector::Zero(n));

    SeededRng rng(split_seed(opts.seed, 1006));
    double worst = 0;
    const double m = 2.0 * n - 2.0;
    for (int i = 0; i < 10; ++i) {
      CVector p = rng.complex_gaussian(n);
      p *= 0.75 * rng.uniform() / p.norm();
      const RobinEval re = robin_derivatives(*ball_backend, *spec2, p, 2);
      const DefiningEval pe = spec2->eval(p, 2);
      const double psi = pe.psi();
      auto lam_field = [&](const RVector& x) {
        CVector z(n);
        for (int k = 0; k < n; ++k) z[k] = Complex(x[2 * k], x[2 * k + 1]);
        return normalized_robin(*ball_backend, *spec2, z);
      };
      const Jet3 lam_fd = wirtinger_fd(lam_field, p, 2, 1e-3, 1);
      for (int a = 0; a < 2 * n; ++a) {
        const Complex lhs = re.d1(a) * pow_int(psi, 2 * n - 2);
        const Complex rhs =
            lam_fd.d1[a] - m * lam_fd.f / psi * pe.d1(a);
        worst = std::max(worst, std::abs(lhs - rhs) /
                                    std::max(1.0, std::abs(lhs)));
        for (int b = 0; b < 2 * n; ++b) {
          const Complex lhs2 = re.d2(a, b) * pow_int(psi, 2 * n - 1);
          const Complex rhs2 =
              lam_fd.d2(a, b) * psi -
              m * (lam_fd.d1[a] * pe.d1(b) + lam_fd.d1[b] * pe.d1(a)) +
              m * (m + 1.0) * lam_fd.f / psi * pe.d1(a) * pe.d1(b) -
              m * lam_fd.f * pe.d2(a, b);
          worst = std::max(worst, std::abs(lhs2 - rhs2) /
                                      std::max(1.0, std::abs(lhs2)));
        }
      }
    }
    if (worst > 1e-6) {
      r.pass = false;
      detail << " normalization identities residual=" << fmt(worst) << ";";
    } else {
      detail << " normalization identities residual=" << fmt(worst);
    }
  }

  r.detail = detail.str();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            std::ostream* live) {
  std::vector<CriterionResult> out;
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  const Fn criteria[] = {
      criterion_moments,        criterion_lambda_a,
      criterion_mixed_quadrature, criterion_mfs_vs_ball,
      criterion_ball_identities, criterion_corollary_limits,
      criterion_mfs_asymptotics, criterion_geodesics,
      criterion_band_scan,      criterion_properties,
  };
  for (const auto& fn : criteria) {
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
      r = fn(opts);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string(" exception: ") + e.what();
      r.id = (int)out.size() + 1;
      r.name = "criterion";
    }
    r.seconds = seconds_since(t0);
    if (live) {
      (*live) << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id
              << " (" << r.name << "):" << r.detail << " [" << fmt(r.seconds)
              << "s]" << std::endl;
    }
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json acceptance_to_json(const std::vector<CriterionResult>& results,
                                  const AcceptanceOptions& opts) {
  nlohmann::json j;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json e;
    e["id"] = r.id;
    e["name"] = r.name;
    e["pass"] = r.pass;
    e["detail"] = r.detail;
    e["seconds"] = r.seconds;
    arr.push_back(e);
  }
  j["criteria"] = arr;
  j["all_pass"] = all_passed(results);
  nlohmann::json cfg;
  cfg["seed"] = opts.seed;
  cfg["threads"] = opts.threads;
  j["config"] = cfg;
  j["config_hash"] = config_hash_hex(cfg);
  return j;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace robin

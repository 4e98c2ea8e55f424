#include "robin/geodesic.hpp"

#include <algorithm>
#include <cmath>

#include "robin/rng.hpp"

namespace robin {

CVector geodesic_accel(const MetricData& m, const CVector& v) {
  if (!m.positive_definite)
    throw NumericalError("geodesic equation refused: metric not positive definite");
  if (m.dg.empty()) throw NumericalError("metric derivative tensor missing");
  const int n = m.n;
  CVector r(n);
  for (int b = 0; b < n; ++b) {
    Complex s(0, 0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s += m.dg[j](k, b) * v[j] * v[k];
    r[b] = s;
  }
  return -(m.g_inv.transpose() * r);
}

CVector geodesic_accel(const MetricSource& src, const CVector& p,
                       const CVector& v) {
  return geodesic_accel(src.at(p), v);
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640,
                 E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

struct Ode {
  const MetricSource& src;
  int n;
  CVector operator()(const CVector& y) const {
    CVector dy(2 * n);
    const CVector p = y.head(n);
    const CVector v = y.tail(n);
    dy.head(n) = v;
    dy.tail(n) = geodesic_accel(src, p, v);
    return dy;
  }
};

double error_norm(const CVector& err, const CVector& y0, const CVector& y1,
                  double tol) {
  double acc = 0;
  for (int i = 0; i < err.size(); ++i) {
    const double sc =
        tol + tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double er = std::abs(err[i]) / sc;
    acc += er * er;
  }
  return std::sqrt(acc / err.size());
}

// Cheap first-order distance estimate used to keep trajectories inside the
// trusted band while integrating.
double band_margin(const Domain& spec, const CVector& p, double floor) {
  const DefiningEval e = spec.eval(p, 1);
  if (e.psi() >= 0) return -1;
  if (floor <= 0) return 1;
  const double dist = -e.psi() / real_gradient(e).norm();
  return dist - floor;
}

}  // namespace

Trajectory integrate(const MetricSource& src, const GeodesicState& s0,
                     const IntegrateOptions& opts) {
  const int n = (int)s0.p.size();
  Ode ode{src, n};
  Trajectory out;

  CVector y(2 * n);
  y.head(n) = s0.p;
  y.tail(n) = s0.v;
  double t = s0.t;
  const double t_end = s0.t + opts.T;
  double h = std::min(opts.h_init, opts.T);

  std::vector<double> outputs = opts.output_times;
  std::sort(outputs.begin(), outputs.end());
  size_t next_out = 0;
  const bool sample_all = outputs.empty();

  auto record = [&](double tt, const CVector& yy) {
    out.states.push_back(GeodesicState{yy.head(n), yy.tail(n), tt});
  };
  record(t, y);

  const double floor = src.backend->trust_floor();
  CVector k1 = ode(y);
  int steps = 0;
  while (t < t_end - 1e-14) {
    if (++steps > opts.max_steps) {
      out.truncated = true;
      out.exit_reason = "step budget exhausted";
      return out;
    }
    bool hit_output = false;
    double h_try = std::min(h, t_end - t);
    if (!sample_all && next_out < outputs.size() &&
        t + h_try > outputs[next_out] - 1e-14) {
      h_try = outputs[next_out] - t;
      hit_output = true;
      if (h_try <= 1e-15) {
        // already at the output time
        record(t, y);
        ++next_out;
        continue;
      }
    }

    const CVector k2 = ode(y + h_try * (A21 * k1));
    const CVector k3 = ode(y + h_try * (A31 * k1 + A32 * k2));
    const CVector k4 = ode(y + h_try * (A41 * k1 + A42 * k2 + A43 * k3));
    const CVector k5 =
        ode(y + h_try * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    const CVector k6 = ode(
        y + h_try * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
    const CVector y5 =
        y + h_try * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    const CVector k7 = ode(y5);
    const CVector err = h_try * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 +
                                 E6 * k6 + E7 * k7);
    const double en = error_norm(err, y, y5, opts.tol);

    if (en <= 1.0) {
      t += h_try;
      y = y5;
      k1 = k7;  // first-same-as-last
      if (band_margin(*src.spec, y.head(n), floor) <= 0) {
        record(t, y);
        out.truncated = true;
        out.exit_reason = "trajectory left the trusted region";
        return out;
      }
      if (sample_all) {
        record(t, y);
      } else if (hit_output) {
        record(t, y);
        ++next_out;
      }
    }
    const double factor =
        std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
    h = h_try * factor;
    if (h < 1e-14) {
      out.truncated = true;
      out.exit_reason = "step size underflow";
      return out;
    }
  }
  if (!sample_all) {
    while (next_out < outputs.size() && outputs[next_out] <= t + 1e-12) {
      record(t, y);
      ++next_out;
    }
  } else if (out.states.empty() || out.states.back().t < t) {
    record(t, y);
  }
  return out;
}

double psi_first_derivative(const Domain& spec, const GeodesicState& s) {
  const DefiningEval e = spec.eval(s.p, 1);
  Complex acc(0, 0);
  for (int a = 0; a < spec.dim(); ++a) acc += e.grad()[a] * s.v[a];
  return 2 * acc.real();
}

double psi_second_derivative(const Domain& spec, const MetricSource& src,
                             const GeodesicState& s) {
  const int n = spec.dim();
  const DefiningEval e = spec.eval(s.p, 2);
  const CVector accel = geodesic_accel(src, s.p, s.v);
  Complex first(0, 0);
  for (int a = 0; a < n; ++a) first += e.grad()[a] * accel[a];
  Complex holo(0, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) holo += e.d2(a, b) * s.v[a] * s.v[b];
  return 2 * first.real() + 2 * holo.real() + 2 * levi_form(e, s.v);
}

GeodesicState tangential_launch(const Domain& spec, const CVector& q,
                                double depth, const CVector& u) {
  const DefiningEval eq = spec.eval(q, 1);
  const CVector nu = outward_normal(eq);
  GeodesicState s;
  s.p = q - depth * nu;
  s.t = 0;

  const DefiningEval ep = spec.eval(s.p, 1);
  if (ep.psi() >= 0) throw NumericalError("launch depth leaves the domain");
  const CVector normal = ep.grad().conjugate();
  auto rdot = [](const CVector& a, const CVector& b) {
    Complex s2(0, 0);
    for (int i = 0; i < a.size(); ++i) s2 += a[i] * std::conj(b[i]);
    return s2.real();
  };
  CVector w = u - (rdot(u, normal) / rdot(normal, normal)) * normal;
  const double nn = w.norm();
  if (nn < 1e-12)
    throw NumericalError("direction is normal to the level set");
  s.v = w / nn;
  return s;
}

BandScanReport band_scan(const Domain& spec, const MetricSource& src,
                         std::vector<double> epsilon_grid,
                         int directions_per_point, int boundary_samples,
                         uint64_t seed, const CVector& p0) {
  std::sort(epsilon_grid.begin(), epsilon_grid.end());
  BandScanReport rep;
  rep.epsilon_grid = epsilon_grid;
  const int n = spec.dim();
  const CVector anchor = spec.interior_point();

  for (size_t ei = 0; ei < epsilon_grid.size(); ++ei) {
    const double eps = epsilon_grid[ei];
    SeededRng rng(split_seed(seed, ei));
    for (int bs = 0; bs < boundary_samples; ++bs) {
      const CVector q = boundary_ray_hit(spec, anchor, rng.complex_gaussian(n));
      for (int dir = 0; dir < directions_per_point; ++dir) {
        const double delta = eps * (0.05 + 0.95 * rng.uniform());
        GeodesicState st;
        try {
          st = tangential_launch(spec, q, delta, rng.complex_gaussian(n));
        } catch (const NumericalError&) {
          continue;
        }
        BandSample sample;
        sample.q = q;
        sample.u = st.v;
        sample.delta = delta;
        sample.epsilon = eps;
        sample.dpsi = psi_first_derivative(spec, st);
        sample.d2psi = psi_second_derivative(spec, src, st);
        if (sample.d2psi <= 0) ++rep.negatives;
        rep.records.push_back(std::move(sample));
      }
    }
  }

  rep.certified_epsilon = 0;
  for (const double eps : epsilon_grid) {
    bool all_positive = true;
    for (const auto& r : rep.records)
      if (r.epsilon <= eps && r.d2psi <= 0) {
        all_positive = false;
        break;
      }
    if (all_positive)
      rep.certified_epsilon = eps;
    else
      break;
  }
  const double psi0 = spec.psi(p0);
  if (psi0 >= 0) throw NumericalError("reference point must be interior");
  rep.epsilon1 = 0.5 * std::min(rep.certified_epsilon, -psi0);
  return rep;
}

EscapeVerdict escape_certificate(const Domain& spec, const MetricSource& src,
                                 const Trajectory& traj, double epsilon1) {
  EscapeVerdict out;
  out.epsilon1 = epsilon1;
  const auto& st = traj.states;
  if (st.size() < 3) return out;
  std::vector<double> psi(st.size());
  for (size_t i = 0; i < st.size(); ++i) psi[i] = spec.psi(st[i].p);
  for (size_t i = 1; i + 1 < st.size(); ++i) {
    if (psi[i] > psi[i - 1] && psi[i] > psi[i + 1]) {
      EscapeVerdict::Maximum m;
      m.t = st[i].t;
      m.psi = psi[i];
      m.d2psi = psi_second_derivative(spec, src, st[i]);
      m.in_band = psi[i] > -epsilon1;
      // a maximum of psi o gamma inside the band contradicts the positivity
      // scan: the scan certifies '' > 0 there while a maximum needs '' <= 0
      if (m.in_band) out.pass = false;
      out.maxima.push_back(m);
    }
  }
  return out;
}

}  // namespace robin

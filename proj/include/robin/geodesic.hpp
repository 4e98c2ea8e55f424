#pragma once

#include <vector>

#include "robin/metric.hpp"
#include "robin/robin.hpp"

namespace robin {

struct GeodesicState {
  CVector p;
  CVector v;
  double t = 0;
};

// Produces metric data along trajectories; one derivative locus (the Robin
// backend) feeds everything.
struct MetricSource {
  RobinBackendPtr backend;
  DomainPtr spec;
  DerivMode mode = DerivMode::Analytic;
  FdPolicy fd;

  MetricData at(const CVector& p) const {
    const RobinEval re = robin_derivatives(*backend, *spec, p, 3, mode, fd);
    return metric_data(re, true);
  }
  double energy(const CVector& p, const CVector& v) const {
    const RobinEval re = robin_derivatives(*backend, *spec, p, 2, mode, fd);
    MetricData m = metric_tensor(re);
    Complex s(0, 0);
    for (int a = 0; a < m.n; ++a)
      for (int b = 0; b < m.n; ++b) s += m.g(a, b) * v[a] * std::conj(v[b]);
    return s.real();
  }
};

// Complexified geodesic acceleration:
// gamma''_alpha = - sum_{j,k} (sum_beta dg_{k betabar}/dp_j g^{beta alphabar})
//                 gamma'_j gamma'_k.
CVector geodesic_accel(const MetricData& m, const CVector& v);
CVector geodesic_accel(const MetricSource& src, const CVector& p,
                       const CVector& v);

struct Trajectory {
  std::vector<GeodesicState> states;
  bool truncated = false;
  std::string exit_reason;
};

struct IntegrateOptions {
  double T = 1.0;
  double tol = 1e-10;
  double h_init = 1e-3;
  int max_steps = 2000000;
  std::vector<double> output_times;  // if empty, all accepted steps
};

Trajectory integrate(const MetricSource& src, const GeodesicState& s0,
                     const IntegrateOptions& opts);

// (psi o gamma)'' by the geodesic substitution:
// -2 Re sum_a psi_a * (Gamma contraction) + 2 Re sum psi_{ab} v_a v_b
// + 2 L_psi(v, v); evaluated pointwise from metric data.
double psi_second_derivative(const Domain& spec, const MetricSource& src,
                             const GeodesicState& s);
double psi_first_derivative(const Domain& spec, const GeodesicState& s);

// Interior state at given depth below a boundary point, velocity projected
// onto the real tangent space of the level set and normalized.
GeodesicState tangential_launch(const Domain& spec, const CVector& q,
                                double depth, const CVector& u);

struct BandSample {
  CVector q;       // boundary point
  CVector u;       // launch direction (unit)
  double delta;    // depth
  double epsilon;  // grid level this sample belongs to
  double dpsi;     // (psi o gamma)'(0)
  double d2psi;    // (psi o gamma)''(0)
};

struct BandScanReport {
  std::vector<double> epsilon_grid;
  std::vector<BandSample> records;
  double certified_epsilon = 0;
  double epsilon1 = 0;
  int negatives = 0;
};

BandScanReport band_scan(const Domain& spec, const MetricSource& src,
                         std::vector<double> epsilon_grid,
                         int directions_per_point, int boundary_samples,
                         uint64_t seed, const CVector& p0);

struct EscapeVerdict {
  struct Maximum {
    double t;
    double psi;
    double d2psi;
    bool in_band;
  };
  bool pass = true;
  double epsilon1 = 0;
  std::vector<Maximum> maxima;
};

EscapeVerdict escape_certificate(const Domain& spec, const MetricSource& src,
                                 const Trajectory& traj, double epsilon1);

}  // namespace robin

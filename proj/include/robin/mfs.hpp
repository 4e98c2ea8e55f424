#pragma once

#include <optional>

#include "robin/domain.hpp"
#include "robin/types.hpp"

namespace robin {

// Near-boundary augmentation: extra charges clustered outside the boundary
// near the reflection of the anchor point, plus collocation rings resolving
// the boundary data peak at the anchor's scale.
struct MfsNearAnchor {
  CVector boundary_point;
  double scale = 0;  // depth of the poles this model will serve
};

// Defaults sized for ~1e-5 interior accuracy on ball-like domains in C^2.
// The standoff (inflation - 1) must exceed the inter-charge spacing, which
// shrinks only like charges^{-1/3} on a 3-dimensional boundary; 1.3 is too
// tight there, so the default inflation is 1.5.
struct MfsOptions {
  int collocation = 2000;
  int charges = 1200;
  double inflation = 1.5;
  uint64_t seed = 20240601;
  double residual_warn = 1e-4;
  std::optional<MfsNearAnchor> near;
};

struct MfsModel {
  DomainPtr domain;
  MfsOptions opts;
  std::vector<CVector> collocation;
  std::vector<CVector> charges;
  RMatrix A;  // kernel matrix |zeta_i - q_j|^{2-2n}
  Eigen::CompleteOrthogonalDecomposition<RMatrix> solver;
  double base_residual = 0;  // residual of the interior-anchor solve
  double trust_floor = 0.02;
};

MfsModel mfs_build(DomainPtr domain, const MfsOptions& opts);

struct MfsSolveInfo {
  double residual_inf = 0;
  bool low_confidence = false;
};

// Robin function at an interior pole p: -h_p(p), where h_p is the harmonic
// function with boundary data |zeta - p|^{2-2n}.
double mfs_robin(const MfsModel& model, const CVector& p,
                 MfsSolveInfo* info = nullptr);

// One blocked least-squares solve for many poles; identical results to
// per-pole mfs_robin but much faster for derivative stencils.
std::vector<double> mfs_robin_batch(const MfsModel& model,
                                    const std::vector<CVector>& poles);

}  // namespace robin

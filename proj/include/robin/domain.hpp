#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "robin/polynomial.hpp"
#include "robin/types.hpp"

namespace robin {

enum class DomainKind {
  Ball,
  Ellipsoid,
  PerturbedBall,
  HalfSpace,
  Polynomial,
  Transformed,
};

// Defining-function data at one point: psi and Wirtinger derivatives.
struct DefiningEval {
  Jet3 jet;

  int n() const { return jet.n; }
  double psi() const { return jet.f; }
  Complex d1(int a) const { return jet.d1[a]; }
  Complex d2(int a, int b) const { return jet.d2(a, b); }
  Complex d3(int a, int b, int c) const { return jet.d3.at(a, b, c); }

  // dpsi = (psi_1, ..., psi_n)
  CVector grad() const { return jet.d1.head(jet.n); }
  double grad_norm() const { return grad().norm(); }
  // psi_{alpha betabar}, alpha,beta in I
  CMatrix hess_mixed() const {
    const int n = jet.n;
    return jet.d2.block(0, n, n, n);
  }
  // psi_{alpha beta}
  CMatrix hess_holo() const {
    const int n = jet.n;
    return jet.d2.block(0, 0, n, n);
  }
};

class Domain {
 public:
  virtual ~Domain() = default;
  virtual int dim() const = 0;
  virtual DomainKind kind() const = 0;
  virtual std::string kind_name() const = 0;
  virtual bool bounded() const = 0;
  virtual DefiningEval eval(const CVector& p, int order) const = 0;
  // A point with psi < 0, used to anchor ray casts and charge placement.
  virtual CVector interior_point() const = 0;
  virtual nlohmann::json params() const = 0;

  double psi(const CVector& p) const { return eval(p, 0).jet.f; }
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr make_ball(int n, double radius);
DomainPtr make_ellipsoid(const std::vector<double>& weights);
DomainPtr make_perturbed_ball(int n, double epsilon, int pert_id);
DomainPtr make_halfspace(const CVector& b);
DomainPtr make_polynomial(int n, const std::vector<Monomial>& terms,
                          const CVector& interior_hint);

// w = A^{-1}(z - b) ... domain seen in w-coordinates where z = b + A w,
// with the defining function divided by scale (scale > 0).
struct AffineMap {
  CVector b;      // translation
  CMatrix A;      // z = b + A w
  double scale;   // psi_new(w) = psi(b + A w) / scale
};

DomainPtr make_transformed(DomainPtr base, const AffineMap& map);

// Pushforward of derivative data under z = b + A w (and division by scale):
// unbarred indices contract with columns of A, barred ones with conj(A).
Jet3 transform_jet(const Jet3& base, const CMatrix& A, double scale);

double levi_form(const DefiningEval& e, const CVector& v);

// Real gradient of psi as a vector in R^{2n} identified with C^n:
// equals 2*conj(dpsi).
CVector real_gradient(const DefiningEval& e);
// Real Hessian (2n x 2n, coordinates x1,y1,...,xn,yn) from Wirtinger data.
RMatrix real_hessian(const DefiningEval& e);

struct BoundaryProjection {
  CVector point;
  double distance = 0;
  bool unique = true;
  double psi_residual = 0;
  double alignment_residual = 0;
  int iterations = 0;
};

BoundaryProjection boundary_project(const Domain& d, const CVector& p);

// First boundary hit of the ray from `from` along complex direction `dir`.
CVector boundary_ray_hit(const Domain& d, const CVector& from,
                         const CVector& dir);

// Newton projection onto {psi = 0} along the gradient flow, for points
// already close to the boundary.
CVector project_to_boundary_near(const Domain& d, const CVector& p);

struct PseudoconvexityReport {
  int samples = 0;
  double min_levi = 0;
  int failures = 0;
  bool pass = false;
};

PseudoconvexityReport strong_pseudoconvexity_check(const Domain& d,
                                                   int sample_count,
                                                   uint64_t seed);

// Coordinate change w = U (z - q) with U unitary plus a positive rescaling of
// psi, taking the boundary point q to 0 with dpsi(0) = (0,...,0,1).
struct NormalizationMap {
  CVector q;
  CMatrix U;
  double scale = 1;
};

std::pair<NormalizationMap, DomainPtr> normalize_dagger(DomainPtr d,
                                                        const CVector& q);

// Affine rescaling w = (z - p)/(-psi(p)). The image domain's natural defining
// function is f(p, .) = psi(p - psi(p) w)/(-psi(p)).
struct RescaleMap {
  CVector p;
  double factor;  // -psi(p) > 0
};

RescaleMap rescale_domain(const Domain& d, const CVector& p);
DomainPtr rescaled_image(DomainPtr d, const RescaleMap& map);

// Unit outward normal at a boundary point, as a complex vector.
CVector outward_normal(const DefiningEval& e);

nlohmann::json domain_to_json(const Domain& d);
DomainPtr domain_from_json(const nlohmann::json& j);

}  // namespace robin

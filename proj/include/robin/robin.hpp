#pragma once

#include <memory>

#include "robin/domain.hpp"
#include "robin/finite_diff.hpp"
#include "robin/mfs.hpp"
#include "robin/types.hpp"

namespace robin {

// Robin function Lambda at a point together with Wirtinger derivatives and
// the normalized value lambda = Lambda psi^{2n-2}.
struct RobinEval {
  int n = 0;
  int order = 0;
  Jet3 lam;                  // lam.f = Lambda(p) < 0
  double lambda_small = 0;   // Lambda psi^{2n-2}
  bool low_confidence = false;

  double lambda_big() const { return lam.f; }
  Complex d1(int a) const { return lam.d1[a]; }
  Complex d2(int a, int b) const { return lam.d2(a, b); }
  Complex d3(int a, int b, int c) const { return lam.d3.at(a, b, c); }
};

enum class DerivMode { Analytic, FiniteDifference };

class RobinBackend {
 public:
  virtual ~RobinBackend() = default;
  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  // Lambda(p); throws outside the backend's validity region.
  virtual double lambda(const CVector& p) const = 0;
  virtual bool has_analytic_derivatives() const = 0;
  virtual Jet3 analytic_jet(const CVector& p, int order) const;
  // Minimum distance to the boundary below which values are refused.
  virtual double trust_floor() const { return 0; }
  virtual bool low_confidence_at(const CVector& p) const {
    (void)p;
    return false;
  }
};

using RobinBackendPtr = std::shared_ptr<const RobinBackend>;

// Kelvin-reflection closed form for the ball of radius r:
// Lambda(p) = -r^{2n-2} (r^2 - |p|^2)^{-2n+2}.
RobinBackendPtr make_ball_robin(int n, double radius);

// Half-space model: Lambda(p) = -|b|^{2n-2} (2 Re<b,p> - 1)^{-2n+2}.
RobinBackendPtr make_halfspace_robin(const CVector& b);

// Conjugation by an affine map z = b + A w with A conformal (c * unitary):
// Lambda_new(w) = c^{2n-2} Lambda(b + A w).
RobinBackendPtr make_transformed_robin(RobinBackendPtr base,
                                       const AffineMap& map);

// Numerical backend over a fundamental-solutions model.
RobinBackendPtr make_mfs_robin_backend(std::shared_ptr<const MfsModel> model);

// Backend matching a domain: closed forms for (possibly transformed) balls
// and half spaces, otherwise MFS with the given options.
RobinBackendPtr backend_for_domain(DomainPtr spec, const std::string& requested,
                                   const MfsOptions& opts);

RobinEval robin_derivatives(const RobinBackend& backend, const Domain& spec,
                            const CVector& p, int order,
                            DerivMode mode = DerivMode::Analytic,
                            const FdPolicy& policy = FdPolicy{});

// lambda(p) for interior p, -|dpsi|^{2n-2} for boundary p.
double normalized_robin(const RobinBackend& backend, const Domain& spec,
                        const CVector& p);

// Euclidean distance from p to the boundary (Newton projection).
double boundary_distance(const Domain& spec, const CVector& p);

}  // namespace robin

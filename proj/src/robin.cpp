#include "robin/robin.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace robin {

namespace {

// Composition F(u(p)) for a radial/affine profile: fills the Wirtinger jet
// from derivatives of F and the (at most quadratic) jet of u.
Jet3 compose_profile(const double F[4], const Jet3& u, int order) {
  const int m = 2 * u.n;
  Jet3 out(u.n, order);
  out.f = F[0];
  if (order >= 1)
    for (int a = 0; a < m; ++a) out.d1[a] = F[1] * u.d1[a];
  if (order >= 2)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        out.d2(a, b) = F[2] * u.d1[a] * u.d1[b] + F[1] * u.d2(a, b);
  if (order >= 3)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          out.d3.at(a, b, c) =
              F[3] * u.d1[a] * u.d1[b] * u.d1[c] +
              F[2] * (u.d2(a, b) * u.d1[c] + u.d2(a, c) * u.d1[b] +
                      u.d2(b, c) * u.d1[a]);
  return out;
}

// Derivatives of F(u) = C u^{-m} up to order 3.
void power_profile(double C, int m, double u, double F[4]) {
  const double um = pow_int(u, -m);
  F[0] = C * um;
  F[1] = -m * C * um / u;
  F[2] = m * (m + 1.0) * C * um / (u * u);
  F[3] = -m * (m + 1.0) * (m + 2.0) * C * um / (u * u * u);
}

class BallRobin final : public RobinBackend {
 public:
  BallRobin(int n, double r) : n_(n), r_(r) {}
  int dim() const override { return n_; }
  std::string name() const override { return "ball"; }

  double lambda(const CVector& p) const override {
    const double u = r_ * r_ - p.squaredNorm();
    if (u <= 0) throw NumericalError("pole outside the ball");
    const int m = 2 * n_ - 2;
    return -pow_int(r_, m) * pow_int(u, -m);
  }

  bool has_analytic_derivatives() const override { return true; }

  Jet3 analytic_jet(const CVector& p, int order) const override {
    const double u = r_ * r_ - p.squaredNorm();
    if (u <= 0) throw NumericalError("pole outside the ball");
    Jet3 ujet(n_, std::min(order, 3));
    ujet.f = u;
    if (order >= 1)
      for (int a = 0; a < n_; ++a) {
        ujet.d1[a] = -std::conj(p[a]);
        ujet.d1[a + n_] = -p[a];
      }
    if (order >= 2)
      for (int a = 0; a < n_; ++a) {
        ujet.d2(a, a + n_) = -1;
        ujet.d2(a + n_, a) = -1;
      }
    const int m = 2 * n_ - 2;
    double F[4];
    power_profile(-pow_int(r_, m), m, u, F);
    return compose_profile(F, ujet, order);
  }

 private:
  int n_;
  double r_;
};

class HalfSpaceRobin final : public RobinBackend {
 public:
  explicit HalfSpaceRobin(const CVector& b) : n_((int)b.size()), b_(b) {}
  int dim() const override { return n_; }
  std::string name() const override { return "halfspace"; }

  double lambda(const CVector& p) const override {
    return -pow_int(b_.norm(), 2 * n_ - 2) * pow_int(plane(p), -(2 * n_ - 2));
  }

  bool has_analytic_derivatives() const override { return true; }

  Jet3 analytic_jet(const CVector& p, int order) const override {
    const double t = plane(p);
    Jet3 ujet(n_, std::min(order, 3));
    ujet.f = t;
    if (order >= 1)
      for (int a = 0; a < n_; ++a) {
        ujet.d1[a] = b_[a];
        ujet.d1[a + n_] = std::conj(b_[a]);
      }
    const int m = 2 * n_ - 2;
    double F[4];
    power_profile(-pow_int(b_.norm(), m), m, t, F);
    return compose_profile(F, ujet, order);
  }

 private:
  double plane(const CVector& p) const {
    Complex s(0, 0);
    for (int i = 0; i < n_; ++i) s += b_[i] * p[i];
    const double t = 2 * s.real() - 1;
    if (t >= 0) throw NumericalError("pole outside the half space");
    return t;
  }
  int n_;
  CVector b_;
};

class TransformedRobin final : public RobinBackend {
 public:
  TransformedRobin(RobinBackendPtr base, const AffineMap& map)
      : base_(std::move(base)), map_(map) {
    const int n = base_->dim();
    const CMatrix gram = map.A.adjoint() * map.A;
    const double c2 = gram(0, 0).real();
    if ((gram - c2 * CMatrix::Identity(n, n)).norm() > 1e-10 * c2)
      throw std::invalid_argument(
          "Robin conjugation needs a conformal affine map");
    conformal_ = std::sqrt(c2);
    factor_ = pow_int(conformal_, 2 * n - 2);
  }

  int dim() const override { return base_->dim(); }
  std::string name() const override { return "transformed(" + base_->name() + ")"; }
  double trust_floor() const override {
    return base_->trust_floor() / conformal_;
  }

  double lambda(const CVector& w) const override {
    return factor_ * base_->lambda(map_.b + map_.A * w);
  }

  bool has_analytic_derivatives() const override {
    return base_->has_analytic_derivatives();
  }

  Jet3 analytic_jet(const CVector& w, int order) const override {
    Jet3 base_jet = base_->analytic_jet(map_.b + map_.A * w, order);
    Jet3 out = transform_jet(base_jet, map_.A, 1.0);
    out.f *= factor_;
    if (order >= 1) out.d1 *= factor_;
    if (order >= 2) out.d2 *= factor_;
    if (order >= 3) {
      const int m = 2 * out.n;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c) out.d3.at(a, b, c) *= factor_;
    }
    return out;
  }

 private:
  RobinBackendPtr base_;
  AffineMap map_;
  double conformal_ = 1;
  double factor_ = 1;
};

class MfsRobinBackend final : public RobinBackend {
 public:
  explicit MfsRobinBackend(std::shared_ptr<const MfsModel> model)
      : model_(std::move(model)) {}
  int dim() const override { return model_->domain->dim(); }
  std::string name() const override { return "mfs"; }
  double trust_floor() const override { return model_->trust_floor; }

  double lambda(const CVector& p) const override {
    return mfs_robin(*model_, p);
  }

  bool has_analytic_derivatives() const override { return false; }

  bool low_confidence_at(const CVector& p) const override {
    MfsSolveInfo info;
    (void)mfs_robin(*model_, p, &info);
    return info.low_confidence;
  }

 private:
  std::shared_ptr<const MfsModel> model_;
};

}  // namespace

Jet3 RobinBackend::analytic_jet(const CVector&, int) const {
  throw NumericalError("backend has no analytic derivatives");
}

RobinBackendPtr make_ball_robin(int n, double radius) {
  return std::make_shared<BallRobin>(n, radius);
}

RobinBackendPtr make_halfspace_robin(const CVector& b) {
  return std::make_shared<HalfSpaceRobin>(b);
}

RobinBackendPtr make_transformed_robin(RobinBackendPtr base,
                                       const AffineMap& map) {
  return std::make_shared<TransformedRobin>(std::move(base), map);
}

RobinBackendPtr make_mfs_robin_backend(std::shared_ptr<const MfsModel> model) {
  return std::make_shared<MfsRobinBackend>(std::move(model));
}

RobinBackendPtr backend_for_domain(DomainPtr spec, const std::string& requested,
                                   const MfsOptions& opts) {
  if (requested == "mfs") {
    auto model = std::make_shared<MfsModel>(mfs_build(spec, opts));
    return make_mfs_robin_backend(std::move(model));
  }
  if (requested == "ball") {
    if (spec->kind() == DomainKind::Ball)
      return make_ball_robin(spec->dim(), spec->params().at("radius").get<double>());
    if (spec->kind() == DomainKind::Transformed) {
      const auto j = spec->params();
      if (j.at("base").at("kind").get<std::string>() == "ball") {
        auto base = make_ball_robin(spec->dim(),
                                    j.at("base").value("radius", 1.0));
        // reconstruct the map from the serialized parameters
        AffineMap map;
        map.b = CVector(spec->dim());
        for (int i = 0; i < spec->dim(); ++i)
          map.b[i] = Complex(j.at("b")[i][0].get<double>(),
                             j.at("b")[i][1].get<double>());
        map.A = CMatrix(spec->dim(), spec->dim());
        for (int i = 0; i < spec->dim(); ++i)
          for (int k = 0; k < spec->dim(); ++k)
            map.A(i, k) = Complex(j.at("A")[i][k][0].get<double>(),
                                  j.at("A")[i][k][1].get<double>());
        map.scale = j.at("scale").get<double>();
        return make_transformed_robin(std::move(base), map);
      }
    }
    throw std::invalid_argument("ball backend requires a (transformed) ball domain");
  }
  if (requested == "halfspace") {
    if (spec->kind() != DomainKind::HalfSpace)
      throw std::invalid_argument("halfspace backend requires a halfspace domain");
    const auto j = spec->params();
    CVector b(spec->dim());
    for (int i = 0; i < spec->dim(); ++i)
      b[i] = Complex(j.at("normal")[i][0].get<double>(),
                     j.at("normal")[i][1].get<double>());
    return make_halfspace_robin(b);
  }
  throw std::invalid_argument("unknown backend: " + requested);
}

double boundary_distance(const Domain& spec, const CVector& p) {
  if (!spec.bounded()) {
    // |psi| / |real gradient| is exact for the affine half-space model
    const DefiningEval e = spec.eval(p, 1);
    return std::abs(e.psi()) / real_gradient(e).norm();
  }
  return boundary_project(spec, p).distance;
}

RobinEval robin_derivatives(const RobinBackend& backend, const Domain& spec,
                            const CVector& p, int order, DerivMode mode,
                            const FdPolicy& policy) {
  if (order < 0 || order > 3)
    throw std::invalid_argument("derivative order must be in 0..3");
  const int n = backend.dim();
  if (spec.dim() != n) throw std::invalid_argument("backend/spec dimension mismatch");

  const double dist = boundary_distance(spec, p);
  if (dist < backend.trust_floor())
    throw NumericalError("evaluation point is inside the refused boundary band");

  RobinEval out;
  out.n = n;
  out.order = order;
  if (mode == DerivMode::Analytic && backend.has_analytic_derivatives()) {
    out.lam = backend.analytic_jet(p, order);
  } else if (order == 0) {
    out.lam = Jet3(n, 0);
    out.lam.f = backend.lambda(p);
  } else {
    const double h = policy.step(dist);
    auto field = [&](const RVector& x) {
      CVector z(n);
      for (int i = 0; i < n; ++i) z[i] = Complex(x[2 * i], x[2 * i + 1]);
      return backend.lambda(z);
    };
    out.lam = wirtinger_fd(field, p, order, h, policy.richardson);
  }
  if (out.lam.f >= 0)
    throw NumericalError("Robin function must be negative on the domain");
  out.low_confidence = backend.low_confidence_at(p);

  const double psi = spec.psi(p);
  out.lambda_small = out.lam.f * pow_int(psi, 2 * n - 2);
  return out;
}

double normalized_robin(const RobinBackend& backend, const Domain& spec,
                        const CVector& p) {
  const DefiningEval e = spec.eval(p, 1);
  const int n = spec.dim();
  if (e.psi() < -1e-12) {
    return backend.lambda(p) * pow_int(e.psi(), 2 * n - 2);
  }
  if (e.psi() > 1e-9)
    throw NumericalError("point lies outside the closed domain");
  return -pow_int(e.grad_norm(), 2 * n - 2);
}

}  // namespace robin

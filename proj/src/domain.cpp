#include "robin/domain.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "robin/rng.hpp"

namespace robin {

namespace {

using nlohmann::json;

json complex_to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

Complex complex_from_json(const json& j) {
  return Complex(j.at(0).get<double>(), j.at(1).get<double>());
}

json cvector_to_json(const CVector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v[i]));
  return a;
}

CVector cvector_from_json(const json& j) {
  CVector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = complex_from_json(j[i]);
  return v;
}

// All built-in kinds are backed by the Hermitian monomial table.
class PolyDomain final : public Domain {
 public:
  PolyDomain(DomainKind kind, std::string name, HermitianPoly poly,
             bool bounded, CVector interior, json params)
      : kind_(kind),
        name_(std::move(name)),
        poly_(std::move(poly)),
        bounded_(bounded),
        interior_(std::move(interior)),
        params_(std::move(params)) {}

  int dim() const override { return poly_.dim(); }
  DomainKind kind() const override { return kind_; }
  std::string kind_name() const override { return name_; }
  bool bounded() const override { return bounded_; }
  CVector interior_point() const override { return interior_; }
  nlohmann::json params() const override { return params_; }

  DefiningEval eval(const CVector& p, int order) const override {
    if (p.size() != poly_.dim()) throw std::invalid_argument("point dimension mismatch");
    DefiningEval out;
    out.jet = poly_.jet(p, order);
    return out;
  }

  const HermitianPoly& poly() const { return poly_; }

 private:
  DomainKind kind_;
  std::string name_;
  HermitianPoly poly_;
  bool bounded_;
  CVector interior_;
  json params_;
};

class TransformedDomain final : public Domain {
 public:
  TransformedDomain(DomainPtr base, AffineMap map)
      : base_(std::move(base)), map_(std::move(map)) {
    if (map_.scale <= 0) throw std::invalid_argument("scale must be positive");
    lu_ = map_.A.partialPivLu();
  }

  int dim() const override { return base_->dim(); }
  DomainKind kind() const override { return DomainKind::Transformed; }
  std::string kind_name() const override {
    return "transformed(" + base_->kind_name() + ")";
  }
  bool bounded() const override { return base_->bounded(); }
  CVector interior_point() const override {
    return lu_.solve(base_->interior_point() - map_.b);
  }
  nlohmann::json params() const override {
    json j;
    j["base"] = domain_to_json(*base_);
    j["b"] = cvector_to_json(map_.b);
    json rows = json::array();
    for (int i = 0; i < map_.A.rows(); ++i) {
      json row = json::array();
      for (int k = 0; k < map_.A.cols(); ++k) row.push_back(complex_to_json(map_.A(i, k)));
      rows.push_back(row);
    }
    j["A"] = rows;
    j["scale"] = map_.scale;
    return j;
  }

  DefiningEval eval(const CVector& w, int order) const override {
    const CVector z = map_.b + map_.A * w;
    DefiningEval base_eval = base_->eval(z, order);
    DefiningEval out;
    out.jet = transform_jet(base_eval.jet, map_.A, map_.scale);
    return out;
  }

  const Domain& base() const { return *base_; }
  const AffineMap& map() const { return map_; }

 private:
  DomainPtr base_;
  AffineMap map_;
  Eigen::PartialPivLU<CMatrix> lu_;
};

std::vector<int> zeros(int n) { return std::vector<int>(n, 0); }

std::vector<Monomial> ball_terms(int n, double r) {
  std::vector<Monomial> t;
  for (int j = 0; j < n; ++j) {
    auto ez = zeros(n), ezb = zeros(n);
    ez[j] = 1;
    ezb[j] = 1;
    t.push_back({Complex(1, 0), ez, ezb});
  }
  t.push_back({Complex(-r * r, 0), zeros(n), zeros(n)});
  return t;
}

}  // namespace

Jet3 transform_jet(const Jet3& base, const CMatrix& A, double scale) {
  const int n = base.n;
  Jet3 out(n, base.order);
  out.f = base.f / scale;
  // weight(a_new, j_old): nonzero only when bar types agree
  auto weight = [&](int a, int j) -> Complex {
    const bool ba = a >= n, bj = j >= n;
    if (ba != bj) return Complex(0, 0);
    const Complex w = A(bj ? j - n : j, ba ? a - n : a);
    return ba ? std::conj(w) : w;
  };
  if (base.order >= 1) {
    for (int a = 0; a < n; ++a) {
      Complex s(0, 0);
      for (int j = 0; j < n; ++j) s += weight(a, j) * base.d1[j];
      out.d1[a] = s / scale;
      out.d1[a + n] = std::conj(out.d1[a]);
    }
  }
  if (base.order >= 2) {
    fill_d2_conj_symmetric(out, [&](int a, int b) {
      const int offa = (a >= n) ? n : 0;
      const int offb = (b >= n) ? n : 0;
      Complex s(0, 0);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          s += weight(a, j + offa) * weight(b, k + offb) *
               base.d2(j + offa, k + offb);
      return s / scale;
    });
  }
  if (base.order >= 3) {
    fill_d3_conj_symmetric(out, [&](int a, int b, int c) {
      const int offa = (a >= n) ? n : 0;
      const int offb = (b >= n) ? n : 0;
      const int offc = (c >= n) ? n : 0;
      Complex s(0, 0);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            s += weight(a, j + offa) * weight(b, k + offb) *
                 weight(c, l + offc) * base.d3.at(j + offa, k + offb, l + offc);
      return s / scale;
    });
  }
  return out;
}

DomainPtr make_ball(int n, double radius) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  if (radius <= 0) throw std::invalid_argument("radius must be positive");
  json params{{"kind", "ball"}, {"n", n}, {"radius", radius}};
  return std::make_shared<PolyDomain>(DomainKind::Ball, "ball",
                                      HermitianPoly(n, ball_terms(n, radius)),
                                      true, CVector::Zero(n), params);
}

DomainPtr make_ellipsoid(const std::vector<double>& weights) {
  const int n = (int)weights.size();
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  std::vector<Monomial> t;
  for (int j = 0; j < n; ++j) {
    if (weights[j] <= 0) throw std::invalid_argument("weights must be positive");
    auto ez = zeros(n), ezb = zeros(n);
    ez[j] = 1;
    ezb[j] = 1;
    t.push_back({Complex(weights[j], 0), ez, ezb});
  }
  t.push_back({Complex(-1, 0), zeros(n), zeros(n)});
  json params{{"kind", "ellipsoid"}, {"n", n}, {"weights", weights}};
  return std::make_shared<PolyDomain>(DomainKind::Ellipsoid, "ellipsoid",
                                      HermitianPoly(n, t), true,
                                      CVector::Zero(n), params);
}

DomainPtr make_perturbed_ball(int n, double epsilon, int pert_id) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  std::vector<Monomial> t = ball_terms(n, 1.0);
  switch (pert_id) {
    case 0: {
      // |z_1|^4; keeps the sublevel set inside the unit ball
      if (epsilon < 0 || epsilon > 1.0)
        throw std::invalid_argument("epsilon out of range for perturbation 0");
      auto ez = zeros(n), ezb = zeros(n);
      ez[0] = 2;
      ezb[0] = 2;
      t.push_back({Complex(epsilon, 0), ez, ezb});
      break;
    }
    case 1: {
      // 2 Re(z_1 z_2): pluriharmonic, Levi form unchanged
      if (std::abs(epsilon) > 0.45)
        throw std::invalid_argument("epsilon out of range for perturbation 1");
      auto ez = zeros(n);
      ez[0] = 1;
      ez[1] = 1;
      t.push_back({Complex(2 * epsilon, 0), ez, zeros(n)});
      break;
    }
    case 2: {
      // 2 Re(z_1^2)
      if (std::abs(epsilon) > 0.45)
        throw std::invalid_argument("epsilon out of range for perturbation 2");
      auto ez = zeros(n);
      ez[0] = 2;
      t.push_back({Complex(2 * epsilon, 0), ez, zeros(n)});
      break;
    }
    default:
      throw std::invalid_argument("unknown perturbation id");
  }
  json params{{"kind", "perturbed_ball"}, {"n", n}, {"epsilon", epsilon},
              {"pert_id", pert_id}};
  return std::make_shared<PolyDomain>(DomainKind::PerturbedBall,
                                      "perturbed_ball", HermitianPoly(n, t),
                                      true, CVector::Zero(n), params);
}

DomainPtr make_halfspace(const CVector& b) {
  const int n = (int)b.size();
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  if (b.norm() == 0) throw std::invalid_argument("normal must be nonzero");
  // psi = 2 Re <b, w> - 1 = sum_j (b_j w_j + conj(b_j w_j)) - 1
  std::vector<Monomial> t;
  for (int j = 0; j < n; ++j) {
    auto ez = zeros(n);
    ez[j] = 1;
    t.push_back({2.0 * b[j], ez, zeros(n)});
  }
  t.push_back({Complex(-1, 0), zeros(n), zeros(n)});
  json params{{"kind", "halfspace"}, {"n", n}, {"normal", cvector_to_json(b)}};
  return std::make_shared<PolyDomain>(DomainKind::HalfSpace, "halfspace",
                                      HermitianPoly(n, t), false,
                                      CVector::Zero(n), params);
}

DomainPtr make_polynomial(int n, const std::vector<Monomial>& terms,
                          const CVector& interior_hint) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  HermitianPoly poly(n, terms);
  CVector interior = interior_hint.size() == n ? interior_hint : CVector::Zero(n);
  if (poly.eval(interior) >= 0)
    throw std::invalid_argument("interior hint does not satisfy psi < 0");
  json jterms = json::array();
  for (const auto& t : poly.terms()) {
    json jt;
    jt["coeff"] = complex_to_json(t.c);
    jt["z"] = t.ez;
    jt["zbar"] = t.ezb;
    jterms.push_back(jt);
  }
  json params{{"kind", "polynomial"}, {"n", n}, {"terms", jterms},
              {"interior", cvector_to_json(interior)}};
  return std::make_shared<PolyDomain>(DomainKind::Polynomial, "polynomial",
                                      std::move(poly), true, interior, params);
}

DomainPtr make_transformed(DomainPtr base, const AffineMap& map) {
  return std::make_shared<TransformedDomain>(std::move(base), map);
}

double levi_form(const DefiningEval& e, const CVector& v) {
  const int n = e.n();
  Complex s(0, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s += e.d2(a, b + n) * v[a] * std::conj(v[b]);
  return s.real();
}

CVector real_gradient(const DefiningEval& e) {
  return 2.0 * e.grad().conjugate();
}

RMatrix real_hessian(const DefiningEval& e) {
  const int n = e.n();
  RMatrix h(2 * n, 2 * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Complex holo = e.d2(a, b);       // psi_{ab}
      const Complex mixed = e.d2(a, b + n);  // psi_{a bbar}
      h(2 * a, 2 * b) = 2 * holo.real() + 2 * mixed.real();
      h(2 * a, 2 * b + 1) = -2 * holo.imag() + 2 * mixed.imag();
      h(2 * a + 1, 2 * b) = -2 * holo.imag() - 2 * mixed.imag();
      h(2 * a + 1, 2 * b + 1) = -2 * holo.real() + 2 * mixed.real();
    }
  return h;
}

CVector outward_normal(const DefiningEval& e) {
  const CVector g = e.grad().conjugate();
  const double nn = g.norm();
  if (nn == 0) throw NumericalError("zero gradient on boundary");
  return g / nn;
}

namespace {

RVector to_real(const CVector& z) {
  RVector x(2 * z.size());
  for (int i = 0; i < z.size(); ++i) {
    x[2 * i] = z[i].real();
    x[2 * i + 1] = z[i].imag();
  }
  return x;
}

CVector to_complex(const RVector& x) {
  CVector z(x.size() / 2);
  for (int i = 0; i < z.size(); ++i) z[i] = Complex(x[2 * i], x[2 * i + 1]);
  return z;
}

}  // namespace

CVector boundary_ray_hit(const Domain& d, const CVector& from,
                         const CVector& dir) {
  const CVector u = dir / dir.norm();
  if (d.psi(from) >= 0) throw NumericalError("ray origin not interior");
  double lo = 0, hi = 0.25;
  int guard = 0;
  while (d.psi(from + hi * u) < 0) {
    lo = hi;
    hi *= 2;
    if (++guard > 60) throw NumericalError("ray does not leave the domain");
  }
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (d.psi(from + mid * u) < 0 ? lo : hi) = mid;
  }
  // Newton polish along the ray
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    const DefiningEval e = d.eval(from + t * u, 1);
    Complex s(0, 0);
    for (int a = 0; a < d.dim(); ++a) s += e.grad()[a] * u[a];
    const double slope = 2 * s.real();
    if (slope == 0) break;
    t -= e.psi() / slope;
  }
  return from + t * u;
}

CVector project_to_boundary_near(const Domain& d, const CVector& p) {
  CVector z = p;
  for (int i = 0; i < 60; ++i) {
    const DefiningEval e = d.eval(z, 1);
    if (std::abs(e.psi()) < 1e-14) return z;
    const CVector g = real_gradient(e);
    const double g2 = g.squaredNorm();
    if (g2 == 0) throw NumericalError("zero gradient while projecting");
    // step along the real gradient: psi(z + t g) ~ psi + t |g|^2
    z -= (e.psi() / g2) * g;
  }
  if (std::abs(d.psi(z)) > 1e-10)
    throw NumericalError("near-boundary projection did not converge");
  return z;
}

BoundaryProjection boundary_project(const Domain& d, const CVector& p) {
  const int n = d.dim();
  const DefiningEval ep = d.eval(p, 1);
  if (ep.psi() > 1e-12) throw NumericalError("point is not in the closed domain");

  BoundaryProjection out;
  out.unique = true;
  CVector dir = real_gradient(ep);
  if (dir.norm() < 1e-12) {
    // degenerate (e.g. center of the ball): any direction is as good
    dir = CVector::Zero(n);
    dir[n - 1] = 1;
    out.unique = false;
  }
  CVector zeta = boundary_ray_hit(d, p, dir);

  // Newton on the Lagrange system zeta - p = t * grad psi(zeta), psi(zeta)=0.
  const int m = 2 * n;
  RVector x(m + 1);
  x.head(m) = to_real(zeta);
  {
    const DefiningEval e = d.eval(zeta, 1);
    const RVector g = to_real(real_gradient(e));
    const RVector diff = to_real(zeta) - to_real(p);
    x[m] = diff.dot(g) / g.squaredNorm();
  }
  const RVector p_real = to_real(p);
  int iter = 0;
  for (; iter < 50; ++iter) {
    const CVector zc = to_complex(x.head(m));
    const DefiningEval e = d.eval(zc, 2);
    const RVector g = to_real(real_gradient(e));
    const double t = x[m];
    RVector F(m + 1);
    F.head(m) = x.head(m) - p_real - t * g;
    F[m] = e.psi();
    if (F.norm() < 1e-12) break;
    RMatrix J = RMatrix::Zero(m + 1, m + 1);
    J.topLeftCorner(m, m) = RMatrix::Identity(m, m) - t * real_hessian(e);
    J.block(0, m, m, 1) = -g;
    J.block(m, 0, 1, m) = g.transpose();
    x -= J.partialPivLu().solve(F);
  }
  if (iter >= 50) throw NumericalError("boundary projection did not converge");

  out.point = to_complex(x.head(m));
  out.distance = (out.point - p).norm();
  const DefiningEval ez = d.eval(out.point, 1);
  out.psi_residual = std::abs(ez.psi());
  const RVector g = to_real(real_gradient(ez));
  const RVector diff = to_real(out.point) - p_real;
  if (diff.norm() > 0 && g.norm() > 0) {
    const RVector tang = diff - (diff.dot(g) / g.squaredNorm()) * g;
    out.alignment_residual = tang.norm();
  }
  out.iterations = iter;
  return out;
}

PseudoconvexityReport strong_pseudoconvexity_check(const Domain& d,
                                                   int sample_count,
                                                   uint64_t seed) {
  if (!d.bounded())
    throw NumericalError("unbounded domain unsupported here");
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  const int n = d.dim();
  SeededRng rng(seed);
  const CVector anchor = d.interior_point();
  PseudoconvexityReport rep;
  rep.samples = sample_count;
  rep.min_levi = std::numeric_limits<double>::infinity();
  for (int s = 0; s < sample_count; ++s) {
    CVector dir = rng.complex_gaussian(n);
    CVector q;
    try {
      q = boundary_ray_hit(d, anchor, dir);
    } catch (const NumericalError&) {
      ++rep.failures;
      continue;
    }
    const DefiningEval e = d.eval(q, 2);
    // orthonormal basis of the complex tangent space {v : sum psi_a v_a = 0}
    const CVector w = e.grad().conjugate();
    CMatrix basis(n, n - 1);
    int col = 0;
    CMatrix chosen(n, n);
    chosen.col(0) = w / w.norm();
    for (int k = 0; k < n && col < n - 1; ++k) {
      CVector v = CVector::Zero(n);
      v[k] = 1;
      for (int j = 0; j <= col; ++j) v -= chosen.col(j).dot(v) * chosen.col(j);
      if (v.norm() > 1e-8) {
        v /= v.norm();
        chosen.col(col + 1) = v;
        basis.col(col) = v;
        ++col;
      }
    }
    if (col < n - 1) {
      ++rep.failures;
      continue;
    }
    const CMatrix levi = e.hess_mixed();
    const CMatrix M = basis.transpose() * levi * basis.conjugate();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(M);
    const double mn = es.eigenvalues().minCoeff();
    rep.min_levi = std::min(rep.min_levi, mn);
  }
  rep.pass = rep.failures == 0 && rep.min_levi > 0;
  return rep;
}

std::pair<NormalizationMap, DomainPtr> normalize_dagger(DomainPtr d,
                                                        const CVector& q) {
  const int n = d->dim();
  const DefiningEval e = d->eval(q, 1);
  if (std::abs(e.psi()) > 1e-9)
    throw NumericalError("normalization point is not on the boundary");
  const CVector u = e.grad();
  const double s = u.norm();
  if (s == 0) throw NumericalError("zero gradient at normalization point");

  // Unitary W with W u = |u| e_n: last row is conj(u)/|u|, the rest completes
  // an orthonormal system.
  CMatrix W = CMatrix::Zero(n, n);
  W.row(n - 1) = u.conjugate().transpose() / s;
  int filled = 0;
  for (int k = 0; k < n && filled < n - 1; ++k) {
    CVector v = CVector::Zero(n);
    v[k] = 1;
    const CVector rn = W.row(n - 1).transpose();
    v -= rn.dot(v) * rn;
    // re-orthogonalize against previously filled rows
    for (int j = 0; j < filled; ++j) {
      const CVector rj = W.row(j).transpose();
      v -= rj.dot(v) * rj;
    }
    if (v.norm() > 1e-8) {
      W.row(filled) = (v / v.norm()).transpose();
      ++filled;
    }
  }
  if (filled < n - 1) throw NumericalError("failed to complete unitary frame");

  AffineMap map;
  map.b = q;
  map.A = W.transpose();  // z = q + W^T w
  map.scale = s;
  NormalizationMap nm;
  nm.q = q;
  nm.U = W.conjugate();  // w = U (z - q)
  nm.scale = s;
  return {nm, make_transformed(std::move(d), map)};
}

RescaleMap rescale_domain(const Domain& d, const CVector& p) {
  const double psi = d.psi(p);
  if (psi >= 0) throw NumericalError("rescale point must be interior");
  return RescaleMap{p, -psi};
}

DomainPtr rescaled_image(DomainPtr d, const RescaleMap& map) {
  const int n = d->dim();
  AffineMap am;
  am.b = map.p;
  am.A = map.factor * CMatrix::Identity(n, n);
  am.scale = map.factor;
  return make_transformed(std::move(d), am);
}

nlohmann::json domain_to_json(const Domain& d) { return d.params(); }

DomainPtr domain_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ball") {
    return make_ball(j.at("n").get<int>(), j.value("radius", 1.0));
  }
  if (kind == "ellipsoid") {
    return make_ellipsoid(j.at("weights").get<std::vector<double>>());
  }
  if (kind == "perturbed_ball") {
    return make_perturbed_ball(j.at("n").get<int>(), j.at("epsilon").get<double>(),
                               j.value("pert_id", 0));
  }
  if (kind == "halfspace") {
    return make_halfspace(cvector_from_json(j.at("normal")));
  }
  if (kind == "polynomial") {
    const int n = j.at("n").get<int>();
    std::vector<Monomial> terms;
    for (const auto& jt : j.at("terms")) {
      Monomial m;
      m.c = complex_from_json(jt.at("coeff"));
      m.ez = jt.at("z").get<std::vector<int>>();
      m.ezb = jt.at("zbar").get<std::vector<int>>();
      terms.push_back(std::move(m));
    }
    CVector interior = CVector::Zero(n);
    if (j.contains("interior")) interior = cvector_from_json(j.at("interior"));
    return make_polynomial(n, terms, interior);
  }
  if (kind == "transformed") {
    DomainPtr base = domain_from_json(j.at("base"));
    AffineMap map;
    map.b = cvector_from_json(j.at("b"));
    const auto& rows = j.at("A");
    const int n = (int)rows.size();
    map.A = CMatrix(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) map.A(i, k) = complex_from_json(rows[i][k]);
    map.scale = j.at("scale").get<double>();
    return make_transformed(std::move(base), map);
  }
  throw std::invalid_argument("unknown domain kind: " + kind);
}

}  // namespace robin

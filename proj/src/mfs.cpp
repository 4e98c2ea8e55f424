#include "robin/mfs.hpp"

#include <cmath>

#include "robin/rng.hpp"

namespace robin {

namespace {

double kernel(const CVector& x, const CVector& q, int n) {
  const double r2 = (x - q).squaredNorm();
  if (r2 == 0) throw NumericalError("kernel evaluated at its singularity");
  return pow_int(r2, 1 - n);
}

// Orthonormal real-tangent frame at a boundary point (2n-1 vectors).
std::vector<CVector> tangent_frame(const DefiningEval& e) {
  const int n = e.n();
  const CVector normal = outward_normal(e);
  std::vector<CVector> frame;
  auto rdot = [&](const CVector& a, const CVector& b) {
    Complex s(0, 0);
    for (int i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s.real();
  };
  std::vector<CVector> candidates;
  for (int k = 0; k < n; ++k) {
    CVector v = CVector::Zero(n);
    v[k] = 1;
    candidates.push_back(v);
    v[k] = Complex(0, 1);
    candidates.push_back(v);
  }
  for (auto& v : candidates) {
    CVector u = v - rdot(v, normal) * normal;
    for (const auto& f : frame) u -= rdot(u, f) * f;
    const double nn = std::sqrt(rdot(u, u));
    if (nn > 1e-8) frame.push_back(u / nn);
    if ((int)frame.size() == 2 * n - 1) break;
  }
  return frame;
}

}  // namespace

namespace {

// Quasi-uniform boundary sample by the best-candidate rule: each point is the
// ray hit that maximizes the distance to the points already chosen.
std::vector<CVector> spread_boundary_sample(const Domain& domain,
                                            const CVector& anchor, int count,
                                            SeededRng& rng) {
  std::vector<CVector> pts;
  pts.reserve(count);
  const int n = domain.dim();
  const int candidates = 8;
  for (int i = 0; i < count; ++i) {
    CVector best;
    double best_score = -1;
    for (int c = 0; c < (i == 0 ? 1 : candidates); ++c) {
      const CVector q = boundary_ray_hit(domain, anchor, rng.complex_gaussian(n));
      double score = std::numeric_limits<double>::infinity();
      for (const auto& p : pts)
        score = std::min(score, (p - q).squaredNorm());
      if (pts.empty()) score = 1;
      if (score > best_score) {
        best_score = score;
        best = q;
      }
    }
    pts.push_back(best);
  }
  return pts;
}

}  // namespace

MfsModel mfs_build(DomainPtr domain, const MfsOptions& opts) {
  if (!domain->bounded())
    throw NumericalError("method of fundamental solutions needs a bounded domain");
  if (opts.inflation <= 1.0)
    throw std::invalid_argument("inflation must exceed 1 (charges on the boundary)");
  const int n = domain->dim();
  const CVector anchor = domain->interior_point();

  MfsModel m;
  m.domain = domain;
  m.opts = opts;

  SeededRng colloc_rng(split_seed(opts.seed, 1));
  m.collocation = spread_boundary_sample(*domain, anchor, opts.collocation,
                                         colloc_rng);
  SeededRng charge_rng(split_seed(opts.seed, 2));
  for (const CVector& q :
       spread_boundary_sample(*domain, anchor, opts.charges, charge_rng)) {
    m.charges.push_back(anchor + opts.inflation * (q - anchor));
  }

  if (opts.near) {
    // Collocation rings around the anchor at tangential radii graded from
    // half the pole depth outward, and charges along the outward normal at
    // the same scales; resolves the data peak of near-boundary poles.
    const CVector q0 = opts.near->boundary_point;
    const double delta = opts.near->scale;
    const DefiningEval e0 = domain->eval(q0, 2);
    const CVector nu = outward_normal(e0);
    const auto frame = tangent_frame(e0);
    SeededRng ring_rng(split_seed(opts.seed, 3));

    for (double rho = 0.5 * delta; rho < 60 * delta; rho *= 1.45) {
      for (int k = 0; k < 8; ++k) {
        CVector dir = CVector::Zero(n);
        for (const auto& f : frame) dir += ring_rng.normal() * f;
        dir /= dir.norm();
        try {
          m.collocation.push_back(project_to_boundary_near(*domain, q0 + rho * dir));
        } catch (const NumericalError&) {
          // ring point left the region where projection converges; skip
        }
      }
    }
    for (double h = delta; h < 50 * delta; h *= 1.5) {
      m.charges.push_back(q0 + h * nu);
      for (const auto& f : {frame[0], frame[1]}) {
        m.charges.push_back(q0 + h * nu + 0.75 * h * f);
        m.charges.push_back(q0 + h * nu - 0.75 * h * f);
      }
    }
    m.trust_floor = std::min(0.02, 0.25 * delta);
  }

  const int M = (int)m.collocation.size();
  const int N = (int)m.charges.size();
  if (N > M) throw std::invalid_argument("more charges than collocation points");
  m.A.resize(M, N);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < N; ++j) m.A(i, j) = kernel(m.collocation[i], m.charges[j], n);
  m.solver.compute(m.A);
  if (m.solver.rank() < N / 2)
    throw NumericalError("fundamental-solution system is rank deficient: rank " +
                         std::to_string(m.solver.rank()));

  // self-diagnostic: solve for the interior anchor pole
  MfsSolveInfo info;
  MfsModel& mm = m;
  (void)mfs_robin(mm, anchor, &info);
  m.base_residual = info.residual_inf;
  return m;
}

std::vector<double> mfs_robin_batch(const MfsModel& model,
                                    const std::vector<CVector>& poles) {
  const int n = model.domain->dim();
  const int M = (int)model.collocation.size();
  const int N = (int)model.charges.size();
  const int K = (int)poles.size();
  RMatrix rhs(M, K);
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < M; ++i) rhs(i, k) = kernel(model.collocation[i], poles[k], n);
  const RMatrix c = model.solver.solve(rhs);
  std::vector<double> out(K);
  for (int k = 0; k < K; ++k) {
    double h = 0;
    for (int j = 0; j < N; ++j) h += c(j, k) * kernel(poles[k], model.charges[j], n);
    out[k] = -h;
  }
  return out;
}

double mfs_robin(const MfsModel& model, const CVector& p, MfsSolveInfo* info) {
  const int n = model.domain->dim();
  const int M = (int)model.collocation.size();
  RVector rhs(M);
  for (int i = 0; i < M; ++i) rhs[i] = kernel(model.collocation[i], p, n);
  const RVector c = model.solver.solve(rhs);
  const double residual = (model.A * c - rhs).lpNorm<Eigen::Infinity>();
  if (info) {
    info->residual_inf = residual;
    info->low_confidence = residual > model.opts.residual_warn * rhs.lpNorm<Eigen::Infinity>();
  }
  double h = 0;
  for (int j = 0; j < (int)model.charges.size(); ++j)
    h += c[j] * kernel(p, model.charges[j], n);
  return -h;
}

}  // namespace robin

#pragma once

#include <vector>

#include "robin/robin.hpp"
#include "robin/types.hpp"

namespace robin {

// Kahler metric data assembled from Robin-function derivatives:
// g_{alpha betabar} = Lambda_{alpha betabar}/Lambda - Lambda_alpha
// Lambda_betabar / Lambda^2, together with inverse, determinant, cofactors
// and the derivative tensor dg[gamma](alpha,beta) = d g_{alpha betabar} /
// d p_gamma.
struct MetricData {
  int n = 0;
  CMatrix g;
  CMatrix g_inv;
  double det = 0;
  CMatrix cofactors;           // Delta_{alpha betabar}
  std::vector<CMatrix> dg;     // indexed by gamma in I
  bool positive_definite = false;
  double min_eigenvalue = 0;
};

MetricData metric_tensor(const RobinEval& re);

// Fills dg from third derivatives (requires re.order >= 3).
void metric_derivative(const RobinEval& re, MetricData& m);

// Determinant by LU, cofactors by explicit minors, inverse from the
// adjugate; validates the row-n cofactor expansion internally.
void inverse_det_cofactors(MetricData& m);

MetricData metric_data(const RobinEval& re, bool with_derivative);

// Deviation of the pullback identity g(p) = U^T gt(U(p-q)) conj(U), where
// gt is the metric of the image domain under w = U(z - q).
double affine_pullback_deviation(const MetricData& g_src,
                                 const MetricData& g_img, const CMatrix& U);

}  // namespace robin

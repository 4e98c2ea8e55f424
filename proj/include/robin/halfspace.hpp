#pragma once

#include "robin/domain.hpp"
#include "robin/types.hpp"

namespace robin {

// Model half space H = { w : 2 Re <b, w> - 1 < 0 }, with b the gradient
// coefficients of the defining function at the boundary point. The origin is
// interior (value -1).
struct HalfSpaceModel {
  CVector b;
  int n = 0;
  double grad_norm = 0;  // |b|
  CVector star0;         // reflection of the origin: conj(b)/|b|^2
};

HalfSpaceModel make_halfspace_model(const CVector& b);

// Reflection across {2 Re <b, w> = 1}; an involution fixing the hyperplane.
CVector symmetric_point(const HalfSpaceModel& m, const CVector& p);

// G(p,z) = |z-p|^{-2n+2} - |z-p*|^{-2n+2}
double halfspace_green(const HalfSpaceModel& m, const CVector& p,
                       const CVector& z);

// Robin function: -|b|^{2n-2} (2 Re<b,p> - 1)^{-2n+2}
double halfspace_robin(const HalfSpaceModel& m, const CVector& p);

// g0(w) = |w - 0*|^{-2n} (-|0*|^2 + sum_i 0*_i conj(w_i)); harmonic in w.
Complex g0_eval(const HalfSpaceModel& m, const CVector& w);

// Same function assembled from the Green function and its radial derivative,
// where the |w|^{-2n+2} singularities cancel; used to validate g0_eval.
Complex g0_raw_eval(const HalfSpaceModel& m, const CVector& w);

// d/dw_c { g0 + conj(g0) } at w = 0, c a Wirtinger code.
Complex g0_sum_derivative(const HalfSpaceModel& m, int c);

// g_alpha(w) = -(n-1) b_alpha (g0 + conj g0)(w), alpha in I.
Complex g_alpha_eval(const HalfSpaceModel& m, int alpha, const CVector& w);

// d g_alpha / d w_c at w = 0: (n-1)(2n-1) b_alpha b_c |b|^{2n-2}.
Complex g_alpha_w_derivative(const HalfSpaceModel& m, int alpha, int c);

// Variation function of the rescaled family: f(p,w) defines D(p); equals
// psi(p - psi(p) w)/(-psi(p)) in the interior and its boundary limit
// 2 Re sum w_a psi_a(p) - 1 when psi(p) = 0.
double variation_f(const Domain& d, const CVector& p, const CVector& w);

// Same value through the line-integral representation (Gauss-Legendre),
// used as an independent oracle in tests.
double variation_f_quadrature(const Domain& d, const CVector& p,
                              const CVector& w, int points);

// df/dp_a at (p, zeta), for interior or boundary p.
Complex variation_df_dp(const Domain& d, const CVector& p, const CVector& zeta,
                        int a);

// |d_zeta f(p, zeta)| = |dpsi(p - psi(p) zeta)|
double variation_dzeta_norm(const Domain& d, const CVector& p,
                            const CVector& zeta);

// k1^(a)(p, zeta) = (df/dp_a) / |d_zeta f|
Complex variation_k1(const Domain& d, const CVector& p, const CVector& zeta,
                     int a);

}  // namespace robin

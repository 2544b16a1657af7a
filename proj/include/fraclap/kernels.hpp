#ifndef FRACLAP_KERNELS_HPP
#define FRACLAP_KERNELS_HPP

#include "fraclap/constants.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/quadrature.hpp"

// The four kernels on the ball: fundamental solution Phi, s-mean kernel A_r,
// Poisson kernel P_r, and the Green function G in closed form and straight
// from its defining integral.

namespace fraclap::kernels {

struct KernelContext {
  int n;
  double s;
  double r;
  constants::ConstantsBundle constants;
};

KernelContext make_context(int n, double s, double r);

// Phi(x) = a(n,s) |x|^{2s-n} for n != 2s, -(1/pi) log|x| for n = 2s.
// Singular at x = 0 when n >= 2s; for n < 2s the origin value 0 is regular.
double fundamental_solution(const KernelContext& ctx, const Point& x);

// A_r(y) = c(n,s) r^{2s} ((|y|^2-r^2)^s |y|^n)^{-1} outside the closed ball,
// 0 on it.
double s_mean_kernel(const KernelContext& ctx, const Point& y);

// P_r(y,x) = c(n,s) ((r^2-|x|^2)/(|y|^2-r^2))^s |x-y|^{-n}, |x| < r < |y|.
double poisson_kernel(const KernelContext& ctx, const Point& y, const Point& x);

// r0(x,z) = (r^2-|x|^2)(r^2-|z|^2) / (r^2 |x-z|^2).
double r0(const KernelContext& ctx, const Point& x, const Point& z);

struct GreenEval {
  double value = 0.0;
  double r0 = 0.0;
  bool diagonal = false;
};

// Closed-form Green function:
//   kappa(n,s) |z-x|^{2s-n} int_0^{r0} t^{s-1}(1+t)^{-n/2} dt      (n != 2s)
//   (1/pi) log( (r^2 - x.z + sqrt((r^2-|x|^2)(r^2-|z|^2))) / (r|z-x|) )
//                                                                  (n = 2s)
// On the diagonal (|x-z| < 1e-10 r): n >= 2s raises
// DiagonalSingularityError; n < 2s returns the finite limit
// kappa(1,s)/(s-1/2) (r^2-|x|^2)^{2s-1} r^{1-2s}.
GreenEval green_closed(const KernelContext& ctx, const Point& x, const Point& z);

// Green function from the definition Phi(x-z) - int Phi(z-y) P_r(y,x) dy,
// the exterior integral pulled back through the inversion centered at x.
// n <= 3; agrees with green_closed within combined tolerances.
quadrature::QuadResult green_definition(const KernelContext& ctx, const Point& x,
                                        const Point& z,
                                        const quadrature::QuadSpec& spec);

}  // namespace fraclap::kernels

#endif

#ifndef FRACLAP_SPECFUN_HPP
#define FRACLAP_SPECFUN_HPP

#include <limits>

#include "fraclap/errors.hpp"

// Self-contained special functions: Gamma, Beta, Pochhammer, the Gauss
// hypergeometric function on the parameter ranges this library actually
// needs, and two closed forms that recur in the ball kernels (the boundary
// integral int_0^x t^{s-1}(1+t)^{-n/2} dt and the sine moment
// int_0^inf t^{2s-2} sin t dt).

namespace fraclap::specfun {

enum class Regime {
  Super,     // n > 2s
  Sub,       // n < 2s  (forces n = 1, s > 1/2)
  Critical,  // n = 2s  (forces n = 1, s = 1/2)
};

// Case split of the fundamental solution.  The two n=1 branches do not
// connect continuously at s = 1/2, so classification is by threshold:
// Critical iff n == 1 and |s - 1/2| <= 1e-12.  Calls with n == 1 and
// 1e-12 < |s - 1/2| < 1e-3 succeed but carry a conditioning warning,
// since a(1,s) grows like 1/cos(pi s) there.
struct RegimeTag {
  int n = 0;
  double s = 0;
  Regime regime = Regime::Super;
  bool near_critical_warning = false;

  static RegimeTag classify(int n, double s);
};

// Gamma on R minus the nonpositive integers (Lanczos, reflection for x < 1/2).
double gamma(double x);

// 1/Gamma(x); returns 0 at the nonpositive integers.
double inv_gamma(double x);

// B(x,y) = Gamma(x)Gamma(y)/Gamma(x+y), x,y > 0.
double beta(double x, double y);

// Rising factorial (q)_k.
double pochhammer(double q, int k);

// Gauss hypergeometric F(a,b;c;w).  Supported domain: w < 1 (arguments
// w <= -1 are reached through a Pfaff transform), plus any w when the
// series terminates because a or b is a nonpositive integer.  Relative
// accuracy <= 1e-10 on the supported domain.
double hyp2f1(double a, double b, double c, double w);

// int_0^x t^{s-1} (1+t)^{-n/2} dt.  x may be +infinity, which requires
// n > 2s and gives B(s, n/2 - s); otherwise the full-range integral
// diverges and DivergenceError is thrown.
double boundary_integral(int n, double s, double x);

// int_0^inf t^{2s-2} sin t dt = -cos(pi s) Gamma(2s-1) for s in (0,1/2),
// with the limit value pi/2 at s = 1/2.
double sine_moment(double s);

// I_k = int_0^pi sin^k(theta) dtheta via the recurrence I_k = (k-1)/k I_{k-2}.
double wallis(int k);

// sin(pi x) and cos(pi x) with argument reduction done in exact arithmetic,
// so they stay accurate near the zeros (plain std::sin(M_PI*x) does not).
double sin_pi(double x);
double cos_pi(double x);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace fraclap::specfun

#endif

#ifndef FRACLAP_CONSTANTS_HPP
#define FRACLAP_CONSTANTS_HPP

#include <optional>

#include "fraclap/specfun.hpp"

// Closed forms of every normalization constant of the fractional Laplacian
// on the ball, plus an independent quadrature route for the operator
// constant C(n,s) so the two can be checked against each other.

namespace fraclap::quadrature {
struct QuadSpec;
}

namespace fraclap::constants {

// Fundamental-solution constant a(n,s):
//   Gamma(n/2-s) / (2^{2s} pi^{n/2} Gamma(s))   for n != 2s,
//   -1/pi                                        for n = 2s.
double a_const(int n, double s);

// Kernel constant c(n,s) = Gamma(n/2) sin(pi s) / pi^{n/2+1}.
double c_const(int n, double s);

// Green integral normalizer k(n,s):
//   Gamma(n/2) / (Gamma(n/2-s) Gamma(s))                     for n > 2s,
//   c(1,s) Gamma(1/2) Gamma(-s) Gamma(s+1) / (Gamma(1/2-s) Gamma(s))
//                                                            for n < 2s;
// undefined at n = 2s (RegimeError).
double k_const(int n, double s);

// Green prefactor kappa(n,s) = Gamma(n/2) / (2^{2s} pi^{n/2} Gamma(s)^2) for
// n != 2s and 1/pi at n = 2s.  In the n < 2s regime the value is also
// computed as -a(1,s) k(1,s) and the two routes must agree to 1e-12.
double kappa_const(int n, double s);

// Operator constant C(n,s) = 2^{2s} s Gamma(n/2+s) / (pi^{n/2} Gamma(1-s)).
double big_c_const(int n, double s);

// C(n,s) by numerical evaluation of (int (1-cos eta_1)/|eta|^{n+2s} deta)^{-1}
// for n in {1,2,3}: Taylor head near the origin, quadrature midrange, and a
// closed-form-plus-accelerated-oscillation tail.
double big_c_quadrature(int n, double s, double rel_tol = 1e-8);

// Measure of the (n-1)-dimensional unit sphere, 2 pi^{n/2} / Gamma(n/2).
double sphere_measure(int n);

struct ConstantsBundle {
  int n = 0;
  double s = 0;
  specfun::RegimeTag tag;
  double a = 0;
  double c = 0;
  std::optional<double> k;  // absent in the critical regime
  double kappa = 0;
  double big_c = 0;
  double omega_n = 0;
};

// All constants for one (n,s), with the kappa = a*k consistency check run
// in the regimes where it applies.
ConstantsBundle make_bundle(int n, double s);

}  // namespace fraclap::constants

#endif

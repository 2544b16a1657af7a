#ifndef FRACLAP_QUADRATURE_HPP
#define FRACLAP_QUADRATURE_HPP

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/geometry.hpp"

// Numerical integration engine: singular-endpoint 1-D rules (Gauss-Jacobi
// when endpoint exponents are declared, tanh-sinh otherwise, exp-sinh on
// semi-infinite ranges), cubature over balls and shells in R^n (n <= 3),
// exterior-domain integration through the Kelvin inversion, and the
// principal-value evaluator of the fractional Laplacian.
//
// Everything here is deterministic: fixed node ladders, fixed summation
// order (pairwise), no randomness, no scheduling dependence.

namespace fraclap::quadrature {

struct QuadSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  long max_nodes = 20000000;
  // Integrable endpoint behavior of the integrand: f ~ (x-a)^alpha at the
  // left end and (b-x)^beta at the right, alpha,beta > -1.  For the ball
  // integrators the exponents describe the reduced radial integrand,
  // Jacobian included.
  std::optional<double> left_exponent;
  std::optional<double> right_exponent;

  QuadSpec() = default;
  QuadSpec(double rel, double abs) : rel_tol(rel), abs_tol(abs) {}

  QuadSpec with_exponents(std::optional<double> left,
                          std::optional<double> right) const {
    QuadSpec s = *this;
    s.left_exponent = left;
    s.right_exponent = right;
    return s;
  }
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long nodes_used = 0;
  bool converged = false;
};

using Fn1 = std::function<double(double)>;
using FnN = std::function<double(const Point&)>;

// Nodes and weights of an m-point rule; Gauss-Jacobi rules absorb the weight
// function (1-x)^alpha (1+x)^beta on [-1,1].
struct Rule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

const Rule& gauss_legendre(int m);
const Rule& gauss_jacobi(int m, double alpha, double beta);

// Fixed-order pairwise reduction, the summation primitive used throughout.
double pairwise_sum(std::vector<double>& terms);

// int_a^b f, b may be +infinity.  Returns converged = false rather than
// throwing when the node budget runs out; check_converged() upgrades that
// to BudgetExceededError.
QuadResult integrate_interval(const Fn1& f, double a, double b, const QuadSpec& spec);

// Same, with interior breakpoints the integrand is known to be rough at.
QuadResult integrate_interval_split(const Fn1& f, double a, double b,
                                    const std::vector<double>& breakpoints,
                                    const QuadSpec& spec);

const QuadResult& check_converged(const QuadResult& r, const char* what);

// int_{B_r} f via the hyperspherical reduction about the origin.  n <= 3.
QuadResult integrate_ball(const FnN& f, const BallDomain& domain, const QuadSpec& spec);

// int_{B_r} f in polar coordinates about an interior point.  The radial
// integrand along each ray runs to the boundary, so a diagonal singularity
// at the center and a boundary weight can both be declared through spec.
QuadResult integrate_ball_about(const FnN& f, const BallDomain& domain,
                                const QuadSpec& spec, const Point& center);

// int over the shell r_inner < |y| < r_outer, polar about a point of the
// shell; inner_exponent declares the (|y|-r_inner)-type weight at the inner
// sphere crossings.
QuadResult integrate_shell_about(const FnN& f, double r_inner, double r_outer,
                                 const QuadSpec& spec, const Point& center,
                                 std::optional<double> inner_exponent);

// int_{R^n \ B_r} f dy, pulled back to the ball with the Kelvin inversion
// about an interior center (dy/|y-c|^n = dy*/|y*-c|^n identity).  The
// declared exponents describe the pulled-back radial integrand: left at the
// center (the image of infinity), right at the sphere.
QuadResult integrate_exterior(const FnN& f, const BallDomain& domain,
                              const QuadSpec& spec, const Point& inversion_center);

// Far-field decay classes the principal-value evaluator can certify a tail
// bound for.  Both are stated relative to far_limit, the value u approaches
// at infinity (0 for honest decay, the constant itself for constant data).
enum class DecayClass {
  CompactSupport,  // u == far_limit outside B_{support_radius}
  PowerLaw,        // |u(y) - far_limit| <= amplitude |y|^{-power}, power > 0
};

// C^2 local data plus far-field decay, the contract of the PV evaluator.
struct PvField {
  FnN eval;
  double smooth_radius = 0.0;             // u is C^2 within this distance of x
  double second_derivative_bound = 0.0;   // sup |D^2 u| on that ball
  std::optional<DecayClass> decay;
  double far_limit = 0.0;
  double support_radius = 0.0;            // CompactSupport
  double power = 0.0, amplitude = 0.0;    // PowerLaw
};

// (C(n,s)/2) int (2u(x)-u(x+y)-u(x-y)) / |y|^{n+2s} dy with the near-origin
// piece bounded by the Taylor remainder, the middle shell by cubature, and
// the far tail by the declared decay class.
double frac_laplacian_pointwise(const PvField& u, const Point& x, double s,
                                const QuadSpec& spec);

// sum_k int_{a+k pi}^{a+(k+1) pi} f, accelerated as an alternating series
// (iterated averaging).  For oscillatory tails int_a^inf f with f = envelope
// times a pi-antiperiodic-ish oscillation.
double alternating_series_tail(const Fn1& f, double a, int max_half_periods,
                               double* error_estimate = nullptr);

}  // namespace fraclap::quadrature

#endif

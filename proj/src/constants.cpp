#include "fraclap/constants.hpp"

#include <cmath>

#include "fraclap/quadrature.hpp"

namespace fraclap::constants {

namespace {

constexpr double kPi = 3.14159265358979323846;

using specfun::Regime;
using specfun::RegimeTag;

// Angular factor of the polar reduction of int (1-cos eta_1)|eta|^{-n-2s}:
//   S(rho) = A_n int_0^pi (1 - cos(rho cos theta)) sin^{n-2}(theta) dtheta,
// with A_n = omega_n / wallis(n-2) the measure of S^{n-2} (n >= 2).
// n = 1 degenerates to the two-point sphere, S(rho) = 2(1 - cos rho).
double angular_one_minus_cos(int n, double rho) {
  if (n == 1) return 2.0 * (1.0 - std::cos(rho));
  if (n == 3) {
    // int_{-1}^{1} (1-cos(rho c)) dc = 2 - 2 sin(rho)/rho, prefactor 2 pi.
    const double sinc = (std::abs(rho) < 1e-8)
                            ? 1.0 - rho * rho / 6.0
                            : std::sin(rho) / rho;
    return 2.0 * kPi * (2.0 - 2.0 * sinc);
  }
  // n = 2: Gauss-Legendre in theta, node count tracking the oscillation.
  const double a2 = sphere_measure(2) / specfun::wallis(0);
  int m = 32;
  while (m < 8 * (int)(std::abs(rho) + 1.0) && m < 2048) m *= 2;
  const auto& rule = quadrature::gauss_legendre(m);
  std::vector<double> terms(m);
  for (int i = 0; i < m; ++i) {
    const double th = 0.5 * kPi * (rule.nodes[i] + 1.0);
    terms[i] = rule.weights[i] * (1.0 - std::cos(rho * std::cos(th)));
  }
  return a2 * 0.5 * kPi * quadrature::pairwise_sum(terms);
}

void require_ns(int n, double s) {
  if (n < 1) throw DomainError("constants: dimension must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("constants: order must lie in (0,1)");
}

}  // namespace

double sphere_measure(int n) {
  if (n < 1) throw DomainError("sphere_measure: dimension must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * n) / specfun::gamma(0.5 * n);
}

double a_const(int n, double s) {
  require_ns(n, s);
  const RegimeTag tag = RegimeTag::classify(n, s);
  if (tag.regime == Regime::Critical) return -1.0 / kPi;
  return specfun::gamma(0.5 * n - s) /
         (std::pow(2.0, 2.0 * s) * std::pow(kPi, 0.5 * n) * specfun::gamma(s));
}

double c_const(int n, double s) {
  require_ns(n, s);
  return specfun::gamma(0.5 * n) * specfun::sin_pi(s) / std::pow(kPi, 0.5 * n + 1.0);
}

double k_const(int n, double s) {
  require_ns(n, s);
  const RegimeTag tag = RegimeTag::classify(n, s);
  switch (tag.regime) {
    case Regime::Super:
      return specfun::gamma(0.5 * n) /
             (specfun::gamma(0.5 * n - s) * specfun::gamma(s));
    case Regime::Sub:
      return c_const(1, s) * specfun::gamma(0.5) * specfun::gamma(-s) *
             specfun::gamma(s + 1.0) /
             (specfun::gamma(0.5 - s) * specfun::gamma(s));
    case Regime::Critical:
      throw RegimeError("k_const: undefined at n = 2s");
  }
  throw RegimeError("k_const: unreachable");
}

double kappa_const(int n, double s) {
  require_ns(n, s);
  const RegimeTag tag = RegimeTag::classify(n, s);
  if (tag.regime == Regime::Critical) return 1.0 / kPi;
  const double g = specfun::gamma(s);
  const double closed = specfun::gamma(0.5 * n) /
                        (std::pow(2.0, 2.0 * s) * std::pow(kPi, 0.5 * n) * g * g);
  if (tag.regime == Regime::Sub) {
    // Two independent routes: -a(1,s) k(1,s) against 1/(2^{2s} Gamma(s)^2).
    const double composed = -a_const(n, s) * k_const(n, s);
    if (std::abs(composed - closed) > 1e-12 * std::abs(closed))
      throw ConsistencyError("kappa_const: -a(1,s) k(1,s) disagrees with the closed form");
    return closed;
  }
  return closed;
}

double big_c_const(int n, double s) {
  require_ns(n, s);
  return std::pow(2.0, 2.0 * s) * s * specfun::gamma(0.5 * n + s) /
         (std::pow(kPi, 0.5 * n) * specfun::gamma(1.0 - s));
}

double big_c_quadrature(int n, double s, double rel_tol) {
  require_ns(n, s);
  if (n > 3) throw DomainError("big_c_quadrature: desk-scale quadrature capped at n <= 3");

  const double eps = 0.5;    // Taylor head radius
  const double T = 40.0;     // start of the analytic tail
  const double wn = sphere_measure(n);
  const double an = (n >= 2) ? wn / specfun::wallis(n - 2) : 2.0;

  // Head: termwise-integrated Taylor series of 1 - cos(rho omega_1).
  double head = 0.0;
  {
    double sign = 1.0;
    double fact = 1.0;  // (2j)!
    for (int j = 1; j <= 9; ++j) {
      fact *= (2.0 * j - 1.0) * (2.0 * j);
      const double moment =
          (n == 1) ? 2.0 : an * specfun::beta(j + 0.5, 0.5 * (n - 1));
      head += sign * moment * std::pow(eps, 2.0 * j - 2.0 * s) /
              (fact * (2.0 * j - 2.0 * s));
      sign = -sign;
    }
  }

  // Midrange by adaptive quadrature of rho^{-1-2s} S(rho).
  quadrature::QuadSpec mid_spec(0.1 * rel_tol, 1e-14);
  auto mid_f = [&](double rho) {
    return std::pow(rho, -1.0 - 2.0 * s) * angular_one_minus_cos(n, rho);
  };
  const quadrature::QuadResult mid =
      quadrature::integrate_interval(mid_f, eps, T, mid_spec);
  if (!mid.converged)
    throw ConvergenceError("big_c_quadrature: midrange quadrature did not converge");

  // Tail: S(rho) = omega_n - B(rho) with B the oscillatory cosine average,
  // so the flat part integrates in closed form and B's contribution is an
  // accelerated alternating half-period series to subtract.
  const double tail_flat = wn * std::pow(T, -2.0 * s) / (2.0 * s);
  auto osc = [&](double rho) {
    return std::pow(rho, -1.0 - 2.0 * s) * (wn - angular_one_minus_cos(n, rho));
  };
  double osc_err = 0.0;
  const double tail_osc = quadrature::alternating_series_tail(osc, T, 46, &osc_err);

  const double total = head + mid.value + tail_flat - tail_osc;
  const double err = mid.error_estimate + osc_err;
  if (!(total > 0.0) || err > rel_tol * total)
    throw ConvergenceError("big_c_quadrature: residual estimate exceeds tolerance");
  return 1.0 / total;
}

ConstantsBundle make_bundle(int n, double s) {
  ConstantsBundle b;
  b.n = n;
  b.s = s;
  b.tag = RegimeTag::classify(n, s);
  b.a = a_const(n, s);
  b.c = c_const(n, s);
  b.kappa = kappa_const(n, s);
  b.big_c = big_c_const(n, s);
  b.omega_n = sphere_measure(n);
  if (b.tag.regime != Regime::Critical) {
    b.k = k_const(n, s);
    if (b.tag.regime == Regime::Super &&
        std::abs(b.kappa - b.a * *b.k) > 1e-12 * std::abs(b.kappa))
      throw ConsistencyError("constants: kappa != a*k in the n > 2s regime");
  }
  return b;
}

}  // namespace fraclap::constants

#include "fraclap/specfun.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace fraclap::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEps = std::numeric_limits<double>::epsilon();

bool nonpositive_integer(double x) {
  return x <= 0.5 && std::abs(x - std::nearbyint(x)) <= 1e-12;
}

bool near_integer(double x) { return std::abs(x - std::nearbyint(x)) <= 1e-10; }

std::string fmt(const char* name, double v) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%s=%.17g", name, v);
  return buf;
}

// Gauss series sum_{k} (a)_k (b)_k / ((c)_k k!) w^k.  Caller guarantees the
// series converges at a useful rate (|w| <= ~0.6) and that no (c)_k factor
// vanishes before termination.
double gauss_series(double a, double b, double c, double w) {
  double term = 1.0;
  double sum = 1.0;
  int settled = 0;
  for (int k = 0; k < 2000; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w;
    sum += term;
    if (std::abs(term) <= 0.25 * kEps * std::abs(sum)) {
      if (++settled >= 2) return sum;
    } else {
      settled = 0;
    }
  }
  throw ConvergenceError("hyp2f1: Gauss series failed its residual check at " +
                         fmt("w", w));
}

// Finite sum when a (or b) is a nonpositive integer -(terms-1).
double terminating_series(double a, double b, double c, double w, int terms) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k + 1 < terms; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w;
    sum += term;
  }
  return sum;
}

// Smooth remainder of the boundary integral over [1, x], written on the log
// scale: int_1^x t^{s-1}(1+t)^{-n/2} dt = int_0^{log x} e^{vs}(1+e^v)^{-n/2} dv.
// Composite Gauss-Legendre with panel doubling; the integrand is analytic and
// monotone so this is self-contained and fast (no quadrature-module cycle).
double boundary_integral_log_remainder(int n, double s, double x) {
  static constexpr double kNodes[8] = {
      -0.96028985649753623, -0.79666647741362674, -0.52553240991632899,
      -0.18343464249564980, 0.18343464249564980,  0.52553240991632899,
      0.79666647741362674,  0.96028985649753623};
  static constexpr double kWeights[8] = {
      0.10122853629037626, 0.22238103445337447, 0.31370664587788729,
      0.36268378337836198, 0.36268378337836198, 0.31370664587788729,
      0.22238103445337447, 0.10122853629037626};
  const double vmax = std::log(x);
  auto integrand = [&](double v) {
    return std::exp(v * s) * std::pow(1.0 + std::exp(v), -0.5 * n);
  };
  double prev = 0.0;
  for (int panels = 4; panels <= 4096; panels *= 2) {
    double total = 0.0;
    const double h = vmax / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) * h;
      double acc = 0.0;
      for (int j = 0; j < 8; ++j) acc += kWeights[j] * integrand(mid + 0.5 * h * kNodes[j]);
      total += 0.5 * h * acc;
    }
    if (panels > 4 && std::abs(total - prev) <= 1e-13 * std::abs(total)) return total;
    prev = total;
  }
  return prev;
}

}  // namespace

RegimeTag RegimeTag::classify(int n, double s) {
  if (n < 1) throw DomainError("regime: dimension must be >= 1, got " + fmt("n", n));
  if (!(s > 0.0 && s < 1.0))
    throw DomainError("regime: order must lie in (0,1), got " + fmt("s", s));
  RegimeTag tag;
  tag.n = n;
  tag.s = s;
  const double off = std::abs(s - 0.5);
  if (n == 1 && off <= 1e-12) {
    tag.regime = Regime::Critical;
  } else if (n == 1 && s > 0.5) {
    tag.regime = Regime::Sub;
  } else {
    tag.regime = Regime::Super;
  }
  tag.near_critical_warning = (n == 1 && off > 1e-12 && off < 1e-3);
  return tag;
}

double sin_pi(double x) {
  // x = m + f with f in [-1/2, 1/2]; sin(pi x) = (-1)^m sin(pi f).
  const double m = std::nearbyint(x);
  const double f = x - m;
  const double v = std::sin(kPi * f);
  return (std::fmod(std::abs(m), 2.0) < 0.5) ? v : -v;
}

double cos_pi(double x) { return sin_pi(0.5 - x); }

double gamma(double x) {
  if (!std::isfinite(x)) throw DomainError("gamma: nonfinite argument");
  if (nonpositive_integer(x))
    throw PoleError("gamma: pole at nonpositive integer " + fmt("x", x));
  if (x < 0.5) {
    // Reflection Gamma(x)Gamma(1-x) = pi / sin(pi x).
    return kPi / (sin_pi(x) * gamma(1.0 - x));
  }
  // Lanczos approximation, g = 7, nine coefficients.
  static constexpr double kCoef[9] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  const double z = x - 1.0;
  double acc = kCoef[0];
  for (int i = 1; i < 9; ++i) acc += kCoef[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

double inv_gamma(double x) {
  if (nonpositive_integer(x)) return 0.0;
  return 1.0 / gamma(x);
}

double beta(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0))
    throw DomainError("beta: arguments must be positive, got " + fmt("x", x) +
                      " " + fmt("y", y));
  return gamma(x) * gamma(y) / gamma(x + y);
}

double pochhammer(double q, int k) {
  if (k < 0) throw DomainError("pochhammer: negative index");
  double p = 1.0;
  for (int i = 0; i < k; ++i) p *= q + i;
  return p;
}

double hyp2f1(double a, double b, double c, double w) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(w))
    throw DomainError("hyp2f1: nonfinite argument");

  const int terms_a = nonpositive_integer(a) ? 1 - (int)std::nearbyint(a) : -1;
  const int terms_b = nonpositive_integer(b) ? 1 - (int)std::nearbyint(b) : -1;
  int terms = -1;
  if (terms_a > 0) terms = terms_a;
  if (terms_b > 0 && (terms < 0 || terms_b < terms)) terms = terms_b;
  const int pole_c = nonpositive_integer(c) ? 1 - (int)std::nearbyint(c) : -1;

  if (terms > 0) {
    if (pole_c > 0 && pole_c < terms)
      throw DomainError("hyp2f1: (c)_k vanishes before the series terminates");
    return terminating_series(a, b, c, w, terms);
  }
  if (pole_c > 0)
    throw DomainError("hyp2f1: c is a nonpositive integer, " + fmt("c", c));
  if (w >= 1.0)
    throw DomainError("hyp2f1: argument outside supported domain, " + fmt("w", w));

  if (std::abs(w) <= 0.5) return gauss_series(a, b, c, w);

  if (w < 0.0) {
    // Pfaff transform onto w/(w-1) in (0,1); keep the smaller upper parameter.
    const double v = w / (w - 1.0);
    if (std::abs(a) <= std::abs(b))
      return std::pow(1.0 - w, -a) * hyp2f1(a, c - b, c, v);
    return std::pow(1.0 - w, -b) * hyp2f1(b, c - a, c, v);
  }

  // 0.5 < w < 1: split at 1-w.  The Gamma prefactors have poles at integer
  // c-a-b; those parameter points are rejected rather than limit-taken.
  const double cab = c - a - b;
  if (near_integer(cab))
    throw DomainError("hyp2f1: c-a-b integer in the w->1-w split, " + fmt("c-a-b", cab));
  const double u = 1.0 - w;
  const double first =
      gamma(c) * gamma(cab) * inv_gamma(c - a) * inv_gamma(c - b) *
      gauss_series(a, b, a + b - c + 1.0, u);
  const double second =
      std::pow(u, cab) * gamma(c) * gamma(-cab) * inv_gamma(a) * inv_gamma(b) *
      gauss_series(c - a, c - b, cab + 1.0, u);
  return first + second;
}

double boundary_integral(int n, double s, double x) {
  if (n < 1 || !(s > 0.0 && s < 1.0))
    throw DomainError("boundary_integral: need n >= 1 and s in (0,1)");
  if (std::isnan(x) || x < 0.0)
    throw DomainError("boundary_integral: need x >= 0, got " + fmt("x", x));
  const bool super = n > 2.0 * s;
  if (std::isinf(x)) {
    if (!super)
      throw DivergenceError("boundary_integral: full-range integral diverges for n <= 2s");
    return beta(s, 0.5 * n - s);
  }
  if (x == 0.0) return 0.0;
  if (x <= 1.0) {
    // int_0^x = (x^s/s) F(n/2, s; s+1; -x), from the Euler integral with t = x u.
    return std::pow(x, s) / s * hyp2f1(0.5 * n, s, s + 1.0, -x);
  }
  if (super) {
    // Full range minus tail; t = 1/tau^2 - 1 turns the tail into an incomplete
    // Beta integral with argument z = 1/(1+x) < 1/2.
    const double z = 1.0 / (1.0 + x);
    const double p = 0.5 * n - s;
    const double tail = std::pow(z, p) / p * hyp2f1(1.0 - s, p, p + 1.0, z);
    return beta(s, p) - tail;
  }
  // n <= 2s (so n = 1): the singular-left-endpoint piece [0,1] through the
  // hypergeometric form, the smooth remainder by adaptive quadrature.
  return boundary_integral(n, s, 1.0) + boundary_integral_log_remainder(n, s, x);
}

double sine_moment(double s) {
  if (!(s > 0.0 && s <= 0.5))
    throw DomainError("sine_moment: need s in (0, 1/2], got " + fmt("s", s));
  if (std::abs(s - 0.5) <= 1e-12) return 0.5 * kPi;
  return -cos_pi(s) * gamma(2.0 * s - 1.0);
}

double wallis(int k) {
  if (k < 0) throw DomainError("wallis: negative power");
  double even = kPi;  // I_0
  double odd = 2.0;   // I_1
  if (k == 0) return even;
  if (k == 1) return odd;
  double v = (k % 2 == 0) ? even : odd;
  for (int j = (k % 2 == 0) ? 2 : 3; j <= k; j += 2) v *= (j - 1.0) / j;
  return v;
}

}  // namespace fraclap::specfun

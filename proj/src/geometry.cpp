#include "fraclap/geometry.hpp"

#include <cmath>

namespace fraclap::geometry {

namespace {

void check_center(const Point& x0, double r) {
  check_point(x0);
  if (!(r > 0.0)) throw DomainError("inversion: radius must be positive");
  if (!(x0.norm() < r)) throw DomainError("inversion: center must lie inside B_r");
}

}  // namespace

void check_point(const Point& p) {
  if (p.size() < 1) throw DomainError("point: dimension must be >= 1");
  if (!p.allFinite()) throw DomainError("point: nonfinite coordinate");
}

Point kelvin_invert(const Point& x0, double r, const Point& y) {
  check_center(x0, r);
  check_point(y);
  const Point d = y - x0;
  const double dd = d.squaredNorm();
  if (dd == 0.0) throw SingularityError("kelvin_invert: y coincides with the center");
  return x0 - ((r * r - x0.squaredNorm()) / dd) * d;
}

double inversion_jacobian(const Point& x0, double r, const Point& y) {
  check_center(x0, r);
  check_point(y);
  const double dd = (y - x0).squaredNorm();
  if (dd == 0.0) throw SingularityError("inversion_jacobian: y coincides with the center");
  return std::pow((r * r - x0.squaredNorm()) / dd, x0.size());
}

std::pair<double, double> distance_identity(const Point& x0, double r,
                                            const Point& x, const Point& y) {
  const Point xs = kelvin_invert(x0, r, x);
  const Point ys = kelvin_invert(x0, r, y);
  const double lhs = (ys - xs).norm();
  const double rhs = (r * r - x0.squaredNorm()) * (y - x).norm() /
                     ((y - x0).norm() * (x - x0).norm());
  return {lhs, rhs};
}

Point hyperspherical_to_cartesian(const HypersphericalCoord& hc, int n) {
  if (n < 1) throw DomainError("hyperspherical: dimension must be >= 1");
  const int angle_count = (n == 1) ? 0 : n - 1;
  if ((int)hc.angles.size() != angle_count)
    throw DomainError("hyperspherical: expected " + std::to_string(angle_count) +
                      " angles");
  if (!std::isfinite(hc.rho)) throw DomainError("hyperspherical: nonfinite radius");
  if (n > 1 && hc.rho < 0.0)
    throw DomainError("hyperspherical: radius must be nonnegative for n >= 2");

  Point p(n);
  if (n == 1) {
    p[0] = hc.rho;  // sign carries the direction on S^0
    return p;
  }
  // Angle layout mirrors the coordinate chart
  //   y_n = rho cos(theta), y_{n-1} = rho sin(theta) cos(theta_1), ...,
  //   y_1 = rho sin(theta) sin(theta_1) ... sin(theta_{n-2}),
  // with the final angle periodic on [0, 2pi].
  constexpr double kPi = 3.14159265358979323846;
  for (int i = 0; i < angle_count - 1; ++i)
    if (hc.angles[i] < 0.0 || hc.angles[i] > kPi)
      throw DomainError("hyperspherical: polar angle outside [0,pi]");
  const double last = hc.angles[angle_count - 1];
  if (last < 0.0 || last > 2.0 * kPi)
    throw DomainError("hyperspherical: azimuthal angle outside [0,2pi]");

  double sinprod = hc.rho;
  for (int i = 0; i < angle_count; ++i) {
    p[n - 1 - i] = sinprod * std::cos(hc.angles[i]);
    sinprod *= std::sin(hc.angles[i]);
  }
  p[0] = sinprod;
  return p;
}

double hyperspherical_volume_element(const HypersphericalCoord& hc, int n) {
  if (n == 1) return 1.0;
  double j = std::pow(std::abs(hc.rho), n - 1);
  // sin^{n-2}(theta) sin^{n-3}(theta_1) ... sin(theta_{n-3}); the final
  // periodic angle does not appear.
  for (int i = 0; i + 1 < (int)hc.angles.size(); ++i)
    j *= std::pow(std::sin(hc.angles[i]), n - 2 - i);
  return j;
}

}  // namespace fraclap::geometry

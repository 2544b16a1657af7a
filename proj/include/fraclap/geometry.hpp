#ifndef FRACLAP_GEOMETRY_HPP
#define FRACLAP_GEOMETRY_HPP

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "fraclap/errors.hpp"

// Points, origin-centered balls, hyperspherical coordinates, and the Kelvin
// point inversion with its measure and distance identities.

namespace fraclap {

using Point = Eigen::VectorXd;

// Origin-centered ball B_r in R^n.
struct BallDomain {
  int dim;
  double radius;

  BallDomain(int n, double r) : dim(n), radius(r) {
    if (n < 1) throw DomainError("BallDomain: dimension must be >= 1");
    if (!(r > 0.0)) throw DomainError("BallDomain: radius must be positive");
  }
  bool contains(const Point& p) const { return p.norm() < radius; }
};

// rho >= 0 plus angles theta, theta_1, ..., theta_{n-3} in [0,pi] and
// theta_{n-2} in [0,2pi].  For n = 1 the angle list is empty and rho is
// signed; for n = 2 there is a single angle in [0,2pi].
struct HypersphericalCoord {
  double rho = 0.0;
  std::vector<double> angles;
};

namespace geometry {

void check_point(const Point& p);

// Inversion with center x0 in B_r:  K(y) = x0 - (r^2-|x0|^2)/|y-x0|^2 (y-x0).
// x0 separates y and K(y); |K(y)-x0| |y-x0| = r^2 - |x0|^2.
Point kelvin_invert(const Point& x0, double r, const Point& y);

// |det DK|(y) = ((r^2-|x0|^2)/|y-x0|^2)^n, the volume-element ratio of the
// inversion (equivalently dy/|y-x0|^n = dy*/|y*-x0|^n).
double inversion_jacobian(const Point& x0, double r, const Point& y);

// Both sides of |y*-x*| = (r^2-|x0|^2) |y-x| / (|y-x0| |x-x0|), for tests.
std::pair<double, double> distance_identity(const Point& x0, double r,
                                            const Point& x, const Point& y);

Point hyperspherical_to_cartesian(const HypersphericalCoord& hc, int n);

// rho^{n-1} sin^{n-2}(theta) sin^{n-3}(theta_1) ... sin(theta_{n-3}).
double hyperspherical_volume_element(const HypersphericalCoord& hc, int n);

}  // namespace geometry
}  // namespace fraclap

#endif

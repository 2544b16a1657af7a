#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <thread>
#include <vector>

#include "fraclap/constants.hpp"
#include "fraclap/kernels.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/specfun.hpp"

using namespace fraclap;
namespace qd = quadrature;
namespace sf = specfun;

namespace {
constexpr double kPi = 3.14159265358979323846;

Point e1(int n, double scale) {
  Point p = Point::Zero(n);
  p[0] = scale;
  return p;
}
}  // namespace

TEST_CASE("gauss-jacobi exactness for weighted polynomials") {
  // An m-node rule integrates w(x) p(x) exactly for deg p <= 2m-1; compare
  // against a larger rule on the same weight.
  const double params[][2] = {{-0.5, -0.5}, {-0.25, 0.6}, {0.5, -0.75}, {0.0, 0.0}};
  for (const auto& ab : params) {
    const double alpha = ab[0], beta = ab[1];
    for (int m = 2; m <= 20; m += 3) {
      const auto& rule = qd::gauss_jacobi(m, alpha, beta);
      const auto& fine = qd::gauss_jacobi(m + 8, alpha, beta);
      // p(x) = x^{2m-1} - 0.3 x^{m} + 0.7
      auto p = [&](double x) {
        return std::pow(x, 2 * m - 1) - 0.3 * std::pow(x, m) + 0.7;
      };
      double a = 0.0, b = 0.0;
      for (int i = 0; i < m; ++i) a += rule.weights[i] * p(rule.nodes[i]);
      for (int i = 0; i < m + 8; ++i) b += fine.weights[i] * p(fine.nodes[i]);
      CHECK(std::abs(a - b) <= 5e-13 * std::max(1.0, std::abs(b)));
    }
  }
  CHECK_THROWS_AS(qd::gauss_jacobi(4, -1.0, 0.0), DomainError);
}

TEST_CASE("interval rule pins") {
  // B(1/2,1/2): both endpoints singular
  qd::QuadSpec spec(1e-12, 1e-14);
  spec.left_exponent = -0.5;
  spec.right_exponent = -0.5;
  auto f = [](double t) { return std::pow(t, -0.5) * std::pow(1.0 - t, -0.5); };
  const auto res = qd::integrate_interval(f, 0.0, 1.0, spec);
  CHECK(res.converged);
  CHECK(std::abs(res.value - kPi) <= 1e-12 * kPi);

  // semi-infinite with an algebraic endpoint: int_0^inf z^{-s}/(z+1)
  for (double s : {0.3, 0.5, 0.75}) {
    qd::QuadSpec tail_spec(1e-11, 1e-13);
    auto g = [s](double z) { return std::pow(z, -s) / (z + 1.0); };
    const auto r = qd::integrate_interval(g, 0.0, sf::kInfinity, tail_spec);
    CHECK(r.converged);
    CHECK(std::abs(r.value - kPi / sf::sin_pi(s)) <= 1e-10 * r.value);
  }

  // int_0^pi sin^2 = wallis(2)
  qd::QuadSpec plain(1e-12, 1e-14);
  auto h = [](double t) { return std::sin(t) * std::sin(t); };
  const auto w2 = qd::integrate_interval(h, 0.0, kPi, plain);
  CHECK(w2.converged);
  CHECK(std::abs(w2.value - sf::wallis(2)) <= 1e-12);
}

TEST_CASE("interval rule error paths") {
  qd::QuadSpec spec(1e-10, 1e-12);
  CHECK_THROWS_AS(qd::integrate_interval([](double) { return 1.0; }, 1.0, 0.0, spec),
                  DomainError);
  auto bad = [](double x) {
    return (x > 0.4 && x < 0.6) ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  CHECK_THROWS_AS(qd::integrate_interval(bad, 0.0, 1.0, spec), NonFiniteSampleError);

  // budget exhaustion reports converged = false; check_converged upgrades
  qd::QuadSpec tiny(1e-14, 1e-16);
  tiny.max_nodes = 40;
  auto rough = [](double x) { return std::pow(std::abs(x - 0.37713), 0.1); };
  const auto res = qd::integrate_interval(rough, 0.0, 1.0, tiny);
  CHECK_FALSE(res.converged);
  CHECK_THROWS_AS(qd::check_converged(res, "test"), BudgetExceededError);

  qd::QuadSpec bad_spec;
  bad_spec.left_exponent = -1.5;
  CHECK_THROWS_AS(qd::integrate_interval([](double) { return 1.0; }, 0.0, 1.0, bad_spec),
                  DomainError);
}

TEST_CASE("converged results honor their declared tolerance contract") {
  // converged == true implies error_estimate <= max(rel |value|, abs)
  auto contract = [](const qd::QuadResult& r, const qd::QuadSpec& spec) {
    if (!r.converged) return true;
    return r.error_estimate <=
           std::max(spec.abs_tol, spec.rel_tol * std::abs(r.value));
  };
  qd::QuadSpec a(1e-9, 1e-12);
  a.left_exponent = -0.5;
  CHECK(contract(qd::integrate_interval(
                     [](double t) { return std::pow(t, -0.5) * std::cos(t); }, 0.0,
                     2.0, a),
                 a));
  qd::QuadSpec b(1e-8, 1e-10);
  CHECK(contract(qd::integrate_interval(
                     [](double z) { return std::exp(-z) * std::log(1.0 + z); }, 0.0,
                     sf::kInfinity, b),
                 b));
  qd::QuadSpec c(1e-7, 1e-9);
  CHECK(contract(qd::integrate_ball([](const Point& p) { return std::cos(p[0]); },
                                    BallDomain(2, 1.0), c),
                 c));
}

TEST_CASE("rule cache is safe and consistent under concurrent use") {
  std::vector<std::thread> pool;
  std::vector<double> sums(8, 0.0);
  for (int t = 0; t < 8; ++t) {
    pool.emplace_back([t, &sums] {
      const auto& rule = qd::gauss_jacobi(41 + (t % 3), -0.3, 0.4);
      sums[t] = rule.weights.sum();
    });
  }
  for (auto& th : pool) th.join();
  // total weight equals the weight-function mass, identically for all callers
  const double mass = std::pow(2.0, 1.1) * sf::beta(0.7, 1.4);
  for (int t = 0; t < 8; ++t) CHECK(std::abs(sums[t] - mass) <= 1e-12 * mass);
  CHECK(sums[0] == sums[3]);  // same rule object, bit-identical
}

TEST_CASE("determinism: identical inputs give bit-identical results") {
  qd::QuadSpec spec(1e-11, 1e-13);
  spec.left_exponent = -0.4;
  auto f = [](double t) { return std::pow(t, -0.4) * std::cos(3.0 * t); };
  const auto a = qd::integrate_interval(f, 0.0, 2.0, spec);
  const auto b = qd::integrate_interval(f, 0.0, 2.0, spec);
  CHECK(std::memcmp(&a.value, &b.value, sizeof(double)) == 0);
  CHECK(a.nodes_used == b.nodes_used);

  const BallDomain ball(2, 1.0);
  auto g = [](const Point& y) { return std::exp(-y.squaredNorm()) + y[0]; };
  const auto c = qd::integrate_ball(g, ball, spec);
  const auto d = qd::integrate_ball(g, ball, spec);
  CHECK(std::memcmp(&c.value, &d.value, sizeof(double)) == 0);
}

TEST_CASE("ball cubature pins") {
  qd::QuadSpec spec(1e-10, 1e-12);
  const BallDomain b3(3, 1.0);
  auto one = [](const Point&) { return 1.0; };
  const auto vol3 = qd::integrate_ball(one, b3, spec);
  CHECK(vol3.converged);
  CHECK(std::abs(vol3.value - 4.0 * kPi / 3.0) <= 1e-9);

  const BallDomain b2(2, 1.5);
  const auto vol2 = qd::integrate_ball(one, b2, spec);
  CHECK(std::abs(vol2.value - kPi * 2.25) <= 1e-9);

  const BallDomain b1(1, 2.0);
  const auto vol1 = qd::integrate_ball(one, b1, spec);
  CHECK(std::abs(vol1.value - 4.0) <= 1e-12);

  // tensor cubature is capped at desk scale
  CHECK_THROWS_AS(qd::integrate_ball(one, BallDomain(4, 1.0), spec), DomainError);

  // radially symmetric gaussian against the 1-D reduction
  auto gauss = [](const Point& y) { return std::exp(-y.squaredNorm()); };
  const auto g3 = qd::integrate_ball(gauss, b3, spec);
  auto radial = [](double rho) { return rho * rho * std::exp(-rho * rho); };
  const double oracle = constants::sphere_measure(3) *
                        qd::check_converged(
                            qd::integrate_interval(radial, 0.0, 1.0, spec), "radial")
                            .value;
  CHECK(std::abs(g3.value - oracle) <= 1e-9);
}

TEST_CASE("ball-about handles the boundary weight and an interior pole") {
  // c(n,s) int (r^2-|y|^2)^{-s} |x-y|^{2s-n} dy = 1 at n=3, s=0.4, x=0.2 e1
  const int n = 3;
  const double s = 0.4;
  const Point x = e1(n, 0.2);
  qd::QuadSpec spec(1e-8, 1e-10);
  spec.left_exponent = 2.0 * s - 1.0;
  spec.right_exponent = -s;
  auto f = [&](const Point& y) {
    return std::pow(1.0 - y.squaredNorm(), -s) *
           std::pow((x - y).norm(), 2.0 * s - n);
  };
  const BallDomain ball(n, 1.0);
  const auto res = qd::integrate_ball_about(f, ball, spec, x);
  CHECK(res.converged);
  const double c = constants::c_const(n, s);
  CHECK(std::abs(c * res.value - 1.0) <= 1e-6);
  CHECK(std::abs(res.value - 20.755032391842416) <= 1e-5 * res.value);
}

TEST_CASE("exterior integrals through the inversion") {
  // s-mean kernel mass (n,s,r) = (2, 0.5, 1)
  {
    const auto ctx = kernels::make_context(2, 0.5, 1.0);
    qd::QuadSpec spec(1e-9, 1e-11);
    spec.left_exponent = 0.0;   // 2s-1
    spec.right_exponent = -0.5;
    auto f = [&](const Point& y) { return kernels::s_mean_kernel(ctx, y); };
    const auto res =
        qd::integrate_exterior(f, BallDomain(2, 1.0), spec, Point::Zero(2));
    CHECK(res.converged);
    CHECK(std::abs(res.value - 1.0) <= 1e-7);
  }
  // Poisson mass (n,s,r,x) = (3, 0.3, 1, 0.4 e1)
  {
    const auto ctx = kernels::make_context(3, 0.3, 1.0);
    const Point x = e1(3, 0.4);
    qd::QuadSpec spec(1e-8, 1e-10);
    spec.left_exponent = 2.0 * 0.3 - 1.0;
    spec.right_exponent = -0.3;
    auto f = [&](const Point& y) { return kernels::poisson_kernel(ctx, y, x); };
    const auto res = qd::integrate_exterior(f, BallDomain(3, 1.0), spec, x);
    CHECK(res.converged);
    CHECK(std::abs(res.value - 1.0) <= 1e-6);
  }
}

TEST_CASE("error estimates are honest on the analytic battery") {
  // true error <= 10x reported estimate in at least 95% of cases
  int total = 0, honest = 0;
  auto tally = [&](const qd::QuadResult& res, double truth) {
    ++total;
    const double err = std::abs(res.value - truth);
    if (err <= 10.0 * std::max(res.error_estimate, 5e-17 * std::abs(truth))) ++honest;
  };

  for (double s : {0.2, 0.3, 0.45, 0.6, 0.75, 0.9}) {
    qd::QuadSpec spec(1e-9, 1e-12);
    auto g = [s](double z) { return std::pow(z, -s) / (z + 1.0); };
    tally(qd::integrate_interval(g, 0.0, sf::kInfinity, spec), kPi / sf::sin_pi(s));
  }
  const double uss_grid[][3] = {
      {1.2, 2.0, 0.3}, {0.5, 1.5, 0.6}, {2.0, 0.8, 0.45}, {0.7, 1.1, 0.85}};
  for (const auto& g : uss_grid) {
    const double alpha = g[0], beta = g[1], s = g[2];
    qd::QuadSpec spec(1e-9, 1e-12);
    spec.left_exponent = -s;
    spec.right_exponent = s - 1.0;
    auto f = [=](double x) {
      return std::pow(alpha - x, s - 1.0) * std::pow(x, -s) / (beta + x);
    };
    tally(qd::integrate_interval(f, 0.0, alpha, spec),
          kPi / sf::sin_pi(s) * std::pow(alpha + beta, s - 1.0) * std::pow(beta, -s));
  }
  for (double s : {0.25, 0.5, 0.75}) {
    const auto ctx = kernels::make_context(2, s, 1.0);
    qd::QuadSpec spec(1e-8, 1e-10);
    spec.left_exponent = 2.0 * s - 1.0;
    spec.right_exponent = -s;
    auto f = [&](const Point& y) { return kernels::s_mean_kernel(ctx, y); };
    tally(qd::integrate_exterior(f, BallDomain(2, 1.0), spec, Point::Zero(2)), 1.0);
    const Point x = e1(2, 0.5);
    auto p = [&](const Point& y) { return kernels::poisson_kernel(ctx, y, x); };
    tally(qd::integrate_exterior(p, BallDomain(2, 1.0), spec, x), 1.0);
    auto q = [&](const Point& y) {
      return std::pow(1.0 - y.squaredNorm(), -s) *
             std::pow((x - y).norm(), 2.0 * s - 2.0);
    };
    tally(qd::integrate_ball_about(q, BallDomain(2, 1.0), spec, x),
          1.0 / constants::c_const(2, s));
  }
  CHECK(total >= 19);
  CHECK(honest * 100 >= total * 95);
}

TEST_CASE("alternating tail acceleration") {
  // int_0^inf sin t / t dt = pi/2, split at pi
  qd::QuadSpec spec(1e-13, 1e-15);
  auto f = [](double t) { return std::sin(t) / t; };
  const double head =
      qd::check_converged(qd::integrate_interval(f, 0.0, kPi, spec), "head").value;
  double err = 0.0;
  const double tail = qd::alternating_series_tail(f, kPi, 44, &err);
  CHECK(std::abs(head + tail - 0.5 * kPi) <= 1e-10);
  CHECK(err <= 1e-8);

  // sine-moment cross-check by half-period summation (s < 1/2)
  for (double s : {0.15, 0.3, 0.45}) {
    qd::QuadSpec hs(1e-13, 1e-15);
    hs.left_exponent = 2.0 * s - 1.0;
    auto g = [s](double t) { return std::pow(t, 2.0 * s - 2.0) * std::sin(t); };
    const double h = qd::check_converged(qd::integrate_interval(g, 0.0, kPi, hs), "h").value;
    const double t = qd::alternating_series_tail(g, kPi, 44, nullptr);
    CHECK(std::abs(h + t - sf::sine_moment(s)) <= 1e-9);
  }
}

TEST_CASE("pv evaluator: constants vanish") {
  // the symmetric difference of a constant is identically zero; the tail
  // contract states the limit at infinity so the closed tail term drops out
  qd::PvField u;
  u.eval = [](const Point&) { return 3.7; };
  u.smooth_radius = 0.5;
  u.second_derivative_bound = 0.0;
  u.decay = qd::DecayClass::PowerLaw;
  u.far_limit = 3.7;
  u.power = 1.0;
  u.amplitude = 0.0;
  qd::QuadSpec spec(1e-8, 1e-8);
  for (int n : {1, 2}) {
    const double v = qd::frac_laplacian_pointwise(u, Point::Zero(n), 0.5, spec);
    CHECK(std::abs(v) <= 1e-12);
  }

  // a decay exponent is still mandatory for the power-law class
  qd::PvField bad = u;
  bad.power = 0.0;
  CHECK_THROWS_AS(qd::frac_laplacian_pointwise(bad, Point::Zero(1), 0.5, spec),
                  DomainError);

  qd::PvField zero;
  zero.eval = [](const Point&) { return 0.0; };
  zero.smooth_radius = 0.5;
  zero.second_derivative_bound = 0.0;
  zero.decay = qd::DecayClass::CompactSupport;
  zero.support_radius = 1.0;
  const double v = qd::frac_laplacian_pointwise(zero, Point::Zero(2), 0.4, spec);
  CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("pv evaluator reproduces the flagship profile") {
  // u = (1-|x|^2)_+^s has constant fractional Laplacian on B_1
  for (double s : {0.5, 0.25}) {
    qd::PvField u;
    u.eval = [s](const Point& y) {
      const double t = 1.0 - y.squaredNorm();
      return (t > 0.0) ? std::pow(t, s) : 0.0;
    };
    u.decay = qd::DecayClass::CompactSupport;
    u.support_radius = 1.0;
    const double target = constants::big_c_const(1, s) * 0.5 *
                          constants::sphere_measure(1) * sf::beta(s, 1.0 - s);
    std::vector<double> got;
    for (double xr : {0.0, 0.3, 0.6}) {
      qd::PvField local = u;
      local.smooth_radius = 0.5 * (1.0 - xr);
      // |u''| on B(x, smooth_radius): crude sup over the inner ball
      const double edge = xr + local.smooth_radius;
      local.second_derivative_bound =
          2.0 * s * std::pow(1.0 - edge * edge, s - 1.0) +
          4.0 * s * std::abs(s - 1.0) * std::pow(1.0 - edge * edge, s - 2.0);
      qd::QuadSpec spec(1e-9, 2e-7);
      got.push_back(qd::frac_laplacian_pointwise(local, e1(1, xr), s, spec));
    }
    for (double v : got) CHECK(std::abs(v - target) <= 1e-3 * target);
    const double spread = *std::max_element(got.begin(), got.end()) -
                          *std::min_element(got.begin(), got.end());
    CHECK(spread <= 1e-4 * target);
  }
}

TEST_CASE("pv evaluator self-convergence on a smooth bump") {
  // two tolerance levels of the same evaluator agree within the coarse one
  auto make = [](double tol) {
    qd::PvField u;
    u.eval = [](const Point& y) { return std::exp(-y.squaredNorm()); };
    u.smooth_radius = 0.4;
    u.second_derivative_bound = 6.0;
    u.decay = qd::DecayClass::PowerLaw;
    u.power = 6.0;
    u.amplitude = 40.0;  // e^{-t^2} <= 40 t^{-6} for t >= 1
    qd::QuadSpec spec(1e-9, tol);
    return qd::frac_laplacian_pointwise(u, Point::Zero(1), 0.5, spec);
  };
  const double coarse = make(1e-5);
  const double fine = make(1e-8);
  CHECK(std::abs(coarse - fine) <= 1e-4 * std::abs(fine));
  CHECK(fine > 0.0);  // the bump's fractional Laplacian at its peak is positive
}

#include "fraclap/verify.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <thread>

#include <Eigen/Dense>

#include "fraclap/constants.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/kernels.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap::verify {

namespace {

constexpr double kPi = 3.14159265358979323846;

namespace sf = specfun;
namespace qd = quadrature;
namespace ct = constants;

struct Check {
  std::string name;
  std::string params;
  double tol;
  std::function<std::pair<double, double>()> sides;  // (lhs, rhs)
};

std::string fmt(const char* pattern, ...) {
  char buf[256];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

Point e1_point(int n, double scale) {
  Point p = Point::Zero(n);
  p[0] = scale;
  return p;
}

Point random_point(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Point p(n);
  for (;;) {
    for (int i = 0; i < n; ++i) p[i] = unit(rng);
    if (p.norm() <= 1.0 && p.norm() > 1e-3) break;
  }
  return p * radius;
}

// --- quadrature sides of the individual identities ------------------------

double ir_integral(const kernels::KernelContext& ctx) {
  qd::QuadSpec spec(1e-9, 1e-11);
  spec = spec.with_exponents(2.0 * ctx.s - 1.0, -ctx.s);
  auto f = [&](const Point& y) { return kernels::s_mean_kernel(ctx, y); };
  const BallDomain ball(ctx.n, ctx.r);
  return qd::check_converged(
             qd::integrate_exterior(f, ball, spec, Point::Zero(ctx.n)), "Ir")
      .value;
}

double ip_integral(const kernels::KernelContext& ctx, const Point& x) {
  qd::QuadSpec spec(1e-9, 1e-11);
  spec = spec.with_exponents(2.0 * ctx.s - 1.0, -ctx.s);
  auto f = [&](const Point& y) { return kernels::poisson_kernel(ctx, y, x); };
  const BallDomain ball(ctx.n, ctx.r);
  return qd::check_converged(qd::integrate_exterior(f, ball, spec, x), "Ip").value;
}

double if_integral(const kernels::KernelContext& ctx, const Point& x) {
  qd::QuadSpec spec(1e-9, 1e-11);
  spec = spec.with_exponents(2.0 * ctx.s - 1.0, -ctx.s);
  const double r2 = ctx.r * ctx.r;
  auto f = [&](const Point& y) {
    return std::pow(r2 - y.squaredNorm(), -ctx.s) *
           std::pow((x - y).norm(), 2.0 * ctx.s - ctx.n);
  };
  const BallDomain ball(ctx.n, ctx.r);
  return ctx.constants.c *
         qd::check_converged(qd::integrate_ball_about(f, ball, spec, x), "If").value;
}

// Exterior integral whose integrand has a pole at an exterior point x (the
// Phi factor of the reproduction identities).  The origin-centered inversion
// maps the domain onto the ball and the pole onto the interior point
// -r^2 x/|x|^2; polar cubature about that image sees the pole as a declared
// radial weight and the image of infinity as a removable point.
double exterior_with_pole(const kernels::KernelContext& ctx,
                          const std::function<double(const Point&)>& f,
                          const Point& x) {
  const double r = ctx.r;
  const double r2 = r * r;
  auto pulled = [&](const Point& u) {
    const double dd = u.squaredNorm();
    if (dd == 0.0) return 0.0;
    const double jac = std::pow(r2 / dd, ctx.n);
    if (!std::isfinite(jac)) return 0.0;  // image beyond double range
    const Point y = -(r2 / dd) * u;
    if (y.norm() <= r) return 0.0;  // rounding sliver at the sphere
    return f(y) * jac;
  };
  const Point pole_image = -(r2 / x.squaredNorm()) * x;
  qd::QuadSpec spec(1e-9, 1e-11);
  if (ctx.constants.tag.regime != sf::Regime::Critical)
    spec.left_exponent = 2.0 * ctx.s - 1.0;
  spec.right_exponent = -ctx.s;
  const qd::QuadResult res = qd::integrate_ball_about(
      pulled, BallDomain(ctx.n, r), spec, pole_image);
  return qd::check_converged(res, "exterior with pole").value;
}

double ifu_integral(const kernels::KernelContext& ctx, const Point& x) {
  auto f = [&](const Point& y) {
    if ((x - y).norm() == 0.0) return 0.0;  // node rounded onto the pole
    return kernels::s_mean_kernel(ctx, y) * kernels::fundamental_solution(ctx, x - y);
  };
  return exterior_with_pole(ctx, f, x);
}

double ipu_integral(const kernels::KernelContext& ctx, const Point& x0, const Point& x) {
  auto f = [&](const Point& y) {
    if ((x - y).norm() == 0.0) return 0.0;
    return kernels::poisson_kernel(ctx, y, x0) *
           kernels::fundamental_solution(ctx, x - y);
  };
  return exterior_with_pole(ctx, f, x);
}

double logid_integral(double a) {
  // v = cos(theta) absorbs the Chebyshev weight: int_0^pi log|cos t - a| dt.
  // What remains is a log crease at acos(a) for |a| < 1 (a breakpoint) or a
  // plain log endpoint at a = +-1, both tanh-sinh territory.
  qd::QuadSpec spec(1e-11, 1e-12);
  auto f = [a](double t) {
    // half-angle forms keep |cos t -+ 1| meaningful near its zero
    if (a == 1.0) return std::log(2.0) + 2.0 * std::log(std::abs(std::sin(0.5 * t)));
    if (a == -1.0) return std::log(2.0) + 2.0 * std::log(std::abs(std::cos(0.5 * t)));
    return std::log(std::abs(std::cos(t) - a));
  };
  std::vector<double> breaks;
  if (std::abs(a) < 1.0) breaks.push_back(std::acos(a));
  return qd::check_converged(
             qd::integrate_interval_split(f, 0.0, kPi, breaks, spec), "logid")
      .value;
}

double logid_closed(double a) {
  if (std::abs(a) <= 1.0) return -kPi * std::log(2.0);
  const double m = std::abs(a);
  return kPi * std::log(m + std::sqrt(m * m - 1.0)) - kPi * std::log(2.0);
}

double prop1_integral(int n, double tau) {
  qd::QuadSpec spec(1e-11, 1e-13);
  auto f = [=](double th) {
    return std::pow(std::sin(th), n - 2) *
           std::pow(tau * tau - 2.0 * tau * std::cos(th) + 1.0, -0.5 * n);
  };
  return qd::check_converged(qd::integrate_interval(f, 0.0, kPi, spec), "prop1").value;
}

double ctcomp_integral(double s) {
  // Head over the first half period with the t^{2s-1}-type start, then the
  // alternating half-period tail.
  qd::QuadSpec head_spec(1e-12, 1e-14);
  head_spec.left_exponent = 2.0 * s - 1.0;
  auto f = [s](double t) { return std::pow(t, 2.0 * s - 2.0) * std::sin(t); };
  const double head =
      qd::check_converged(qd::integrate_interval(f, 0.0, kPi, head_spec), "ctcomp").value;
  double err = 0.0;
  const double tail = qd::alternating_series_tail(f, kPi, 44, &err);
  return head + tail;
}

// --- battery construction --------------------------------------------------

std::vector<Check> build_battery() {
  std::vector<Check> checks;
  auto add = [&](std::string name, std::string params, double tol,
                 std::function<std::pair<double, double>()> sides) {
    checks.push_back({std::move(name), std::move(params), tol, std::move(sides)});
  };

  // Gamma reflection: Gamma(s)Gamma(1-s) = pi/sin(pi s).
  for (double s = 0.05; s < 0.975; s += 0.05) {
    add("gam3", fmt("s=%g", s), 1e-12, [s] {
      return std::make_pair(sf::gamma(s) * sf::gamma(1.0 - s), kPi / sf::sin_pi(s));
    });
  }
  // Duplication Gamma(x+1/2)/Gamma(2x) = sqrt(pi) 2^{1-2x} / Gamma(x).
  for (double x : {0.1, 0.25, 0.6, 1.0, 1.7, 2.5, 3.7, 5.0}) {
    add("gam2", fmt("x=%g", x), 1e-11, [x] {
      return std::make_pair(sf::gamma(x + 0.5) / sf::gamma(2.0 * x),
                            std::sqrt(kPi) * std::pow(2.0, 1.0 - 2.0 * x) / sf::gamma(x));
    });
  }
  // F(a,b,b,w) = (1-w)^{-a}.
  {
    const double grid[][3] = {{0.7, 1.3, 0.4}, {0.3, 0.9, -0.7}, {1.1, 0.5, 0.85}};
    for (const auto& g : grid) {
      const double a = g[0], b = g[1], w = g[2];
      add("hypelc1", fmt("a=%g b=%g w=%g", a, b, w), 1e-9, [=] {
        return std::make_pair(sf::hyp2f1(a, b, b, w), std::pow(1.0 - w, -a));
      });
    }
  }
  // F(a, a+1/2, 1/2, w^2) = ((1+w)^{-2a} + (1-w)^{-2a})/2.
  for (double a : {0.3, 1.2}) {
    for (double w : {0.1, 0.3, 0.5, 0.7, 0.8}) {
      add("hypelc2", fmt("a=%g w=%g", a, w), 1e-9, [=] {
        const double lhs = sf::hyp2f1(a, a + 0.5, 0.5, w * w);
        const double rhs =
            0.5 * (std::pow(1.0 + w, -2.0 * a) + std::pow(1.0 - w, -2.0 * a));
        return std::make_pair(lhs, rhs);
      });
    }
  }
  // w -> 1-w split against the raw Gauss series where both converge.
  for (double w : {0.55, 0.65, 0.75}) {
    add("hyp4", fmt("a=0.4 b=0.7 c=1.9 w=%g", w), 1e-9, [w] {
      const double a = 0.4, b = 0.7, c = 1.9;
      double term = 1.0, sum = 1.0;
      for (int k = 0; k < 600; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w;
        sum += term;
      }
      return std::make_pair(sf::hyp2f1(a, b, c, w), sum);
    });
  }
  // k(n,s) int_0^inf t^{s-1}(1+t)^{-n/2} dt = 1.
  for (auto [n, s] : std::vector<std::pair<int, double>>{
           {2, 0.4}, {3, 0.3}, {3, 0.7}, {2, 0.9}, {1, 0.3}}) {
    add("knsinfty", fmt("n=%d s=%g", n, s), 1e-12, [n = n, s = s] {
      return std::make_pair(
          ct::k_const(n, s) * sf::boundary_integral(n, s, sf::kInfinity), 1.0);
    });
  }
  // 1/k(n,s) = 2 int_0^1 tau^{n-2s-1} (1-tau^2)^{s-1} dtau by quadrature.
  for (auto [n, s] : std::vector<std::pair<int, double>>{{3, 0.3}, {2, 0.45}}) {
    add("kns", fmt("n=%d s=%g", n, s), 1e-8, [n = n, s = s] {
      qd::QuadSpec spec(1e-11, 1e-13);
      spec.left_exponent = n - 2.0 * s - 1.0;
      spec.right_exponent = s - 1.0;
      auto f = [=](double t) {
        return std::pow(t, n - 2.0 * s - 1.0) * std::pow(1.0 - t * t, s - 1.0);
      };
      const double lhs =
          2.0 * qd::check_converged(qd::integrate_interval(f, 0.0, 1.0, spec), "kns").value;
      return std::make_pair(lhs, 1.0 / ct::k_const(n, s));
    });
  }
  // int_0^inf z^{-s} (z+1)^{-1} dz = pi / sin(pi s).
  for (double s : {0.3, 0.5, 0.75}) {
    add("betappl", fmt("s=%g", s), 1e-8, [s] {
      qd::QuadSpec spec(1e-11, 1e-13);
      auto f = [s](double z) { return std::pow(z, -s) / (z + 1.0); };
      const double lhs =
          qd::check_converged(qd::integrate_interval(f, 0.0, sf::kInfinity, spec), "betappl")
              .value;
      return std::make_pair(lhs, kPi / sf::sin_pi(s));
    });
  }
  // int_0^alpha (alpha-x)^{s-1} x^{-s} (beta+x)^{-1} dx closed form.
  {
    const double grid[][3] = {{1.2, 2.0, 0.3}, {0.5, 1.5, 0.6}, {2.0, 0.8, 0.45}};
    for (const auto& g : grid) {
      const double alpha = g[0], beta = g[1], s = g[2];
      add("uss", fmt("alpha=%g beta=%g s=%g", alpha, beta, s), 1e-8, [=] {
        qd::QuadSpec spec(1e-11, 1e-13);
        spec.left_exponent = -s;
        spec.right_exponent = s - 1.0;
        auto f = [=](double x) {
          return std::pow(alpha - x, s - 1.0) * std::pow(x, -s) / (beta + x);
        };
        const double lhs =
            qd::check_converged(qd::integrate_interval(f, 0.0, alpha, spec), "uss").value;
        const double rhs =
            kPi / sf::sin_pi(s) * std::pow(alpha + beta, s - 1.0) * std::pow(beta, -s);
        return std::make_pair(lhs, rhs);
      });
    }
  }
  // int_0^inf t^{2s-2} sin t dt = -cos(pi s) Gamma(2s-1), limit pi/2 at 1/2.
  for (double s : {0.1, 0.25, 0.4, 0.5}) {
    add("ctcomp1111", fmt("s=%g", s), 1e-5,
        [s] { return std::make_pair(ctcomp_integral(s), sf::sine_moment(s)); });
  }
  // Chebyshev-weight log integral.
  for (double a : {0.0, 0.5, 1.0, 1.5, 3.0}) {
    add("logid", fmt("a=%g", a), 1e-8,
        [a] { return std::make_pair(logid_integral(a), logid_closed(a)); });
  }
  // Angular kernel reduction, tau > 1.
  for (int n : {2, 3}) {
    for (double tau : {1.1, 2.0, 5.0}) {
      add("prop1", fmt("n=%d tau=%g", n, tau), 1e-8, [=] {
        const double rhs =
            sf::wallis(n - 2) / (std::pow(tau, n - 2.0) * (tau * tau - 1.0));
        return std::make_pair(prop1_integral(n, tau), rhs);
      });
    }
  }
  // pi prod_k I_k = pi^{n/2} / Gamma(n/2).
  for (int n : {2, 3, 4, 5, 6}) {
    add("prop2", fmt("n=%d", n), 1e-12, [n] {
      double prod = kPi;
      for (int k = 1; k <= n - 2; ++k) prod *= sf::wallis(k);
      return std::make_pair(prod, std::pow(kPi, 0.5 * n) / sf::gamma(0.5 * n));
    });
  }
  // Kernel normalizations over the module grid.
  const double s_grid[] = {0.25, 0.5, 0.75};
  for (int n : {1, 2, 3}) {
    for (double s : s_grid) {
      add("Ir", fmt("n=%d s=%g r=1", n, s), 1e-6, [=] {
        return std::make_pair(ir_integral(kernels::make_context(n, s, 1.0)), 1.0);
      });
    }
  }
  add("Ir", "n=1 s=0.5 r=2", 1e-6, [] {
    return std::make_pair(ir_integral(kernels::make_context(1, 0.5, 2.0)), 1.0);
  });
  for (int n : {1, 2, 3}) {
    for (double s : s_grid) {
      for (double xr : {0.0, 0.5}) {
        add("Ip", fmt("n=%d s=%g r=1 x=%g*e1", n, s, xr), 1e-6, [=] {
          const auto ctx = kernels::make_context(n, s, 1.0);
          return std::make_pair(ip_integral(ctx, e1_point(n, xr)), 1.0);
        });
      }
    }
  }
  for (int n : {1, 2, 3}) {
    for (double s : s_grid) {
      for (double xr : {0.0, 0.5}) {
        add("If", fmt("n=%d s=%g r=1 x=%g*e1", n, s, xr), 1e-6, [=] {
          const auto ctx = kernels::make_context(n, s, 1.0);
          return std::make_pair(if_integral(ctx, e1_point(n, xr)), 1.0);
        });
      }
    }
  }
  // Phi reproduction identities at exterior probes.
  for (auto [n, s] : std::vector<std::pair<int, double>>{
           {1, 0.25}, {1, 0.5}, {1, 0.75}, {2, 0.5}, {3, 0.3}}) {
    add("Ifu", fmt("n=%d s=%g r=1 x=1.5*e1", n, s), 1e-5, [n = n, s = s] {
      const auto ctx = kernels::make_context(n, s, 1.0);
      const Point x = e1_point(n, 1.5);
      return std::make_pair(ifu_integral(ctx, x),
                            kernels::fundamental_solution(ctx, x));
    });
    add("Ipu", fmt("n=%d s=%g r=1 x0=0.3*e1 x=1.6*e1", n, s), 1e-5, [n = n, s = s] {
      const auto ctx = kernels::make_context(n, s, 1.0);
      const Point x0 = e1_point(n, 0.3);
      const Point x = e1_point(n, 1.6);
      return std::make_pair(ipu_integral(ctx, x0, x),
                            kernels::fundamental_solution(ctx, x - x0));
    });
  }
  // Inversion identities on seeded samples.
  {
    std::mt19937_64 rng(20240817u);
    for (int n : {1, 2, 3}) {
      const double r = 1.0;
      for (int rep = 0; rep < 2; ++rep) {
        const Point x0 = random_point(rng, n, 0.8 * r);
        const Point y = random_point(rng, n, 3.0 * r);
        const Point x = random_point(rng, n, 2.0 * r);
        add("firsttr", fmt("n=%d rep=%d", n, rep), 1e-12, [=] {
          const Point ys = geometry::kelvin_invert(x0, r, y);
          const double lhs = (y - x0).squaredNorm() /
                             ((r * r - x0.squaredNorm()) * (r * r - y.squaredNorm()));
          const double rhs = 1.0 / (ys.squaredNorm() - r * r);
          return std::make_pair(lhs, rhs);
        });
        add("sectr", fmt("n=%d rep=%d", n, rep), 1e-12, [=] {
          return geometry::distance_identity(x0, r, x, y);
        });
        add("dxtr", fmt("n=%d rep=%d", n, rep), 1e-6, [=] {
          const double h = 1e-6;
          Eigen::MatrixXd jac(n, n);
          for (int j = 0; j < n; ++j) {
            Point yp = y, ym = y;
            yp[j] += h;
            ym[j] -= h;
            jac.col(j) =
                (geometry::kelvin_invert(x0, r, yp) - geometry::kelvin_invert(x0, r, ym)) /
                (2.0 * h);
          }
          return std::make_pair(std::abs(jac.determinant()),
                                geometry::inversion_jacobian(x0, r, y));
        });
      }
    }
  }
  // C(n,s): defining integral against the closed form.
  for (int n : {1, 2, 3}) {
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      add("GCNS", fmt("n=%d s=%g", n, s), 1e-6, [n = n, s = s] {
        return std::make_pair(ct::big_c_quadrature(n, s), ct::big_c_const(n, s));
      });
    }
  }
  return checks;
}

bool name_matches(const std::string& name, const std::string& filter) {
  if (filter.empty()) return true;
  size_t start = 0;
  while (start <= filter.size()) {
    size_t comma = filter.find(',', start);
    if (comma == std::string::npos) comma = filter.size();
    if (name == filter.substr(start, comma - start)) return true;
    start = comma + 1;
  }
  return false;
}

}  // namespace

std::vector<std::string> identity_names() {
  std::vector<std::string> names;
  for (const Check& c : build_battery())
    if (names.empty() || names.back() != c.name) names.push_back(c.name);
  return names;
}

std::vector<IdentityRow> run_identities(const std::string& filter,
                                        std::optional<double> tol_override,
                                        int threads) {
  std::vector<Check> battery = build_battery();
  std::vector<Check> selected;
  for (Check& c : battery)
    if (name_matches(c.name, filter)) selected.push_back(std::move(c));

  std::vector<IdentityRow> rows(selected.size());
  auto evaluate = [&](size_t i) {
    const Check& c = selected[i];
    IdentityRow row;
    row.name = c.name;
    row.params = c.params;
    row.tol = tol_override.value_or(c.tol);
    try {
      auto [lhs, rhs] = c.sides();
      row.lhs = lhs;
      row.rhs = rhs;
      row.abs_err = std::abs(lhs - rhs);
      row.rel_err = (rhs != 0.0) ? row.abs_err / std::abs(rhs) : row.abs_err;
      row.pass = (rhs != 0.0) ? row.rel_err <= row.tol : row.abs_err <= row.tol;
    } catch (const std::exception& e) {
      row.lhs = row.rhs = std::numeric_limits<double>::quiet_NaN();
      row.abs_err = row.rel_err = std::numeric_limits<double>::infinity();
      row.pass = false;
      row.params += std::string(" [error: ") + e.what() + "]";
    }
    rows[i] = std::move(row);
  };

  const int nthreads = std::max(1, std::min<int>(threads, (int)selected.size()));
  if (nthreads == 1) {
    for (size_t i = 0; i < selected.size(); ++i) evaluate(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        for (size_t i = t; i < selected.size(); i += nthreads) evaluate(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace fraclap::verify

#include "fraclap/solver.hpp"

#include <cmath>

#include "fraclap/specfun.hpp"

namespace fraclap::solver {

namespace {

using specfun::Regime;

void require_decay(const ScalarField& g, const char* who) {
  if (!g.decay)
    throw DomainError(std::string(who) + ": exterior data must declare a decay class");
}

}  // namespace

double poisson_extend(const kernels::KernelContext& ctx, const ScalarField& g,
                      const Point& x, const quadrature::QuadSpec& spec) {
  geometry::check_point(x);
  if (x.size() != ctx.n) throw DomainError("poisson_extend: dimension mismatch");
  if (!(x.norm() < ctx.r)) return g.eval(x);
  require_decay(g, "poisson_extend");

  auto f = [&](const Point& y) { return kernels::poisson_kernel(ctx, y, x) * g.eval(y); };
  // Pulled back about x: (r^2-|u|^2)^{-s} at the sphere, |x-u|^{2s-n} at the
  // center; with the Jacobian the radial exponents are (2s-1, -s).
  quadrature::QuadSpec ext = spec.with_exponents(2.0 * ctx.s - 1.0, -ctx.s);
  const BallDomain ball(ctx.n, ctx.r);
  const quadrature::QuadResult res =
      quadrature::integrate_exterior(f, ball, ext, x);
  return quadrature::check_converged(res, "poisson_extend").value;
}

double dirichlet_solve(const kernels::KernelContext& ctx, const ScalarField& h,
                       const Point& x, const quadrature::QuadSpec& spec) {
  geometry::check_point(x);
  if (x.size() != ctx.n) throw DomainError("dirichlet_solve: dimension mismatch");
  if (!(x.norm() < ctx.r)) return 0.0;

  const double r2 = ctx.r * ctx.r;
  const double diag = 2e-10 * ctx.r;
  auto f = [&, r2, diag](const Point& y) {
    // radial nodes can round onto the sphere, where G vanishes anyway; the
    // innermost nodes dip under the Green diagonal guard and carry
    // O(eps log eps) mass, dropped here
    if (y.squaredNorm() >= r2) return 0.0;
    if (ctx.constants.tag.regime != specfun::Regime::Sub && (y - x).norm() <= diag)
      return 0.0;
    return h.eval(y) * kernels::green_closed(ctx, x, y).value;
  };
  // About x the radial integrand carries rho^{2s-1} at the diagonal and the
  // Green boundary decay (R-rho)^s at the sphere.  For n <= 2s (n = 1) the
  // diagonal is a log or a 2s-1 > 0 crease; tanh-sinh absorbs both.
  quadrature::QuadSpec inner = spec;
  if (ctx.constants.tag.regime == Regime::Super) {
    inner.left_exponent = 2.0 * ctx.s - 1.0;
    inner.right_exponent = ctx.s;
  } else {
    inner.left_exponent.reset();
    inner.right_exponent.reset();
  }
  const BallDomain ball(ctx.n, ctx.r);
  const quadrature::QuadResult res =
      quadrature::integrate_ball_about(f, ball, inner, x);
  return quadrature::check_converged(res, "dirichlet_solve").value;
}

double s_mean_average(const kernels::KernelContext& ctx, const ScalarField& u,
                      const Point& x, double rho, const quadrature::QuadSpec& spec) {
  geometry::check_point(x);
  if (x.size() != ctx.n) throw DomainError("s_mean_average: dimension mismatch");
  if (!(rho > 0.0)) throw DomainError("s_mean_average: rho must be positive");
  require_decay(u, "s_mean_average");

  const kernels::KernelContext mean_ctx = kernels::make_context(ctx.n, ctx.s, rho);
  auto f = [&](const Point& y) {
    return kernels::s_mean_kernel(mean_ctx, y) * u.eval(x - y);
  };
  quadrature::QuadSpec ext = spec.with_exponents(2.0 * ctx.s - 1.0, -ctx.s);
  const BallDomain ball(ctx.n, rho);
  const Point center = Point::Zero(ctx.n);
  const quadrature::QuadResult res =
      quadrature::integrate_exterior(f, ball, ext, center);
  return quadrature::check_converged(res, "s_mean_average").value;
}

SolveReport residual_check(const kernels::KernelContext& ctx, const ScalarField& h,
                           const PvFieldProvider& u_provider,
                           const std::vector<Point>& probe_points,
                           const quadrature::QuadSpec& spec) {
  SolveReport report;
  report.residuals.emplace();
  for (const Point& probe : probe_points) {
    if (!(probe.norm() < ctx.r))
      throw DomainError("residual_check: probes must be strictly interior");
    const quadrature::PvField field = u_provider(probe);
    const double lap = quadrature::frac_laplacian_pointwise(field, probe, ctx.s, spec);
    const double target = h.eval(probe);
    report.values.emplace_back(probe, lap);
    report.residuals->emplace_back(probe, std::abs(lap - target));
    report.quadrature_diagnostics.max_error_estimate =
        std::max(report.quadrature_diagnostics.max_error_estimate,
                 std::abs(lap - target));
  }
  return report;
}

}  // namespace fraclap::solver

#include "fraclap/kernels.hpp"

#include <cmath>

#include "fraclap/specfun.hpp"

namespace fraclap::kernels {

namespace {

constexpr double kPi = 3.14159265358979323846;

using specfun::Regime;

void check_in_ball(const KernelContext& ctx, const Point& p, const char* who) {
  geometry::check_point(p);
  if (p.size() != ctx.n)
    throw DomainError(std::string(who) + ": point dimension mismatch");
  if (!(p.norm() < ctx.r))
    throw DomainError(std::string(who) + ": point must lie inside B_r");
}

}  // namespace

KernelContext make_context(int n, double s, double r) {
  if (!(r > 0.0)) throw DomainError("kernels: radius must be positive");
  return KernelContext{n, s, r, constants::make_bundle(n, s)};
}

double fundamental_solution(const KernelContext& ctx, const Point& x) {
  geometry::check_point(x);
  if (x.size() != ctx.n) throw DomainError("fundamental_solution: dimension mismatch");
  const double norm = x.norm();
  const Regime regime = ctx.constants.tag.regime;
  if (norm == 0.0) {
    if (regime == Regime::Sub) return 0.0;  // |x|^{2s-1} with 2s > 1 is regular
    throw SingularityError("fundamental_solution: pole at the origin for n >= 2s");
  }
  if (regime == Regime::Critical) return ctx.constants.a * std::log(norm);
  return ctx.constants.a * std::pow(norm, 2.0 * ctx.s - ctx.n);
}

double s_mean_kernel(const KernelContext& ctx, const Point& y) {
  geometry::check_point(y);
  if (y.size() != ctx.n) throw DomainError("s_mean_kernel: dimension mismatch");
  const double norm = y.norm();
  if (norm <= ctx.r) return 0.0;
  const double r2 = ctx.r * ctx.r;
  return ctx.constants.c * std::pow(ctx.r, 2.0 * ctx.s) /
         (std::pow(norm * norm - r2, ctx.s) * std::pow(norm, ctx.n));
}

double poisson_kernel(const KernelContext& ctx, const Point& y, const Point& x) {
  check_in_ball(ctx, x, "poisson_kernel");
  geometry::check_point(y);
  if (y.size() != ctx.n) throw DomainError("poisson_kernel: dimension mismatch");
  const double ny = y.norm();
  if (!(ny > ctx.r)) throw DomainError("poisson_kernel: y must lie outside the closed ball");
  const double r2 = ctx.r * ctx.r;
  const double ratio = (r2 - x.squaredNorm()) / (ny * ny - r2);
  return ctx.constants.c * std::pow(ratio, ctx.s) * std::pow((x - y).norm(), -ctx.n);
}

double r0(const KernelContext& ctx, const Point& x, const Point& z) {
  check_in_ball(ctx, x, "r0");
  check_in_ball(ctx, z, "r0");
  const double dist2 = (x - z).squaredNorm();
  if (dist2 == 0.0) throw SingularityError("r0: undefined at x = z");
  const double r2 = ctx.r * ctx.r;
  return (r2 - x.squaredNorm()) * (r2 - z.squaredNorm()) / (r2 * dist2);
}

GreenEval green_closed(const KernelContext& ctx, const Point& x, const Point& z) {
  check_in_ball(ctx, x, "green_closed");
  check_in_ball(ctx, z, "green_closed");
  const Regime regime = ctx.constants.tag.regime;
  const double dist = (x - z).norm();
  const double r2 = ctx.r * ctx.r;

  if (dist < 1e-10 * ctx.r) {
    if (regime != Regime::Sub)
      throw DiagonalSingularityError("green_closed: diagonal pole for n >= 2s");
    // Finite diagonal limit, validated against the shrinking-offset oracle:
    // G(x,x) = kappa(1,s)/(s-1/2) (r^2-|x|^2)^{2s-1} r^{1-2s}.
    GreenEval out;
    out.diagonal = true;
    out.r0 = specfun::kInfinity;
    out.value = ctx.constants.kappa / (ctx.s - 0.5) *
                std::pow(r2 - x.squaredNorm(), 2.0 * ctx.s - 1.0) *
                std::pow(ctx.r, 1.0 - 2.0 * ctx.s);
    return out;
  }

  GreenEval out;
  if (regime == Regime::Critical) {
    const double xz = x.dot(z);
    const double arg =
        (r2 - xz + std::sqrt((r2 - x.squaredNorm()) * (r2 - z.squaredNorm()))) /
        (ctx.r * dist);
    out.value = std::log(arg) / kPi;
    out.r0 = r0(ctx, x, z);
    return out;
  }
  out.r0 = r0(ctx, x, z);
  out.value = ctx.constants.kappa * std::pow(dist, 2.0 * ctx.s - ctx.n) *
              specfun::boundary_integral(ctx.n, ctx.s, out.r0);
  return out;
}

quadrature::QuadResult green_definition(const KernelContext& ctx, const Point& x,
                                        const Point& z,
                                        const quadrature::QuadSpec& spec) {
  check_in_ball(ctx, x, "green_definition");
  check_in_ball(ctx, z, "green_definition");
  if (ctx.n > 3) throw DomainError("green_definition: cubature capped at n <= 3");
  if ((x - z).norm() == 0.0)
    throw DiagonalSingularityError("green_definition: x = z");

  auto f = [&](const Point& y) {
    return fundamental_solution(ctx, z - y) * poisson_kernel(ctx, y, x);
  };
  // Pulled back about x the integrand is rho^{n-1} analytic with a
  // (r^2-|u|^2)^{-s} boundary weight; the critical-regime log factor goes
  // through tanh-sinh instead.
  quadrature::QuadSpec ext = spec;
  if (ctx.constants.tag.regime == Regime::Critical) {
    ext.left_exponent.reset();
    ext.right_exponent.reset();
  } else {
    ext.left_exponent = ctx.n - 1.0;
    ext.right_exponent = -ctx.s;
  }
  const BallDomain ball(ctx.n, ctx.r);
  quadrature::QuadResult res = quadrature::integrate_exterior(f, ball, ext, x);
  res.value = fundamental_solution(ctx, x - z) - res.value;
  return res;
}

}  // namespace fraclap::kernels

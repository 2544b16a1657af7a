#ifndef FRACLAP_SOLVER_HPP
#define FRACLAP_SOLVER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fraclap/kernels.hpp"

// Representation-formula solvers: the Poisson extension for exterior data,
// the Green convolution for interior forcing, the s-mean average, and the
// residual diagnostic that closes the loop through the PV evaluator.

namespace fraclap::solver {

enum class Smoothness { Continuous, HolderC2s, Smooth };

// Constructive tail control for exterior data; mere integrability of g
// against the kernel weight gives a numeric engine nothing to bound with.
struct Decay {
  enum class Kind { Bounded, PowerLaw, CompactSupport } kind = Kind::Bounded;
  double bound = 0.0;           // Bounded: sup |g|
  double power = 0.0;           // PowerLaw: |g(y)| <= amplitude |y|^-power
  double amplitude = 0.0;
  double support_radius = 0.0;  // CompactSupport
};

struct ScalarField {
  std::function<double(const Point&)> eval;
  Smoothness smoothness_hint = Smoothness::Continuous;
  std::optional<double> support_hint;  // bounding radius of the support
  std::optional<Decay> decay;          // required when used as exterior data
};

struct SolveDiagnostics {
  long nodes_used = 0;
  double max_error_estimate = 0.0;
};

struct SolveReport {
  std::vector<std::pair<Point, double>> values;
  std::optional<std::vector<std::pair<Point, double>>> residuals;
  SolveDiagnostics quadrature_diagnostics;
};

// u_g(x) = int_{R^n \ B_r} P_r(y,x) g(y) dy for |x| < r, g(x) otherwise.
double poisson_extend(const kernels::KernelContext& ctx, const ScalarField& g,
                      const Point& x, const quadrature::QuadSpec& spec);

// u(x) = int_{B_r} h(y) G(x,y) dy for |x| < r, 0 otherwise.  The Green
// diagonal is handled by polar coordinates about x, where |x-y|^{2s-n}
// becomes the Gauss-Jacobi weight rho^{2s-1}.
double dirichlet_solve(const kernels::KernelContext& ctx, const ScalarField& h,
                       const Point& x, const quadrature::QuadSpec& spec);

// (A_rho * u)(x) = int_{R^n \ B_rho} A_rho(y) u(x-y) dy.  Only (n,s) are
// taken from ctx; the kernel ball radius is rho.
double s_mean_average(const kernels::KernelContext& ctx, const ScalarField& u,
                      const Point& x, double rho, const quadrature::QuadSpec& spec);

// Supplies the PV evaluator's local C^2 data for a probe point.
using PvFieldProvider = std::function<quadrature::PvField(const Point& probe)>;

// Reports |(-Delta)^s u (x_i) - h(x_i)| for each probe.
SolveReport residual_check(const kernels::KernelContext& ctx, const ScalarField& h,
                           const PvFieldProvider& u_provider,
                           const std::vector<Point>& probe_points,
                           const quadrature::QuadSpec& spec);

}  // namespace fraclap::solver

#endif

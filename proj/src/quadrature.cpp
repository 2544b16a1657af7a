#include "fraclap/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>

#include "fraclap/constants.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap::quadrature {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct RuleKey {
  int m;
  double alpha, beta;
  bool operator<(const RuleKey& o) const {
    if (m != o.m) return m < o.m;
    if (alpha != o.alpha) return alpha < o.alpha;
    return beta < o.beta;
  }
};

Rule make_gauss_jacobi(int m, double al, double be) {
  // Golub-Welsch on the monic Jacobi recurrence; eigenvalues are the nodes,
  // mu0 * (first eigenvector component)^2 the weights.
  Eigen::VectorXd diag(m), sub(std::max(m - 1, 0));
  const double apb = al + be;
  diag[0] = (be - al) / (apb + 2.0);
  for (int k = 1; k < m; ++k) {
    const double q = 2.0 * k + apb;
    diag[k] = (be * be - al * al) / (q * (q + 2.0));
  }
  for (int k = 1; k < m; ++k) {
    double bk;
    if (k == 1) {
      bk = 4.0 * (al + 1.0) * (be + 1.0) / ((apb + 2.0) * (apb + 2.0) * (apb + 3.0));
    } else {
      const double q = 2.0 * k + apb;
      bk = 4.0 * k * (k + al) * (k + be) * (k + apb) / (q * q * (q + 1.0) * (q - 1.0));
    }
    sub[k - 1] = std::sqrt(bk);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("gauss_jacobi: tridiagonal eigensolve failed");
  const double mu0 = std::pow(2.0, apb + 1.0) * specfun::beta(al + 1.0, be + 1.0);
  Rule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    const double v = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

const Rule& cached_rule(int m, double al, double be) {
  static std::map<RuleKey, Rule> cache;
  static std::shared_mutex mutex;
  const RuleKey key{m, al, be};
  {
    std::shared_lock lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  Rule rule = make_gauss_jacobi(m, al, be);
  std::unique_lock lock(mutex);
  return cache.emplace(key, std::move(rule)).first->second;
}

double tolerance_of(const QuadSpec& spec, double value) {
  return std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
}

void require_finite(double fx, double x) {
  if (!std::isfinite(fx))
    throw NonFiniteSampleError("integrand returned " + std::to_string(fx) +
                               " at x=" + std::to_string(x));
}

struct Budget {
  long remaining;
  bool spend(long n) {
    remaining -= n;
    return remaining >= 0;
  }
};

// ---------------------------------------------------------------------------
// tanh-sinh on a finite interval.  Level k halves the step and reuses the
// previous nodes; abscissas are generated until their weights underflow or
// the terms stall below roundoff.

struct TsNode {
  double t;   // abscissa in (-1,1)
  double w;   // weight, already including the dt factor of the map
};

const std::vector<std::vector<TsNode>>& ts_levels() {
  static const std::vector<std::vector<TsNode>> levels = [] {
    std::vector<std::vector<TsNode>> out;
    const int max_level = 12;
    for (int k = 0; k <= max_level; ++k) {
      const double h = std::pow(2.0, -k);
      std::vector<TsNode> nodes;
      // Level 0 takes every multiple of 1; level k>0 only the odd multiples
      // of its own h (the rest were emitted by coarser levels).
      for (long j = (k == 0) ? 0 : 1;; j += (k == 0) ? 1 : 2) {
        const double u = j * h;
        const double su = 0.5 * kPi * std::sinh(u);
        if (su > 350.0) break;
        const double t = std::tanh(su);
        const double w = 0.5 * kPi * std::cosh(u) / std::pow(std::cosh(su), 2);
        if (w < 1e-320) break;
        if (1.0 - t <= 0.0) break;
        nodes.push_back({t, w});
      }
      out.push_back(std::move(nodes));
    }
    return out;
  }();
  return levels;
}

QuadResult tanh_sinh(const Fn1& f, double a, double b, const QuadSpec& spec,
                     Budget& budget, int max_level = 12) {
  QuadResult res;
  const double c = 0.5 * (a + b), d = 0.5 * (b - a);
  if (!(d > 0.0)) return {0.0, 0.0, 0, true};
  const auto& levels = ts_levels();
  double sum = 0.0;  // running h-free sum; multiply by h at each level
  double prev_value = 0.0;
  for (size_t k = 0; k < levels.size() && (int)k <= max_level; ++k) {
    const double h = std::pow(2.0, -(double)k);
    std::vector<double> terms;
    terms.reserve(2 * levels[k].size());
    for (const TsNode& node : levels[k]) {
      for (int sign = 0; sign < (node.t == 0.0 ? 1 : 2); ++sign) {
        const double t = sign ? -node.t : node.t;
        const double x = c + d * t;
        if (x <= a || x >= b) continue;  // node collapsed onto an endpoint
        const double fx = f(x);
        require_finite(fx, x);
        terms.push_back(node.w * fx);
      }
    }
    if (!budget.spend((long)terms.size())) {
      res.value = prev_value;
      res.error_estimate = kInf;
      return res;
    }
    res.nodes_used += (long)terms.size();
    sum += pairwise_sum(terms);
    const double value = d * h * sum;
    if (k >= 2) {
      const double err = std::abs(value - prev_value);
      res.value = value;
      res.error_estimate = err;
      if (err <= tolerance_of(spec, value)) {
        res.converged = true;
        return res;
      }
    }
    prev_value = value;  // next level halves h and reuses the accumulated sum
  }
  res.value = prev_value;
  return res;
}

// ---------------------------------------------------------------------------
// exp-sinh on [a, infinity).

QuadResult exp_sinh(const Fn1& f, double a, const QuadSpec& spec, Budget& budget) {
  QuadResult res;
  double prev_value = 0.0;
  double sum = 0.0;  // h-free accumulated sum across levels
  const int max_level = 12;
  for (int k = 0; k <= max_level; ++k) {
    const double h = std::pow(2.0, -k);
    std::vector<double> terms;
    // emit() returns the |term| it added, or a negative flag when the node
    // fell off the representable range.
    auto emit = [&](double u) -> double {
      const double su = 0.5 * kPi * std::sinh(u);
      if (su > 700.0 || su < -700.0) return -1.0;
      const double g = std::exp(su);
      const double x = a + g;
      if (!(x > a) || std::isinf(x)) return -1.0;
      const double w = 0.5 * kPi * std::cosh(u) * g;
      const double fx = f(x);
      require_finite(fx, x);
      terms.push_back(w * fx);
      return std::abs(w * fx);
    };
    if (k == 0) emit(0.0);
    for (int sign : {+1, -1}) {
      int stall = 0;
      for (long j = 1;; j += (k == 0) ? 1 : 2) {
        const double mag = emit(sign * (double)j * h);
        if (mag < 0.0) break;
        const double scale = std::abs(sum) + std::abs(prev_value) / h + mag;
        if (mag <= 1e-18 * scale && (double)j * h > 3.0) {
          if (++stall >= 3) break;
        } else {
          stall = 0;
        }
      }
    }
    if (!budget.spend((long)terms.size())) {
      res.value = prev_value;
      res.error_estimate = kInf;
      return res;
    }
    res.nodes_used += (long)terms.size();
    sum += pairwise_sum(terms);
    const double value = h * sum;
    if (k >= 2) {
      const double err = std::abs(value - prev_value);
      res.value = value;
      res.error_estimate = err;
      if (err <= tolerance_of(spec, value)) {
        res.converged = true;
        return res;
      }
    }
    prev_value = value;
  }
  res.value = prev_value;
  return res;
}

// ---------------------------------------------------------------------------
// Gauss-Jacobi ladder with bisection fallback.

double gj_apply(const Fn1& f, double a, double b, double al, double ar, int m) {
  const Rule& rule = cached_rule(m, /*alpha=*/ar, /*beta=*/al);
  const double half = 0.5 * (b - a);
  const double scale = std::pow(half, al + ar + 1.0);
  std::vector<double> terms;
  terms.reserve(m);
  for (int i = 0; i < m; ++i) {
    const double t = rule.nodes[i];
    const double da = half * (1.0 + t);  // x - a, no cancellation
    const double db = half * (1.0 - t);  // b - x
    const double x = a + da;
    if (!(x > a && x < b)) continue;
    const double fx = f(x);
    require_finite(fx, x);
    double g = fx;
    if (al != 0.0) g *= std::pow(da, -al);
    if (ar != 0.0) g *= std::pow(db, -ar);
    terms.push_back(rule.weights[i] * g);
  }
  return scale * pairwise_sum(terms);
}

// One panel of the globally adaptive scheme.
struct Segment {
  double a, b;
  std::optional<double> left, right;  // endpoint exponents, when declared
  double value = 0.0;
  double err = kInf;
  long order = 0;  // insertion index, the deterministic tie-breaker
};

// Evaluates a panel with its own short ladder: Gauss-Jacobi when an endpoint
// exponent is declared, tanh-sinh otherwise.  The returned err is the last
// ladder delta; panels whose integrand is rough in the interior keep a large
// err and get split by the driver.
void eval_segment(const Fn1& f, Segment& seg, Budget& budget) {
  if (seg.left || seg.right) {
    const double al = seg.left.value_or(0.0);
    const double ar = seg.right.value_or(0.0);
    double prev = 0.0;
    bool have_prev = false;
    for (int m : {12, 27, 60, 135}) {
      if (!budget.spend(m)) {
        seg.err = kInf;
        return;
      }
      const double value = gj_apply(f, seg.a, seg.b, al, ar, m);
      if (have_prev) {
        seg.value = value;
        seg.err = std::abs(value - prev);
        if (seg.err <= 1e-14 * std::abs(value)) return;
      }
      prev = value;
      have_prev = true;
    }
    return;
  }
  QuadSpec ts_spec(5e-14, 1e-305);
  ts_spec.max_nodes = budget.remaining;
  Budget sub{budget.remaining};
  const QuadResult r = tanh_sinh(f, seg.a, seg.b, ts_spec, sub, /*max_level=*/8);
  budget.remaining = sub.remaining;
  seg.value = r.value;
  seg.err = r.error_estimate;
  if (r.converged) seg.err = std::min(seg.err, 1e-15 * std::abs(r.value));
}

QuadResult integrate_finite(const Fn1& f, double a, double b, const QuadSpec& spec,
                            Budget& budget) {
  std::vector<Segment> segments;
  long next_order = 0;
  Segment first{a, b, spec.left_exponent, spec.right_exponent};
  first.order = next_order++;
  eval_segment(f, first, budget);
  segments.push_back(first);

  QuadResult res;
  const int max_segments = 4096;
  for (;;) {
    // Deterministic reduction: panels in position order, pairwise sum.
    std::vector<size_t> by_pos(segments.size());
    for (size_t i = 0; i < segments.size(); ++i) by_pos[i] = i;
    std::sort(by_pos.begin(), by_pos.end(),
              [&](size_t i, size_t j) { return segments[i].a < segments[j].a; });
    std::vector<double> values;
    values.reserve(segments.size());
    double total_err = 0.0;
    for (size_t i : by_pos) {
      values.push_back(segments[i].value);
      total_err += segments[i].err;
    }
    res.value = pairwise_sum(values);
    res.error_estimate = total_err;
    res.nodes_used = spec.max_nodes - budget.remaining;
    if (total_err <= tolerance_of(spec, res.value)) {
      res.converged = true;
      return res;
    }
    if (budget.remaining <= 0 || (int)segments.size() >= max_segments) return res;

    // Split the worst panel (lowest insertion index on ties).
    size_t worst = 0;
    for (size_t i = 1; i < segments.size(); ++i) {
      if (segments[i].err > segments[worst].err ||
          (segments[i].err == segments[worst].err &&
           segments[i].order < segments[worst].order))
        worst = i;
    }
    Segment old = segments[worst];
    const double mid = 0.5 * (old.a + old.b);
    if (!(old.a < mid && mid < old.b)) return res;  // interval at roundoff width
    Segment lhs{old.a, mid, old.left, std::nullopt};
    Segment rhs{mid, old.b, std::nullopt, old.right};
    lhs.order = next_order++;
    rhs.order = next_order++;
    eval_segment(f, lhs, budget);
    eval_segment(f, rhs, budget);
    segments[worst] = lhs;
    segments.push_back(rhs);
  }
}

}  // namespace

void QuadSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw DomainError("QuadSpec: tolerances must be positive");
  if (max_nodes <= 0) throw DomainError("QuadSpec: node budget must be positive");
  if (left_exponent && !(*left_exponent > -1.0))
    throw DomainError("QuadSpec: left endpoint exponent must exceed -1");
  if (right_exponent && !(*right_exponent > -1.0))
    throw DomainError("QuadSpec: right endpoint exponent must exceed -1");
}

const Rule& gauss_legendre(int m) { return cached_rule(m, 0.0, 0.0); }

const Rule& gauss_jacobi(int m, double alpha, double beta) {
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw DomainError("gauss_jacobi: exponents must exceed -1");
  return cached_rule(m, alpha, beta);
}

double pairwise_sum(std::vector<double>& terms) {
  size_t n = terms.size();
  if (n == 0) return 0.0;
  while (n > 1) {
    const size_t half = n / 2;
    for (size_t i = 0; i < half; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
    if (n % 2 == 1) {
      terms[half] = terms[n - 1];
      n = half + 1;
    } else {
      n = half;
    }
  }
  return terms[0];
}

QuadResult integrate_interval(const Fn1& f, double a, double b, const QuadSpec& spec) {
  spec.validate();
  if (!(a < b)) throw DomainError("integrate_interval: need a < b");
  if (std::isinf(a)) throw DomainError("integrate_interval: left endpoint must be finite");
  Budget budget{spec.max_nodes};
  if (std::isinf(b)) return exp_sinh(f, a, spec, budget);
  return integrate_finite(f, a, b, spec, budget);
}

QuadResult integrate_interval_split(const Fn1& f, double a, double b,
                                    const std::vector<double>& breakpoints,
                                    const QuadSpec& spec) {
  spec.validate();
  std::vector<double> cuts;
  for (double c : breakpoints)
    if (c > a && c < b && std::isfinite(c)) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.empty()) return integrate_interval(f, a, b, spec);

  QuadSpec piece = spec;
  piece.abs_tol = spec.abs_tol / (double)(cuts.size() + 1);
  QuadResult total;
  total.converged = true;
  double lo = a;
  for (size_t i = 0; i <= cuts.size(); ++i) {
    const double hi = (i < cuts.size()) ? cuts[i] : b;
    QuadSpec ps = piece.with_exponents(
        (lo == a) ? spec.left_exponent : std::nullopt,
        (hi == b && !std::isinf(b)) ? spec.right_exponent : std::nullopt);
    const QuadResult r = integrate_interval(f, lo, hi, ps);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.nodes_used += r.nodes_used;
    total.converged = total.converged && r.converged;
    lo = hi;
  }
  total.converged =
      total.converged && total.error_estimate <= tolerance_of(spec, total.value);
  return total;
}

const QuadResult& check_converged(const QuadResult& r, const char* what) {
  if (!r.converged)
    throw BudgetExceededError(std::string(what) +
                              ": quadrature did not converge within its node budget");
  return r;
}

// ---------------------------------------------------------------------------
// Cubature over balls and shells, polar about a chosen point.

namespace {

struct AngularNode {
  Point dir;
  double weight;
};

// Trapezoid nodes on the circle; nested when m doubles.
std::vector<AngularNode> circle_nodes(int m) {
  std::vector<AngularNode> out;
  out.reserve(m);
  for (int j = 0; j < m; ++j) {
    const double th = 2.0 * kPi * j / m;
    Point d(2);
    d << std::cos(th), std::sin(th);
    out.push_back({std::move(d), 2.0 * kPi / m});
  }
  return out;
}

// Product rule on S^2: Gauss-Legendre in cos(theta), trapezoid in phi.
std::vector<AngularNode> sphere_nodes(int mc, int mp) {
  const Rule& gl = gauss_legendre(mc);
  std::vector<AngularNode> out;
  out.reserve(mc * mp);
  for (int i = 0; i < mc; ++i) {
    const double ct = gl.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < mp; ++j) {
      const double ph = 2.0 * kPi * j / mp;
      Point d(3);
      d << st * std::cos(ph), st * std::sin(ph), ct;
      out.push_back({std::move(d), gl.weights[i] * 2.0 * kPi / mp});
    }
  }
  return out;
}

std::vector<AngularNode> segment_nodes() {
  Point plus(1), minus(1);
  plus << 1.0;
  minus << -1.0;
  return {{plus, 1.0}, {minus, 1.0}};
}

double angular_measure(int n) {
  if (n == 1) return 2.0;
  if (n == 2) return 2.0 * kPi;
  return 4.0 * kPi;
}

// Radial pieces of one ray: [lo, hi] with optional endpoint exponents.
struct RadialPiece {
  double lo, hi;
  std::optional<double> left, right;
};

using PieceFn = std::function<std::vector<RadialPiece>(const Point& dir)>;

QuadResult polar_integrate(const FnN& f, int n, const Point& center,
                           const PieceFn& pieces_of, const QuadSpec& spec) {
  spec.validate();
  if (n < 1 || n > 3)
    throw DomainError("cubature: only dimensions 1..3 are supported");

  Budget budget{spec.max_nodes};
  QuadSpec radial_spec = spec;
  radial_spec.rel_tol = std::max(spec.rel_tol * 0.25, 1e-14);
  radial_spec.abs_tol = std::max(spec.abs_tol / (4.0 * angular_measure(n)), 5e-17);

  // Radial line integral of f(center + rho*dir) rho^{n-1} over the ray's pieces.
  auto radial = [&](const Point& dir, double* err, long* nodes, bool* ok) {
    double value = 0.0;
    for (const RadialPiece& piece : pieces_of(dir)) {
      if (!(piece.hi > piece.lo)) continue;
      QuadSpec ps = radial_spec.with_exponents(piece.left, piece.right);
      // one stubborn ray must not starve the rest of the sphere
      ps.max_nodes = std::clamp<long>(budget.remaining, 1, 2000000);
      auto g = [&](double rho) {
        Point y = center + rho * dir;
        double v = f(y);
        return (n == 1) ? v : v * std::pow(rho, n - 1);
      };
      const QuadResult r = integrate_interval(g, piece.lo, piece.hi, ps);
      value += r.value;
      *err += r.error_estimate;
      *nodes += r.nodes_used;
      *ok = *ok && r.converged;
      budget.spend(r.nodes_used);
    }
    return value;
  };

  QuadResult res;
  if (n == 1) {
    double err = 0.0;
    long nodes = 0;
    bool ok = true;
    std::vector<double> terms;
    for (const AngularNode& node : segment_nodes())
      terms.push_back(node.weight * radial(node.dir, &err, &nodes, &ok));
    res.value = pairwise_sum(terms);
    res.error_estimate = err;
    res.nodes_used = nodes;
    res.converged = ok && err <= tolerance_of(spec, res.value);
    return res;
  }

  // Angular refinement ladder; radial values memoized across nested circle
  // levels (trapezoid doubling revisits every coarse angle).
  std::map<std::pair<long, long>, double> circle_memo;
  double prev = 0.0;
  bool have_prev = false;
  const int max_level = 6;
  for (int level = 0; level < max_level; ++level) {
    double err = 0.0;
    long nodes = 0;
    bool ok = true;
    std::vector<AngularNode> ang;
    if (n == 2) {
      const int m = 12 << level;
      ang = circle_nodes(m);
      std::vector<double> terms;
      terms.reserve(m);
      for (int j = 0; j < m; ++j) {
        long num = j, den = m;
        const long g = std::gcd(num, den);
        if (g > 0) { num /= g; den /= g; }
        auto it = circle_memo.find({num, den});
        double rv;
        if (it != circle_memo.end()) {
          rv = it->second;
        } else {
          rv = radial(ang[j].dir, &err, &nodes, &ok);
          circle_memo.emplace(std::make_pair(num, den), rv);
        }
        terms.push_back(ang[j].weight * rv);
      }
      res.value = pairwise_sum(terms);
    } else {
      const int mc = 8 << level;
      const int mp = 12 << level;
      ang = sphere_nodes(mc, mp);
      std::vector<double> terms;
      terms.reserve(ang.size());
      for (const AngularNode& node : ang)
        terms.push_back(node.weight * radial(node.dir, &err, &nodes, &ok));
      res.value = pairwise_sum(terms);
    }
    res.nodes_used += nodes;
    if (have_prev) {
      const double delta = std::abs(res.value - prev);
      res.error_estimate = delta + err;
      if (ok && res.error_estimate <= tolerance_of(spec, res.value)) {
        res.converged = true;
        return res;
      }
    }
    prev = res.value;
    have_prev = true;
    if (budget.remaining <= 0) break;
  }
  return res;
}

double exit_radius(const Point& center, double r, const Point& dir) {
  // Positive root of |center + rho dir| = r for |center| < r.
  const double q = center.dot(dir);
  const double c0 = center.squaredNorm() - r * r;
  return -q + std::sqrt(q * q - c0);
}

}  // namespace

QuadResult integrate_ball(const FnN& f, const BallDomain& domain, const QuadSpec& spec) {
  Point origin = Point::Zero(domain.dim);
  return integrate_ball_about(f, domain, spec, origin);
}

QuadResult integrate_ball_about(const FnN& f, const BallDomain& domain,
                                const QuadSpec& spec, const Point& center) {
  geometry::check_point(center);
  if (center.size() != domain.dim)
    throw DomainError("integrate_ball_about: center dimension mismatch");
  if (!(center.norm() < domain.radius))
    throw DomainError("integrate_ball_about: center must be strictly interior");
  auto pieces = [&](const Point& dir) {
    return std::vector<RadialPiece>{
        {0.0, exit_radius(center, domain.radius, dir), spec.left_exponent,
         spec.right_exponent}};
  };
  return polar_integrate(f, domain.dim, center, pieces, spec);
}

QuadResult integrate_shell_about(const FnN& f, double r_inner, double r_outer,
                                 const QuadSpec& spec, const Point& center,
                                 std::optional<double> inner_exponent) {
  geometry::check_point(center);
  if (!(0.0 < r_inner && r_inner < r_outer))
    throw DomainError("integrate_shell_about: need 0 < r_inner < r_outer");
  const double cn = center.norm();
  if (!(cn > r_inner && cn < r_outer))
    throw DomainError("integrate_shell_about: center must lie inside the shell");
  auto pieces = [&, inner_exponent](const Point& dir) {
    std::vector<RadialPiece> out;
    const double exit = exit_radius(center, r_outer, dir);
    const double q = center.dot(dir);
    const double disc = q * q - (center.squaredNorm() - r_inner * r_inner);
    if (q < 0.0 && disc > 0.0) {
      const double root = std::sqrt(disc);
      const double rho1 = -q - root;
      const double rho2 = -q + root;
      out.push_back({0.0, rho1, spec.left_exponent, inner_exponent});
      out.push_back({rho2, exit, inner_exponent, spec.right_exponent});
    } else {
      out.push_back({0.0, exit, spec.left_exponent, spec.right_exponent});
    }
    return out;
  };
  return polar_integrate(f, (int)center.size(), center, pieces, spec);
}

QuadResult integrate_exterior(const FnN& f, const BallDomain& domain,
                              const QuadSpec& spec, const Point& inversion_center) {
  geometry::check_point(inversion_center);
  if (inversion_center.size() != domain.dim)
    throw DomainError("integrate_exterior: center dimension mismatch");
  if (!(inversion_center.norm() < domain.radius))
    throw DomainError("integrate_exterior: inversion center must be interior");
  const double r = domain.radius;
  const Point c = inversion_center;
  const double scale = r * r - c.squaredNorm();
  auto pulled_back = [&, scale](const Point& u) {
    const double dd = (u - c).squaredNorm();
    if (!(dd > 0.0)) return 0.0;  // |u-c|^2 underflowed
    const Point y = c - (scale / dd) * (u - c);
    // images beyond double range or rounded onto the sphere carry no mass
    if (!y.allFinite()) return 0.0;
    if (y.squaredNorm() <= r * r) return 0.0;
    const double jac = std::pow(scale / dd, domain.dim);
    if (!std::isfinite(jac)) return 0.0;
    return f(y) * jac;
  };
  return integrate_ball_about(pulled_back, domain, spec, c);
}

// ---------------------------------------------------------------------------
// Principal-value fractional Laplacian.

namespace {

// Integral over S^{n-1} of g(omega), adaptive in the node count.
double sphere_integral(const std::function<double(const Point&)>& g, int n,
                       double rel_tol, double abs_tol) {
  if (n == 1) {
    Point plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    return g(plus) + g(minus);
  }
  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0; level < 7; ++level) {
    std::vector<AngularNode> ang =
        (n == 2) ? circle_nodes(12 << level) : sphere_nodes(8 << level, 12 << level);
    std::vector<double> terms;
    terms.reserve(ang.size());
    for (const AngularNode& node : ang) terms.push_back(node.weight * g(node.dir));
    const double value = pairwise_sum(terms);
    if (have_prev &&
        std::abs(value - prev) <= std::max(abs_tol, rel_tol * std::abs(value)))
      return value;
    prev = value;
    have_prev = true;
  }
  return prev;
}

}  // namespace

double frac_laplacian_pointwise(const PvField& u, const Point& x, double s,
                                const QuadSpec& spec) {
  geometry::check_point(x);
  if (!(s > 0.0 && s < 1.0)) throw DomainError("frac_laplacian: s must lie in (0,1)");
  if (!u.decay) throw DomainError("frac_laplacian: far-field decay class undeclared");
  if (!(u.smooth_radius > 0.0) || !(u.second_derivative_bound >= 0.0))
    throw DomainError("frac_laplacian: need a C^2 radius and derivative bound");
  spec.validate();
  const int n = (int)x.size();
  if (n > 3) throw DomainError("frac_laplacian: cubature capped at n <= 3");

  const double C = constants::big_c_const(n, s);
  const double wn = constants::sphere_measure(n);
  const double tol = spec.abs_tol;
  const double ux = u.eval(x);

  // Inner radius from the Taylor remainder: |2u(x)-u(x+y)-u(x-y)| <= M2 |y|^2
  // makes the dropped head piece at most (C/2) M2 wn delta^{2-2s}/(2-2s);
  // keep that below tol/4.  Shrinking below smooth_radius only helps.
  const double m2 = std::max(u.second_derivative_bound, 1e-30);
  double delta = std::pow(tol * (2.0 - 2.0 * s) / (2.0 * C * m2 * wn), 1.0 / (2.0 - 2.0 * s));
  delta = std::min(delta, u.smooth_radius);
  delta = std::max(delta, 1e-12);

  // Outer radius: the 2(u(x) - far_limit) part of the tail integrates in
  // closed form; the u(x+-y) - far_limit part vanishes (compact support) or
  // is driven below tol/4 by the choice of R.
  double R;
  if (*u.decay == DecayClass::CompactSupport) {
    if (!(u.support_radius > 0.0))
      throw DomainError("frac_laplacian: compact support radius missing");
    R = u.support_radius + x.norm() + 1e-9;
  } else {
    if (!(u.power > 0.0))
      throw DomainError("frac_laplacian: power-law decay exponent missing");
    // |u(x+-y) - far_limit| <= amplitude (|y|/2)^{-power} once |y| >= 2|x|, 2.
    const double base = std::max(2.0 * x.norm(), 2.0);
    const double coef =
        C * u.amplitude * std::pow(2.0, u.power) * wn / (2.0 * s + u.power);
    R = (u.amplitude > 0.0)
            ? std::max(base, std::pow(4.0 * coef / tol, 1.0 / (2.0 * s + u.power)))
            : base;
  }
  if (R <= delta * 2.0) R = delta * 2.0;
  const double tail_exact =
      2.0 * (ux - u.far_limit) * wn * std::pow(R, -2.0 * s) / (2.0 * s);

  // Middle shell in polar form.
  auto second_difference = [&](double rho) {
    auto g = [&](const Point& w) {
      return 2.0 * ux - u.eval(x + rho * w) - u.eval(x - rho * w);
    };
    return sphere_integral(g, n, 1e-9,
                           tol * std::pow(rho, 1.0 + 2.0 * s) / (8.0 * (R - delta)));
  };
  auto integrand = [&](double rho) {
    return std::pow(rho, -1.0 - 2.0 * s) * second_difference(rho);
  };
  // Kink radii: spheres |x +- rho w| crossing the support boundary or the
  // smoothness ball produce C^0 creases in rho.
  std::vector<double> breaks = {u.smooth_radius};
  if (*u.decay == DecayClass::CompactSupport) {
    breaks.push_back(u.support_radius - x.norm());
    breaks.push_back(u.support_radius + x.norm());
  }
  QuadSpec mid_spec(std::max(spec.rel_tol, 1e-9), 0.25 * tol);
  mid_spec.max_nodes = spec.max_nodes;
  const QuadResult mid = integrate_interval_split(integrand, delta, R, breaks, mid_spec);
  if (!mid.converged)
    throw BudgetExceededError("frac_laplacian: shell quadrature exhausted its budget");

  return 0.5 * C * (mid.value + tail_exact);
}

double alternating_series_tail(const Fn1& f, double a, int max_half_periods,
                               double* error_estimate) {
  const int K = std::max(8, max_half_periods);
  std::vector<double> chunk(K);
  const Rule& gl = gauss_legendre(24);
  for (int k = 0; k < K; ++k) {
    const double lo = a + k * kPi, hi = lo + kPi;
    const double c = 0.5 * (lo + hi), d = 0.5 * (hi - lo);
    std::vector<double> terms;
    terms.reserve(24);
    for (int i = 0; i < 24; ++i)
      terms.push_back(gl.weights[i] * f(c + d * gl.nodes[i]));
    chunk[k] = d * pairwise_sum(terms);
  }
  // Iterated averaging of the partial sums (Euler transform), applied to the
  // tail window where the chunk signs have settled into alternation.
  std::vector<double> sums(K);
  double run = 0.0;
  for (int k = 0; k < K; ++k) {
    run += chunk[k];
    sums[k] = run;
  }
  const int window = std::min(K, 24);
  std::vector<double> row(sums.end() - window, sums.end());
  double prev_front = row.back();
  double front = row.back();
  for (int len = window; len > 1; --len) {
    for (int i = 0; i + 1 < len; ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
    prev_front = front;
    front = row[0];
  }
  if (error_estimate) *error_estimate = std::abs(front - prev_front);
  return front;
}

}  // namespace fraclap::quadrature

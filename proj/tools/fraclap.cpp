// fraclap: constant tables, kernel evaluation grids, Dirichlet solves, and
// the identity-verification suite for the fractional Laplacian on the ball.
//
// Exit codes: 0 ok, 1 verification failure, 2 config error, 3 numerical
// non-convergence.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fraclap/constants.hpp"
#include "fraclap/kernels.hpp"
#include "fraclap/solver.hpp"
#include "fraclap/table.hpp"
#include "fraclap/verify.hpp"

namespace {

using nlohmann::json;
namespace fl = fraclap;

struct CliError {
  int code;
  std::string message;
};

struct RunConfig {
  std::string command;
  json doc = json::object();
  std::optional<int> n;
  std::optional<double> s, r, tol;
  std::string out_path, format = "csv";
  bool quiet = false;
  std::string filter;
  int threads = 1;
};

int env_threads() {
  const char* env = std::getenv("FRACLAP_THREADS");
  int hw = (int)std::thread::hardware_concurrency();
  if (hw <= 0) hw = 1;
  int cap = hw;
  if (env) {
    try {
      cap = std::max(1, std::min(hw, std::stoi(env)));
    } catch (...) {
      throw CliError{2, "FRACLAP_THREADS is not an integer"};
    }
  }
  return cap;
}

json get_or(const json& doc, const char* key, json fallback) {
  return doc.contains(key) ? doc.at(key) : fallback;
}

double need_s(const RunConfig& cfg) {
  if (cfg.s) return *cfg.s;
  if (cfg.doc.contains("s")) return cfg.doc.at("s").get<double>();
  throw CliError{2, "missing order s (flag --s or config field \"s\")"};
}

int need_n(const RunConfig& cfg) {
  if (cfg.n) return *cfg.n;
  if (cfg.doc.contains("n")) return cfg.doc.at("n").get<int>();
  throw CliError{2, "missing dimension n (flag --n or config field \"n\")"};
}

double radius_of(const RunConfig& cfg) {
  if (cfg.r) return *cfg.r;
  if (cfg.doc.contains("r")) return cfg.doc.at("r").get<double>();
  return 1.0;
}

void validate_ns(int n, double s, double r) {
  if (n < 1) throw CliError{2, "dimension n must be >= 1"};
  if (!(s > 0.0 && s < 1.0)) throw CliError{2, "order s must lie in (0,1)"};
  if (!(r > 0.0)) throw CliError{2, "radius r must be positive"};
}

// Tensor grid over the configured axes; each axis {"min","max","count"}.
std::vector<fl::Point> build_grid(const json& axes, int n) {
  if (!axes.is_array() || (int)axes.size() != n)
    throw CliError{2, "grid must list one {min,max,count} axis per dimension"};
  std::vector<std::vector<double>> lines;
  for (const auto& axis : axes) {
    const double lo = axis.at("min").get<double>();
    const double hi = axis.at("max").get<double>();
    const long count = axis.at("count").get<long>();
    if (count < 1 || hi < lo) throw CliError{2, "malformed grid axis"};
    std::vector<double> line;
    for (long i = 0; i < count; ++i)
      line.push_back(count == 1 ? lo : lo + (hi - lo) * i / (double)(count - 1));
    lines.push_back(std::move(line));
  }
  std::vector<fl::Point> pts;
  std::vector<size_t> idx(lines.size(), 0);
  for (;;) {
    fl::Point p(n);
    for (int d = 0; d < n; ++d) p[d] = lines[d][idx[d]];
    pts.push_back(std::move(p));
    int d = n - 1;
    while (d >= 0 && ++idx[d] == lines[d].size()) idx[d--] = 0;
    if (d < 0) break;
  }
  return pts;
}

fl::Point point_from(const json& arr, int n, const char* what) {
  if (!arr.is_array() || (int)arr.size() != n)
    throw CliError{2, std::string(what) + " must be an array of n coordinates"};
  fl::Point p(n);
  for (int i = 0; i < n; ++i) p[i] = arr.at(i).get<double>();
  return p;
}

void emit(const RunConfig& cfg, const fl::table::Table& table) {
  const std::string body =
      (cfg.format == "json") ? fl::table::to_json(table) : fl::table::to_csv(table);
  if (cfg.out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) throw CliError{2, "cannot open output path " + cfg.out_path};
    out << body;
  }
}

void note(const RunConfig& cfg, const std::string& message) {
  if (!cfg.quiet) std::cerr << message << "\n";
}

// Runs independent row jobs with a fixed index assignment so the output is
// identical for every thread count.  The lowest-index failure, if any, is
// rethrown on the caller's thread.
template <typename Job>
void parallel_rows(int threads, size_t count, const Job& job) {
  const int nt = std::max(1, std::min<int>(threads, (int)count));
  std::vector<std::exception_ptr> errors(count);
  auto guarded = [&](size_t i) {
    try {
      job(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (nt == 1) {
    for (size_t i = 0; i < count; ++i) guarded(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        for (size_t i = t; i < count; i += nt) guarded(i);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

int cmd_constants(const RunConfig& cfg) {
  std::vector<std::pair<int, double>> pairs;
  if (cfg.doc.contains("pairs")) {
    for (const auto& pr : cfg.doc.at("pairs"))
      pairs.emplace_back(pr.at(0).get<int>(), pr.at(1).get<double>());
  } else if (cfg.n || cfg.doc.contains("n")) {
    pairs.emplace_back(need_n(cfg), need_s(cfg));
  }
  for (auto [n, s] : pairs) {
    validate_ns(n, s, 1.0);
    if (fl::specfun::RegimeTag::classify(n, s).near_critical_warning)
      note(cfg, "warning: (n,s)=(" + std::to_string(n) + "," + std::to_string(s) +
                    ") is ill-conditioned near n = 2s; a(1,s) grows like 1/cos(pi s)");
  }

  fl::table::Table table;
  table.columns = {"n", "s", "a", "c", "k", "kappa", "C_closed", "C_quadrature",
                   "abs_diff"};
  table.rows.resize(pairs.size());
  parallel_rows(cfg.threads, pairs.size(), [&](size_t i) {
    auto [n, s] = pairs[i];
    const auto bundle = fl::constants::make_bundle(n, s);
    std::vector<fl::table::Cell> row{(long long)n, s, bundle.a, bundle.c};
    if (bundle.k)
      row.emplace_back(*bundle.k);
    else
      row.emplace_back(fl::table::Empty{});
    row.emplace_back(bundle.kappa);
    row.emplace_back(bundle.big_c);
    if (n <= 3) {
      const double cq = fl::constants::big_c_quadrature(n, s);
      row.emplace_back(cq);
      row.emplace_back(std::abs(cq - bundle.big_c));
    } else {
      row.emplace_back(fl::table::Empty{});
      row.emplace_back(fl::table::Empty{});
    }
    table.rows[i] = std::move(row);
  });
  emit(cfg, table);
  note(cfg, "constants: " + std::to_string(pairs.size()) + " rows");
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  const int n = need_n(cfg);
  const double s = need_s(cfg);
  const double r = radius_of(cfg);
  validate_ns(n, s, r);
  const std::string selector = get_or(cfg.doc, "field", "phi").get<std::string>();
  const bool known_selector =
      selector == "phi" || selector == "smean" || selector == "poisson" ||
      selector == "green_closed" || selector == "green_definition";
  if (!known_selector) throw CliError{2, "unknown field selector " + selector};
  const auto ctx = fl::kernels::make_context(n, s, r);
  const std::vector<fl::Point> grid = build_grid(get_or(cfg.doc, "grid", json::array()), n);

  fl::Point x = fl::Point::Zero(n);
  if (cfg.doc.contains("x")) x = point_from(cfg.doc.at("x"), n, "x");

  fl::quadrature::QuadSpec spec;
  if (cfg.tol) {
    spec.rel_tol = *cfg.tol;
    spec.abs_tol = *cfg.tol * 1e-3;
  }

  fl::table::Table table;
  for (int d = 0; d < n; ++d) table.columns.push_back("p" + std::to_string(d + 1));
  table.columns.push_back("value");
  table.columns.push_back("status");

  auto evaluate = [&](const fl::Point& p) -> std::pair<fl::table::Cell, std::string> {
    try {
      if (selector == "phi") return {fl::kernels::fundamental_solution(ctx, p), "ok"};
      if (selector == "smean") return {fl::kernels::s_mean_kernel(ctx, p), "ok"};
      if (selector == "poisson") return {fl::kernels::poisson_kernel(ctx, p, x), "ok"};
      if (selector == "green_closed")
        return {fl::kernels::green_closed(ctx, x, p).value, "ok"};
      if (selector == "green_definition")
        return {fl::quadrature::check_converged(
                    fl::kernels::green_definition(ctx, x, p, spec), "green_definition")
                    .value,
                "ok"};
      throw CliError{2, "unknown field selector " + selector};
    } catch (const fl::SingularityError&) {
      return {fl::table::Empty{}, "diagonal"};
    } catch (const fl::DomainError& e) {
      return {fl::table::Empty{}, std::string("domain: ") + e.what()};
    }
  };

  table.rows.resize(grid.size());
  parallel_rows(cfg.threads, grid.size(), [&](size_t i) {
    auto [value, status] = evaluate(grid[i]);
    std::vector<fl::table::Cell> row;
    for (int d = 0; d < n; ++d) row.emplace_back(grid[i][d]);
    row.push_back(std::move(value));
    row.emplace_back(status);
    table.rows[i] = std::move(row);
  });
  emit(cfg, table);
  note(cfg, "eval " + selector + ": " + std::to_string(grid.size()) + " rows");
  return 0;
}

fl::solver::ScalarField forcing_from(const json& doc, const fl::kernels::KernelContext& ctx) {
  const json spec = get_or(doc, "forcing", json{{"type", "dydares"}});
  const std::string type = spec.at("type").get<std::string>();
  fl::solver::ScalarField h;
  h.smoothness_hint = fl::solver::Smoothness::Smooth;
  if (type == "constant") {
    const double value = spec.at("value").get<double>();
    h.eval = [value](const fl::Point&) { return value; };
  } else if (type == "dydares") {
    // Forcing whose solution on the unit ball is (1-|x|^2)_+^s.
    const double value = ctx.constants.big_c * 0.5 * ctx.constants.omega_n *
                         fl::specfun::beta(ctx.s, 1.0 - ctx.s);
    h.eval = [value](const fl::Point&) { return value; };
  } else if (type == "gaussian") {
    h.eval = [](const fl::Point& y) { return std::exp(-y.squaredNorm()); };
  } else if (type == "polynomial") {
    const std::vector<double> coef =
        spec.at("coefficients").get<std::vector<double>>();
    h.eval = [coef](const fl::Point& y) {
      const double t = y.norm();
      double acc = 0.0, p = 1.0;
      for (double c : coef) {
        acc += c * p;
        p *= t;
      }
      return acc;
    };
  } else {
    throw CliError{2, "unknown forcing preset " + type};
  }
  return h;
}

int cmd_solve(const RunConfig& cfg) {
  const int n = need_n(cfg);
  const double s = need_s(cfg);
  const double r = radius_of(cfg);
  validate_ns(n, s, r);
  const auto ctx = fl::kernels::make_context(n, s, r);
  const auto h = forcing_from(cfg.doc, ctx);
  const std::vector<fl::Point> grid = build_grid(get_or(cfg.doc, "grid", json::array()), n);
  const bool residuals = get_or(cfg.doc, "residuals", false).get<bool>();

  fl::quadrature::QuadSpec spec(1e-8, 1e-9);
  if (cfg.tol) {
    spec.rel_tol = *cfg.tol;
    spec.abs_tol = *cfg.tol * 0.1;
  }

  fl::table::Table table;
  for (int d = 0; d < n; ++d) table.columns.push_back("p" + std::to_string(d + 1));
  table.columns.push_back("u");
  if (residuals) table.columns.push_back("residual");

  std::vector<double> values(grid.size());
  table.rows.resize(grid.size());
  parallel_rows(cfg.threads, grid.size(), [&](size_t i) {
    values[i] = fl::solver::dirichlet_solve(ctx, h, grid[i], spec);
  });
  for (size_t i = 0; i < grid.size(); ++i) {
    std::vector<fl::table::Cell> row;
    for (int d = 0; d < n; ++d) row.emplace_back(grid[i][d]);
    row.emplace_back(values[i]);
    table.rows[i] = std::move(row);
  }
  if (residuals) {
    // PV residual of the computed solution; C^2 data supplied by a solve
    // wrapper around the same Green convolution.
    fl::quadrature::QuadSpec pv_spec(1e-6, 1e-5);
    auto provider = [&](const fl::Point&) {
      fl::quadrature::PvField field;
      field.eval = [&](const fl::Point& y) {
        return fl::solver::dirichlet_solve(ctx, h, y, spec);
      };
      field.smooth_radius = 0.05 * r;
      field.second_derivative_bound = 64.0 / (r * r);
      field.decay = fl::quadrature::DecayClass::CompactSupport;
      field.support_radius = r;
      return field;
    };
    for (size_t i = 0; i < grid.size(); ++i) {
      if (grid[i].norm() < 0.8 * r) {
        const auto report = fl::solver::residual_check(
            ctx, h, provider, {grid[i]}, pv_spec);
        table.rows[i].emplace_back((*report.residuals)[0].second);
      } else {
        table.rows[i].emplace_back(fl::table::Empty{});
      }
    }
  }
  emit(cfg, table);
  note(cfg, "solve: " + std::to_string(grid.size()) + " rows");
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  std::string filter = cfg.filter;
  if (filter.empty() && cfg.doc.contains("filter"))
    filter = cfg.doc.at("filter").get<std::string>();
  std::optional<double> tol = cfg.tol;
  if (!tol && cfg.doc.contains("tol")) tol = cfg.doc.at("tol").get<double>();

  const auto rows = fl::verify::run_identities(filter, tol, cfg.threads);
  if (rows.empty() && !filter.empty())
    throw CliError{2, "verify filter matched no identities: " + filter};

  fl::table::Table table;
  table.columns = {"name", "params", "lhs", "rhs", "abs_err", "rel_err", "pass"};
  size_t failures = 0;
  for (const auto& row : rows) {
    table.rows.push_back({row.name, row.params, row.lhs, row.rhs, row.abs_err,
                          row.rel_err, std::string(row.pass ? "pass" : "FAIL")});
    if (!row.pass) ++failures;
  }
  emit(cfg, table);
  note(cfg, "verify: " + std::to_string(rows.size() - failures) + "/" +
                std::to_string(rows.size()) + " identities passed");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional Laplacian on the ball: kernels, constants, solvers"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  for (const char* name : {"constants", "eval", "solve", "verify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config document");
    sub->add_option("--n", cfg.n, "dimension");
    sub->add_option("--s", cfg.s, "fractional order in (0,1)");
    sub->add_option("--r", cfg.r, "ball radius");
    sub->add_option("--out", cfg.out_path, "output file path");
    sub->add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol", cfg.tol, "tolerance override");
    sub->add_option("--filter", cfg.filter, "identity name filter (verify)");
    sub->add_flag("--quiet", cfg.quiet, "suppress diagnostics on stderr");
    sub->callback([&cfg, name] { cfg.command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.threads = env_threads();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw CliError{2, "cannot read config " + config_path};
      try {
        in >> cfg.doc;
      } catch (const std::exception& e) {
        throw CliError{2, std::string("config parse error: ") + e.what()};
      }
    }
    if (cfg.command == "constants") return cmd_constants(cfg);
    if (cfg.command == "eval") return cmd_eval(cfg);
    if (cfg.command == "solve") return cmd_solve(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    throw CliError{2, "unknown command"};
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const fl::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fl::NonFiniteSampleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

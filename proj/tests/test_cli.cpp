#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// End-to-end checks of the fraclap binary: exit codes, output determinism,
// and the documented table formats.

namespace {

const char* cli_path() { return FRACLAP_CLI_PATH; }

struct RunOutcome {
  int exit_code;
  std::string stdout_text;
};

RunOutcome run(const std::string& args, const std::string& env = "") {
  const std::string out_file = "/tmp/fraclap_test_stdout.txt";
  const std::string cmd = env + " " + std::string(cli_path()) + " " + args + " > " +
                          out_file + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::stringstream buf;
  buf << in.rdbuf();
  return {WEXITSTATUS(raw), buf.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

TEST_CASE("constants row for (1, 1/2) pins kappa and C to 1/pi") {
  const auto res = run("constants --n 1 --s 0.5 --quiet");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.stdout_text);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header ==
        "n,s,a,c,k,kappa,C_closed,C_quadrature,abs_diff");
  const auto cells = split_csv_row(row);
  REQUIRE(cells.size() == 9);
  const double kappa = std::stod(cells[5]);
  const double big_c = std::stod(cells[6]);
  const double inv_pi = 0.31830988618379067;
  CHECK(std::abs(kappa - inv_pi) <= 1e-12);
  CHECK(std::abs(big_c - inv_pi) <= 1e-12);
  CHECK(cells[4].empty());  // k undefined at n = 2s
}

TEST_CASE("constants with an empty pair list emits just the header") {
  write_file("/tmp/fraclap_empty.json", R"({"pairs": []})");
  const auto res = run("constants --config /tmp/fraclap_empty.json --quiet");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text == "n,s,a,c,k,kappa,C_closed,C_quadrature,abs_diff\n");
}

TEST_CASE("eval: phi vanishes on the unit sphere in the critical regime") {
  write_file("/tmp/fraclap_eval.json",
             R"({"n":1, "s":0.5, "field":"phi",
                 "grid":[{"min":1.0, "max":1.0, "count":1}]})");
  const auto res = run("eval --config /tmp/fraclap_eval.json --quiet");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.stdout_text);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "p1,value,status");
  const auto cells = split_csv_row(row);
  CHECK(std::stod(cells[1]) == 0.0);
  CHECK(cells[2] == "ok");
}

TEST_CASE("eval: forbidden points carry a status instead of a value") {
  // green_closed along a z-grid through the diagonal point z = x
  write_file("/tmp/fraclap_eval2.json",
             R"({"n":1, "s":0.5, "field":"green_closed", "x":[0.25],
                 "grid":[{"min":0.05, "max":0.45, "count":5}]})");
  const auto res = run("eval --config /tmp/fraclap_eval2.json --quiet");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.stdout_text);
  std::string line;
  std::getline(lines, line);
  int ok_rows = 0, diagonal_rows = 0;
  while (std::getline(lines, line)) {
    const auto cells = split_csv_row(line);
    if (cells[2] == "ok") {
      ++ok_rows;
      CHECK(std::stod(cells[1]) > 0.0);
    } else {
      ++diagonal_rows;
      CHECK(cells[1].empty());
      CHECK(cells[2] == "diagonal");
    }
  }
  CHECK(ok_rows == 4);
  CHECK(diagonal_rows == 1);
}

TEST_CASE("eval: green profile decreases to zero toward the boundary") {
  write_file("/tmp/fraclap_eval3.json",
             R"({"n":1, "s":0.5, "field":"green_closed", "x":[0.0],
                 "grid":[{"min":0.1, "max":0.999, "count":8}]})");
  const auto res = run("eval --config /tmp/fraclap_eval3.json --quiet");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.stdout_text);
  std::string line;
  std::getline(lines, line);
  double prev = 1e300;
  int rows = 0;
  while (std::getline(lines, line)) {
    const double v = std::stod(split_csv_row(line)[1]);
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
    ++rows;
  }
  CHECK(rows == 8);
  CHECK(prev < 0.02);
}

TEST_CASE("solve: the flagship preset reproduces (1-x^2)^s") {
  write_file("/tmp/fraclap_solve.json",
             R"({"n":1, "s":0.5, "forcing":{"type":"dydares"},
                 "grid":[{"min":-0.8, "max":0.8, "count":9}]})");
  const auto res = run("solve --config /tmp/fraclap_solve.json --quiet");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.stdout_text);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "p1,u");
  int rows = 0;
  while (std::getline(lines, line)) {
    const auto cells = split_csv_row(line);
    const double x = std::stod(cells[0]);
    const double u = std::stod(cells[1]);
    CHECK(std::abs(u - std::sqrt(1.0 - x * x)) <= 1e-4);
    ++rows;
  }
  CHECK(rows == 9);
}

TEST_CASE("solve: zero forcing gives the zero column") {
  write_file("/tmp/fraclap_solve0.json",
             R"({"n":1, "s":0.75, "forcing":{"type":"constant", "value":0.0},
                 "grid":[{"min":-0.5, "max":0.5, "count":3}]})");
  const auto res = run("solve --config /tmp/fraclap_solve0.json --quiet");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.stdout_text);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) CHECK(std::stod(split_csv_row(line)[1]) == 0.0);
}

TEST_CASE("verify: filter runs clean and exits zero") {
  const auto res = run("verify --filter gam2,gam3,prop2 --quiet");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("FAIL") == std::string::npos);
  CHECK(res.stdout_text.find("gam3") != std::string::npos);
}

TEST_CASE("verify: unattainable tolerance reports failures with exit 1") {
  const auto res = run("verify --filter prop2 --tol 1e-30 --quiet");
  CHECK(res.exit_code == 1);
  CHECK(res.stdout_text.find("FAIL") != std::string::npos);
}

TEST_CASE("exit code 2 on config errors") {
  CHECK(run("constants --n 1 --s 1.5 --quiet").exit_code == 2);
  CHECK(run("constants --n 0 --s 0.5 --quiet").exit_code == 2);
  write_file("/tmp/fraclap_bad.json", "{not json");
  CHECK(run("verify --config /tmp/fraclap_bad.json --quiet").exit_code == 2);
  CHECK(run("verify --filter no_such_identity --quiet").exit_code == 2);
  write_file("/tmp/fraclap_badfield.json",
             R"({"n":1, "s":0.5, "field":"nonsense",
                 "grid":[{"min":0, "max":1, "count":2}]})");
  CHECK(run("eval --config /tmp/fraclap_badfield.json --quiet").exit_code == 2);
}

TEST_CASE("output files are byte-identical across runs and thread counts") {
  const std::string args =
      "verify --filter Ir,Ip,gam3,hypelc2,uss --out /tmp/fraclap_det_";
  REQUIRE(run(args + "a.csv", "FRACLAP_THREADS=1").exit_code == 0);
  REQUIRE(run(args + "b.csv", "FRACLAP_THREADS=3").exit_code == 0);
  REQUIRE(run(args + "c.csv", "FRACLAP_THREADS=8").exit_code == 0);
  const std::string a = slurp("/tmp/fraclap_det_a.csv");
  CHECK(!a.empty());
  CHECK(a == slurp("/tmp/fraclap_det_b.csv"));
  CHECK(a == slurp("/tmp/fraclap_det_c.csv"));

  // repeated runs of a solve grid match at shared points by construction
  write_file("/tmp/fraclap_solve_det.json",
             R"({"n":1, "s":0.5, "forcing":{"type":"dydares"},
                 "grid":[{"min":-0.5, "max":0.5, "count":3}]})");
  const auto r1 = run("solve --config /tmp/fraclap_solve_det.json --quiet");
  const auto r2 = run("solve --config /tmp/fraclap_solve_det.json --quiet",
                      "FRACLAP_THREADS=2");
  CHECK(r1.stdout_text == r2.stdout_text);
}

TEST_CASE("solve: optional residual column closes the loop") {
  write_file("/tmp/fraclap_solve_res.json",
             R"({"n":1, "s":0.5, "forcing":{"type":"dydares"}, "residuals":true,
                 "grid":[{"min":-0.3, "max":0.3, "count":3}]})");
  const auto res = run("solve --config /tmp/fraclap_solve_res.json --quiet");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.stdout_text);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "p1,u,residual");
  while (std::getline(lines, line)) {
    const auto cells = split_csv_row(line);
    REQUIRE(cells.size() == 3);
    CHECK(std::stod(cells[2]) <= 1e-2);  // |(-Delta)^s u - h| on the grid
  }
}

TEST_CASE("eval: the two green routes agree on a grid") {
  // (n,s) = (3,0.5), five z points, both selectors, 1e-4 agreement
  for (const char* field : {"green_closed", "green_definition"}) {
    std::ostringstream cfg;
    cfg << R"({"n":3, "s":0.5, "field":")" << field << R"(", "x":[0.2,0,0],
           "grid":[{"min":-0.6,"max":0.6,"count":5},
                   {"min":0.1,"max":0.1,"count":1},
                   {"min":0.0,"max":0.0,"count":1}]})";
    write_file(std::string("/tmp/fraclap_green_") + field + ".json", cfg.str());
  }
  const auto closed = run("eval --config /tmp/fraclap_green_green_closed.json --quiet");
  const auto defn =
      run("eval --config /tmp/fraclap_green_green_definition.json --quiet");
  REQUIRE(closed.exit_code == 0);
  REQUIRE(defn.exit_code == 0);
  std::istringstream lc(closed.stdout_text), ld(defn.stdout_text);
  std::string rc, rd;
  std::getline(lc, rc);
  std::getline(ld, rd);
  int rows = 0;
  while (std::getline(lc, rc) && std::getline(ld, rd)) {
    const double vc = std::stod(split_csv_row(rc)[3]);
    const double vd = std::stod(split_csv_row(rd)[3]);
    CHECK(std::abs(vc - vd) <= 1e-4 * std::max(1.0, std::abs(vc)));
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("solve: different grid resolutions agree exactly at shared points") {
  write_file("/tmp/fraclap_grid3.json",
             R"({"n":1, "s":0.75, "forcing":{"type":"constant","value":1.0},
                 "grid":[{"min":-0.5, "max":0.5, "count":3}]})");
  write_file("/tmp/fraclap_grid5.json",
             R"({"n":1, "s":0.75, "forcing":{"type":"constant","value":1.0},
                 "grid":[{"min":-0.5, "max":0.5, "count":5}]})");
  const auto coarse = run("solve --config /tmp/fraclap_grid3.json --quiet");
  const auto fine = run("solve --config /tmp/fraclap_grid5.json --quiet");
  REQUIRE(coarse.exit_code == 0);
  REQUIRE(fine.exit_code == 0);
  // rows of the coarse grid appear verbatim in the fine grid's output
  std::istringstream lines(coarse.stdout_text);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line))
    CHECK(fine.stdout_text.find(line) != std::string::npos);
}

TEST_CASE("eval: the remaining kernel selectors produce rows") {
  write_file("/tmp/fraclap_smean.json",
             R"({"n":1, "s":0.5, "field":"smean",
                 "grid":[{"min":0.5, "max":2.0, "count":2}]})");
  const auto sm = run("eval --config /tmp/fraclap_smean.json --quiet");
  REQUIRE(sm.exit_code == 0);
  std::istringstream lines(sm.stdout_text);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(std::stod(split_csv_row(line)[1]) == 0.0);  // inside the closed ball
  std::getline(lines, line);
  CHECK(std::stod(split_csv_row(line)[1]) ==
        doctest::Approx(1.0 / (2.0 * std::sqrt(3.0) * 3.14159265358979324)));

  write_file("/tmp/fraclap_poisson.json",
             R"({"n":1, "s":0.5, "field":"poisson", "x":[0.0],
                 "grid":[{"min":2.0, "max":2.0, "count":1}]})");
  const auto ps = run("eval --config /tmp/fraclap_poisson.json --quiet");
  REQUIRE(ps.exit_code == 0);
  std::istringstream pl(ps.stdout_text);
  std::getline(pl, line);
  std::getline(pl, line);
  CHECK(std::stod(split_csv_row(line)[1]) ==
        doctest::Approx((1.0 / 3.14159265358979324) * std::sqrt(1.0 / 3.0) * 0.5));
}

TEST_CASE("malformed FRACLAP_THREADS is a config error") {
  CHECK(run("constants --n 2 --s 0.5 --quiet", "FRACLAP_THREADS=banana").exit_code ==
        2);
}

TEST_CASE("json format mirrors the csv rows") {
  const auto res = run("constants --n 2 --s 0.5 --format json --quiet");
  REQUIRE(res.exit_code == 0);
  CHECK(res.stdout_text.find("\"columns\"") != std::string::npos);
  CHECK(res.stdout_text.find("\"kappa\"") != std::string::npos);
  CHECK(res.stdout_text.find("\"rows\"") != std::string::npos);
}

TEST_CASE("quiet keeps stdout to the table alone") {
  const std::string out_file = "/tmp/fraclap_quiet.txt";
  const std::string err_file = "/tmp/fraclap_quiet_err.txt";
  const std::string cmd = std::string(cli_path()) +
                          " verify --filter prop2 --quiet > " + out_file + " 2> " +
                          err_file;
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const std::string out = slurp(out_file);
  CHECK(out.substr(0, 5) == "name,");
  CHECK(slurp(err_file).empty());

  // without --quiet the summary goes to stderr, never stdout
  const std::string cmd2 = std::string(cli_path()) +
                           " verify --filter prop2 > " + out_file + " 2> " + err_file;
  REQUIRE(WEXITSTATUS(std::system(cmd2.c_str())) == 0);
  CHECK(slurp(out_file) == out);
  CHECK(slurp(err_file).find("identities passed") != std::string::npos);
}

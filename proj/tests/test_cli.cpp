#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "covertkit/cli.hpp"
#include "covertkit/covert.hpp"
#include "covertkit/infotheory.hpp"

using namespace covertkit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("covertkit_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cli::RunConfig small_fig_config(const std::string& out_dir) {
  cli::RunConfig cfg;
  cfg.theta_min = -1.5;
  cfg.theta_max = 1.5;
  cfg.theta_step = 0.25;
  cfg.quad_points = 4097;
  cfg.out_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("dB conversion and config validation") {
  CHECK(cli::db_to_linear(0.0) == 1.0);
  CHECK(cli::db_to_linear(10.0) == doctest::Approx(10.0));
  CHECK(cli::db_to_linear(-10.0) == doctest::Approx(0.1));

  cli::RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.epsilon = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.theta_min = 2.0;
  cfg.theta_max = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.format = "xml";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("fig2: reduction row, determinism, diagnostics-free run") {
  TempDir dir("fig2");
  const auto cfg = small_fig_config(dir.path.string());
  REQUIRE(cli::cmd_fig2(cfg) == 0);

  const std::string csv = slurp(dir.path / "fig2.csv");
  CHECK(csv.rfind("# covertkit", 0) == 0);
  CHECK(csv.find(covert::FrontierPoint::csv_header()) != std::string::npos);
  CHECK(!fs::exists(dir.path / "fig2_diagnostics.txt"));
  CHECK(slurp(dir.path / "fig2.svg").find("<svg") == 0);

  // theta = 0 row carries the Gaussian benchmark values
  std::istringstream lines(csv);
  std::string line;
  bool found_zero = false;
  while (std::getline(lines, line)) {
    if (line.rfind("0,1,", 0) == 0) {
      found_zero = true;
      CHECK(line.find("0.15342640") != std::string::npos);
      CHECK(line.find("0.096573590") != std::string::npos);
      CHECK(line.find("0.69314718") != std::string::npos);
    }
  }
  CHECK(found_zero);

  // byte determinism across reruns
  REQUIRE(cli::cmd_fig2(cfg) == 0);
  CHECK(slurp(dir.path / "fig2.csv") == csv);
}

TEST_CASE("fig2 json format mirrors the rows") {
  TempDir dir("fig2json");
  auto cfg = small_fig_config(dir.path.string());
  cfg.format = "json";
  REQUIRE(cli::cmd_fig2(cfg) == 0);
  const std::string doc = slurp(dir.path / "fig2.json");
  CHECK(doc.find("\"rows\"") != std::string::npos);
  CHECK(doc.find("\"kl_reverse\"") != std::string::npos);
  CHECK(!fs::exists(dir.path / "fig2.csv"));
}

TEST_CASE("fig3/fig4 emit comparison tables with a winning skew point") {
  TempDir dir("fig34");
  auto cfg = small_fig_config(dir.path.string());
  cfg.no_plots = true;
  REQUIRE(cli::cmd_fig3(cfg) == 0);
  REQUIRE(cli::cmd_fig4(cfg) == 0);
  for (const char* name : {"fig3.csv", "fig4.csv"}) {
    const std::string csv = slurp(dir.path / name);
    CHECK(csv.find("matched_gaussian_Px,delta_mi") != std::string::npos);
    // at least one positive delta_mi row
    bool winner = false;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // comment
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
      const auto comma = line.rfind(',');
      if (comma == std::string::npos || comma + 1 >= line.size()) continue;
      const std::string cell = line.substr(comma + 1);
      if (!cell.empty() && cell[0] != '-' && std::stod(cell) > 1e-5) winner = true;
    }
    CHECK(winner);
  }
  CHECK(!fs::exists(dir.path / "fig3.svg"));
}

TEST_CASE("fig5 rows satisfy the bound chain") {
  TempDir dir("fig5");
  cli::RunConfig cfg;
  cfg.out_dir = dir.path.string();
  cfg.px_steps = 11;
  cfg.sigma_w_db_list = {0.0, 3.0};
  REQUIRE(cli::cmd_fig5(cfg) == 0);
  const std::string csv = slurp(dir.path / "fig5.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    double Px, s2w, xi, br, bf;
    char c;
    std::istringstream row(line);
    row >> Px >> c >> s2w >> c >> xi >> c >> br >> c >> bf;
    CHECK(xi >= br - 1e-9);
    CHECK(br >= bf - 1e-9);
    ++rows;
  }
  CHECK(rows == 22);
}

TEST_CASE("fig6 orders the three constraints and grows with epsilon") {
  TempDir dir("fig6");
  cli::RunConfig cfg;
  cfg.out_dir = dir.path.string();
  cfg.eps_steps = 8;
  REQUIRE(cli::cmd_fig6(cfg) == 0);
  const std::string csv = slurp(dir.path / "fig6.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  double prev_tv = 0.0;
  bool first = true;
  while (std::getline(lines, line)) {
    double eps, ptv, pkr, pkf, mtv, mkr, mkf;
    char c;
    std::istringstream row(line);
    row >> eps >> c >> ptv >> c >> pkr >> c >> pkf >> c >> mtv >> c >> mkr >> c >> mkf;
    CHECK(ptv > pkr);
    CHECK(pkr > pkf);
    CHECK(mtv > mkr);
    CHECK(mkr > mkf);
    if (!first) CHECK(ptv > prev_tv);
    prev_tv = ptv;
    first = false;
    if (std::abs(eps - 0.05) < 1e-12)
      CHECK(pkf == doctest::Approx(covert::max_power_kl_forward(0.05, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("verify: quick suite passes, fault injection fails") {
  TempDir dir("verify");
  cli::RunConfig cfg;
  cfg.out_dir = dir.path.string();
  cfg.quick = true;
  std::ostringstream log;
  CHECK(cli::cmd_verify(cfg, log) == 0);
  CHECK(log.str().find("FAIL") == std::string::npos);
  const std::string report = slurp(dir.path / "verify.json");
  CHECK(report.find("\"all_pass\": true") != std::string::npos);

  cfg.break_series = true;
  std::ostringstream log2;
  CHECK(cli::cmd_verify(cfg, log2) == 1);
  CHECK(log2.str().find("FAIL series_vs_quadrature") != std::string::npos);
}

TEST_CASE("scalar subcommands write well-formed rows") {
  cli::RunConfig cfg;
  {
    std::ostringstream out;
    CHECK(cli::cmd_kl(cfg, out) == 0);
    CHECK(out.str().find("kl_forward") != std::string::npos);
    CHECK(out.str().find("0.1534264097") != std::string::npos);
  }
  {
    std::ostringstream out;
    CHECK(cli::cmd_mi(cfg, 1.0, true, out) == 0);
    CHECK(out.str().find("gaussian,1,1,0.69314718") != std::string::npos);
    CHECK(out.str().find("skew_normal(theta=1)") != std::string::npos);
  }
  {
    std::ostringstream out;
    cli::RunConfig fast = cfg;
    fast.samples = 100000;
    CHECK(cli::cmd_detector(fast, out) == 0);
    CHECK(out.str().find("closed_form") != std::string::npos);
    CHECK(out.str().find("monte_carlo") != std::string::npos);
  }
  {
    std::ostringstream out;
    CHECK(cli::cmd_power_limit(cfg, out) == 0);
    CHECK(out.str().find("total_variation") != std::string::npos);
    CHECK(out.str().find("kl_forward") != std::string::npos);
  }
}

TEST_CASE("run_cli maps usage problems to exit code 2") {
  const char* no_sub[] = {"covertkit"};
  CHECK(cli::run_cli(1, no_sub) == 2);
  const char* bad_grid[] = {"covertkit", "fig2", "--theta-min", "2",
                            "--theta-max", "1", "--no-plots"};
  CHECK(cli::run_cli(7, bad_grid) == 2);
  const char* unknown[] = {"covertkit", "frobnicate"};
  CHECK(cli::run_cli(2, unknown) == 2);
}

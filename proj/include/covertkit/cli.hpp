#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace covertkit::cli {

inline constexpr const char* kVersion = "covertkit 1.0.0";

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Common knobs shared by the subcommands; dB in, linear internally.
struct RunConfig {
  double sigma_b_db = 0.0;
  double sigma_w_db = 0.0;
  double px_db = 0.0;
  double epsilon = 0.1;
  double theta_min = -4.0;
  double theta_max = 4.0;
  double theta_step = 0.05;
  std::size_t samples = 1000000;
  std::uint64_t seed = 1;
  std::size_t quad_points = 8193;
  std::string out_dir = ".";
  std::string format = "csv";  // csv | json
  bool no_plots = false;
  bool bits = false;  // display-only conversion of nats to bits

  // fig5
  std::vector<double> sigma_w_db_list = {-3.0, 0.0, 3.0};
  double px_min_db = -20.0;
  double px_max_db = 10.0;
  int px_steps = 61;

  // fig6
  double eps_min = 0.01;
  double eps_max = 0.3;
  int eps_steps = 30;

  // verify
  bool quick = false;
  bool break_series = false;  // test hook: halves the series term budget

  // theta sweep extension
  bool optimize_theta = false;

  void validate() const;
  std::string describe(const std::string& command) const;

  double sigma_b2() const { return db_to_linear(sigma_b_db); }
  double sigma_w2() const { return db_to_linear(sigma_w_db); }
  double px() const { return db_to_linear(px_db); }
  std::vector<double> theta_grid() const;
};

int cmd_fig2(const RunConfig& cfg);
int cmd_fig3(const RunConfig& cfg);
int cmd_fig4(const RunConfig& cfg);
int cmd_fig5(const RunConfig& cfg);
int cmd_fig6(const RunConfig& cfg);

/// Runs the invariant suite; writes verify.json into out_dir and one
/// pass/fail line per invariant to `log`. Returns 0 iff all pass.
int cmd_verify(const RunConfig& cfg, std::ostream& log);

int cmd_kl(const RunConfig& cfg, std::ostream& out);
int cmd_mi(const RunConfig& cfg, double theta, bool have_theta, std::ostream& out);
int cmd_detector(const RunConfig& cfg, std::ostream& out);
int cmd_power_limit(const RunConfig& cfg, std::ostream& out);

/// Full argv entry point; exit codes: 0 success, 1 verification failure,
/// 2 usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace covertkit::cli

#include "covertkit/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "covertkit/covert.hpp"
#include "covertkit/csv.hpp"
#include "covertkit/detector.hpp"
#include "covertkit/infotheory.hpp"
#include "covertkit/svg.hpp"

namespace covertkit::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using covert::FrontierPoint;

namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;

// temp-then-rename so readers never see a partial file
void atomic_write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

double opt_or_nan(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

json frontier_json(const FrontierPoint& p) {
  json row{{"theta", p.theta}, {"Px", p.Px}};
  const auto put = [&](const char* key, const std::optional<double>& v) {
    if (v)
      row[key] = *v;
    else
      row[key] = nullptr;
  };
  put("kl_forward", p.kl_forward);
  put("kl_reverse", p.kl_reverse);
  put("tv", p.tv);
  put("mutual_info_nats", p.mutual_info);
  if (!p.error.empty()) row["error"] = p.error;
  return row;
}

void write_diagnostics(const RunConfig& cfg, const std::string& stem,
                       const std::vector<FrontierPoint>& pts) {
  std::string msg;
  for (const auto& p : pts)
    if (!p.error.empty()) msg += "theta=" + csv::g17(p.theta) + ": " + p.error + "\n";
  if (!msg.empty())
    atomic_write(fs::path(cfg.out_dir) / (stem + "_diagnostics.txt"), msg);
}

void emit_frontier(const RunConfig& cfg, const std::string& stem, const std::string& command,
                   const std::vector<FrontierPoint>& pts) {
  if (cfg.format == "json") {
    json doc{{"config", cfg.describe(command)}, {"rows", json::array()}};
    for (const auto& p : pts) doc["rows"].push_back(frontier_json(p));
    atomic_write(fs::path(cfg.out_dir) / (stem + ".json"), doc.dump(2) + "\n");
    return;
  }
  std::ostringstream out;
  out << "# " << cfg.describe(command) << '\n' << FrontierPoint::csv_header() << '\n';
  for (const auto& p : pts) p.write_csv_row(out);
  atomic_write(fs::path(cfg.out_dir) / (stem + ".csv"), out.str());
}

void emit_comparison(const RunConfig& cfg, const std::string& stem, const std::string& command,
                     const std::vector<covert::ComparisonRow>& rows) {
  if (cfg.format == "json") {
    json doc{{"config", cfg.describe(command)}, {"rows", json::array()}};
    for (const auto& r : rows) {
      json row = frontier_json(r.skew);
      row["matched_gaussian_Px"] =
          r.matched_gaussian_Px ? json(*r.matched_gaussian_Px) : json(nullptr);
      row["delta_mi"] = r.delta_mi ? json(*r.delta_mi) : json(nullptr);
      doc["rows"].push_back(std::move(row));
    }
    atomic_write(fs::path(cfg.out_dir) / (stem + ".json"), doc.dump(2) + "\n");
    return;
  }
  std::ostringstream out;
  out << "# " << cfg.describe(command) << '\n' << covert::ComparisonRow::csv_header() << '\n';
  for (const auto& r : rows) r.write_csv_row(out);
  atomic_write(fs::path(cfg.out_dir) / (stem + ".csv"), out.str());
}

void emit_svg(const RunConfig& cfg, const std::string& stem, const std::string& title,
              const std::string& xlab, const std::string& ylab,
              const std::vector<svg::Series>& series) {
  if (cfg.no_plots) return;
  std::ostringstream out;
  svg::write_line_chart(out, title, xlab, ylab, series);
  atomic_write(fs::path(cfg.out_dir) / (stem + ".svg"), out.str());
}

}  // namespace

void RunConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("epsilon must be in (0, 1)");
  if (!(theta_step > 0.0)) throw std::invalid_argument("theta-step must be > 0");
  if (theta_min > theta_max) throw std::invalid_argument("empty theta grid");
  if (format != "csv" && format != "json")
    throw std::invalid_argument("format must be csv or json");
  if (quad_points < 64) throw std::invalid_argument("quad-points must be >= 64");
  if (samples < 10000) throw std::invalid_argument("samples must be >= 1e4");
  if (eps_steps < 2 || px_steps < 2) throw std::invalid_argument("step counts must be >= 2");
}

std::vector<double> RunConfig::theta_grid() const {
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor((theta_max - theta_min) / theta_step + 1e-9));
  grid.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(theta_min + theta_step * static_cast<double>(i));
  return grid;
}

std::string RunConfig::describe(const std::string& command) const {
  std::ostringstream s;
  s << kVersion << " | " << command << " | sigma_b_db=" << csv::g17(sigma_b_db)
    << " sigma_w_db=" << csv::g17(sigma_w_db) << " px_db=" << csv::g17(px_db)
    << " epsilon=" << csv::g17(epsilon) << " theta=[" << csv::g17(theta_min) << ':'
    << csv::g17(theta_step) << ':' << csv::g17(theta_max) << "] samples=" << samples
    << " seed=" << seed << " quad_points=" << quad_points << " format=" << format;
  return s.str();
}

int cmd_fig2(const RunConfig& cfg) {
  cfg.validate();
  const channel::ChannelSpec chan{cfg.sigma_b2(), cfg.sigma_w2()};
  auto pts = covert::theta_sweep(cfg.px(), chan, cfg.theta_grid(), cfg.quad_points);
  emit_frontier(cfg, "fig2", "fig2", pts);
  write_diagnostics(cfg, "fig2", pts);

  const double g_klr = infotheory::kl_gaussian_reverse(cfg.px(), cfg.sigma_w2());
  const double g_mi = infotheory::gaussian_capacity(cfg.px(), cfg.sigma_b2());
  svg::Series klr{"D(p0||p1), skew-normal", {}, {}, "#1f77b4", false};
  svg::Series mi{"I(x;z), skew-normal", {}, {}, "#d62728", false};
  for (const auto& p : pts) {
    klr.x.push_back(p.theta);
    klr.y.push_back(opt_or_nan(p.kl_reverse));
    mi.x.push_back(p.theta);
    mi.y.push_back(opt_or_nan(p.mutual_info));
  }
  svg::Series klr_ref{"D(p0||p1), Gaussian", {cfg.theta_min, cfg.theta_max}, {g_klr, g_klr},
                      "#1f77b4", true};
  svg::Series mi_ref{"I(x;z), Gaussian", {cfg.theta_min, cfg.theta_max}, {g_mi, g_mi},
                     "#d62728", true};
  emit_svg(cfg, "fig2", "Skew-normal detectability and rate vs skew parameter", "theta",
           "nats", {klr, mi, klr_ref, mi_ref});
  return 0;
}

namespace {

int frontier_figure(const RunConfig& cfg, const std::string& stem,
                    covert::MatchMetric metric) {
  cfg.validate();
  const channel::ChannelSpec chan{cfg.sigma_b2(), cfg.sigma_w2()};
  auto pts = covert::theta_sweep(cfg.px(), chan, cfg.theta_grid(), cfg.quad_points);

  // Gaussian trace: vary Px slightly around the sweep power so every swept
  // divergence value is bracketed
  std::vector<double> px_grid;
  const double lo = 0.5 * cfg.px(), hi = 1.2 * cfg.px();
  for (int i = 0; i <= 4000; ++i)
    px_grid.push_back(lo + (hi - lo) * static_cast<double>(i) / 4000.0);
  auto rows = covert::frontier_compare(pts, px_grid, chan, metric);
  emit_comparison(cfg, stem, stem, rows);
  write_diagnostics(cfg, stem, pts);

  const bool by_kl = metric == covert::MatchMetric::KlReverse;
  svg::Series skew{"skew-normal", {}, {}, "#1f77b4", false};
  for (const auto& p : pts) {
    skew.x.push_back(by_kl ? opt_or_nan(p.kl_reverse) : opt_or_nan(p.tv));
    skew.y.push_back(opt_or_nan(p.mutual_info));
  }
  svg::Series gauss{"Gaussian", {}, {}, "#d62728", true};
  for (double px : px_grid) {
    gauss.x.push_back(by_kl ? infotheory::kl_gaussian_reverse(px, cfg.sigma_w2())
                            : 1.0 - detector::error_rates_closed(px, cfg.sigma_w2()).xi);
    gauss.y.push_back(infotheory::gaussian_capacity(px, cfg.sigma_b2()));
  }
  emit_svg(cfg, stem, "Mutual information vs detectability",
           by_kl ? "D(p0||p1)" : "total variation", "I(x;z) [nats]", {skew, gauss});
  return 0;
}

}  // namespace

int cmd_fig3(const RunConfig& cfg) { return frontier_figure(cfg, "fig3", covert::MatchMetric::KlReverse); }

int cmd_fig4(const RunConfig& cfg) {
  return frontier_figure(cfg, "fig4", covert::MatchMetric::TotalVariation);
}

int cmd_fig5(const RunConfig& cfg) {
  cfg.validate();
  std::ostringstream out;
  out << "# " << cfg.describe("fig5") << '\n'
      << "Px,sigma_w2,xi_star,bound_kl_reverse,bound_kl_forward\n";
  json rows = json::array();
  std::vector<svg::Series> series;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::size_t color_idx = 0;
  for (double sw_db : cfg.sigma_w_db_list) {
    const double s2w = db_to_linear(sw_db);
    svg::Series xi_s{"xi*, sigma_w2=" + csv::g17(s2w), {}, {}, palette[color_idx % 4], false};
    svg::Series br_s{"1-sqrt(D(p0||p1)/2)", {}, {}, palette[color_idx % 4], true};
    for (int i = 0; i < cfg.px_steps; ++i) {
      const double px_db = cfg.px_min_db + (cfg.px_max_db - cfg.px_min_db) *
                                               static_cast<double>(i) /
                                               static_cast<double>(cfg.px_steps - 1);
      const double Px = db_to_linear(px_db);
      const double xi = detector::error_rates_closed(Px, s2w).xi;
      const double b_rev = 1.0 - std::sqrt(infotheory::kl_gaussian_reverse(Px, s2w) / 2.0);
      const double b_fwd = 1.0 - std::sqrt(infotheory::kl_gaussian_forward(Px, s2w) / 2.0);
      out << csv::g17(Px) << ',' << csv::g17(s2w) << ',' << csv::g17(xi) << ','
          << csv::g17(b_rev) << ',' << csv::g17(b_fwd) << '\n';
      rows.push_back({{"Px", Px},
                      {"sigma_w2", s2w},
                      {"xi_star", xi},
                      {"bound_kl_reverse", b_rev},
                      {"bound_kl_forward", b_fwd}});
      xi_s.x.push_back(Px);
      xi_s.y.push_back(xi);
      br_s.x.push_back(Px);
      br_s.y.push_back(std::max(b_rev, 0.0));  // floored for display only
    }
    series.push_back(std::move(xi_s));
    series.push_back(std::move(br_s));
    ++color_idx;
  }
  if (cfg.format == "json") {
    json doc{{"config", cfg.describe("fig5")}, {"rows", rows}};
    atomic_write(fs::path(cfg.out_dir) / "fig5.json", doc.dump(2) + "\n");
  } else {
    atomic_write(fs::path(cfg.out_dir) / "fig5.csv", out.str());
  }
  emit_svg(cfg, "fig5", "Minimum detection error probability and its lower bounds", "Px",
           "probability", series);
  return 0;
}

int cmd_fig6(const RunConfig& cfg) {
  cfg.validate();
  const double s2w = cfg.sigma_w2(), s2b = cfg.sigma_b2();
  std::ostringstream out;
  out << "# " << cfg.describe("fig6") << '\n'
      << "epsilon,px_tv,px_kl_reverse,px_kl_forward,mi_tv,mi_kl_reverse,mi_kl_forward\n";
  json rows = json::array();
  svg::Series p_tv{"Px*, xi* >= 1-eps", {}, {}, "#1f77b4", false};
  svg::Series p_kr{"Px*, D(p0||p1) <= 2eps^2", {}, {}, "#d62728", false};
  svg::Series p_kf{"Px*, D(p1||p0) <= 2eps^2", {}, {}, "#2ca02c", false};
  svg::Series m_tv{"I(x;z), xi* >= 1-eps", {}, {}, "#1f77b4", true};
  svg::Series m_kr{"I(x;z), D(p0||p1) <= 2eps^2", {}, {}, "#d62728", true};
  svg::Series m_kf{"I(x;z), D(p1||p0) <= 2eps^2", {}, {}, "#2ca02c", true};
  for (int i = 0; i < cfg.eps_steps; ++i) {
    const double eps = cfg.eps_min + (cfg.eps_max - cfg.eps_min) * static_cast<double>(i) /
                                         static_cast<double>(cfg.eps_steps - 1);
    const double px_tv = covert::max_power_tv(eps, s2w);
    const double px_kr = covert::max_power_kl_reverse(eps, s2w);
    const double px_kf = covert::max_power_kl_forward(eps, s2w);
    const double mi_tv = infotheory::gaussian_capacity(px_tv, s2b);
    const double mi_kr = infotheory::gaussian_capacity(px_kr, s2b);
    const double mi_kf = infotheory::gaussian_capacity(px_kf, s2b);
    out << csv::g17(eps) << ',' << csv::g17(px_tv) << ',' << csv::g17(px_kr) << ','
        << csv::g17(px_kf) << ',' << csv::g17(mi_tv) << ',' << csv::g17(mi_kr) << ','
        << csv::g17(mi_kf) << '\n';
    rows.push_back({{"epsilon", eps},
                    {"px_tv", px_tv},
                    {"px_kl_reverse", px_kr},
                    {"px_kl_forward", px_kf},
                    {"mi_tv", mi_tv},
                    {"mi_kl_reverse", mi_kr},
                    {"mi_kl_forward", mi_kf}});
    p_tv.x.push_back(eps);
    p_tv.y.push_back(px_tv);
    p_kr.x.push_back(eps);
    p_kr.y.push_back(px_kr);
    p_kf.x.push_back(eps);
    p_kf.y.push_back(px_kf);
    m_tv.x.push_back(eps);
    m_tv.y.push_back(mi_tv);
    m_kr.x.push_back(eps);
    m_kr.y.push_back(mi_kr);
    m_kf.x.push_back(eps);
    m_kf.y.push_back(mi_kf);
  }
  if (cfg.format == "json") {
    json doc{{"config", cfg.describe("fig6")}, {"rows", rows}};
    atomic_write(fs::path(cfg.out_dir) / "fig6.json", doc.dump(2) + "\n");
  } else {
    atomic_write(fs::path(cfg.out_dir) / "fig6.csv", out.str());
  }
  emit_svg(cfg, "fig6", "Maximum covert power and mutual information vs epsilon", "epsilon",
           "Px* (solid), I(x;z) nats (dashed)", {p_tv, p_kr, p_kf, m_tv, m_kr, m_kf});
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

namespace {

struct InvariantResult {
  std::string name;
  bool pass;
  double measured;
  double tolerance;
  std::string detail;
};

double quad_kl_gaussian(double Px, double s2w, bool forward) {
  using distributions::gaussian_log_pdf;
  const double Py = Px + s2w;
  const double half = 10.0 * std::sqrt(Py);
  numerics::QuadratureSpec spec{-half, half, 512, 1e-11};
  return numerics::integrate(
      [&](double y) {
        const double lp1 = gaussian_log_pdf(y, 0.0, Py);
        const double lp0 = gaussian_log_pdf(y, 0.0, s2w);
        return forward ? std::exp(lp1) * (lp1 - lp0) : std::exp(lp0) * (lp0 - lp1);
      },
      spec);
}

InvariantResult check_closed_vs_quadrature_kl(bool quick) {
  const std::vector<double> grid = quick ? std::vector<double>{0.1, 1.0, 10.0}
                                         : std::vector<double>{0.1, 0.3, 1.0, 3.0, 10.0};
  double worst = 0.0;
  for (double Px : grid)
    for (double s2w : grid) {
      worst = std::max(worst, std::abs(quad_kl_gaussian(Px, s2w, true) -
                                       infotheory::kl_gaussian_forward(Px, s2w)));
      worst = std::max(worst, std::abs(quad_kl_gaussian(Px, s2w, false) -
                                       infotheory::kl_gaussian_reverse(Px, s2w)));
    }
  return {"closed_vs_quadrature_kl", worst <= 1e-7, worst, 1e-7, ""};
}

InvariantResult check_prop2_gap(bool quick) {
  const int n = quick ? 50 : 200;
  double prev = 0.0;
  double worst = 0.0;
  bool increasing = true;
  for (int i = 1; i <= n; ++i) {
    const double Px = 100.0 * static_cast<double>(i) / n;
    const double gap = infotheory::kl_gap(Px, 1.0);
    worst = std::min(worst, gap);
    if (gap <= prev) increasing = false;
    prev = gap;
  }
  return {"prop2_gap_nonnegative_increasing", worst >= -1e-12 && increasing, worst, -1e-12,
          increasing ? "" : "gap not strictly increasing"};
}

InvariantResult check_pinsker_chain(bool quick) {
  const std::vector<double> grid = quick ? std::vector<double>{0.1, 1.0, 10.0}
                                         : std::vector<double>{0.1, 0.5, 1.0, 5.0, 10.0};
  const std::size_t points = quick ? 16385 : 65537;
  double worst = -1.0;  // largest constraint violation
  for (double Px : grid)
    for (double s2w : grid) {
      const auto r = infotheory::divergence_report_gaussian(Px, s2w, points);
      const double xi = detector::error_rates_closed(Px, s2w).xi;
      worst = std::max(worst, r.total_variation - r.pinsker_forward);
      worst = std::max(worst, r.total_variation - r.pinsker_reverse);
      worst = std::max(worst, (1.0 - r.pinsker_reverse) - xi);
      worst = std::max(worst, (1.0 - r.pinsker_forward) - (1.0 - r.pinsker_reverse));
    }
  return {"pinsker_corollary2_chain", worst <= 1e-9, worst, 1e-9, ""};
}

InvariantResult check_tv_xi_identity(bool quick) {
  const std::vector<double> grid = quick ? std::vector<double>{0.1, 1.0, 10.0}
                                         : std::vector<double>{0.1, 0.5, 1.0, 5.0, 10.0};
  const std::size_t points = quick ? 16385 : 65537;
  double worst = 0.0;
  for (double Px : grid)
    for (double s2w : grid) {
      const auto r = infotheory::divergence_report_gaussian(Px, s2w, points);
      const double xi = detector::error_rates_closed(Px, s2w).xi;
      worst = std::max(worst, std::abs((1.0 - r.total_variation) - xi));
    }
  return {"tv_xi_identity", worst <= 1e-6, worst, 1e-6, ""};
}

InvariantResult check_series_vs_quadrature(bool quick, bool break_series) {
  numerics::SeriesControl ctrl;
  if (break_series) ctrl.max_terms /= 2;
  const std::vector<double> thetas = quick ? std::vector<double>{1.0, 1.2}
                                           : std::vector<double>{0.5, 1.0, 1.2};
  double worst = 0.0;
  std::string detail;
  for (double theta : thetas) {
    const auto spec = distributions::skew_normal_from_power(theta, 1.0);
    const distributions::SignalDistribution input{spec};
    for (double y = -8.0; y <= 8.0 + 1e-12; y += 0.5) {
      double series;
      try {
        series = channel::output_pdf_skew_series(spec, 1.0, y, ctrl);
      } catch (const numerics::NonConvergenceError& e) {
        return {"series_vs_quadrature", false, std::numeric_limits<double>::infinity(), 1e-6,
                std::string("series failed at theta=") + csv::g17(theta) +
                    " y=" + csv::g17(y) + ": " + e.what()};
      }
      numerics::QuadratureSpec inner{spec.location - 12.0 * spec.scale,
                                     spec.location + 12.0 * spec.scale, 64, 1e-11};
      const double quad = numerics::integrate(
          [&](double x) {
            return distributions::pdf_eval(input, x) *
                   distributions::gaussian_pdf(y - x, 0.0, 1.0);
          },
          inner);
      worst = std::max(worst, std::abs(series - quad));
    }
  }
  return {"series_vs_quadrature", worst <= 1e-6, worst, 1e-6, detail};
}

InvariantResult check_monte_carlo(const RunConfig& cfg) {
  const std::size_t n = cfg.quick ? 200000 : 1000000;
  const auto closed = detector::error_rates_closed(1.0, 1.0);
  const auto mc = detector::simulate_detector(1.0, 1.0, n, cfg.seed);
  const double dev = std::abs(mc.xi_hat - closed.xi);
  const double tol = 3.0 * mc.std_err;
  return {"monte_carlo_vs_closed_form", dev <= tol, dev, tol, ""};
}

InvariantResult check_theta_zero_reduction(const RunConfig& cfg) {
  const channel::ChannelSpec chan{1.0, 1.0};
  const auto pts = covert::theta_sweep(1.0, chan, {0.0}, cfg.quick ? 4097 : 8193);
  const auto& p = pts.front();
  if (!p.error.empty() || !p.kl_forward || !p.kl_reverse || !p.mutual_info)
    return {"theta_zero_reduction", false, std::numeric_limits<double>::infinity(), 1e-7,
            p.error};
  double worst = std::abs(*p.kl_forward - infotheory::kl_gaussian_forward(1.0, 1.0));
  worst = std::max(worst, std::abs(*p.kl_reverse - infotheory::kl_gaussian_reverse(1.0, 1.0)));
  worst = std::max(worst, std::abs(*p.mutual_info - infotheory::gaussian_capacity(1.0, 1.0)));
  return {"theta_zero_reduction", worst <= 1e-7, worst, 1e-7, ""};
}

InvariantResult check_skew_beats_gaussian(const RunConfig& cfg) {
  const channel::ChannelSpec chan{1.0, 1.0};
  const auto pts = covert::theta_sweep(1.0, chan, {1.0}, cfg.quick ? 4097 : 8193);
  const auto& p = pts.front();
  if (!p.kl_reverse)
    return {"skew_kl_reverse_below_gaussian", false,
            std::numeric_limits<double>::infinity(), 1e-4, p.error};
  const double margin = infotheory::kl_gaussian_reverse(1.0, 1.0) - *p.kl_reverse;
  return {"skew_kl_reverse_below_gaussian", margin >= 1e-4, margin, 1e-4, ""};
}

}  // namespace

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  std::vector<InvariantResult> results;
  results.push_back(check_closed_vs_quadrature_kl(cfg.quick));
  results.push_back(check_prop2_gap(cfg.quick));
  results.push_back(check_pinsker_chain(cfg.quick));
  results.push_back(check_tv_xi_identity(cfg.quick));
  results.push_back(check_series_vs_quadrature(cfg.quick, cfg.break_series));
  results.push_back(check_monte_carlo(cfg));
  results.push_back(check_theta_zero_reduction(cfg));
  results.push_back(check_skew_beats_gaussian(cfg));

  bool all_pass = true;
  json report{{"version", kVersion},
              {"quick", cfg.quick},
              {"break_series", cfg.break_series},
              {"seed", cfg.seed},
              {"results", json::array()}};
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    log << (r.pass ? "PASS " : "FAIL ") << r.name << " (measured " << csv::g17(r.measured)
        << ", tolerance " << csv::g17(r.tolerance) << ")"
        << (r.detail.empty() ? "" : " - " + r.detail) << '\n';
    json row{{"name", r.name},
             {"pass", r.pass},
             {"measured", r.measured},
             {"tolerance", r.tolerance}};
    if (!r.detail.empty()) row["detail"] = r.detail;
    report["results"].push_back(std::move(row));
  }
  report["all_pass"] = all_pass;
  atomic_write(fs::path(cfg.out_dir) / "verify.json", report.dump(2) + "\n");
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// scalar subcommands
// ---------------------------------------------------------------------------

namespace {

double display(double nats, bool bits) { return bits ? nats / kLn2 : nats; }

}  // namespace

int cmd_kl(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  auto r = infotheory::divergence_report_gaussian(cfg.px(), cfg.sigma_w2());
  out << infotheory::DivergenceReport::csv_header() << (cfg.bits ? "  [bits]" : "  [nats]")
      << '\n';
  if (cfg.bits) {
    r.kl_forward = display(r.kl_forward, true);
    r.kl_reverse = display(r.kl_reverse, true);
  }
  r.write_csv_row(out);
  return 0;
}

int cmd_mi(const RunConfig& cfg, double theta, bool have_theta, std::ostream& out) {
  cfg.validate();
  const double cap = infotheory::gaussian_capacity(cfg.px(), cfg.sigma_b2());
  out << "input,Px,sigma_b2,mutual_info" << (cfg.bits ? "_bits" : "_nats") << '\n';
  out << "gaussian," << csv::g17(cfg.px()) << ',' << csv::g17(cfg.sigma_b2()) << ','
      << csv::g17(display(cap, cfg.bits)) << '\n';
  if (have_theta) {
    const auto spec = distributions::skew_normal_from_power(theta, cfg.px());
    const double mi = infotheory::mutual_information(
        distributions::SignalDistribution{spec}, cfg.sigma_b2(), {10.0, cfg.quad_points});
    out << "skew_normal(theta=" << csv::g17(theta) << ")," << csv::g17(cfg.px()) << ','
        << csv::g17(cfg.sigma_b2()) << ',' << csv::g17(display(mi, cfg.bits)) << '\n';
  }
  return 0;
}

int cmd_detector(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const auto closed = detector::error_rates_closed(cfg.px(), cfg.sigma_w2());
  const auto mc = detector::simulate_detector(cfg.px(), cfg.sigma_w2(), cfg.samples, cfg.seed);
  out << "source," << detector::DetectorReport::csv_header() << ",n,seed,std_err\n";
  out << "closed_form,";
  out << csv::g17(closed.threshold) << ',' << csv::g17(closed.alpha) << ','
      << csv::g17(closed.beta) << ',' << csv::g17(closed.xi) << ",,,\n";
  out << "monte_carlo," << csv::g17(closed.threshold) << ',' << csv::g17(mc.alpha_hat) << ','
      << csv::g17(mc.beta_hat) << ',' << csv::g17(mc.xi_hat) << ',' << mc.n << ',' << mc.seed
      << ',' << csv::g17(mc.std_err) << '\n';
  return 0;
}

int cmd_power_limit(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const double s2w = cfg.sigma_w2(), s2b = cfg.sigma_b2();
  out << "constraint,epsilon,max_Px,capacity" << (cfg.bits ? "_bits" : "_nats") << '\n';
  const auto row = [&](const char* name, double px) {
    out << name << ',' << csv::g17(cfg.epsilon) << ',' << csv::g17(px) << ','
        << csv::g17(display(infotheory::gaussian_capacity(px, s2b), cfg.bits)) << '\n';
  };
  row("total_variation", covert::max_power_tv(cfg.epsilon, s2w));
  row("kl_reverse", covert::max_power_kl_reverse(cfg.epsilon, s2w));
  row("kl_forward", covert::max_power_kl_forward(cfg.epsilon, s2w));
  return 0;
}

// ---------------------------------------------------------------------------
// argv entry
// ---------------------------------------------------------------------------

namespace {

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--sigma-b-db", cfg.sigma_b_db, "Bob noise power [dB]");
  sub->add_option("--sigma-w-db", cfg.sigma_w_db, "Willie noise power [dB]");
  sub->add_option("--px-db", cfg.px_db, "transmit power [dB]");
  sub->add_option("--epsilon", cfg.epsilon, "covertness budget in (0,1)");
  sub->add_option("--theta-min", cfg.theta_min, "skew grid start");
  sub->add_option("--theta-max", cfg.theta_max, "skew grid end");
  sub->add_option("--theta-step", cfg.theta_step, "skew grid step");
  sub->add_option("--samples", cfg.samples, "Monte Carlo samples per hypothesis");
  sub->add_option("--seed", cfg.seed, "RNG seed");
  sub->add_option("--quad-points", cfg.quad_points, "tabulation grid points");
  sub->add_option("--out-dir", cfg.out_dir, "output directory");
  sub->add_option("--format", cfg.format, "csv or json");
  sub->add_flag("--no-plots", cfg.no_plots, "skip SVG emission");
  sub->add_flag("--bits", cfg.bits, "display information quantities in bits");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"covertkit: covert-communication rate/detectability toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  double theta_arg = 1.0;
  bool have_theta = false;

  auto* fig2 = app.add_subcommand("fig2", "skew sweep of D(p0||p1) and I(x;z)");
  auto* fig3 = app.add_subcommand("fig3", "I(x;z) vs D(p0||p1) frontier");
  auto* fig4 = app.add_subcommand("fig4", "I(x;z) vs total-variation frontier");
  auto* fig5 = app.add_subcommand("fig5", "xi* and its KL lower bounds vs Px");
  auto* fig6 = app.add_subcommand("fig6", "max covert power vs epsilon");
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  auto* kl = app.add_subcommand("kl", "Gaussian divergence report at one point");
  auto* mi = app.add_subcommand("mi", "mutual information at one point");
  auto* det = app.add_subcommand("detector", "closed-form vs Monte Carlo radiometer");
  auto* power = app.add_subcommand("power-limit", "max power under the three constraints");

  for (auto* sub : {fig2, fig3, fig4, fig5, fig6, verify, kl, mi, det, power})
    add_common(sub, cfg);
  fig5->add_option("--sigma-w-db-list", cfg.sigma_w_db_list, "noise powers [dB]");
  fig5->add_option("--px-min-db", cfg.px_min_db, "Px sweep start [dB]");
  fig5->add_option("--px-max-db", cfg.px_max_db, "Px sweep end [dB]");
  fig5->add_option("--px-steps", cfg.px_steps, "Px sweep points");
  fig6->add_option("--eps-min", cfg.eps_min, "epsilon grid start");
  fig6->add_option("--eps-max", cfg.eps_max, "epsilon grid end");
  fig6->add_option("--eps-steps", cfg.eps_steps, "epsilon grid points");
  verify->add_flag("--quick", cfg.quick, "reduced budgets, wider but fixed tolerances");
  verify->add_flag("--break-series", cfg.break_series,
                   "fault-injection hook: halve the series term budget");
  mi->add_option("--theta", theta_arg, "also report the skew-normal input at this shape")
      ->each([&](const std::string&) { have_theta = true; });
  fig2->add_flag("--optimize-theta", cfg.optimize_theta,
                 "report the kl_reverse-minimizing theta (extension beyond the sweeps)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (fig2->parsed()) {
      const int rc = cmd_fig2(cfg);
      if (rc == 0 && cfg.optimize_theta) {
        const channel::ChannelSpec chan{cfg.sigma_b2(), cfg.sigma_w2()};
        std::cout << "optimize-theta: kl_reverse minimized near theta = "
                  << csv::g17(covert::optimize_theta(cfg.px(), chan, cfg.theta_max,
                                                     cfg.quad_points))
                  << '\n';
      }
      return rc;
    }
    if (fig3->parsed()) return cmd_fig3(cfg);
    if (fig4->parsed()) return cmd_fig4(cfg);
    if (fig5->parsed()) return cmd_fig5(cfg);
    if (fig6->parsed()) return cmd_fig6(cfg);
    if (verify->parsed()) return cmd_verify(cfg, std::cout);
    if (kl->parsed()) return cmd_kl(cfg, std::cout);
    if (mi->parsed()) return cmd_mi(cfg, theta_arg, have_theta, std::cout);
    if (det->parsed()) return cmd_detector(cfg, std::cout);
    if (power->parsed()) return cmd_power_limit(cfg, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace covertkit::cli

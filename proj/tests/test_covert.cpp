#include <doctest.h>

#include <cmath>
#include <sstream>

#include "covertkit/covert.hpp"
#include "covertkit/detector.hpp"
#include "covertkit/infotheory.hpp"
#include "oracles.hpp"

using namespace covertkit;
using covert::ConstraintKind;
using covert::CovertnessConstraint;

TEST_CASE("max_power_kl_forward: limit, value, scaling") {
  CHECK(covert::max_power_kl_forward(1e-6, 1.0) < 1e-2);

  const double oracle = oracles::dense_crossing(
      [](double Px) { return infotheory::kl_gaussian_forward(Px, 1.0); }, 0.0, 10.0, 0.02);
  const double solved = covert::max_power_kl_forward(0.1, 1.0);
  CHECK(solved == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(solved == doctest::Approx(0.310114660424).epsilon(1e-6));

  CHECK(covert::max_power_kl_forward(0.1, 4.0) ==
        doctest::Approx(4.0 * covert::max_power_kl_forward(0.1, 1.0)).epsilon(1e-9));
}

TEST_CASE("max_power_kl_reverse: looser than forward, scaling") {
  CHECK(covert::max_power_kl_reverse(1e-6, 1.0) < 1e-2);
  const double rev = covert::max_power_kl_reverse(0.1, 1.0);
  CHECK(rev == doctest::Approx(0.345584745910).epsilon(1e-6));
  CHECK(rev > covert::max_power_kl_forward(0.1, 1.0));
  CHECK(covert::max_power_kl_reverse(0.1, 4.0) ==
        doctest::Approx(4.0 * rev).epsilon(1e-9));
}

TEST_CASE("max_power_tv: looser than both KL constraints, root consistency") {
  CHECK(covert::max_power_tv(1e-6, 1.0) < 1e-2);
  const double tv_power = covert::max_power_tv(0.1, 1.0);
  CHECK(tv_power == doctest::Approx(0.513996150237).epsilon(1e-6));
  CHECK(tv_power > covert::max_power_kl_reverse(0.1, 1.0));
  CHECK(detector::error_rates_closed(tv_power, 1.0).xi ==
        doctest::Approx(0.9).epsilon(1e-8));
}

TEST_CASE("table-one ordering and induced capacity ordering at three budgets") {
  for (double eps : {0.05, 0.1, 0.2}) {
    const double p_tv = covert::max_power_tv(eps, 1.0);
    const double p_kr = covert::max_power_kl_reverse(eps, 1.0);
    const double p_kf = covert::max_power_kl_forward(eps, 1.0);
    CHECK(p_tv > p_kr);
    CHECK(p_kr > p_kf);
    CHECK(infotheory::gaussian_capacity(p_tv, 1.0) > infotheory::gaussian_capacity(p_kr, 1.0));
    CHECK(infotheory::gaussian_capacity(p_kr, 1.0) > infotheory::gaussian_capacity(p_kf, 1.0));
  }
}

TEST_CASE("all three solvers increase strictly in epsilon") {
  double prev_tv = 0.0, prev_kr = 0.0, prev_kf = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double eps = 0.3 * static_cast<double>(i) / 20.0;
    const double p_tv = covert::max_power_tv(eps, 1.0);
    const double p_kr = covert::max_power_kl_reverse(eps, 1.0);
    const double p_kf = covert::max_power_kl_forward(eps, 1.0);
    CHECK(p_tv > prev_tv);
    CHECK(p_kr > prev_kr);
    CHECK(p_kf > prev_kf);
    prev_tv = p_tv;
    prev_kr = p_kr;
    prev_kf = p_kf;
  }
  CHECK_THROWS_AS(covert::max_power_kl_forward(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(covert::max_power_tv(1.0, 1.0), std::invalid_argument);
  CHECK(covert::max_power(CovertnessConstraint{ConstraintKind::KlForward, 0.1}, 1.0) ==
        covert::max_power_kl_forward(0.1, 1.0));
}

TEST_CASE("theta_sweep: zero-theta row matches the Gaussian benchmark") {
  const channel::ChannelSpec chan{1.0, 1.0};
  const auto pts = covert::theta_sweep(1.0, chan, {0.0}, 8193);
  REQUIRE(pts.size() == 1);
  const auto& p = pts.front();
  REQUIRE(p.error.empty());
  CHECK(std::abs(*p.kl_forward - 0.15342640972002736) <= 1e-7);
  CHECK(std::abs(*p.kl_reverse - 0.09657359027997264) <= 1e-7);
  CHECK(std::abs(*p.mutual_info - 0.69314718055994531) <= 1e-7);
}

TEST_CASE("theta_sweep: skew rows dip below the Gaussian kl_reverse and cap at log 2") {
  const channel::ChannelSpec chan{1.0, 1.0};
  const std::vector<double> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
  const auto pts = covert::theta_sweep(1.0, chan, grid, 8193);
  const double gauss_rev = 0.09657359027997264;
  bool dips = false;
  for (const auto& p : pts) {
    REQUIRE(p.error.empty());
    CHECK(*p.mutual_info <= std::log(2.0) + 1e-9);
    if (*p.kl_reverse < gauss_rev - 1e-4) dips = true;
  }
  CHECK(dips);
  // evenness in theta
  CHECK(std::abs(*pts[0].kl_reverse - *pts[4].kl_reverse) <= 1e-9);
  CHECK(std::abs(*pts[1].kl_forward - *pts[3].kl_forward) <= 1e-9);
  CHECK(std::abs(*pts[1].tv - *pts[3].tv) <= 1e-9);
}

TEST_CASE("theta_sweep records per-point failures and keeps going") {
  const channel::ChannelSpec chan{1.0, 1.0};
  const auto pts = covert::theta_sweep(1.0, chan, {0.0, 1.0}, 63);  // grid too small
  REQUIRE(pts.size() == 2);
  CHECK(!pts[0].error.empty());
  CHECK(!pts[1].error.empty());
  CHECK(!pts[0].kl_forward.has_value());
}

TEST_CASE("frontier_compare certifies the counterexample at matched divergence") {
  const channel::ChannelSpec chan{1.0, 1.0};
  const auto pts = covert::theta_sweep(1.0, chan, {0.5, 0.75, 1.0, 1.25}, 8193);
  std::vector<double> px_grid;
  for (int i = 0; i <= 2000; ++i) px_grid.push_back(0.5 + 0.7 * i / 2000.0);

  bool beats_kl = false;
  for (const auto& row : covert::frontier_compare(pts, px_grid, chan,
                                                  covert::MatchMetric::KlReverse)) {
    REQUIRE(row.matched_gaussian_Px.has_value());
    // never above the same-power capacity
    CHECK(*row.skew.mutual_info <= infotheory::gaussian_capacity(1.0, 1.0) + 1e-7);
    if (*row.delta_mi >= 1e-5) beats_kl = true;
  }
  CHECK(beats_kl);

  bool beats_tv = false;
  for (const auto& row : covert::frontier_compare(pts, px_grid, chan,
                                                  covert::MatchMetric::TotalVariation)) {
    REQUIRE(row.matched_gaussian_Px.has_value());
    if (*row.delta_mi >= 1e-5) beats_tv = true;
  }
  CHECK(beats_tv);
}

TEST_CASE("frontier_compare tolerates degenerate grids") {
  const channel::ChannelSpec chan{1.0, 1.0};
  const auto pts = covert::theta_sweep(1.0, chan, {1.0}, 4097);
  const auto rows = covert::frontier_compare(pts, {1.0}, chan);
  REQUIRE(rows.size() == 1);
  CHECK(!rows[0].matched_gaussian_Px.has_value());  // single-point grid cannot bracket
  CHECK_THROWS_AS(covert::frontier_compare({}, {1.0}, chan), std::invalid_argument);
}

TEST_CASE("csv headers for sweep and comparison rows") {
  CHECK(std::string(covert::FrontierPoint::csv_header()) ==
        "theta,Px,kl_forward,kl_reverse,tv,mutual_info_nats");
  CHECK(std::string(covert::ComparisonRow::csv_header()) ==
        "theta,Px,kl_forward,kl_reverse,tv,mutual_info_nats,matched_gaussian_Px,delta_mi");
  covert::FrontierPoint p;
  p.theta = 0.5;
  p.Px = 1.0;
  p.kl_forward = 0.125;
  std::ostringstream out;
  p.write_csv_row(out);
  CHECK(out.str() == "0.5,1,0.125,,,\n");
}

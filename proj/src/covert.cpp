#include "covertkit/covert.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "covertkit/csv.hpp"
#include "covertkit/detector.hpp"
#include "covertkit/infotheory.hpp"

namespace covertkit::covert {

namespace {

constexpr double kBracketSds = 1e4;  // search cap, in units of sigma_w2

double solve_monotone(const std::function<double(double)>& f, double sigma_w2,
                      const char* who) {
  const double hi = kBracketSds * sigma_w2;
  if (f(hi) < 0.0)
    throw std::runtime_error(std::string(who) + ": root above the 1e4 sigma_w2 search cap");
  numerics::RootBracket bracket{0.0, hi, 1e-13 * sigma_w2};
  return numerics::find_root(f, bracket);
}

}  // namespace

void CovertnessConstraint::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("CovertnessConstraint: epsilon must be in (0, 1)");
}

const char* FrontierPoint::csv_header() {
  return "theta,Px,kl_forward,kl_reverse,tv,mutual_info_nats";
}

void FrontierPoint::write_csv_row(std::ostream& out) const {
  out << csv::g17(theta) << ',' << csv::g17(Px) << ',' << csv::g17(kl_forward) << ','
      << csv::g17(kl_reverse) << ',' << csv::g17(tv) << ',' << csv::g17(mutual_info) << '\n';
}

double max_power_kl_forward(double epsilon, double sigma_w2) {
  CovertnessConstraint{ConstraintKind::KlForward, epsilon}.validate();
  const double target = 2.0 * epsilon * epsilon;
  return solve_monotone(
      [&](double Px) { return infotheory::kl_gaussian_forward(Px, sigma_w2) - target; },
      sigma_w2, "max_power_kl_forward");
}

double max_power_kl_reverse(double epsilon, double sigma_w2) {
  CovertnessConstraint{ConstraintKind::KlReverse, epsilon}.validate();
  const double target = 2.0 * epsilon * epsilon;
  return solve_monotone(
      [&](double Px) { return infotheory::kl_gaussian_reverse(Px, sigma_w2) - target; },
      sigma_w2, "max_power_kl_reverse");
}

double max_power_tv(double epsilon, double sigma_w2) {
  CovertnessConstraint{ConstraintKind::TotalVariation, epsilon}.validate();
  const double target = 1.0 - epsilon;
  // xi* is strictly decreasing in Px, so target - xi* is increasing
  return solve_monotone(
      [&](double Px) {
        if (Px <= 0.0) return target - 1.0;  // xi* -> 1 as Px -> 0
        return target - detector::error_rates_closed(Px, sigma_w2).xi;
      },
      sigma_w2, "max_power_tv");
}

double max_power(const CovertnessConstraint& constraint, double sigma_w2) {
  constraint.validate();
  switch (constraint.kind) {
    case ConstraintKind::TotalVariation:
      return max_power_tv(constraint.epsilon, sigma_w2);
    case ConstraintKind::KlForward:
      return max_power_kl_forward(constraint.epsilon, sigma_w2);
    case ConstraintKind::KlReverse:
      return max_power_kl_reverse(constraint.epsilon, sigma_w2);
  }
  throw std::logic_error("max_power: unknown constraint kind");
}

namespace {

FrontierPoint sweep_point(double theta, double Px, const channel::ChannelSpec& chan,
                          std::size_t grid_points) {
  FrontierPoint pt;
  pt.theta = theta;
  pt.Px = Px;
  try {
    using distributions::GaussianSpec;
    using distributions::SignalDistribution;
    const SignalDistribution input =
        theta == 0.0 ? SignalDistribution{GaussianSpec{0.0, Px}}
                     : SignalDistribution{distributions::skew_normal_from_power(theta, Px)};
    channel::GridParams grid{10.0, grid_points};
    const auto pair = channel::hypothesis_pair(input, chan, grid);
    pt.kl_forward = infotheory::kl_divergence(pair.p1, pair.p0);
    pt.kl_reverse = infotheory::kl_divergence(pair.p0, pair.p1);
    pt.tv = infotheory::total_variation(pair.p0, pair.p1);
    pt.mutual_info = infotheory::mutual_information(input, chan.sigma_b2, grid);
  } catch (const std::exception& e) {
    pt.error = e.what();
  }
  return pt;
}

}  // namespace

std::vector<FrontierPoint> theta_sweep(double Px, const channel::ChannelSpec& channel,
                                       const std::vector<double>& theta_grid,
                                       std::size_t grid_points) {
  if (!(Px > 0.0)) throw std::domain_error("theta_sweep: Px must be > 0");
  channel.validate();
  std::vector<FrontierPoint> points(theta_grid.size());
  // hypothesis_pair parallelizes internally; points stay ordered by index
  for (std::size_t i = 0; i < theta_grid.size(); ++i)
    points[i] = sweep_point(theta_grid[i], Px, channel, grid_points);
  return points;
}

const char* ComparisonRow::csv_header() {
  return "theta,Px,kl_forward,kl_reverse,tv,mutual_info_nats,matched_gaussian_Px,delta_mi";
}

void ComparisonRow::write_csv_row(std::ostream& out) const {
  out << csv::g17(skew.theta) << ',' << csv::g17(skew.Px) << ',' << csv::g17(skew.kl_forward)
      << ',' << csv::g17(skew.kl_reverse) << ',' << csv::g17(skew.tv) << ','
      << csv::g17(skew.mutual_info) << ',' << csv::g17(matched_gaussian_Px) << ','
      << csv::g17(delta_mi) << '\n';
}

std::vector<ComparisonRow> frontier_compare(const std::vector<FrontierPoint>& theta_points,
                                            const std::vector<double>& gaussian_px_grid,
                                            const channel::ChannelSpec& channel,
                                            MatchMetric metric) {
  if (theta_points.empty() || gaussian_px_grid.empty())
    throw std::invalid_argument("frontier_compare: inputs must be non-empty");
  channel.validate();

  // Gaussian trace of the chosen measure over the Px grid (monotone in Px)
  std::vector<double> px = gaussian_px_grid;
  std::sort(px.begin(), px.end());
  std::vector<double> measure(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    measure[i] = metric == MatchMetric::KlReverse
                     ? infotheory::kl_gaussian_reverse(px[i], channel.sigma_w2)
                     : 1.0 - detector::error_rates_closed(px[i], channel.sigma_w2).xi;
  }

  std::vector<ComparisonRow> rows;
  rows.reserve(theta_points.size());
  for (const auto& pt : theta_points) {
    ComparisonRow row;
    row.skew = pt;
    const std::optional<double> target =
        metric == MatchMetric::KlReverse ? pt.kl_reverse : pt.tv;
    if (target && pt.mutual_info) {
      const auto it = std::lower_bound(measure.begin(), measure.end(), *target);
      if (it != measure.begin() && it != measure.end()) {
        const std::size_t j = static_cast<std::size_t>(std::distance(measure.begin(), it));
        const double frac = (*target - measure[j - 1]) / (measure[j] - measure[j - 1]);
        const double px_match = px[j - 1] + frac * (px[j] - px[j - 1]);
        const double check = metric == MatchMetric::KlReverse
                                 ? infotheory::kl_gaussian_reverse(px_match, channel.sigma_w2)
                                 : 1.0 - detector::error_rates_closed(px_match, channel.sigma_w2).xi;
        if (std::abs(check - *target) <= 1e-4 * std::max(*target, 1e-12)) {
          row.matched_gaussian_Px = px_match;
          row.delta_mi =
              *pt.mutual_info - infotheory::gaussian_capacity(px_match, channel.sigma_b2);
        }
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double optimize_theta(double Px, const channel::ChannelSpec& channel, double theta_max,
                      std::size_t grid_points) {
  if (!(theta_max > 0.0)) throw std::domain_error("optimize_theta: theta_max must be > 0");
  const auto objective = [&](double theta) {
    const auto pt = sweep_point(theta, Px, channel, grid_points);
    if (!pt.kl_reverse) throw std::runtime_error("optimize_theta: " + pt.error);
    return *pt.kl_reverse;
  };
  const double gr = 0.61803398874989484820458683436564;
  double a = 0.0, b = theta_max;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  while (b - a > 1e-4) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace covertkit::covert

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "covertkit/channel.hpp"

namespace covertkit::covert {

enum class ConstraintKind { TotalVariation, KlForward, KlReverse };

/// Covertness budget: the KL kinds bound the divergence by 2 epsilon^2,
/// the TV kind bounds the warden's error probability by xi* >= 1 - epsilon.
struct CovertnessConstraint {
  ConstraintKind kind;
  double epsilon;

  void validate() const;
};

/// One sweep sample. Failed points keep their error text and leave the
/// measure fields empty.
struct FrontierPoint {
  double theta = 0.0;
  double Px = 0.0;
  std::optional<double> kl_forward;
  std::optional<double> kl_reverse;
  std::optional<double> tv;
  std::optional<double> mutual_info;  // nats
  std::string error;

  static const char* csv_header();
  void write_csv_row(std::ostream& out) const;
};

/// Largest Px with D(p1||p0) = 2 eps^2 under Gaussian signalling
/// (bisection; the closed form is strictly increasing in Px).
double max_power_kl_forward(double epsilon, double sigma_w2);

/// Largest Px with D(p0||p1) = 2 eps^2 under Gaussian signalling.
double max_power_kl_reverse(double epsilon, double sigma_w2);

/// Largest Px with xi*(Px) = 1 - eps (radiometer closed forms; xi* is
/// strictly decreasing in Px).
double max_power_tv(double epsilon, double sigma_w2);

double max_power(const CovertnessConstraint& constraint, double sigma_w2);

/// Sweeps the zero-mean power-Px skew-normal family over theta_grid,
/// measuring both KL directions and TV against sigma_w2 noise and mutual
/// information against sigma_b2 noise. Per-point failures are recorded in
/// the row and the sweep continues.
std::vector<FrontierPoint> theta_sweep(double Px, const channel::ChannelSpec& channel,
                                       const std::vector<double>& theta_grid,
                                       std::size_t grid_points = 8193);

enum class MatchMetric { KlReverse, TotalVariation };

struct ComparisonRow {
  FrontierPoint skew;
  std::optional<double> matched_gaussian_Px;
  std::optional<double> delta_mi;  // skew minus matched Gaussian, nats

  static const char* csv_header();
  void write_csv_row(std::ostream& out) const;
};

/// For each skew-normal sweep point, locates the Gaussian Px whose
/// divergence (or TV) matches by linear interpolation on gaussian_px_grid
/// and reports the mutual-information difference. Unmatched rows are
/// flagged by an empty matched_gaussian_Px.
std::vector<ComparisonRow> frontier_compare(const std::vector<FrontierPoint>& theta_points,
                                            const std::vector<double>& gaussian_px_grid,
                                            const channel::ChannelSpec& channel,
                                            MatchMetric metric = MatchMetric::KlReverse);

/// Golden-section minimizer of kl_reverse over theta >= 0 at fixed Px; an
/// extension beyond the swept grids (the sweeps themselves never optimize
/// theta).
double optimize_theta(double Px, const channel::ChannelSpec& channel, double theta_max = 4.0,
                      std::size_t grid_points = 8193);

}  // namespace covertkit::covert

#pragma once

#include <cstdint>
#include <iosfwd>

#include "covertkit/channel.hpp"

namespace covertkit::detector {

/// Closed-form radiometer operating point under Gaussian signalling.
struct DetectorReport {
  double threshold;  // phi*, the y^2 decision threshold
  double alpha;      // false positive rate
  double beta;       // miss rate
  double xi;         // alpha + beta

  static const char* csv_header();
  void write_csv_row(std::ostream& out) const;
};

struct MonteCarloReport {
  double alpha_hat;
  double beta_hat;
  double xi_hat;
  std::size_t n;
  std::uint64_t seed;
  double std_err;

  static const char* csv_header();
  void write_csv_row(std::ostream& out) const;
};

/// Optimal y^2 threshold phi* = ((Px+s2w) s2w / Px) ln((Px+s2w)/s2w).
/// Undefined at Px = 0 (identical hypotheses): domain error.
double optimal_threshold(double Px, double sigma_w2);

/// Closed-form (alpha*, beta*, xi*) at the optimal threshold.
DetectorReport error_rates_closed(double Px, double sigma_w2);

/// Minimum detection error probability 1 - V_T(p0, p1) for arbitrary
/// signalling, by quadrature on the pair's grid.
double min_error_prob_tv(const channel::HypothesisPair& pair);

/// Equal-prior Monte Carlo of the radiometer: n null draws y = n_w and n
/// alternative draws y = x + n_w with Gaussian x, thresholded at phi*.
/// Partitioned over a fixed count of derived generator streams and merged
/// by exact counting, so the result depends only on (inputs, seed).
MonteCarloReport simulate_detector(double Px, double sigma_w2, std::size_t n,
                                   std::uint64_t seed);

}  // namespace covertkit::detector

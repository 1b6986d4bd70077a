#pragma once

#include <cstddef>
#include <iosfwd>

#include "covertkit/channel.hpp"
#include "covertkit/distributions.hpp"

namespace covertkit::infotheory {

using distributions::SignalDistribution;
using distributions::TabulatedPdf;

/// Divergence bundle for one Gaussian-signalling operating point.
struct DivergenceReport {
  double Px;
  double sigma_w2;
  double kl_forward;   // D(p1 || p0)
  double kl_reverse;   // D(p0 || p1)
  double total_variation;
  double pinsker_forward;  // sqrt(D(p1||p0)/2)
  double pinsker_reverse;  // sqrt(D(p0||p1)/2)

  static const char* csv_header();
  void write_csv_row(std::ostream& out) const;
};

/// Trapezoid integral of p log(p/q) on the shared grid, natural log,
/// 0 log(0/q) = 0 and a 1e-300 floor inside the ratio. Note the floor caps
/// the log-ratio once q underflows, which matters only past ~37 sigma scale
/// ratios; closed-form routes exist for those regimes.
double kl_divergence(const TabulatedPdf& p, const TabulatedPdf& q);

/// D(N(0,Py) || N(0,sigma_w2)) with Py = Px + sigma_w2, in closed form.
double kl_gaussian_forward(double Px, double sigma_w2);

/// D(N(0,sigma_w2) || N(0,Py)) in closed form.
double kl_gaussian_reverse(double Px, double sigma_w2);

/// forward - reverse; nonnegative and strictly increasing in Px.
double kl_gap(double Px, double sigma_w2);

/// Half the L1 distance; the linear interpolant is integrated exactly
/// through its sign changes.
double total_variation(const TabulatedPdf& p, const TabulatedPdf& q);

/// Trapezoid integral of p log(1/p), nats, 0 log(1/0) = 0.
double differential_entropy(const TabulatedPdf& p);

/// log(1 + Px / sigma_b2), nats.
double gaussian_capacity(double Px, double sigma_b2);

/// Mutual information between the input and Bob's observation, in the
/// log(1 + Px/sigma_b2) normalization: Gaussian inputs short-circuit to
/// gaussian_capacity, other inputs use 2 (h(p_z) - h(noise)) with h(p_z)
/// by quadrature, which coincides with the closed form in the Gaussian
/// limit.
double mutual_information(const SignalDistribution& input, double sigma_b2,
                          const channel::GridParams& grid = {});

/// N i.i.d. channel uses scale the per-symbol quantity linearly.
double blocklength_scale(double per_symbol, std::size_t N);

/// Full report for one Gaussian operating point; total variation computed
/// on a grid of `points` samples.
DivergenceReport divergence_report_gaussian(double Px, double sigma_w2,
                                            std::size_t points = 65537);

}  // namespace covertkit::infotheory

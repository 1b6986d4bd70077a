#pragma once

#include <iosfwd>
#include <string>

#include "covertkit/distributions.hpp"
#include "covertkit/numerics.hpp"

namespace covertkit::channel {

using distributions::SignalDistribution;
using distributions::SkewNormalSpec;
using distributions::TabulatedPdf;

struct ChannelSpec {
  double sigma_b2;  // Bob noise power, linear
  double sigma_w2;  // Willie noise power, linear

  void validate() const;
};

/// Null / alternative output densities on one shared grid.
struct HypothesisPair {
  TabulatedPdf p0;
  TabulatedPdf p1;
  double Py;  // second moment of p1 (= Px + sigma_w2)

  HypothesisPair(TabulatedPdf null_pdf, TabulatedPdf alt_pdf, double sigma_w2);

  /// CSV with header `y,p0,p1`.
  void write_csv(std::ostream& out) const;
};

/// Output grid shared by both hypotheses: +/- half_width_sds standard
/// deviations of the wider law, `points` samples.
struct GridParams {
  double half_width_sds = 10.0;
  std::size_t points = 8193;
};

/// Warden-side output density by direct convolution quadrature:
/// p1(y) = int g_n(y - x) p(x) dx at each of grid.panels + 1 output points
/// on [grid.lower, grid.upper]; grid.rel_tol drives the inner Simpson
/// refinement. The result is renormalized; raw mass must already be within
/// 1e-6 of 1 or TruncationError is thrown.
TabulatedPdf output_pdf_quadrature(const SignalDistribution& input, double noise_var,
                                   const numerics::QuadratureSpec& grid);

/// Closed-form series for the skew-normal channel output density at one
/// point: leading Gaussian term plus the k-indexed 1F1 correction sum,
/// truncated per ctrl. Negative roundoff below 1e-12 in magnitude is
/// clamped to zero. Throws numerics::NonConvergenceError when the term
/// floor is not reached (callers fall back to output_pdf_quadrature).
double output_pdf_skew_series(const SkewNormalSpec& spec, double noise_var, double y,
                              const numerics::SeriesControl& ctrl = {});

/// Growth ratio of the series terms, theta^2 sigma^2 / (sigma^2 + omega^2);
/// the series converges only when this is below 1.
double series_convergence_ratio(const SkewNormalSpec& spec, double noise_var);

/// Skew-normal plus independent zero-mean Gaussian noise is again
/// skew-normal: scale sqrt(omega^2 + sigma^2) and a shrunk shape. Used as a
/// third cross-check after being validated against quadrature, never as
/// ground truth of its own.
SkewNormalSpec skew_noise_closure(const SkewNormalSpec& spec, double noise_var);

struct OutputDiag {
  std::size_t series_points = 0;
  std::size_t fallback_points = 0;
  std::string note;
};

/// Channel output density tabulated on the GridParams window: Gaussian
/// closure for Gaussian inputs, the series (per-point quadrature fallback)
/// for skew-normal inputs, quadrature otherwise.
TabulatedPdf output_pdf(const SignalDistribution& input, double noise_var,
                        const GridParams& grid = {}, OutputDiag* diag = nullptr);

/// Builds (p0, p1) for the hypothesis test: p0 the pure-noise Gaussian, p1
/// the channel output, both on one shared grid.
HypothesisPair hypothesis_pair(const SignalDistribution& input, const ChannelSpec& channel,
                               const GridParams& grid = {}, OutputDiag* diag = nullptr);

}  // namespace covertkit::channel

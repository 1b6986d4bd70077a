#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "covertkit/numerics.hpp"

namespace covertkit::distributions {

/// Raised by tabulate() when the requested window leaves more than 1e-6 of
/// probability mass outside it.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GaussianSpec {
  double mean = 0.0;
  double variance = 1.0;

  void validate() const;
};

/// Azzalini skew-normal (location mu, scale omega > 0, shape theta);
/// delta = theta / sqrt(1 + theta^2) is kept alongside.
struct SkewNormalSpec {
  double location;
  double scale;
  double shape;
  double delta;

  static SkewNormalSpec make(double location, double scale, double shape);
  void validate() const;
};

/// Density sampled on a uniform grid; the universal numeric carrier for
/// hypothesis densities. Nonnegative, at least 64 points, unit trapezoid
/// mass within 1e-6 (all checked on construction).
class TabulatedPdf {
 public:
  TabulatedPdf(double x0, double dx, std::vector<double> densities);

  double x0() const { return x0_; }
  double dx() const { return dx_; }
  std::size_t size() const { return densities_.size(); }
  const std::vector<double>& densities() const { return densities_; }
  double x_at(std::size_t i) const { return x0_ + dx_ * static_cast<double>(i); }
  double x_max() const { return x_at(size() - 1); }

  /// Linear interpolation inside the grid, 0 outside.
  double value_at(double x) const;

  /// Trapezoid mass.
  double mass() const;

  /// Trapezoid raw moments.
  double mean() const;
  double second_moment() const;

  bool same_grid(const TabulatedPdf& other) const;

  /// CSV with header `x,density`, 17-significant-digit floats.
  void write_csv(std::ostream& out) const;

 private:
  double x0_;
  double dx_;
  std::vector<double> densities_;
};

using SignalDistribution = std::variant<GaussianSpec, SkewNormalSpec, TabulatedPdf>;

/// Density of `dist` at x. Total function; tabulated variants return 0
/// outside their support.
double pdf_eval(const SignalDistribution& dist, double x);

/// Unique (omega > 0, mu) giving the shape-theta skew-normal zero mean and
/// second moment Px. Uses the signed-delta location so the mean vanishes
/// for either sign of theta.
std::pair<double, double> skew_params_from_power(double theta, double Px);

/// Zero-mean, power-Px skew-normal with shape theta.
SkewNormalSpec skew_normal_from_power(double theta, double Px);

struct Moments {
  double mean;
  double second_moment;
};

/// Closed forms for Gaussian and skew-normal; quadrature over the grid
/// interpolant for tabulated densities.
Moments moments(const SignalDistribution& dist, const numerics::QuadratureSpec& spec);

/// Deterministic sampling: Gaussian via Box-Muller, skew-normal via the
/// delta|u0| + sqrt(1-delta^2) u1 representation, tabulated via inverse cdf
/// on the grid.
std::vector<double> sample(const SignalDistribution& dist, std::size_t n, std::uint64_t seed);

/// Grid evaluation of pdf_eval on [lower, upper], renormalized to unit
/// trapezoid mass. Throws TruncationError when the raw mass deviates from 1
/// by more than 1e-6.
TabulatedPdf tabulate(const SignalDistribution& dist, double lower, double upper,
                      std::size_t points);

/// Gaussian density helpers shared across modules.
double gaussian_pdf(double x, double mean, double variance);
double gaussian_log_pdf(double x, double mean, double variance);

}  // namespace covertkit::distributions

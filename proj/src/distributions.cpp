#include "covertkit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "covertkit/csv.hpp"
#include "covertkit/rng.hpp"

namespace covertkit::distributions {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;
constexpr double kMassTol = 1e-6;

}  // namespace

void GaussianSpec::validate() const {
  if (!(variance > 0.0))
    throw std::invalid_argument("GaussianSpec: variance must be > 0");
}

SkewNormalSpec SkewNormalSpec::make(double location, double scale, double shape) {
  SkewNormalSpec s{location, scale, shape, shape / std::sqrt(1.0 + shape * shape)};
  s.validate();
  return s;
}

void SkewNormalSpec::validate() const {
  if (!(scale > 0.0))
    throw std::invalid_argument("SkewNormalSpec: scale must be > 0");
  const double expected = shape / std::sqrt(1.0 + shape * shape);
  if (std::abs(delta - expected) > 1e-15)
    throw std::invalid_argument("SkewNormalSpec: delta inconsistent with shape");
  if (!(std::abs(delta) < 1.0))
    throw std::invalid_argument("SkewNormalSpec: |delta| must be < 1");
}

TabulatedPdf::TabulatedPdf(double x0, double dx, std::vector<double> densities)
    : x0_(x0), dx_(dx), densities_(std::move(densities)) {
  if (!(dx_ > 0.0))
    throw std::invalid_argument("TabulatedPdf: dx must be > 0");
  if (densities_.size() < 64)
    throw std::invalid_argument("TabulatedPdf: at least 64 points required");
  for (double d : densities_)
    if (!(d >= 0.0))
      throw std::invalid_argument("TabulatedPdf: densities must be >= 0");
  const double m = mass();
  if (std::abs(m - 1.0) > kMassTol)
    throw std::invalid_argument("TabulatedPdf: trapezoid mass deviates from 1 by more than 1e-6");
}

double TabulatedPdf::value_at(double x) const {
  const double t = (x - x0_) / dx_;
  if (t < 0.0 || t > static_cast<double>(densities_.size() - 1)) return 0.0;
  const auto i = static_cast<std::size_t>(t);
  if (i + 1 >= densities_.size()) return densities_.back();
  const double frac = t - static_cast<double>(i);
  return densities_[i] * (1.0 - frac) + densities_[i + 1] * frac;
}

double TabulatedPdf::mass() const {
  double s = 0.0;
  for (double d : densities_) s += d;
  s -= 0.5 * (densities_.front() + densities_.back());
  return s * dx_;
}

double TabulatedPdf::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < densities_.size(); ++i) s += x_at(i) * densities_[i];
  s -= 0.5 * (x_at(0) * densities_.front() + x_max() * densities_.back());
  return s * dx_;
}

double TabulatedPdf::second_moment() const {
  double s = 0.0;
  for (std::size_t i = 0; i < densities_.size(); ++i) {
    const double x = x_at(i);
    s += x * x * densities_[i];
  }
  s -= 0.5 * (x_at(0) * x_at(0) * densities_.front() + x_max() * x_max() * densities_.back());
  return s * dx_;
}

bool TabulatedPdf::same_grid(const TabulatedPdf& other) const {
  return x0_ == other.x0_ && dx_ == other.dx_ && densities_.size() == other.densities_.size();
}

void TabulatedPdf::write_csv(std::ostream& out) const {
  out << "x,density\n";
  for (std::size_t i = 0; i < densities_.size(); ++i)
    out << csv::g17(x_at(i)) << ',' << csv::g17(densities_[i]) << '\n';
}

double gaussian_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(kTwoPi * variance);
}

double gaussian_log_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * d * d / variance - 0.5 * std::log(kTwoPi * variance);
}

double pdf_eval(const SignalDistribution& dist, double x) {
  return std::visit(
      [x](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          return gaussian_pdf(x, d.mean, d.variance);
        } else if constexpr (std::is_same_v<T, SkewNormalSpec>) {
          const double t = (x - d.location) / d.scale;
          return gaussian_pdf(t, 0.0, 1.0) / d.scale *
                 (1.0 + numerics::erf(d.shape * t / kSqrt2));
        } else {
          return d.value_at(x);
        }
      },
      dist);
}

std::pair<double, double> skew_params_from_power(double theta, double Px) {
  if (!(Px > 0.0))
    throw std::domain_error("skew_params_from_power: Px must be > 0");
  const double delta = theta / std::sqrt(1.0 + theta * theta);
  const double omega = std::sqrt(Px / (1.0 - 2.0 * delta * delta / M_PI));
  const double mu = -omega * delta * kSqrt2OverPi;
  return {omega, mu};
}

SkewNormalSpec skew_normal_from_power(double theta, double Px) {
  const auto [omega, mu] = skew_params_from_power(theta, Px);
  return SkewNormalSpec::make(mu, omega, theta);
}

Moments moments(const SignalDistribution& dist, const numerics::QuadratureSpec& spec) {
  return std::visit(
      [&spec](const auto& d) -> Moments {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          return {d.mean, d.variance + d.mean * d.mean};
        } else if constexpr (std::is_same_v<T, SkewNormalSpec>) {
          const double mean = d.location + d.scale * d.delta * kSqrt2OverPi;
          const double var = d.scale * d.scale * (1.0 - 2.0 * d.delta * d.delta / M_PI);
          return {mean, var + mean * mean};
        } else {
          numerics::QuadratureSpec grid = spec;
          grid.lower = d.x0();
          grid.upper = d.x_max();
          const double m1 =
              numerics::integrate([&d](double x) { return x * d.value_at(x); }, grid);
          const double m2 =
              numerics::integrate([&d](double x) { return x * x * d.value_at(x); }, grid);
          return {m1, m2};
        }
      },
      dist);
}

namespace {

std::vector<double> sample_tabulated(const TabulatedPdf& pdf, std::size_t n,
                                     rng::Xoshiro256pp& gen) {
  // cumulative trapezoid masses per cell, normalized
  const auto& dens = pdf.densities();
  std::vector<double> cum(dens.size(), 0.0);
  for (std::size_t i = 1; i < dens.size(); ++i)
    cum[i] = cum[i - 1] + 0.5 * (dens[i - 1] + dens[i]) * pdf.dx();
  const double total = cum.back();
  std::vector<double> out(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double u = gen.uniform01() * total;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t i = static_cast<std::size_t>(std::distance(cum.begin(), it));
    if (i == 0) i = 1;
    if (i >= cum.size()) i = cum.size() - 1;
    const double rem = u - cum[i - 1];
    const double p0 = dens[i - 1], p1 = dens[i], h = pdf.dx();
    const double slope = (p1 - p0) / h;
    double t;
    if (std::abs(slope) * h < 1e-14 * (p0 + p1)) {
      t = p0 > 0.0 ? rem / p0 : 0.5 * h;
    } else {
      // invert the per-cell quadratic cdf: p0 t + slope t^2 / 2 = rem
      const double disc = p0 * p0 + 2.0 * slope * rem;
      t = (std::sqrt(std::max(disc, 0.0)) - p0) / slope;
    }
    out[s] = pdf.x_at(i - 1) + std::clamp(t, 0.0, h);
  }
  return out;
}

}  // namespace

std::vector<double> sample(const SignalDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  rng::Xoshiro256pp gen(seed);
  return std::visit(
      [n, &gen](const auto& d) -> std::vector<double> {
        using T = std::decay_t<decltype(d)>;
        std::vector<double> out;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          out.resize(n);
          const double sd = std::sqrt(d.variance);
          for (auto& v : out) v = d.mean + sd * gen.normal();
        } else if constexpr (std::is_same_v<T, SkewNormalSpec>) {
          out.resize(n);
          const double root = std::sqrt(1.0 - d.delta * d.delta);
          for (auto& v : out) {
            const double u0 = gen.normal();
            const double u1 = gen.normal();
            v = d.location + d.scale * (d.delta * std::abs(u0) + root * u1);
          }
        } else {
          out = sample_tabulated(d, n, gen);
        }
        return out;
      },
      dist);
}

TabulatedPdf tabulate(const SignalDistribution& dist, double lower, double upper,
                      std::size_t points) {
  if (points < 64) throw std::invalid_argument("tabulate: points must be >= 64");
  if (!(lower < upper)) throw std::invalid_argument("tabulate: lower must be < upper");
  const double dx = (upper - lower) / static_cast<double>(points - 1);
  std::vector<double> dens(points);
  for (std::size_t i = 0; i < points; ++i)
    dens[i] = pdf_eval(dist, lower + dx * static_cast<double>(i));
  double m = 0.0;
  for (double d : dens) m += d;
  m -= 0.5 * (dens.front() + dens.back());
  m *= dx;
  if (std::abs(m - 1.0) > kMassTol)
    throw TruncationError("tabulate: tail mass outside the window exceeds 1e-6");
  for (double& d : dens) d /= m;
  return TabulatedPdf(lower, dx, std::move(dens));
}

}  // namespace covertkit::distributions

#include "covertkit/channel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "covertkit/csv.hpp"
#include "covertkit/parallel.hpp"

namespace covertkit::channel {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kSqrtHalfPi = 0.88622692545275801364908374167057;  // Gamma(3/2)
constexpr double kMassTol = 1e-6;

using distributions::GaussianSpec;
using distributions::gaussian_pdf;

// effective support of an input law, wide enough that the truncated tail
// mass is far below the 1e-6 normalization budget
std::pair<double, double> input_support(const SignalDistribution& input) {
  return std::visit(
      [](const auto& d) -> std::pair<double, double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          const double w = 12.0 * std::sqrt(d.variance);
          return {d.mean - w, d.mean + w};
        } else if constexpr (std::is_same_v<T, SkewNormalSpec>) {
          const double w = 12.0 * d.scale;
          return {d.location - w, d.location + w};
        } else {
          return {d.x0(), d.x_max()};
        }
      },
      input);
}

// e^{-u} 1F1(1/2, 3/2, u): positive-term series, the k = 0 seed of the
// upward ladder
double seed_g0(double u) {
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < 4096; ++j) {
    term *= u / static_cast<double>(j);
    const double contrib = term / static_cast<double>(2 * j + 1);
    sum += contrib;
    if (contrib < 1e-17 * sum) break;
  }
  return std::exp(-u) * sum;
}

TabulatedPdf normalized_pdf(double x0, double dx, std::vector<double> dens,
                            const char* what) {
  double m = 0.0;
  for (double d : dens) m += d;
  m -= 0.5 * (dens.front() + dens.back());
  m *= dx;
  if (std::abs(m - 1.0) > kMassTol)
    throw distributions::TruncationError(std::string(what) +
                                         ": output mass deviates from 1 by more than 1e-6");
  for (double& d : dens) d /= m;
  return TabulatedPdf(x0, dx, std::move(dens));
}

}  // namespace

void ChannelSpec::validate() const {
  if (!(sigma_b2 > 0.0) || !(sigma_w2 > 0.0))
    throw std::invalid_argument("ChannelSpec: noise powers must be > 0");
}

HypothesisPair::HypothesisPair(TabulatedPdf null_pdf, TabulatedPdf alt_pdf, double sigma_w2)
    : p0(std::move(null_pdf)), p1(std::move(alt_pdf)), Py(p1.second_moment()) {
  if (!p0.same_grid(p1))
    throw std::invalid_argument("HypothesisPair: hypotheses must share one grid");
  if (std::abs(p0.second_moment() - sigma_w2) > 1e-6 * std::max(1.0, sigma_w2))
    throw std::invalid_argument("HypothesisPair: p0 second moment != sigma_w2");
}

void HypothesisPair::write_csv(std::ostream& out) const {
  out << "y,p0,p1\n";
  for (std::size_t i = 0; i < p0.size(); ++i)
    out << csv::g17(p0.x_at(i)) << ',' << csv::g17(p0.densities()[i]) << ','
        << csv::g17(p1.densities()[i]) << '\n';
}

TabulatedPdf output_pdf_quadrature(const SignalDistribution& input, double noise_var,
                                   const numerics::QuadratureSpec& grid) {
  grid.validate();
  if (!(noise_var > 0.0))
    throw std::domain_error("output_pdf_quadrature: noise_var must be > 0");
  const std::size_t points = static_cast<std::size_t>(grid.panels) + 1;
  const double dx = (grid.upper - grid.lower) / static_cast<double>(grid.panels);
  const auto [in_lo, in_hi] = input_support(input);
  const double kernel_reach = 10.0 * std::sqrt(noise_var);

  std::vector<double> dens(points, 0.0);
  parallel::parallel_for(points, [&](std::size_t i) {
    const double y = grid.lower + dx * static_cast<double>(i);
    const double lo = std::max(in_lo, y - kernel_reach);
    const double hi = std::min(in_hi, y + kernel_reach);
    if (!(lo < hi)) return;
    numerics::QuadratureSpec inner{lo, hi, 64, grid.rel_tol};
    dens[i] = numerics::integrate(
        [&](double x) {
          return distributions::pdf_eval(input, x) * gaussian_pdf(y - x, 0.0, noise_var);
        },
        inner);
  });
  return normalized_pdf(grid.lower, dx, std::move(dens), "output_pdf_quadrature");
}

double series_convergence_ratio(const SkewNormalSpec& spec, double noise_var) {
  const double om2 = spec.scale * spec.scale;
  return spec.shape * spec.shape * noise_var / (noise_var + om2);
}

double output_pdf_skew_series(const SkewNormalSpec& spec, double noise_var, double y,
                              const numerics::SeriesControl& ctrl) {
  spec.validate();
  ctrl.validate();
  if (!(noise_var > 0.0))
    throw std::domain_error("output_pdf_skew_series: noise_var must be > 0");

  const double om2 = spec.scale * spec.scale;
  const double omt2 = om2 + noise_var;
  const double yt = y - spec.location;
  const double lead = gaussian_pdf(yt, 0.0, omt2);
  if (spec.shape == 0.0) return lead;

  // posterior of the input given y: mean offset mtil, variance s2
  const double mtil = yt * om2 / omt2;
  const double s2 = noise_var * om2 / omt2;
  const double u = om2 * yt * yt / (2.0 * noise_var * omt2);
  const double c = spec.shape / (spec.scale * kSqrt2);
  const double rho = 2.0 * c * c * s2;  // term growth ratio

  // S = (4/pi) mtil c sum_k B_k G_k with
  //   B_k = (-1)^{k+1} rho^{k-1} Gamma(k+1/2) / ((2k-1)(k-1)!)
  //   G_k = e^-u 1F1(k+1/2, 3/2, u), upward contiguous recurrence in k
  double g_prev = seed_g0(u);  // k = 0
  double g = 1.0;              // k = 1: a = b makes 1F1 the exponential
  double b = kSqrtHalfPi;      // B_1
  double sum = b * g;
  double comp = 0.0;
  bool converged = false;
  for (int k = 1; k < ctrl.max_terms; ++k) {
    const double a = k + 0.5;
    const double g_next = ((2.0 * a - 1.5 + u) * g + (1.5 - a) * g_prev) / a;
    g_prev = g;
    g = g_next;
    b *= -rho * (k + 0.5) * (2.0 * k - 1.0) / ((2.0 * k + 1.0) * k);
    const double term = b * g;
    const double yv = term - comp;
    const double t = sum + yv;
    comp = (t - sum) - yv;
    sum = t;
    if (!std::isfinite(sum))
      throw numerics::NonConvergenceError("skew output series: sum not finite");
    if (std::abs(term) < ctrl.term_rel_tol * (1.0 + std::abs(sum))) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw numerics::NonConvergenceError(
        "skew output series: term floor not reached (growth ratio " +
        std::to_string(rho) + ")");

  const double skew_part = (4.0 / M_PI) * mtil * c * sum;
  double p = lead * (1.0 + skew_part);
  if (p < 0.0) {
    if (p >= -1e-12) return 0.0;
    throw numerics::NonConvergenceError("skew output series: negative density beyond roundoff");
  }
  return p;
}

SkewNormalSpec skew_noise_closure(const SkewNormalSpec& spec, double noise_var) {
  if (!(noise_var > 0.0))
    throw std::domain_error("skew_noise_closure: noise_var must be > 0");
  const double om2 = spec.scale * spec.scale;
  const double omt = std::sqrt(om2 + noise_var);
  const double delta_out = spec.scale * spec.delta / omt;
  const double shape_out = delta_out / std::sqrt(1.0 - delta_out * delta_out);
  return SkewNormalSpec::make(spec.location, omt, shape_out);
}

namespace {

TabulatedPdf skew_output_pdf(const SkewNormalSpec& spec, double noise_var,
                             double lo, double hi, std::size_t points, OutputDiag* diag) {
  const double dx = (hi - lo) / static_cast<double>(points - 1);
  std::vector<double> dens(points, 0.0);
  std::vector<unsigned char> needs_fallback(points, 0);
  parallel::parallel_for(points, [&](std::size_t i) {
    const double y = lo + dx * static_cast<double>(i);
    try {
      dens[i] = output_pdf_skew_series(spec, noise_var, y);
    } catch (const numerics::NonConvergenceError&) {
      needs_fallback[i] = 1;
    }
  });

  std::size_t fallbacks = 0;
  for (auto f : needs_fallback) fallbacks += f;
  if (fallbacks > 0) {
    const double reach = 10.0 * std::sqrt(noise_var);
    parallel::parallel_for(points, [&](std::size_t i) {
      if (!needs_fallback[i]) return;
      const double y = lo + dx * static_cast<double>(i);
      const double a = std::max(spec.location - 12.0 * spec.scale, y - reach);
      const double b = std::min(spec.location + 12.0 * spec.scale, y + reach);
      if (!(a < b)) return;
      const SignalDistribution in{spec};
      numerics::QuadratureSpec inner{a, b, 64, 1e-10};
      dens[i] = numerics::integrate(
          [&](double x) {
            return distributions::pdf_eval(in, x) * gaussian_pdf(y - x, 0.0, noise_var);
          },
          inner);
    });
  }
  if (diag) {
    diag->series_points += points - fallbacks;
    diag->fallback_points += fallbacks;
    if (fallbacks > 0)
      diag->note = "series did not converge at " + std::to_string(fallbacks) +
                   " grid points (growth ratio " +
                   std::to_string(series_convergence_ratio(spec, noise_var)) +
                   "); quadrature convolution used there";
  }
  return normalized_pdf(lo, dx, std::move(dens), "skew output pdf");
}

}  // namespace

TabulatedPdf output_pdf(const SignalDistribution& input, double noise_var,
                        const GridParams& grid, OutputDiag* diag) {
  if (!(noise_var > 0.0))
    throw std::domain_error("output_pdf: noise_var must be > 0");
  if (grid.points < 64)
    throw std::invalid_argument("output_pdf: grid.points must be >= 64");

  numerics::QuadratureSpec moment_spec{-1.0, 1.0, 64, 1e-10};
  const auto mom = distributions::moments(input, moment_spec);
  const double out_var = mom.second_moment - mom.mean * mom.mean + noise_var;
  const double half = grid.half_width_sds * std::sqrt(std::max(out_var, noise_var));
  const double lo = mom.mean - half, hi = mom.mean + half;

  if (const auto* g = std::get_if<GaussianSpec>(&input)) {
    return distributions::tabulate(
        SignalDistribution{GaussianSpec{g->mean, g->variance + noise_var}}, lo, hi,
        grid.points);
  }
  if (const auto* s = std::get_if<SkewNormalSpec>(&input)) {
    return skew_output_pdf(*s, noise_var, lo, hi, grid.points, diag);
  }
  numerics::QuadratureSpec out_grid{lo, hi, static_cast<int>(grid.points - 1), 1e-10};
  return output_pdf_quadrature(input, noise_var, out_grid);
}

HypothesisPair hypothesis_pair(const SignalDistribution& input, const ChannelSpec& channel,
                               const GridParams& grid, OutputDiag* diag) {
  channel.validate();
  numerics::QuadratureSpec moment_spec{-1.0, 1.0, 64, 1e-10};
  const auto mom = distributions::moments(input, moment_spec);
  if (std::abs(mom.mean) > 1e-6 * std::sqrt(std::max(mom.second_moment, 1e-30)))
    throw std::invalid_argument("hypothesis_pair: input must have zero mean");
  const double Py = mom.second_moment + channel.sigma_w2;

  // one shared grid covering the wider law
  const double half = grid.half_width_sds * std::sqrt(Py);
  const std::size_t n = grid.points;

  auto p0 = distributions::tabulate(
      SignalDistribution{GaussianSpec{0.0, channel.sigma_w2}}, -half, half, n);

  TabulatedPdf p1 = [&]() -> TabulatedPdf {
    if (const auto* g = std::get_if<GaussianSpec>(&input)) {
      return distributions::tabulate(
          SignalDistribution{GaussianSpec{0.0, g->variance + channel.sigma_w2}}, -half, half,
          n);
    }
    if (const auto* s = std::get_if<SkewNormalSpec>(&input)) {
      return skew_output_pdf(*s, channel.sigma_w2, -half, half, n, diag);
    }
    numerics::QuadratureSpec out_grid{-half, half, static_cast<int>(n - 1), 1e-10};
    return output_pdf_quadrature(input, channel.sigma_w2, out_grid);
  }();

  HypothesisPair pair(std::move(p0), std::move(p1), channel.sigma_w2);
  if (std::abs(pair.Py - Py) > 1e-6 * std::max(1.0, Py))
    throw std::runtime_error("hypothesis_pair: p1 second moment drifted from Px + sigma_w2");
  return pair;
}

}  // namespace covertkit::channel

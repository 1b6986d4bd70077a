#include "covertkit/infotheory.hpp"

#include <cmath>
#include <ostream>

#include "covertkit/csv.hpp"

namespace covertkit::infotheory {

namespace {

constexpr double kTwoPiE = 17.079468445347132695426976299291;
constexpr double kDensityFloor = 1e-300;

void require_shared_grid(const TabulatedPdf& p, const TabulatedPdf& q) {
  if (!p.same_grid(q))
    throw std::invalid_argument("divergence: densities must share one grid");
}

double trapezoid(const std::vector<double>& f, double dx) {
  double s = 0.0;
  for (double v : f) s += v;
  s -= 0.5 * (f.front() + f.back());
  return s * dx;
}

}  // namespace

const char* DivergenceReport::csv_header() {
  return "Px,sigma_w2,kl_forward,kl_reverse,tv,pinsker_fwd,pinsker_rev";
}

void DivergenceReport::write_csv_row(std::ostream& out) const {
  out << csv::g17(Px) << ',' << csv::g17(sigma_w2) << ',' << csv::g17(kl_forward) << ','
      << csv::g17(kl_reverse) << ',' << csv::g17(total_variation) << ','
      << csv::g17(pinsker_forward) << ',' << csv::g17(pinsker_reverse) << '\n';
}

double kl_divergence(const TabulatedPdf& p, const TabulatedPdf& q) {
  require_shared_grid(p, q);
  const auto& pp = p.densities();
  const auto& qq = q.densities();
  std::vector<double> integrand(pp.size());
  for (std::size_t i = 0; i < pp.size(); ++i) {
    if (pp[i] <= 0.0) {
      integrand[i] = 0.0;
    } else {
      integrand[i] = pp[i] * std::log(std::max(pp[i], kDensityFloor) /
                                      std::max(qq[i], kDensityFloor));
    }
  }
  return trapezoid(integrand, p.dx());
}

double kl_gaussian_forward(double Px, double sigma_w2) {
  if (!(Px >= 0.0)) throw std::domain_error("kl_gaussian_forward: Px must be >= 0");
  if (!(sigma_w2 > 0.0)) throw std::domain_error("kl_gaussian_forward: sigma_w2 must be > 0");
  const double Py = Px + sigma_w2;
  return 0.5 * (Py / sigma_w2 - 1.0 + std::log(sigma_w2 / Py));
}

double kl_gaussian_reverse(double Px, double sigma_w2) {
  if (!(Px >= 0.0)) throw std::domain_error("kl_gaussian_reverse: Px must be >= 0");
  if (!(sigma_w2 > 0.0)) throw std::domain_error("kl_gaussian_reverse: sigma_w2 must be > 0");
  const double Py = Px + sigma_w2;
  return 0.5 * (sigma_w2 / Py - 1.0 + std::log(Py / sigma_w2));
}

double kl_gap(double Px, double sigma_w2) {
  return kl_gaussian_forward(Px, sigma_w2) - kl_gaussian_reverse(Px, sigma_w2);
}

double total_variation(const TabulatedPdf& p, const TabulatedPdf& q) {
  require_shared_grid(p, q);
  const auto& pp = p.densities();
  const auto& qq = q.densities();
  const double h = p.dx();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pp.size(); ++i) {
    const double a = pp[i] - qq[i];
    const double b = pp[i + 1] - qq[i + 1];
    if (a * b >= 0.0) {
      total += 0.5 * h * std::abs(a + b);
    } else {
      // the linear interpolant changes sign inside the cell; integrate |.|
      // exactly through the crossing
      total += 0.5 * h * (a * a + b * b) / (std::abs(a) + std::abs(b));
    }
  }
  return 0.5 * total;
}

double differential_entropy(const TabulatedPdf& p) {
  const auto& pp = p.densities();
  std::vector<double> integrand(pp.size());
  for (std::size_t i = 0; i < pp.size(); ++i)
    integrand[i] = pp[i] > 0.0 ? -pp[i] * std::log(pp[i]) : 0.0;
  return trapezoid(integrand, p.dx());
}

double gaussian_capacity(double Px, double sigma_b2) {
  if (!(Px >= 0.0)) throw std::domain_error("gaussian_capacity: Px must be >= 0");
  if (!(sigma_b2 > 0.0)) throw std::domain_error("gaussian_capacity: sigma_b2 must be > 0");
  return std::log1p(Px / sigma_b2);
}

double mutual_information(const SignalDistribution& input, double sigma_b2,
                          const channel::GridParams& grid) {
  if (!(sigma_b2 > 0.0)) throw std::domain_error("mutual_information: sigma_b2 must be > 0");
  if (const auto* g = std::get_if<distributions::GaussianSpec>(&input))
    return gaussian_capacity(g->variance, sigma_b2);
  const auto pz = channel::output_pdf(input, sigma_b2, grid);
  const double h_out = differential_entropy(pz);
  const double h_noise = 0.5 * std::log(kTwoPiE * sigma_b2);
  return 2.0 * (h_out - h_noise);
}

double blocklength_scale(double per_symbol, std::size_t N) {
  if (N < 1) throw std::domain_error("blocklength_scale: N must be >= 1");
  return static_cast<double>(N) * per_symbol;
}

DivergenceReport divergence_report_gaussian(double Px, double sigma_w2, std::size_t points) {
  const double Py = Px + sigma_w2;
  const double half = 10.0 * std::sqrt(Py);
  using distributions::GaussianSpec;
  const auto p0 = distributions::tabulate(SignalDistribution{GaussianSpec{0.0, sigma_w2}},
                                          -half, half, points);
  const auto p1 =
      distributions::tabulate(SignalDistribution{GaussianSpec{0.0, Py}}, -half, half, points);
  DivergenceReport r;
  r.Px = Px;
  r.sigma_w2 = sigma_w2;
  r.kl_forward = kl_gaussian_forward(Px, sigma_w2);
  r.kl_reverse = kl_gaussian_reverse(Px, sigma_w2);
  r.total_variation = total_variation(p1, p0);
  r.pinsker_forward = std::sqrt(r.kl_forward / 2.0);
  r.pinsker_reverse = std::sqrt(r.kl_reverse / 2.0);
  return r;
}

}  // namespace covertkit::infotheory

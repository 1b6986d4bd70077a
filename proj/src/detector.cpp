#include "covertkit/detector.hpp"

#include <cmath>
#include <ostream>
#include <vector>

#include "covertkit/csv.hpp"
#include "covertkit/infotheory.hpp"
#include "covertkit/parallel.hpp"
#include "covertkit/rng.hpp"

namespace covertkit::detector {

namespace {

constexpr std::size_t kLogicalStreams = 64;

void require_positive(double Px, double sigma_w2, const char* who) {
  if (!(Px > 0.0))
    throw std::domain_error(std::string(who) + ": Px must be > 0 (threshold undefined at 0)");
  if (!(sigma_w2 > 0.0))
    throw std::domain_error(std::string(who) + ": sigma_w2 must be > 0");
}

}  // namespace

const char* DetectorReport::csv_header() { return "threshold,alpha,beta,xi"; }

void DetectorReport::write_csv_row(std::ostream& out) const {
  out << csv::g17(threshold) << ',' << csv::g17(alpha) << ',' << csv::g17(beta) << ','
      << csv::g17(xi) << '\n';
}

const char* MonteCarloReport::csv_header() {
  return "alpha_hat,beta_hat,xi_hat,n,seed,std_err";
}

void MonteCarloReport::write_csv_row(std::ostream& out) const {
  out << csv::g17(alpha_hat) << ',' << csv::g17(beta_hat) << ',' << csv::g17(xi_hat) << ','
      << n << ',' << seed << ',' << csv::g17(std_err) << '\n';
}

double optimal_threshold(double Px, double sigma_w2) {
  require_positive(Px, sigma_w2, "optimal_threshold");
  const double Py = Px + sigma_w2;
  return (Py * sigma_w2 / Px) * std::log(Py / sigma_w2);
}

DetectorReport error_rates_closed(double Px, double sigma_w2) {
  const double phi = optimal_threshold(Px, sigma_w2);
  const double Py = Px + sigma_w2;
  const double alpha =
      1.0 - numerics::lower_incomplete_gamma_regularized(0.5, phi / (2.0 * sigma_w2));
  const double beta = numerics::lower_incomplete_gamma_regularized(0.5, phi / (2.0 * Py));
  return {phi, alpha, beta, alpha + beta};
}

double min_error_prob_tv(const channel::HypothesisPair& pair) {
  return 1.0 - infotheory::total_variation(pair.p0, pair.p1);
}

MonteCarloReport simulate_detector(double Px, double sigma_w2, std::size_t n,
                                   std::uint64_t seed) {
  require_positive(Px, sigma_w2, "simulate_detector");
  if (n < 10000) throw std::invalid_argument("simulate_detector: n must be >= 1e4");
  const double phi = optimal_threshold(Px, sigma_w2);
  const double noise_sd = std::sqrt(sigma_w2);
  const double signal_sd = std::sqrt(Px);

  // per-stream counts; stream partition is fixed so the totals do not
  // depend on thread scheduling
  std::vector<std::size_t> false_pos(kLogicalStreams, 0);
  std::vector<std::size_t> misses(kLogicalStreams, 0);
  parallel::parallel_for(kLogicalStreams, [&](std::size_t w) {
    const std::size_t lo = n * w / kLogicalStreams;
    const std::size_t hi = n * (w + 1) / kLogicalStreams;
    auto gen = rng::Xoshiro256pp::stream(seed, w);
    std::size_t fp = 0, miss = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double y0 = noise_sd * gen.normal();
      if (y0 * y0 > phi) ++fp;
      const double y1 = signal_sd * gen.normal() + noise_sd * gen.normal();
      if (y1 * y1 < phi) ++miss;
    }
    false_pos[w] = fp;
    misses[w] = miss;
  });

  std::size_t fp_total = 0, miss_total = 0;
  for (std::size_t w = 0; w < kLogicalStreams; ++w) {
    fp_total += false_pos[w];
    miss_total += misses[w];
  }
  const double nd = static_cast<double>(n);
  MonteCarloReport r;
  r.alpha_hat = static_cast<double>(fp_total) / nd;
  r.beta_hat = static_cast<double>(miss_total) / nd;
  r.xi_hat = r.alpha_hat + r.beta_hat;
  r.n = n;
  r.seed = seed;
  r.std_err = std::sqrt(r.alpha_hat * (1.0 - r.alpha_hat) / nd +
                        r.beta_hat * (1.0 - r.beta_hat) / nd);
  return r;
}

}  // namespace covertkit::detector

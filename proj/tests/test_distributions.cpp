#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "covertkit/distributions.hpp"
#include "covertkit/numerics.hpp"
#include "oracles.hpp"

using namespace covertkit;
using distributions::GaussianSpec;
using distributions::SignalDistribution;
using distributions::SkewNormalSpec;
using distributions::TabulatedPdf;
using numerics::QuadratureSpec;

namespace {

const QuadratureSpec kMomentSpec{-1.0, 1.0, 64, 1e-10};

double quad_moment(const SignalDistribution& dist, int order, double lo, double hi) {
  return numerics::integrate(
      [&](double x) {
        return (order == 0 ? 1.0 : order == 1 ? x : x * x) *
               distributions::pdf_eval(dist, x);
      },
      QuadratureSpec{lo, hi, 256, 1e-12});
}

}  // namespace

TEST_CASE("pdf_eval: Gaussian mode and skewless collapse") {
  const SignalDistribution std_normal{GaussianSpec{0.0, 1.0}};
  CHECK(distributions::pdf_eval(std_normal, 0.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-15));

  const SignalDistribution skewless{SkewNormalSpec::make(0.0, 1.0, 0.0)};
  for (double x = -6.0; x <= 6.0; x += 0.25)
    CHECK(std::abs(distributions::pdf_eval(skewless, x) -
                   distributions::pdf_eval(std_normal, x)) <= 1e-15);
}

TEST_CASE("pdf_eval: zero-mean unit-power skew-normal integrates to 1") {
  const auto spec = distributions::skew_normal_from_power(1.0, 1.0);
  CHECK(spec.scale == doctest::Approx(1.21117390).epsilon(1e-8));
  CHECK(spec.location == doctest::Approx(-0.68333170).epsilon(1e-8));
  const double mass = quad_moment(SignalDistribution{spec}, 0, -10.0, 10.0);
  CHECK(std::abs(mass - 1.0) <= 1e-9);
}

TEST_CASE("skew_params_from_power: values and the moment oracle") {
  {
    const auto [omega, mu] = distributions::skew_params_from_power(0.0, 1.0);
    CHECK(omega == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mu == 0.0);
  }
  for (double theta : {1.0, -1.0}) {
    const auto [omega, mu] = distributions::skew_params_from_power(theta, 1.0);
    CHECK(omega == doctest::Approx(1.211173896).epsilon(1e-8));
    CHECK(mu == doctest::Approx(theta > 0 ? -0.683331696 : 0.683331696).epsilon(1e-8));
    const SignalDistribution d{SkewNormalSpec::make(mu, omega, theta)};
    CHECK(std::abs(quad_moment(d, 1, -14.0, 14.0)) <= 1e-9);
    CHECK(std::abs(quad_moment(d, 2, -14.0, 14.0) - 1.0) <= 1e-9);
  }
  CHECK_THROWS_AS(distributions::skew_params_from_power(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(distributions::skew_params_from_power(1.0, -2.0), std::domain_error);
}

TEST_CASE("skew family: zero mean and power Px across the theta grid") {
  for (double Px : {0.1, 1.0, 10.0}) {
    for (double theta = -4.0; theta <= 4.0 + 1e-9; theta += 0.1) {
      const auto spec = distributions::skew_normal_from_power(theta, Px);
      const auto m = distributions::moments(SignalDistribution{spec}, kMomentSpec);
      CHECK(std::abs(m.mean) <= 1e-9);
      CHECK(std::abs(m.second_moment - Px) <= 1e-9 * std::max(1.0, Px));
    }
  }
  // quadrature oracle at spot thetas
  for (double theta : {-2.0, -0.5, 1.5, 3.0}) {
    const auto spec = distributions::skew_normal_from_power(theta, 1.0);
    const SignalDistribution d{spec};
    CHECK(std::abs(quad_moment(d, 1, -16.0, 16.0)) <= 1e-9);
    CHECK(std::abs(quad_moment(d, 2, -16.0, 16.0) - 1.0) <= 1e-9);
  }
}

TEST_CASE("skew densities mirror under theta -> -theta") {
  const auto pos = distributions::skew_normal_from_power(1.3, 1.0);
  const auto neg = distributions::skew_normal_from_power(-1.3, 1.0);
  for (double x = -8.0; x <= 8.0; x += 0.125)
    CHECK(std::abs(distributions::pdf_eval(SignalDistribution{pos}, x) -
                   distributions::pdf_eval(SignalDistribution{neg}, -x)) <= 1e-12);
}

TEST_CASE("moments: closed forms and tabulated quadrature") {
  const auto g = distributions::moments(SignalDistribution{GaussianSpec{0.0, 2.5}}, kMomentSpec);
  CHECK(g.mean == 0.0);
  CHECK(g.second_moment == 2.5);

  const auto s = distributions::moments(
      SignalDistribution{distributions::skew_normal_from_power(1.5, 1.0)}, kMomentSpec);
  CHECK(std::abs(s.mean) <= 1e-9);
  CHECK(std::abs(s.second_moment - 1.0) <= 1e-9);

  const auto tab = distributions::tabulate(SignalDistribution{GaussianSpec{0.0, 1.0}}, -10.0,
                                           10.0, 4097);
  const auto t = distributions::moments(SignalDistribution{tab}, kMomentSpec);
  CHECK(std::abs(t.mean) <= 1e-8);
  CHECK(std::abs(t.second_moment - 1.0) <= 1e-8);
}

TEST_CASE("sample: law of large numbers and determinism") {
  const SignalDistribution g{GaussianSpec{0.0, 1.0}};
  const auto xs = distributions::sample(g, 1000000, 42);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(1e6));

  const SignalDistribution sn{distributions::skew_normal_from_power(1.0, 1.0)};
  const auto ys = distributions::sample(sn, 1000000, 43);
  double m1 = 0.0, m2 = 0.0;
  for (double y : ys) {
    m1 += y;
    m2 += y * y;
  }
  m1 /= static_cast<double>(ys.size());
  m2 /= static_cast<double>(ys.size());
  CHECK(std::abs(m1) <= 0.01);
  CHECK(std::abs(m2 - 1.0) <= 0.01);

  CHECK(distributions::sample(sn, 1000, 7) == distributions::sample(sn, 1000, 7));
  CHECK(distributions::sample(sn, 1000, 7) != distributions::sample(sn, 1000, 8));
}

TEST_CASE("sample: skew-normal empirical cdf matches the quadrature cdf (KS)") {
  const auto spec = distributions::skew_normal_from_power(1.0, 1.0);
  const SignalDistribution sn{spec};
  auto xs = distributions::sample(sn, 1000000, 12345);
  std::sort(xs.begin(), xs.end());

  // quadrature cdf on a fine grid, linearly interpolated
  const int n = 1 << 14;
  const double lo = -9.0, hi = 9.0, h = (hi - lo) / n;
  std::vector<double> cdf(n + 1, 0.0);
  double acc = 0.0;
  double prev = distributions::pdf_eval(sn, lo);
  for (int i = 1; i <= n; ++i) {
    const double cur = distributions::pdf_eval(sn, lo + h * i);
    acc += 0.5 * (prev + cur) * h;
    cdf[i] = acc;
    prev = cur;
  }
  const auto cdf_at = [&](double x) {
    const double t = std::clamp((x - lo) / h, 0.0, static_cast<double>(n));
    const int i = static_cast<int>(t);
    if (i >= n) return cdf[n];
    return cdf[i] + (cdf[i + 1] - cdf[i]) * (t - i);
  };

  double ks = 0.0;
  const double inv_n = 1.0 / static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf_at(xs[i]);
    ks = std::max(ks, std::abs(f - static_cast<double>(i) * inv_n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) * inv_n - f));
  }
  CHECK(ks < 0.002);
}

TEST_CASE("sample: tabulated inverse-cdf stays on-grid and reproduces moments") {
  const auto tab = distributions::tabulate(SignalDistribution{GaussianSpec{0.0, 1.0}}, -10.0,
                                           10.0, 8193);
  const auto xs = distributions::sample(SignalDistribution{tab}, 200000, 5);
  double m2 = 0.0;
  for (double x : xs) {
    CHECK(x >= -10.0);
    CHECK(x <= 10.0);
    m2 += x * x;
  }
  m2 /= static_cast<double>(xs.size());
  CHECK(std::abs(m2 - 1.0) <= 0.02);
}

TEST_CASE("tabulate: mass and truncation") {
  const auto g = distributions::tabulate(SignalDistribution{GaussianSpec{0.0, 1.0}}, -10.0,
                                         10.0, 8193);
  CHECK(std::abs(g.mass() - 1.0) <= 1e-10);

  const auto sn = distributions::tabulate(
      SignalDistribution{distributions::skew_normal_from_power(2.0, 1.0)}, -10.0, 10.0, 8193);
  CHECK(std::abs(sn.mass() - 1.0) <= 1e-9);

  CHECK_THROWS_AS(
      distributions::tabulate(SignalDistribution{GaussianSpec{0.0, 1.0}}, -1.0, 1.0, 257),
      distributions::TruncationError);
  CHECK_THROWS_AS(
      distributions::tabulate(SignalDistribution{GaussianSpec{0.0, 1.0}}, -10.0, 10.0, 63),
      std::invalid_argument);
}

TEST_CASE("TabulatedPdf invariants are enforced") {
  std::vector<double> flat(64, 1.0 / 63.0);
  CHECK_NOTHROW(TabulatedPdf(0.0, 1.0 / 63.0, flat));

  std::vector<double> negative = flat;
  negative[10] = -0.5;
  CHECK_THROWS_AS(TabulatedPdf(0.0, 1.0 / 63.0, negative), std::invalid_argument);

  std::vector<double> short_grid(32, 1.0);
  CHECK_THROWS_AS(TabulatedPdf(0.0, 1.0, short_grid), std::invalid_argument);

  std::vector<double> heavy(64, 1.0);
  CHECK_THROWS_AS(TabulatedPdf(0.0, 1.0, heavy), std::invalid_argument);
}

TEST_CASE("TabulatedPdf: interpolation inside, zero outside, csv shape") {
  const auto g = distributions::tabulate(SignalDistribution{GaussianSpec{0.0, 1.0}}, -10.0,
                                         10.0, 8193);
  CHECK(g.value_at(-11.0) == 0.0);
  CHECK(g.value_at(11.0) == 0.0);
  CHECK(g.value_at(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-8));
  // midpoint of a cell is the average of its endpoints
  const double xm = g.x_at(100) + 0.5 * g.dx();
  CHECK(g.value_at(xm) ==
        doctest::Approx(0.5 * (g.densities()[100] + g.densities()[101])).epsilon(1e-12));

  std::ostringstream out;
  g.write_csv(out);
  const std::string s = out.str();
  CHECK(s.rfind("x,density\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 8193);
}

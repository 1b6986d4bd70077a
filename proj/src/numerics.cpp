#include "covertkit/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace covertkit::numerics {

namespace {

constexpr int kMaxPanels = 1 << 20;
constexpr int kMaxBisectIter = 2000;

bool is_nonpositive_integer(double b) {
  return b <= 0.0 && b == std::floor(b);
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(lower < upper))
    throw std::invalid_argument("QuadratureSpec: lower must be < upper");
  if (panels < 2 || panels % 2 != 0)
    throw std::invalid_argument("QuadratureSpec: panels must be even and >= 2");
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw std::invalid_argument("QuadratureSpec: rel_tol must be in (0, 1)");
}

void RootBracket::validate() const {
  if (!(lo < hi))
    throw std::invalid_argument("RootBracket: lo must be < hi");
  if (!(abs_tol > 0.0))
    throw std::invalid_argument("RootBracket: abs_tol must be > 0");
}

void SeriesControl::validate() const {
  if (max_terms < 1)
    throw std::invalid_argument("SeriesControl: max_terms must be >= 1");
  if (!(term_rel_tol > 0.0 && term_rel_tol < 1.0))
    throw std::invalid_argument("SeriesControl: term_rel_tol must be in (0, 1)");
}

double erf(double x) { return std::erf(x); }

double lower_incomplete_gamma_regularized(double a, double x) {
  if (!(a > 0.0))
    throw std::domain_error("lower_incomplete_gamma_regularized: a must be > 0");
  if (!(x >= 0.0))
    throw std::domain_error("lower_incomplete_gamma_regularized: x must be >= 0");
  if (x == 0.0) return 0.0;

  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // ascending series: P = x^a e^-x / Gamma(a) * sum_n x^n / (a ... (a+n))
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 1000; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16)
        return std::exp(log_prefix) * sum;
    }
    throw NonConvergenceError("incomplete gamma series did not converge");
  }
  // Lentz continued fraction for Q(a, x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      const double q = std::exp(log_prefix) * h;
      return 1.0 - q;
    }
  }
  throw NonConvergenceError("incomplete gamma continued fraction did not converge");
}

namespace {

// Direct Kummer series with Kahan accumulation. A term that reaches exactly
// zero means the series has truncated to a polynomial (a is a non-positive
// integer) and the sum is complete.
double kummer_series(double a, double b, double z, const SeriesControl& ctrl) {
  double term = 1.0;
  double sum = 1.0;
  double comp = 0.0;
  for (int k = 0; k < ctrl.max_terms; ++k) {
    term *= (a + k) * z / ((b + k) * (k + 1));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (term == 0.0 || std::abs(term) < ctrl.term_rel_tol * std::abs(sum))
      return sum;
  }
  throw NonConvergenceError("1F1 series: term floor not reached within max_terms");
}

}  // namespace

double kummer_1f1(double a, double b, double z, const SeriesControl& ctrl) {
  ctrl.validate();
  if (is_nonpositive_integer(b))
    throw std::domain_error("kummer_1f1: b must not be a non-positive integer");
  if (z == 0.0) return 1.0;
  if (z < 0.0 || z > 30.0)
    return std::exp(z) * kummer_series(b - a, b, -z, ctrl);
  return kummer_series(a, b, z, ctrl);
}

namespace {

struct SimpsonEstimate {
  double value;
  double abs_value;  // same rule applied to |f|, used as a roundoff scale
};

SimpsonEstimate simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double end = f(a) + f(b);
  double abs_end = std::abs(f(a)) + std::abs(f(b));
  double s4 = 0.0, s2 = 0.0, a4 = 0.0, a2 = 0.0;
  for (int i = 1; i < n; i += 2) {
    const double v = f(a + i * h);
    s4 += v;
    a4 += std::abs(v);
  }
  for (int i = 2; i < n; i += 2) {
    const double v = f(a + i * h);
    s2 += v;
    a2 += std::abs(v);
  }
  return {(h / 3.0) * (end + 4.0 * s4 + 2.0 * s2),
          (h / 3.0) * (abs_end + 4.0 * a4 + 2.0 * a2)};
}

}  // namespace

double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  spec.validate();
  SimpsonEstimate prev = simpson(f, spec.lower, spec.upper, spec.panels);
  for (int n = spec.panels * 2; n <= kMaxPanels; n *= 2) {
    const SimpsonEstimate cur = simpson(f, spec.lower, spec.upper, n);
    const double diff = std::abs(cur.value - prev.value);
    // the 1e-15 * |integral| floor keeps exact-zero integrals (odd
    // integrands) from spinning on an unreachable relative target
    if (diff <= spec.rel_tol * std::abs(cur.value) + 1e-15 * cur.abs_value)
      return cur.value;
    prev = cur;
  }
  throw NonConvergenceError("integrate: panel cap reached before rel_tol");
}

double find_root(const std::function<double(double)>& f, const RootBracket& bracket) {
  bracket.validate();
  double lo = bracket.lo, hi = bracket.hi;
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("find_root: no sign change across bracket");
  for (int i = 0; i < kMaxBisectIter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= bracket.abs_tol) return mid;
    if (mid == lo || mid == hi) return mid;  // interval at floating-point resolution
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  throw NonConvergenceError("find_root: iteration cap reached");
}

}  // namespace covertkit::numerics

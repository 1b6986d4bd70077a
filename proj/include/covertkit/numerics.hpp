#pragma once

#include <functional>
#include <stdexcept>

namespace covertkit::numerics {

/// Raised when an iterative scheme (series, quadrature refinement,
/// bisection) fails to meet its tolerance within its budget.
struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Composite-Simpson control: [lower, upper] with `panels` subdivisions,
/// refined by panel doubling until successive estimates agree to rel_tol.
struct QuadratureSpec {
  double lower;
  double upper;
  int panels = 64;
  double rel_tol = 1e-10;

  void validate() const;
};

/// Bisection bracket; the function must change sign across [lo, hi].
struct RootBracket {
  double lo;
  double hi;
  double abs_tol = 1e-12;

  void validate() const;
};

/// Truncation policy for infinite series: stop once |term| drops below
/// term_rel_tol * |partial sum|, fail past max_terms.
struct SeriesControl {
  int max_terms = 500;
  double term_rel_tol = 1e-14;

  void validate() const;
};

/// Error function, odd, range (-1, 1).
double erf(double x);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
/// Series expansion for x < a + 1, Lentz continued fraction otherwise.
/// Throws std::domain_error for a <= 0 or x < 0.
double lower_incomplete_gamma_regularized(double a, double x);

/// Kummer confluent hypergeometric 1F1(a, b, z) by term recurrence
/// t_{k+1} = t_k (a+k) z / ((b+k)(k+1)) with compensated summation.
/// For z < 0 and z > 30 the Kummer transformation
/// 1F1(a,b,z) = e^z 1F1(b-a, b, -z) is applied; the negative-z direct
/// series alternates and cancels, and for the large-z cases arising here
/// the transformed side truncates to a short positive polynomial.
/// Throws std::domain_error when b is a non-positive integer and
/// NonConvergenceError when the term floor is not reached.
double kummer_1f1(double a, double b, double z, const SeriesControl& ctrl = {});

/// Composite Simpson over [lower, upper], panel count doubled until
/// successive estimates differ by less than rel_tol relatively (with a
/// roundoff floor tied to the integral of |f|). Hard cap 2^20 panels.
double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec);

/// Bisection root of f on the bracket. Throws std::invalid_argument when
/// the endpoints do not straddle a sign change.
double find_root(const std::function<double(double)>& f, const RootBracket& bracket);

}  // namespace covertkit::numerics

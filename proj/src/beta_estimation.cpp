#include "ttm/beta_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ttm/errors.hpp"
#include "ttm/special.hpp"

namespace ttm {

bool logstats_feasible(double l1, double l2) {
  if (!std::isfinite(l1) || !std::isfinite(l2)) return false;
  if (!(l1 < 0.0) || !(l2 < 0.0)) return false;
  return std::exp(l1) + std::exp(l2) < 1.0 - kFeasEps;
}

namespace detail {

BetaParams solve_beta_from_logstats_eps(double l1, double l2, double feas_eps) {
  if (!std::isfinite(l1) || !std::isfinite(l2) || !(l1 < 0.0) || !(l2 < 0.0)) {
    throw InfeasibleStats("solve_beta_from_logstats: log-statistics must be finite negatives");
  }
  const double p = std::exp(l1);
  const double q = std::exp(l2);
  if (!(p + q < 1.0 - feas_eps)) {
    throw InfeasibleStats("solve_beta_from_logstats: exp(l1)+exp(l2) = " +
                          std::to_string(p + q) + " is outside the solvable region");
  }

  // Method-of-moments style initialization on pseudo-data: treat p, q as the
  // expected fractions and 1-p-q as the residual spread.
  const double spread = 1.0 - p - q;
  double r1 = 0.5 + p / (2.0 * spread);
  double r2 = 0.5 + q / (2.0 * spread);

  auto residual = [&](double a, double b, double* f1, double* f2) {
    const double ds = digamma(a + b);
    *f1 = digamma(a) - ds - l1;
    *f2 = digamma(b) - ds - l2;
    return std::max(std::abs(*f1), std::abs(*f2));
  };

  double f1 = 0.0, f2 = 0.0;
  double err = residual(r1, r2, &f1, &f2);
  for (int iter = 0; iter < 200 && err >= 1e-10; ++iter) {
    const double ts = trigamma(r1 + r2);
    const double j11 = trigamma(r1) - ts;
    const double j22 = trigamma(r2) - ts;
    const double j12 = -ts;  // == j21
    const double det = j11 * j22 - j12 * j12;
    if (!(std::abs(det) > 0.0)) {
      throw Error(ErrorCategory::numeric, "solve_beta_from_logstats: singular Jacobian");
    }
    double d1 = (f1 * j22 - f2 * j12) / det;
    double d2 = (f2 * j11 - f1 * j12) / det;

    // Damped update: halve the step until the iterate stays positive and the
    // residual does not increase.
    double step = 1.0;
    double n1 = r1, n2 = r2, nf1 = f1, nf2 = f2, nerr = err;
    for (int halving = 0; halving < 60; ++halving) {
      n1 = r1 - step * d1;
      n2 = r2 - step * d2;
      if (n1 > 0.0 && n2 > 0.0) {
        nerr = residual(n1, n2, &nf1, &nf2);
        if (nerr < err) break;
      }
      step *= 0.5;
    }
    r1 = n1;
    r2 = n2;
    f1 = nf1;
    f2 = nf2;
    err = nerr;
  }
  if (!(err < 1e-10)) {
    throw Error(ErrorCategory::numeric,
                "solve_beta_from_logstats: Newton failed to reach residual 1e-10");
  }
  return {r1, r2};
}

}  // namespace detail

BetaParams solve_beta_from_logstats(double l1, double l2) {
  return detail::solve_beta_from_logstats_eps(l1, l2, kFeasEps);
}

}  // namespace ttm

// Estimation of Beta-distribution parameters rho = (rho1, rho2) from
// log-sufficient-statistics l = (<log t>, <log(1-t)>).
//
// The stationarity conditions of the per-topic time likelihood are
//     Psi(rho1) - Psi(rho1 + rho2) = l1
//     Psi(rho2) - Psi(rho1 + rho2) = l2,
// a 2-variable digamma system solved here by damped Newton. The gradient map
// of the Beta exponential family has range exactly
//     { l : exp(l1) + exp(l2) < 1 },
// so statistics outside that set (which arise from degenerate timestamp
// configurations, e.g. a mini-batch sharing one timestamp) are structurally
// unsolvable: that is the instability signal the Bayesian models regularize
// away, reported as InfeasibleStats.
#pragma once

#include <utility>

namespace ttm {

// Parameters of a Beta distribution over (0,1); both components positive.
struct BetaParams {
  double rho1 = 1.0;
  double rho2 = 1.0;
};

// Per-topic time sufficient statistics: a weighted count n = N_k >= 0 and the
// weighted averages l = (<log t>_k, <log(1-t)>_k). For n == 0 the averages
// are meaningless and ignored by consumers.
struct TimeSuffStats {
  double n = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;

  // Builds averaged statistics from weighted sums s_i = sum w * log-term.
  static TimeSuffStats from_sums(double n, double s1, double s2) {
    if (n > 0.0) return {n, s1 / n, s2 / n};
    return {0.0, 0.0, 0.0};
  }
};

// Strictly positive feasibility slack: statistics with exp(l1)+exp(l2) within
// kFeasEps of 1 are rejected so near-degenerate inputs fail fast instead of
// producing astronomically large rho.
inline constexpr double kFeasEps = 1e-8;

// True iff l lies in the solvable region with the kFeasEps slack.
bool logstats_feasible(double l1, double l2);

// Solves the digamma system above to residual max-norm < 1e-10
// (damped Newton, method-of-moments initialization, at most 200 iterations).
// Throws InfeasibleStats when the statistics are not feasible.
BetaParams solve_beta_from_logstats(double l1, double l2);

namespace detail {
// Same solver with a caller-chosen feasibility slack. Used by the regularized
// path, whose blended statistics are strictly feasible by construction but
// may sit closer to the boundary than kFeasEps allows.
BetaParams solve_beta_from_logstats_eps(double l1, double l2, double feas_eps);
}  // namespace detail

}  // namespace ttm

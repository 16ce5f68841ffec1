// The conjugate prior of the Beta distribution and its numerics.
//
// The density over rho = (rho1, rho2) in (0,inf)^2 is
//     p(rho | nu, chi) = f(nu, chi) * exp[ nu * (rho . chi - log B(rho)) ],
// which is normalizable iff nu > 0 and exp(chi1) + exp(chi2) < 1. Posteriors
// under Beta observations stay in the family with parameters (mu, psi):
// mu accumulates weighted counts on top of nu and psi is the weighted average
// of log-statistics and chi. The loop-bearing quantities are the moments
// <rho>, <log B(rho)> and the log-normalization
//     log_norm = log integral exp[ mu (rho . psi - log B(rho)) ] d^2 rho
//              = -log f(mu, psi),
// computed either by a leading-order Laplace expansion around the mode rho0
// of omega(rho) = rho . psi - log B(rho) (O(1/mu) relative error) or by a
// mode-centered tensor Gauss-Legendre quadrature in log-coordinates
// (relative error < 1e-6, used as the oracle in tests).
#pragma once

#include <utility>

#include "ttm/beta_estimation.hpp"

namespace ttm {

// Hyperprior (nu, chi) of the Beta-prior family.
struct BetaPriorParams {
  double nu = 0.0;
  double chi1 = 0.0;
  double chi2 = 0.0;
};

// Variational per-topic posterior (mu_k, psi_k) in the same family.
struct BetaPriorPosterior {
  double mu = 0.0;
  double psi1 = 0.0;
  double psi2 = 0.0;
};

// Output of the Laplace expansion around the mode rho0.
struct LaplaceResult {
  BetaParams mode;          // rho0, stationary point of omega (residual < 1e-10)
  double log_b_at_mode;     // log B(rho0)
  double log_norm;          // mu*omega(rho0) + log(2*pi) - log(mu) - 0.5*log|det omega_ij|
  double hessian_logdet;    // log |det omega_ij| at rho0
};

// Moment bundle consumed by the inference loops.
struct Moments {
  double rho1 = 1.0;       // <rho1>
  double rho2 = 1.0;       // <rho2>
  double log_b = 0.0;      // <log B(rho)>
  double log_norm = 0.0;   // log of the normalization integral (= -log f)
};

enum class MomentMethod { laplace, quadrature };

// True iff the density is integrable: nu > 0 and exp(chi1)+exp(chi2) < 1.
bool check_beta_prior_integrable(const BetaPriorParams& p);

// Leading-order Laplace expansion at (mu, psi). Requires mu > 0 and feasible
// psi (DomainError otherwise). Accuracy in the moments is O(1/mu) relative;
// mu >= 1 recommended.
LaplaceResult laplace_expansion(const BetaPriorPosterior& post);

// Options for the quadrature oracle. Panels per axis double until successive
// estimates of all four integrals agree to rel_tol; exceeding max_doublings
// raises QuadratureFailure.
struct QuadratureOptions {
  double rel_tol = 1e-6;
  int max_doublings = 8;
  double tail_drop = 60.0;  // integration bounds: log-integrand falls this far below the mode
};

// Moments by 2D numerical integration. Requires mu > 0 and feasible psi.
Moments quadrature_moments(const BetaPriorPosterior& post,
                           const QuadratureOptions& opts = {});

// Uniform entry point used by the models.
Moments beta_prior_moments(const BetaPriorPosterior& post, MomentMethod method);

// Regularized Beta-parameter estimate: solves the digamma system on the
// blended statistics (N_k l_k + nu chi) / (N_k + nu). The blend is strictly
// feasible whenever the prior is integrable and l is a genuine log-moment
// pair (exp(l1)+exp(l2) <= 1 by Jensen), so this never raises
// InfeasibleStats; the prior itself is validated (DomainError if not
// integrable).
BetaParams rho_regularized(const TimeSuffStats& stats, const BetaPriorParams& prior);

}  // namespace ttm

// Variational Bayes LDA (batch and online) and classic variational ToT.
//
// Mean-field family: q(theta_d) = Dir(gamma_d), q(z_dw) = Mult(phi_dw.),
// q(beta_k) = Dir(lambda_k.). The document E-step alternates
//   log phi_dwk  =  <log beta_kw> + Psi(gamma_dk) + timeterm_k + const
//   gamma_dk     =  alpha_k + sum_w n_dw phi_dwk
// where timeterm_k is zero for LDA and log Beta(t_d; rho_k) for ToT. phi is
// normalized in log space (max subtraction): the time term is O(rho) and
// would overflow a naive exponentiation.
//
// The online M-step is the standard stochastic natural-gradient blend
//   lambda_{t+1} = (1 - rho_t) lambda_t + rho_t (eta + (D/S) batch_stats),
// with mixing rate rho_t = (t + tau)^{-kappa}.
//
// ToT has no stable online variant; tot_online_m_step_naive recomputes rho
// from blended mini-batch log-statistics and reports divergence (infeasible
// stats or components beyond kRhoCap) as data instead of throwing. That
// failure mode is the instability the Bayesian models are built to remove.
#pragma once

#include <string>
#include <vector>

#include "ttm/beta_estimation.hpp"
#include "ttm/corpus.hpp"

namespace ttm {

struct DirichletHyper {
  std::vector<double> alpha;  // length K, document-topic prior
  double eta = 0.01;          // symmetric scalar topic-word prior
};

struct DocPosterior {
  std::vector<double> gamma;  // length K
  std::vector<double> phi;    // U x K row-major over the doc's unique words
  int iterations_used = 0;    // == max_iter signals non-convergence
};

struct OnlineConfig {
  int S = 1;         // mini-batch size
  double tau = 0.0;  // delay >= 0
  double kappa = 1.0;  // forgetting rate, must lie in [0.5, 1]
  int D_total = 1;   // assumed corpus size D
};

// rho_t = (t + tau)^{-kappa}; kappa outside (0.5, 1] -> ConfigError.
double mixing_rate(int t, const OnlineConfig& cfg);

// <log beta_kw> = Psi(lambda_kw) - Psi(sum_w lambda_kw), K x V row-major.
std::vector<double> expected_log_beta_from_lambda(const std::vector<double>& lambda,
                                                  int K, int V);

// Shared phi/gamma alternation; time_term is a per-topic additive offset in
// log phi (length K). Stops when (1/K) sum_k |delta gamma_k| < tol.
DocPosterior e_step_core(const Document& doc,
                         const std::vector<double>& expected_log_beta, int V,
                         const std::vector<double>& alpha,
                         const std::vector<double>& time_term, double tol,
                         int max_iter);

DocPosterior lda_e_step(const Document& doc,
                        const std::vector<double>& expected_log_beta, int V,
                        const std::vector<double>& alpha, double tol = 1e-3,
                        int max_iter = 100);

// Per-topic additive time terms log Beta(t; rho_k) for the ToT E-step.
std::vector<double> tot_time_terms(const std::vector<BetaParams>& rho, double t);

DocPosterior tot_e_step(const Document& doc,
                        const std::vector<double>& expected_log_beta, int V,
                        const std::vector<double>& alpha,
                        const std::vector<BetaParams>& rho, double tol = 1e-3,
                        int max_iter = 100);

// lambda_kw = eta + stats_kw (stats: K x V accumulated sum_d n_dw phi_dwk).
std::vector<double> lda_m_step_batch(const std::vector<double>& suffstats, int K,
                                     int V, double eta);

// (1 - rho_t) lambda_t + rho_t (eta + (D/S) batch_stats), elementwise.
std::vector<double> lda_m_step_online(const std::vector<double>& lambda_t,
                                      const std::vector<double>& batch_stats,
                                      int K, int V, double eta, double rho_t,
                                      const OnlineConfig& cfg);

// Per-topic maximum-likelihood Beta fit; InfeasibleStats annotated with the
// topic index.
std::vector<BetaParams> tot_m_step(const std::vector<TimeSuffStats>& stats);

// Divergence threshold for the naive online ToT demonstration.
inline constexpr double kRhoCap = 1e6;

struct NaiveTotFailure {
  int topic = -1;
  std::string reason;
};

struct NaiveTotResult {
  bool ok = true;
  std::vector<BetaParams> rho;  // per topic; meaningful where no failure
  std::vector<NaiveTotFailure> failures;
};

// Blends per-topic log-statistics (weight rho_mix on the mini-batch) and
// refits rho from them alone. Infeasible stats and rho components beyond
// kRhoCap are returned as failure records, never thrown.
NaiveTotResult tot_online_m_step_naive(const std::vector<BetaParams>& rho_t,
                                       const std::vector<TimeSuffStats>& batch,
                                       double rho_mix);

// Standard VB LDA bound. Document part:
//   sum_w n_dw sum_k phi[<log beta> + <log theta> - log phi]
//   + E[log p(theta|alpha)] - E[log q(theta)]
// Topic part (corpus level): E[log p(beta|eta)] - E[log q(beta)].
double lda_elbo_doc(const Document& doc, const DocPosterior& post,
                    const std::vector<double>& expected_log_beta, int V,
                    const std::vector<double>& alpha);
double lda_topics_elbo(const std::vector<double>& lambda, int K, int V, double eta);
double lda_elbo(const Corpus& corpus, const std::vector<DocPosterior>& posts,
                const std::vector<double>& lambda, const DirichletHyper& hyper);

// Digamma fixed-point updates for alpha (asymmetric vector) and eta
// (symmetric scalar); components are floored at 1e-6.
DirichletHyper update_dirichlet_hyperparams(const DirichletHyper& current,
                                            const std::vector<DocPosterior>& posteriors,
                                            const std::vector<double>& lambda,
                                            int K, int V,
                                            bool update_alpha = true,
                                            bool update_eta = true);

}  // namespace ttm

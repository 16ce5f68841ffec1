// Fully Bayesian Topics-over-Time: BToT and its weighted variant WBToT.
//
// Both models place the conjugate Beta-prior p(rho | nu, chi) over each
// topic's Beta time density and keep a variational posterior q(rho_k) of the
// same family with parameters (mu_k, psi_k). Document updates use posterior
// moments <rho_k> and <log B(rho_k)> instead of point estimates:
//
//   BToT   log phi_dwk += (<rho1>-1) log t_d + (<rho2>-1) log(1-t_d) - <log B>
//   WBToT  phi is pure LDA; a separate multinomial eps_dk carries the time
//          modality with weight ny_d:
//            eps_dk  propto exp[ Psi(gamma_dk) + (<rho1>-1) log t_d
//                                + (<rho2>-1) log(1-t_d) - <log B> ]
//            gamma_dk = alpha_k + sum_w n_dw phi_dwk + ny_d eps_dk
//
// M-steps are conjugate averages in natural coordinates (mu, mu psi):
//   batch   mu_k = nu + N_k,  psi_k = (N_k l_k + nu chi) / mu_k
//   online  convex blend with weight rho_t toward nu + (D/S) * batch sums.
// The blend keeps exp(psi1)+exp(psi2) below the generalized-Hoelder bound
// (exp(chi1)+exp(chi2))^(nu/mu) < 1, which is what tames the divergence the
// naive online ToT update suffers on time-degenerate mini-batches.
#pragma once

#include <vector>

#include "ttm/baselines.hpp"
#include "ttm/beta_prior.hpp"

namespace ttm {

enum class NySchemeKind { constant, fraction, sqrt_len };

// Weight of the time modality per document: constant c, delta * N_d, or
// sqrt(N_d). Real-valued by design; it only ever multiplies statistics.
struct NyScheme {
  NySchemeKind kind = NySchemeKind::sqrt_len;
  double value = 1.0;  // c for constant, delta for fraction; unused for sqrt
};

double ny_weight(int n_d, const NyScheme& scheme);

struct WbtotDocPosterior : DocPosterior {
  std::vector<double> epsilon;  // length K, sums to 1
};

// Per-topic additive log-phi offsets from cached moments; delta scales the
// whole term (1 = plain model).
std::vector<double> btot_time_terms(const std::vector<Moments>& moments, double t,
                                    double delta = 1.0);

DocPosterior btot_e_step(const Document& doc,
                         const std::vector<double>& expected_log_beta, int V,
                         const std::vector<double>& alpha,
                         const std::vector<Moments>& moments, double tol = 1e-3,
                         int max_iter = 100, double delta = 1.0);

WbtotDocPosterior wbtot_e_step(const Document& doc,
                               const std::vector<double>& expected_log_beta,
                               int V, const std::vector<double>& alpha,
                               const std::vector<Moments>& moments, double ny,
                               double tol = 1e-3, int max_iter = 100);

// N_dk = sum_w n_dw phi_dwk for one document.
std::vector<double> doc_topic_mass(const Document& doc, const DocPosterior& post,
                                   int k);

// Generalized Hoelder bound check; throws DomainError when violated.
bool holder_bound_ok(const BetaPriorPosterior& post, const BetaPriorParams& prior);
void assert_holder_bound(const std::vector<BetaPriorPosterior>& posts,
                         const BetaPriorParams& prior);

// delta-variant stat transform: n -> delta * n, averages untouched.
std::vector<TimeSuffStats> btot_delta_variant(std::vector<TimeSuffStats> stats,
                                              double delta);

// Batch conjugate update; stats[k] holds N_k and averaged log-timestamps.
std::vector<BetaPriorPosterior> btot_m_step_batch(
    const std::vector<TimeSuffStats>& stats, const BetaPriorParams& prior,
    double delta = 1.0);
std::vector<BetaPriorPosterior> wbtot_m_step_batch(
    const std::vector<TimeSuffStats>& stats, const BetaPriorParams& prior);

// Online update in natural coordinates. batch[k] carries mini-batch sums via
// averaged form: contribution is (D/S) * (n, n*l1, n*l2).
std::vector<BetaPriorPosterior> btot_m_step_online(
    const std::vector<BetaPriorPosterior>& current,
    const std::vector<TimeSuffStats>& batch, const BetaPriorParams& prior,
    double rho_t, const OnlineConfig& cfg, double delta = 1.0);
std::vector<BetaPriorPosterior> wbtot_m_step_online(
    const std::vector<BetaPriorPosterior>& current,
    const std::vector<TimeSuffStats>& batch, const BetaPriorParams& prior,
    double rho_t, const OnlineConfig& cfg);

// Moments for every topic under one method.
std::vector<Moments> topic_moments(const std::vector<BetaPriorPosterior>& posts,
                                   MomentMethod method);

// E[log p(rho)] - E[log q(rho)] summed over topics:
//   <rho> . (nu chi - mu psi) + <log B>(mu - nu)
//   + log_norm(mu, psi) - log_norm(nu, chi)
// prior_log_norm = log_norm(nu, chi), computed once per run.
double rho_prior_minus_entropy(const std::vector<BetaPriorPosterior>& posts,
                               const std::vector<Moments>& moments,
                               const BetaPriorParams& prior,
                               double prior_log_norm);

// Full bounds. include_rho_block toggles the rho prior/entropy block (the
// document time terms always count). delta scales BToT time terms.
double btot_elbo(const Corpus& corpus, const std::vector<DocPosterior>& posts,
                 const std::vector<double>& lambda, const DirichletHyper& hyper,
                 const std::vector<Moments>& moments,
                 const std::vector<BetaPriorPosterior>& rho_posts,
                 const BetaPriorParams& prior, double prior_log_norm,
                 double delta = 1.0, bool include_rho_block = true);
double wbtot_elbo(const Corpus& corpus,
                  const std::vector<WbtotDocPosterior>& posts,
                  const std::vector<double>& ny,  // per document
                  const std::vector<double>& lambda, const DirichletHyper& hyper,
                  const std::vector<Moments>& moments,
                  const std::vector<BetaPriorPosterior>& rho_posts,
                  const BetaPriorParams& prior, double prior_log_norm,
                  bool include_rho_block = true);

}  // namespace ttm

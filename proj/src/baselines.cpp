#include "ttm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ttm/dirichlet.hpp"
#include "ttm/errors.hpp"
#include "ttm/special.hpp"

namespace ttm {

double mixing_rate(int t, const OnlineConfig& cfg) {
  // kappa = 0.5 itself is accepted: it is the classical boundary of the
  // step-size condition and a useful extreme in experiments.
  if (!(cfg.kappa >= 0.5) || !(cfg.kappa <= 1.0))
    throw ConfigError("kappa must lie in [0.5, 1]");
  if (cfg.tau < 0.0) throw ConfigError("tau must be >= 0");
  if (t < 1) throw ConfigError("online step index starts at 1");
  return std::pow(static_cast<double>(t) + cfg.tau, -cfg.kappa);
}

std::vector<double> expected_log_beta_from_lambda(const std::vector<double>& lambda,
                                                  int K, int V) {
  if (static_cast<int>(lambda.size()) != K * V)
    throw DomainError("expected_log_beta_from_lambda: size mismatch");
  std::vector<double> elb(lambda.size());
  for (int k = 0; k < K; ++k) {
    double row_sum = 0.0;
    for (int w = 0; w < V; ++w) row_sum += lambda[k * V + w];
    const double psi_sum = digamma(row_sum);
    for (int w = 0; w < V; ++w)
      elb[k * V + w] = digamma(lambda[k * V + w]) - psi_sum;
  }
  return elb;
}

DocPosterior e_step_core(const Document& doc,
                         const std::vector<double>& expected_log_beta, int V,
                         const std::vector<double>& alpha,
                         const std::vector<double>& time_term, double tol,
                         int max_iter) {
  const int K = static_cast<int>(alpha.size());
  const int U = static_cast<int>(doc.counts.size());
  if (U == 0) throw DomainError("e_step_core: empty document");
  if (static_cast<int>(time_term.size()) != K)
    throw DomainError("e_step_core: time_term length mismatch");

  DocPosterior post;
  post.gamma.resize(K);
  post.phi.assign(static_cast<std::size_t>(U) * K, 0.0);
  for (int k = 0; k < K; ++k)
    post.gamma[k] = alpha[k] + static_cast<double>(doc.total_tokens) / K;

  std::vector<double> dig(K), gnew(K), lp(K);
  for (int iter = 1; iter <= max_iter; ++iter) {
    for (int k = 0; k < K; ++k)
      dig[k] = digamma(post.gamma[k]) + time_term[k];
    for (int k = 0; k < K; ++k) gnew[k] = alpha[k];

    for (int u = 0; u < U; ++u) {
      const int w = doc.counts[u].first;
      const double n = doc.counts[u].second;
      double mx = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        lp[k] = expected_log_beta[static_cast<std::size_t>(k) * V + w] + dig[k];
        mx = std::max(mx, lp[k]);
      }
      double z = 0.0;
      for (int k = 0; k < K; ++k) {
        lp[k] = std::exp(lp[k] - mx);
        z += lp[k];
      }
      for (int k = 0; k < K; ++k) {
        const double phi = lp[k] / z;
        post.phi[static_cast<std::size_t>(u) * K + k] = phi;
        gnew[k] += n * phi;
      }
    }

    double diff = 0.0;
    for (int k = 0; k < K; ++k) diff += std::abs(gnew[k] - post.gamma[k]);
    post.gamma = gnew;
    post.iterations_used = iter;
    if (diff / K < tol) break;
  }
  return post;
}

DocPosterior lda_e_step(const Document& doc,
                        const std::vector<double>& expected_log_beta, int V,
                        const std::vector<double>& alpha, double tol,
                        int max_iter) {
  const std::vector<double> zero(alpha.size(), 0.0);
  return e_step_core(doc, expected_log_beta, V, alpha, zero, tol, max_iter);
}

std::vector<double> tot_time_terms(const std::vector<BetaParams>& rho, double t) {
  std::vector<double> terms(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k)
    terms[k] = beta_log_pdf(t, rho[k].rho1, rho[k].rho2);
  return terms;
}

DocPosterior tot_e_step(const Document& doc,
                        const std::vector<double>& expected_log_beta, int V,
                        const std::vector<double>& alpha,
                        const std::vector<BetaParams>& rho, double tol,
                        int max_iter) {
  if (rho.size() != alpha.size())
    throw DomainError("tot_e_step: rho length mismatch");
  return e_step_core(doc, expected_log_beta, V, alpha,
                     tot_time_terms(rho, doc.t), tol, max_iter);
}

std::vector<double> lda_m_step_batch(const std::vector<double>& suffstats, int K,
                                     int V, double eta) {
  if (static_cast<int>(suffstats.size()) != K * V)
    throw DomainError("lda_m_step_batch: size mismatch");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  std::vector<double> lambda(suffstats.size());
  for (std::size_t i = 0; i < suffstats.size(); ++i) {
    if (suffstats[i] < 0.0) throw DomainError("lda_m_step_batch: negative stats");
    lambda[i] = eta + suffstats[i];
  }
  return lambda;
}

std::vector<double> lda_m_step_online(const std::vector<double>& lambda_t,
                                      const std::vector<double>& batch_stats,
                                      int K, int V, double eta, double rho_t,
                                      const OnlineConfig& cfg) {
  if (static_cast<int>(lambda_t.size()) != K * V ||
      batch_stats.size() != lambda_t.size())
    throw DomainError("lda_m_step_online: size mismatch");
  if (!(rho_t > 0.0) || rho_t > 1.0)
    throw DomainError("lda_m_step_online: rho_t outside (0, 1]");
  const double scale = static_cast<double>(cfg.D_total) / cfg.S;
  std::vector<double> next(lambda_t.size());
  for (std::size_t i = 0; i < next.size(); ++i)
    next[i] = (1.0 - rho_t) * lambda_t[i] + rho_t * (eta + scale * batch_stats[i]);
  return next;
}

std::vector<BetaParams> tot_m_step(const std::vector<TimeSuffStats>& stats) {
  std::vector<BetaParams> rho(stats.size());
  for (std::size_t k = 0; k < stats.size(); ++k) {
    if (!(stats[k].n > 0.0))
      throw InfeasibleStats("topic " + std::to_string(k) +
                            ": no time mass accumulated");
    try {
      rho[k] = solve_beta_from_logstats(stats[k].l1, stats[k].l2);
    } catch (const InfeasibleStats& e) {
      throw InfeasibleStats("topic " + std::to_string(k) + ": " + e.what());
    }
  }
  return rho;
}

NaiveTotResult tot_online_m_step_naive(const std::vector<BetaParams>& rho_t,
                                       const std::vector<TimeSuffStats>& batch,
                                       double rho_mix) {
  if (rho_t.size() != batch.size())
    throw DomainError("tot_online_m_step_naive: size mismatch");
  if (!(rho_mix > 0.0) || rho_mix > 1.0)
    throw DomainError("tot_online_m_step_naive: rho_mix outside (0, 1]");

  NaiveTotResult result;
  result.rho = rho_t;  // failed topics keep their previous value
  for (std::size_t k = 0; k < batch.size(); ++k) {
    if (!(batch[k].n > 0.0)) {
      result.failures.push_back(
          {static_cast<int>(k), "no time mass in mini-batch"});
      continue;
    }
    // Old log-statistics implied by the current fit: the ML equations give
    // l_i = Psi(rho_i) - Psi(rho_1 + rho_2) at the fixed point.
    const double s = rho_t[k].rho1 + rho_t[k].rho2;
    const double psi_s = digamma(s);
    const double l1 = (1.0 - rho_mix) * (digamma(rho_t[k].rho1) - psi_s) +
                      rho_mix * batch[k].l1;
    const double l2 = (1.0 - rho_mix) * (digamma(rho_t[k].rho2) - psi_s) +
                      rho_mix * batch[k].l2;
    try {
      const BetaParams fit = solve_beta_from_logstats(l1, l2);
      if (fit.rho1 > kRhoCap || fit.rho2 > kRhoCap) {
        std::ostringstream msg;
        msg << "rho (" << fit.rho1 << ", " << fit.rho2 << ") exceeds cap "
            << kRhoCap;
        result.failures.push_back({static_cast<int>(k), msg.str()});
        result.rho[k] = fit;  // keep the diverged value for reporting
      } else {
        result.rho[k] = fit;
      }
    } catch (const Error& e) {
      result.failures.push_back({static_cast<int>(k), e.what()});
    }
  }
  result.ok = result.failures.empty();
  return result;
}

double lda_elbo_doc(const Document& doc, const DocPosterior& post,
                    const std::vector<double>& expected_log_beta, int V,
                    const std::vector<double>& alpha) {
  const int K = static_cast<int>(alpha.size());
  const int U = static_cast<int>(doc.counts.size());

  double gamma_sum = 0.0;
  for (double g : post.gamma) gamma_sum += g;
  const double psi_gsum = digamma(gamma_sum);
  std::vector<double> elog_theta(K);
  for (int k = 0; k < K; ++k)
    elog_theta[k] = digamma(post.gamma[k]) - psi_gsum;

  double elbo = 0.0;
  // Word and assignment terms plus the q(z) entropy.
  for (int u = 0; u < U; ++u) {
    const int w = doc.counts[u].first;
    const double n = doc.counts[u].second;
    for (int k = 0; k < K; ++k) {
      const double phi = post.phi[static_cast<std::size_t>(u) * K + k];
      if (phi <= 0.0) continue;  // x log x -> 0
      elbo += n * phi *
              (expected_log_beta[static_cast<std::size_t>(k) * V + w] +
               elog_theta[k] - std::log(phi));
    }
  }
  // E[log p(theta | alpha)] - E[log q(theta)].
  double alpha_sum = 0.0;
  for (double a : alpha) alpha_sum += a;
  elbo += std::lgamma(alpha_sum) - std::lgamma(gamma_sum);
  for (int k = 0; k < K; ++k) {
    elbo += -std::lgamma(alpha[k]) + std::lgamma(post.gamma[k]) +
            (alpha[k] - post.gamma[k]) * elog_theta[k];
  }
  return elbo;
}

double lda_topics_elbo(const std::vector<double>& lambda, int K, int V,
                       double eta) {
  double elbo = 0.0;
  for (int k = 0; k < K; ++k) {
    double row_sum = 0.0;
    for (int w = 0; w < V; ++w) row_sum += lambda[static_cast<std::size_t>(k) * V + w];
    const double psi_sum = digamma(row_sum);
    elbo += std::lgamma(V * eta) - V * std::lgamma(eta) - std::lgamma(row_sum);
    for (int w = 0; w < V; ++w) {
      const double lam = lambda[static_cast<std::size_t>(k) * V + w];
      elbo += std::lgamma(lam) + (eta - lam) * (digamma(lam) - psi_sum);
    }
  }
  return elbo;
}

double lda_elbo(const Corpus& corpus, const std::vector<DocPosterior>& posts,
                const std::vector<double>& lambda, const DirichletHyper& hyper) {
  const int K = static_cast<int>(hyper.alpha.size());
  const int V = corpus.V;
  if (posts.size() != corpus.docs.size())
    throw DomainError("lda_elbo: posterior/document count mismatch");
  const std::vector<double> elb = expected_log_beta_from_lambda(lambda, K, V);
  double elbo = lda_topics_elbo(lambda, K, V, hyper.eta);
  for (std::size_t d = 0; d < corpus.docs.size(); ++d)
    elbo += lda_elbo_doc(corpus.docs[d], posts[d], elb, V, hyper.alpha);
  return elbo;
}

DirichletHyper update_dirichlet_hyperparams(const DirichletHyper& current,
                                            const std::vector<DocPosterior>& posteriors,
                                            const std::vector<double>& lambda,
                                            int K, int V, bool update_alpha,
                                            bool update_eta) {
  DirichletHyper next = current;
  if (update_alpha && !posteriors.empty()) {
    std::vector<double> mean_log_theta(K, 0.0);
    for (const DocPosterior& post : posteriors) {
      double gsum = 0.0;
      for (double g : post.gamma) gsum += g;
      const double psi_gsum = digamma(gsum);
      for (int k = 0; k < K; ++k)
        mean_log_theta[k] += digamma(post.gamma[k]) - psi_gsum;
    }
    for (double& v : mean_log_theta) v /= static_cast<double>(posteriors.size());
    next.alpha = dirichlet_mle_fixed_point(mean_log_theta, current.alpha);
  }
  if (update_eta) {
    double mean_log_beta = 0.0;
    for (int k = 0; k < K; ++k) {
      double row_sum = 0.0;
      for (int w = 0; w < V; ++w) row_sum += lambda[static_cast<std::size_t>(k) * V + w];
      const double psi_sum = digamma(row_sum);
      for (int w = 0; w < V; ++w)
        mean_log_beta += digamma(lambda[static_cast<std::size_t>(k) * V + w]) - psi_sum;
    }
    mean_log_beta /= static_cast<double>(K) * V;
    next.eta = dirichlet_mle_symmetric(mean_log_beta, V, current.eta);
  }
  return next;
}

}  // namespace ttm

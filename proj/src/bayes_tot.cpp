#include "ttm/bayes_tot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ttm/errors.hpp"
#include "ttm/special.hpp"

namespace ttm {

double ny_weight(int n_d, const NyScheme& scheme) {
  if (n_d < 1) throw DomainError("ny_weight: document length must be >= 1");
  double ny = 0.0;
  switch (scheme.kind) {
    case NySchemeKind::constant: ny = scheme.value; break;
    case NySchemeKind::fraction: ny = scheme.value * n_d; break;
    case NySchemeKind::sqrt_len: ny = std::sqrt(static_cast<double>(n_d)); break;
  }
  if (!(ny > 0.0) || !std::isfinite(ny))
    throw ConfigError("ny scheme yields a nonpositive time weight");
  return ny;
}

std::vector<double> btot_time_terms(const std::vector<Moments>& moments, double t,
                                    double delta) {
  if (!(t > 0.0) || !(t < 1.0))
    throw DomainError("btot_time_terms: t outside (0,1)");
  std::vector<double> terms(moments.size());
  const double lt = std::log(t);
  const double lt1 = std::log1p(-t);
  for (std::size_t k = 0; k < moments.size(); ++k) {
    const Moments& m = moments[k];
    terms[k] = delta * ((m.rho1 - 1.0) * lt + (m.rho2 - 1.0) * lt1 - m.log_b);
  }
  return terms;
}

DocPosterior btot_e_step(const Document& doc,
                         const std::vector<double>& expected_log_beta, int V,
                         const std::vector<double>& alpha,
                         const std::vector<Moments>& moments, double tol,
                         int max_iter, double delta) {
  if (moments.size() != alpha.size())
    throw DomainError("btot_e_step: moments length mismatch");
  return e_step_core(doc, expected_log_beta, V, alpha,
                     btot_time_terms(moments, doc.t, delta), tol, max_iter);
}

WbtotDocPosterior wbtot_e_step(const Document& doc,
                               const std::vector<double>& expected_log_beta,
                               int V, const std::vector<double>& alpha,
                               const std::vector<Moments>& moments, double ny,
                               double tol, int max_iter) {
  const int K = static_cast<int>(alpha.size());
  const int U = static_cast<int>(doc.counts.size());
  if (U == 0) throw DomainError("wbtot_e_step: empty document");
  if (static_cast<int>(moments.size()) != K)
    throw DomainError("wbtot_e_step: moments length mismatch");
  if (!(ny > 0.0)) throw DomainError("wbtot_e_step: ny must be positive");

  const std::vector<double> time_term = btot_time_terms(moments, doc.t, 1.0);

  WbtotDocPosterior post;
  post.gamma.resize(K);
  post.phi.assign(static_cast<std::size_t>(U) * K, 0.0);
  post.epsilon.assign(K, 1.0 / K);
  for (int k = 0; k < K; ++k)
    post.gamma[k] = alpha[k] + (doc.total_tokens + ny) / K;

  std::vector<double> dig(K), gnew(K), lp(K);
  for (int iter = 1; iter <= max_iter; ++iter) {
    for (int k = 0; k < K; ++k) dig[k] = digamma(post.gamma[k]);
    for (int k = 0; k < K; ++k) gnew[k] = alpha[k];

    // phi: pure LDA form.
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

    // eps: one multinomial shared across the ny pseudo-tokens.
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      lp[k] = dig[k] + time_term[k];
      mx = std::max(mx, lp[k]);
    }
    double z = 0.0;
    for (int k = 0; k < K; ++k) {
      lp[k] = std::exp(lp[k] - mx);
      z += lp[k];
    }
    for (int k = 0; k < K; ++k) {
      post.epsilon[k] = lp[k] / z;
      gnew[k] += ny * post.epsilon[k];
    }

    double diff = 0.0;
    for (int k = 0; k < K; ++k) diff += std::abs(gnew[k] - post.gamma[k]);
    post.gamma = gnew;  // exact reconstruction from current phi/eps
    post.iterations_used = iter;
    if (diff / K < tol) break;
  }
  return post;
}

std::vector<double> doc_topic_mass(const Document& doc, const DocPosterior& post,
                                   int k) {
  std::vector<double> mass(k, 0.0);
  for (std::size_t u = 0; u < doc.counts.size(); ++u)
    for (int j = 0; j < k; ++j)
      mass[j] += doc.counts[u].second * post.phi[u * k + j];
  return mass;
}

bool holder_bound_ok(const BetaPriorPosterior& post, const BetaPriorParams& prior) {
  if (!(post.mu > 0.0)) return false;
  const double lhs = std::exp(post.psi1) + std::exp(post.psi2);
  const double base = std::exp(prior.chi1) + std::exp(prior.chi2);
  const double bound = std::pow(base, prior.nu / post.mu);
  // Equality holds exactly for the prior-only posterior (no data); allow it
  // with a hair of arithmetic slack.
  return lhs <= bound * (1.0 + 1e-12);
}

void assert_holder_bound(const std::vector<BetaPriorPosterior>& posts,
                         const BetaPriorParams& prior) {
  for (std::size_t k = 0; k < posts.size(); ++k)
    if (!holder_bound_ok(posts[k], prior))
      throw DomainError("Hoelder bound violated for topic " + std::to_string(k));
}

std::vector<TimeSuffStats> btot_delta_variant(std::vector<TimeSuffStats> stats,
                                              double delta) {
  if (!(delta > 0.0) || delta > 1.0)
    throw ConfigError("delta must lie in (0, 1]");
  for (TimeSuffStats& s : stats) s.n *= delta;
  return stats;
}

std::vector<BetaPriorPosterior> btot_m_step_batch(
    const std::vector<TimeSuffStats>& stats, const BetaPriorParams& prior,
    double delta) {
  if (!check_beta_prior_integrable(prior))
    throw DomainError("btot_m_step_batch: prior is not integrable");
  if (!(delta > 0.0) || delta > 1.0) throw ConfigError("delta must lie in (0, 1]");

  std::vector<BetaPriorPosterior> posts(stats.size());
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const double n = delta * stats[k].n;
    if (n < 0.0) throw DomainError("btot_m_step_batch: negative mass");
    BetaPriorPosterior& p = posts[k];
    p.mu = prior.nu + n;
    p.psi1 = (n * stats[k].l1 + prior.nu * prior.chi1) / p.mu;
    p.psi2 = (n * stats[k].l2 + prior.nu * prior.chi2) / p.mu;
  }
  assert_holder_bound(posts, prior);
  return posts;
}

std::vector<BetaPriorPosterior> wbtot_m_step_batch(
    const std::vector<TimeSuffStats>& stats, const BetaPriorParams& prior) {
  return btot_m_step_batch(stats, prior, 1.0);
}

std::vector<BetaPriorPosterior> btot_m_step_online(
    const std::vector<BetaPriorPosterior>& current,
    const std::vector<TimeSuffStats>& batch, const BetaPriorParams& prior,
    double rho_t, const OnlineConfig& cfg, double delta) {
  if (current.size() != batch.size())
    throw DomainError("btot_m_step_online: size mismatch");
  if (!(rho_t > 0.0) || rho_t > 1.0)
    throw DomainError("btot_m_step_online: rho_t outside (0, 1]");
  if (!(delta > 0.0) || delta > 1.0) throw ConfigError("delta must lie in (0, 1]");

  const double scale = static_cast<double>(cfg.D_total) / cfg.S;
  std::vector<BetaPriorPosterior> next(current.size());
  for (std::size_t k = 0; k < current.size(); ++k) {
    // Natural coordinates (mu, mu psi); the stochastic step is a convex blend.
    const double n = delta * batch[k].n * scale;
    const double mu_target = prior.nu + n;
    const double p1_target = prior.nu * prior.chi1 + n * batch[k].l1;
    const double p2_target = prior.nu * prior.chi2 + n * batch[k].l2;

    const double mu = (1.0 - rho_t) * current[k].mu + rho_t * mu_target;
    const double p1 =
        (1.0 - rho_t) * current[k].mu * current[k].psi1 + rho_t * p1_target;
    const double p2 =
        (1.0 - rho_t) * current[k].mu * current[k].psi2 + rho_t * p2_target;
    next[k] = {mu, p1 / mu, p2 / mu};
  }
  assert_holder_bound(next, prior);
  return next;
}

std::vector<BetaPriorPosterior> wbtot_m_step_online(
    const std::vector<BetaPriorPosterior>& current,
    const std::vector<TimeSuffStats>& batch, const BetaPriorParams& prior,
    double rho_t, const OnlineConfig& cfg) {
  return btot_m_step_online(current, batch, prior, rho_t, cfg, 1.0);
}

std::vector<Moments> topic_moments(const std::vector<BetaPriorPosterior>& posts,
                                   MomentMethod method) {
  std::vector<Moments> moments(posts.size());
  for (std::size_t k = 0; k < posts.size(); ++k)
    moments[k] = beta_prior_moments(posts[k], method);
  return moments;
}

double rho_prior_minus_entropy(const std::vector<BetaPriorPosterior>& posts,
                               const std::vector<Moments>& moments,
                               const BetaPriorParams& prior,
                               double prior_log_norm) {
  if (posts.size() != moments.size())
    throw DomainError("rho_prior_minus_entropy: size mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < posts.size(); ++k) {
    const BetaPriorPosterior& q = posts[k];
    const Moments& m = moments[k];
    total += m.rho1 * (prior.nu * prior.chi1 - q.mu * q.psi1) +
             m.rho2 * (prior.nu * prior.chi2 - q.mu * q.psi2) +
             m.log_b * (q.mu - prior.nu) + (m.log_norm - prior_log_norm);
  }
  return total;
}

double btot_elbo(const Corpus& corpus, const std::vector<DocPosterior>& posts,
                 const std::vector<double>& lambda, const DirichletHyper& hyper,
                 const std::vector<Moments>& moments,
                 const std::vector<BetaPriorPosterior>& rho_posts,
                 const BetaPriorParams& prior, double prior_log_norm,
                 double delta, bool include_rho_block) {
  const int K = static_cast<int>(hyper.alpha.size());
  const int V = corpus.V;
  if (posts.size() != corpus.docs.size())
    throw DomainError("btot_elbo: posterior/document count mismatch");

  const std::vector<double> elb = expected_log_beta_from_lambda(lambda, K, V);
  double elbo = lda_topics_elbo(lambda, K, V, hyper.eta);
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    const Document& doc = corpus.docs[d];
    elbo += lda_elbo_doc(doc, posts[d], elb, V, hyper.alpha);
    const std::vector<double> terms = btot_time_terms(moments, doc.t, delta);
    const std::vector<double> mass = doc_topic_mass(doc, posts[d], K);
    for (int k = 0; k < K; ++k) elbo += mass[k] * terms[k];
  }
  if (include_rho_block)
    elbo += rho_prior_minus_entropy(rho_posts, moments, prior, prior_log_norm);
  return elbo;
}

double wbtot_elbo(const Corpus& corpus,
                  const std::vector<WbtotDocPosterior>& posts,
                  const std::vector<double>& ny,
                  const std::vector<double>& lambda, const DirichletHyper& hyper,
                  const std::vector<Moments>& moments,
                  const std::vector<BetaPriorPosterior>& rho_posts,
                  const BetaPriorParams& prior, double prior_log_norm,
                  bool include_rho_block) {
  const int K = static_cast<int>(hyper.alpha.size());
  const int V = corpus.V;
  if (posts.size() != corpus.docs.size() || ny.size() != posts.size())
    throw DomainError("wbtot_elbo: input count mismatch");

  const std::vector<double> elb = expected_log_beta_from_lambda(lambda, K, V);
  double elbo = lda_topics_elbo(lambda, K, V, hyper.eta);
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    const Document& doc = corpus.docs[d];
    const WbtotDocPosterior& post = posts[d];
    elbo += lda_elbo_doc(doc, post, elb, V, hyper.alpha);

    double gamma_sum = 0.0;
    for (double g : post.gamma) gamma_sum += g;
    const double psi_gsum = digamma(gamma_sum);
    const std::vector<double> terms = btot_time_terms(moments, doc.t, 1.0);
    for (int k = 0; k < K; ++k) {
      const double eps = post.epsilon[k];
      if (eps <= 0.0) continue;  // x log x -> 0
      elbo += ny[d] * eps *
              (digamma(post.gamma[k]) - psi_gsum + terms[k] - std::log(eps));
    }
  }
  if (include_rho_block)
    elbo += rho_prior_minus_entropy(rho_posts, moments, prior, prior_log_norm);
  return elbo;
}

}  // namespace ttm

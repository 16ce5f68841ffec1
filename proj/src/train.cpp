#include "ttm/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "ttm/bayes_tot.hpp"
#include "ttm/errors.hpp"
#include "ttm/eval.hpp"

namespace ttm {

namespace {

using Clock = std::chrono::steady_clock;

long long ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               t0)
      .count();
}

void validate(const TrainConfig& cfg, const Corpus& corpus) {
  if (cfg.k < 1) throw ConfigError("k must be >= 1");
  if (cfg.restarts < 1) throw ConfigError("restarts must be >= 1");
  if (cfg.max_em_iter < 1) throw ConfigError("max_em_iter must be >= 1");
  if (!(cfg.perplexity_tol >= 0.0))
    throw ConfigError("perplexity tolerance must be >= 0");
  if (!(cfg.e_tol >= 0.0)) throw ConfigError("e-step tolerance must be >= 0");
  if (cfg.e_max_iter < 1) throw ConfigError("e-step max iterations must be >= 1");
  if (corpus.docs.empty()) throw SplitTooSmall("training corpus is empty");
  if (cfg.mode == TrainMode::online) {
    if (cfg.model == ModelKind::tot)
      throw ConfigError(
          "online mode is not available for classic ToT; use btot or wbtot");
    if (cfg.online.S < 1) throw ConfigError("batch size must be >= 1");
    OnlineConfig probe = cfg.online;
    probe.D_total = static_cast<int>(corpus.docs.size());
    mixing_rate(1, probe);  // validates tau and kappa
  }
}

DirichletHyper initial_hyper(const TrainConfig& cfg) {
  const double a = cfg.alpha0 > 0.0 ? cfg.alpha0 : 1.0 / cfg.k;
  return {std::vector<double>(cfg.k, a), cfg.eta};
}

ModelState init_for(const TrainConfig& cfg, const Corpus& corpus,
                    uint64_t seed) {
  return init_model(cfg.model, cfg.k, corpus.V, initial_hyper(cfg), cfg.prior,
                    cfg.moments, cfg.ny, cfg.delta, seed, corpus.scale);
}

// The hyperparameter update consumes the shared posterior base; wbtot
// posteriors are sliced down to it (gamma is all the update reads).
std::vector<DocPosterior> base_posts(const FitResult& fit) {
  if (fit.wposts.empty()) return fit.posts;
  std::vector<DocPosterior> posts;
  posts.reserve(fit.wposts.size());
  for (const auto& wpost : fit.wposts) posts.push_back(wpost);
  return posts;
}

struct RunOutput {
  ModelState state;
  std::vector<IterationRecord> log;
  double final_elbo = 0.0;
  double final_perplexity = 0.0;
  int iterations = 0;
  bool converged = false;
};

RunOutput run_batch(const Corpus& corpus, const Corpus* heldout,
                    const TrainConfig& cfg, uint64_t seed) {
  const auto t0 = Clock::now();
  ModelState state = init_for(cfg, corpus, seed);
  RunOutput out;
  double prev_p = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= cfg.max_em_iter; ++iter) {
    const FitResult fit = e_step_corpus(corpus, state, cfg.e_tol, cfg.e_max_iter);
    // The bound is measured against the state this E-step optimized for;
    // with the M-step applied afterwards the recorded sequence is the
    // coordinate-ascent one and is non-decreasing.
    const double elbo = model_elbo(corpus, state, fit);
    const double p = perplexity(elbo, corpus.n_tok);
    out.log.push_back({iter, elbo, p,
                       std::numeric_limits<double>::quiet_NaN(), ms_since(t0)});
    out.final_elbo = elbo;
    out.final_perplexity = p;
    out.iterations = iter;
    if (iter > 1 && prev_p - p < cfg.perplexity_tol) {
      out.converged = true;
      break;
    }
    prev_p = p;
    if (iter == cfg.max_em_iter) break;  // keep the state the bound measured
    m_step_batch(state, accumulate_stats(corpus, state, fit));
    if (cfg.optimize_hyper)
      state.hyper =
          update_dirichlet_hyperparams(state.hyper, base_posts(fit),
                                       state.lambda, state.k, state.v);
  }
  if (heldout)
    out.log.back().heldout_perplexity =
        heldout_perplexity(*heldout, state, cfg.heldout, cfg.e_tol,
                           cfg.e_max_iter);
  out.state = std::move(state);
  return out;
}

RunOutput run_online(const Corpus& corpus, const Corpus* heldout,
                     const TrainConfig& cfg, uint64_t seed) {
  const auto t0 = Clock::now();
  ModelState state = init_for(cfg, corpus, seed);
  const int d_total = static_cast<int>(corpus.docs.size());
  RunOutput out;
  int t = 0;
  for (int pass = 1; pass <= cfg.max_em_iter; ++pass) {
    for (int start = 0; start < d_total; start += cfg.online.S) {
      const int stop = std::min(d_total, start + cfg.online.S);
      Corpus batch;
      batch.V = corpus.V;
      batch.scale = corpus.scale;
      batch.docs.assign(corpus.docs.begin() + start,
                        corpus.docs.begin() + stop);
      for (const auto& doc : batch.docs) batch.n_tok += doc.total_tokens;

      ++t;
      OnlineConfig ocfg = cfg.online;
      ocfg.D_total = d_total;
      ocfg.S = stop - start;  // ragged final batch scales by its true size
      const double rho_t = mixing_rate(t, ocfg);

      const FitResult fit = e_step_corpus(batch, state, cfg.e_tol, cfg.e_max_iter);
      const double elbo = model_elbo(batch, state, fit);
      const double p = perplexity(elbo, batch.n_tok);
      m_step_online(state, accumulate_stats(batch, state, fit), rho_t, ocfg);

      IterationRecord rec{t, elbo, p,
                          std::numeric_limits<double>::quiet_NaN(),
                          ms_since(t0)};
      if (heldout)
        rec.heldout_perplexity = heldout_perplexity(
            *heldout, state, cfg.heldout, cfg.e_tol, cfg.e_max_iter);
      out.log.push_back(rec);
    }
  }
  // Restart selection needs a bound comparable across runs: one full-corpus
  // E-step under the final state.
  const FitResult fit = e_step_corpus(corpus, state, cfg.e_tol, cfg.e_max_iter);
  out.final_elbo = model_elbo(corpus, state, fit);
  out.final_perplexity = perplexity(out.final_elbo, corpus.n_tok);
  out.iterations = t;
  out.state = std::move(state);
  return out;
}

}  // namespace

double heldout_bound(const Corpus& test, const ModelState& state,
                     HeldoutMode mode, double e_tol, int e_max_iter) {
  const FitResult fit = e_step_corpus(test, state, e_tol, e_max_iter);
  if (mode == HeldoutMode::full) {
    // Per-document terms only: strip the corpus-level lambda and rho blocks,
    // which belong to the frozen model, not the held-out documents.
    double bound = model_elbo(test, state, fit);
    bound -= lda_topics_elbo(state.lambda, state.k, state.v, state.hyper.eta);
    if (state.is_bayes() && state.include_rho_block)
      bound -= rho_prior_minus_entropy(state.rho_post, state.moments,
                                       state.prior, state.prior_log_norm);
    return bound;
  }
  const std::vector<double> elb = state.expected_log_beta();
  double bound = 0.0;
  if (state.kind == ModelKind::wbtot) {
    for (std::size_t d = 0; d < test.docs.size(); ++d)
      bound += lda_elbo_doc(test.docs[d], fit.wposts[d], elb, state.v,
                            state.hyper.alpha);
  } else {
    for (std::size_t d = 0; d < test.docs.size(); ++d)
      bound += lda_elbo_doc(test.docs[d], fit.posts[d], elb, state.v,
                            state.hyper.alpha);
  }
  return bound;
}

double heldout_perplexity(const Corpus& test, const ModelState& state,
                          HeldoutMode mode, double e_tol, int e_max_iter) {
  return perplexity(heldout_bound(test, state, mode, e_tol, e_max_iter),
                    test.n_tok);
}

TrainResult train(const Corpus& corpus, const Corpus* heldout,
                  const TrainConfig& cfg) {
  validate(cfg, corpus);
  TrainResult best;
  bool have_best = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    const uint64_t seed = cfg.seed + 1000003ULL * static_cast<uint64_t>(r);
    RunOutput run = cfg.mode == TrainMode::batch
                        ? run_batch(corpus, heldout, cfg, seed)
                        : run_online(corpus, heldout, cfg, seed);
    if (!have_best || run.final_elbo > best.final_elbo) {
      best.state = std::move(run.state);
      best.log = std::move(run.log);
      best.final_elbo = run.final_elbo;
      best.final_perplexity = run.final_perplexity;
      best.iterations = run.iterations;
      best.converged = run.converged;
      best.best_restart = r;
      have_best = true;
    }
  }
  return best;
}

}  // namespace ttm

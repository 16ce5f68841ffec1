// Unified model state: construction, corpus-level E/M steps, and the bound
// dispatcher. Keeps the per-model algebra in baselines/bayes_tot and only
// routes by kind here.
#include "ttm/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ttm/errors.hpp"
#include "ttm/special.hpp"

namespace ttm {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::lda: return "lda";
    case ModelKind::tot: return "tot";
    case ModelKind::btot: return "btot";
    case ModelKind::wbtot: return "wbtot";
  }
  throw ConfigError("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "lda") return ModelKind::lda;
  if (name == "tot") return ModelKind::tot;
  if (name == "btot") return ModelKind::btot;
  if (name == "wbtot") return ModelKind::wbtot;
  throw ConfigError("unknown model '" + name + "' (valid: lda, tot, btot, wbtot)");
}

std::string to_string(MomentMethod method) {
  return method == MomentMethod::laplace ? "laplace" : "quadrature";
}

MomentMethod moment_method_from_string(const std::string& name) {
  if (name == "laplace") return MomentMethod::laplace;
  if (name == "quadrature") return MomentMethod::quadrature;
  throw ConfigError("unknown moment method '" + name +
                    "' (valid: laplace, quadrature)");
}

namespace {

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string to_string(const NyScheme& scheme) {
  switch (scheme.kind) {
    case NySchemeKind::constant: return "const:" + format_double(scheme.value);
    case NySchemeKind::fraction: return "frac:" + format_double(scheme.value);
    case NySchemeKind::sqrt_len: return "sqrt";
  }
  throw ConfigError("unknown ny scheme kind");
}

NyScheme ny_scheme_from_string(const std::string& text) {
  if (text == "sqrt") return {NySchemeKind::sqrt_len, 1.0};
  auto parse_value = [&](const std::string& body) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(body, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != body.size() || body.empty()) {
      throw ConfigError("bad ny scheme '" + text +
                        "' (valid: const:<c>, frac:<d>, sqrt)");
    }
    return value;
  };
  if (text.rfind("const:", 0) == 0)
    return {NySchemeKind::constant, parse_value(text.substr(6))};
  if (text.rfind("frac:", 0) == 0)
    return {NySchemeKind::fraction, parse_value(text.substr(5))};
  throw ConfigError("bad ny scheme '" + text +
                    "' (valid: const:<c>, frac:<d>, sqrt)");
}

std::vector<double> ModelState::expected_log_beta() const {
  return expected_log_beta_from_lambda(lambda, k, v);
}

void ModelState::refresh_moments() {
  moments = topic_moments(rho_post, moment_method);
}

ModelState init_model(ModelKind kind, int k, int v, const DirichletHyper& hyper,
                      const BetaPriorParams& prior, MomentMethod method,
                      const NyScheme& ny, double delta, uint64_t seed,
                      const TimeScale& scale) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (v < 1) throw ConfigError("vocabulary must be nonempty");
  if (static_cast<int>(hyper.alpha.size()) != k)
    throw ConfigError("alpha length must equal k");
  for (double a : hyper.alpha)
    if (!(a > 0.0)) throw ConfigError("alpha components must be positive");
  if (!(hyper.eta > 0.0)) throw ConfigError("eta must be positive");

  ModelState state;
  state.kind = kind;
  state.k = k;
  state.v = v;
  state.hyper = hyper;
  state.moment_method = method;
  state.ny = ny;
  state.delta = delta;
  state.scale = scale;

  // Symmetry breaking: positive draws with mean 1 and variance 0.01.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> draw(1.0, 0.1);
  state.lambda.resize(static_cast<std::size_t>(k) * v);
  for (auto& x : state.lambda) x = std::max(0.01, draw(rng));

  if (kind == ModelKind::tot) state.rho.assign(k, BetaParams{1.0, 1.0});

  if (state.is_bayes()) {
    if (!(delta > 0.0) || delta > 1.0)
      throw ConfigError("delta must lie in (0, 1]");
    if (!check_beta_prior_integrable(prior))
      throw DomainError("prior (nu, chi) is not integrable");
    state.prior = prior;
    state.rho_post.assign(k, BetaPriorPosterior{prior.nu, prior.chi1, prior.chi2});
    state.prior_log_norm =
        laplace_expansion({prior.nu, prior.chi1, prior.chi2}).log_norm;
    state.refresh_moments();
  }
  return state;
}

FitResult e_step_corpus(const Corpus& corpus, const ModelState& state,
                        double tol, int max_iter) {
  FitResult fit;
  const std::vector<double> elb = state.expected_log_beta();
  const auto& alpha = state.hyper.alpha;
  switch (state.kind) {
    case ModelKind::lda:
      fit.posts.reserve(corpus.docs.size());
      for (const auto& doc : corpus.docs)
        fit.posts.push_back(lda_e_step(doc, elb, state.v, alpha, tol, max_iter));
      break;
    case ModelKind::tot:
      fit.posts.reserve(corpus.docs.size());
      for (const auto& doc : corpus.docs)
        fit.posts.push_back(
            tot_e_step(doc, elb, state.v, alpha, state.rho, tol, max_iter));
      break;
    case ModelKind::btot:
      fit.posts.reserve(corpus.docs.size());
      for (const auto& doc : corpus.docs)
        fit.posts.push_back(btot_e_step(doc, elb, state.v, alpha, state.moments,
                                        tol, max_iter, state.delta));
      break;
    case ModelKind::wbtot:
      fit.wposts.reserve(corpus.docs.size());
      fit.ny.reserve(corpus.docs.size());
      for (const auto& doc : corpus.docs) {
        const double ny_d = ny_weight(doc.total_tokens, state.ny);
        fit.ny.push_back(ny_d);
        fit.wposts.push_back(wbtot_e_step(doc, elb, state.v, alpha,
                                          state.moments, ny_d, tol, max_iter));
      }
      break;
  }
  return fit;
}

void SuffStats::init(int k, int v) {
  word.assign(static_cast<std::size_t>(k) * v, 0.0);
  tn.assign(k, 0.0);
  ts1.assign(k, 0.0);
  ts2.assign(k, 0.0);
}

std::vector<TimeSuffStats> SuffStats::time_stats() const {
  std::vector<TimeSuffStats> out(tn.size());
  for (std::size_t i = 0; i < tn.size(); ++i)
    out[i] = TimeSuffStats::from_sums(tn[i], ts1[i], ts2[i]);
  return out;
}

SuffStats accumulate_stats(const Corpus& corpus, const ModelState& state,
                           const FitResult& fit) {
  SuffStats stats;
  stats.init(state.k, state.v);
  const int k = state.k;
  const int v = state.v;

  auto add_words = [&](const Document& doc, const DocPosterior& post) {
    for (std::size_t u = 0; u < doc.counts.size(); ++u) {
      const int w = doc.counts[u].first;
      const double n = doc.counts[u].second;
      for (int j = 0; j < k; ++j)
        stats.word[static_cast<std::size_t>(j) * v + w] +=
            n * post.phi[u * k + j];
    }
  };
  auto add_time = [&](double t, const std::vector<double>& mass) {
    const double lt = std::log(t);
    const double l1t = std::log1p(-t);
    for (int j = 0; j < k; ++j) {
      stats.tn[j] += mass[j];
      stats.ts1[j] += mass[j] * lt;
      stats.ts2[j] += mass[j] * l1t;
    }
  };

  if (state.kind == ModelKind::wbtot) {
    for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
      const auto& doc = corpus.docs[d];
      const auto& post = fit.wposts[d];
      add_words(doc, post);
      std::vector<double> mass(k);
      for (int j = 0; j < k; ++j) mass[j] = fit.ny[d] * post.epsilon[j];
      add_time(doc.t, mass);
    }
  } else {
    for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
      const auto& doc = corpus.docs[d];
      const auto& post = fit.posts[d];
      add_words(doc, post);
      if (state.kind == ModelKind::tot || state.kind == ModelKind::btot)
        add_time(doc.t, doc_topic_mass(doc, post, k));
    }
  }
  return stats;
}

void m_step_batch(ModelState& state, const SuffStats& stats) {
  state.lambda =
      lda_m_step_batch(stats.word, state.k, state.v, state.hyper.eta);
  switch (state.kind) {
    case ModelKind::lda:
      break;
    case ModelKind::tot:
      state.rho = tot_m_step(stats.time_stats());
      break;
    case ModelKind::btot:
      state.rho_post =
          btot_m_step_batch(stats.time_stats(), state.prior, state.delta);
      state.refresh_moments();
      break;
    case ModelKind::wbtot:
      state.rho_post = wbtot_m_step_batch(stats.time_stats(), state.prior);
      state.refresh_moments();
      break;
  }
}

void m_step_online(ModelState& state, const SuffStats& stats, double rho_t,
                   const OnlineConfig& cfg) {
  state.lambda = lda_m_step_online(state.lambda, stats.word, state.k, state.v,
                                   state.hyper.eta, rho_t, cfg);
  switch (state.kind) {
    case ModelKind::lda:
      break;
    case ModelKind::tot:
      throw ConfigError(
          "classic ToT has no stable online update; use btot/wbtot (the "
          "stability demo exercises the naive variant)");
    case ModelKind::btot:
      state.rho_post = btot_m_step_online(state.rho_post, stats.time_stats(),
                                          state.prior, rho_t, cfg, state.delta);
      state.refresh_moments();
      break;
    case ModelKind::wbtot:
      state.rho_post = wbtot_m_step_online(state.rho_post, stats.time_stats(),
                                           state.prior, rho_t, cfg);
      state.refresh_moments();
      break;
  }
}

double model_elbo(const Corpus& corpus, const ModelState& state,
                  const FitResult& fit) {
  switch (state.kind) {
    case ModelKind::lda:
      return lda_elbo(corpus, fit.posts, state.lambda, state.hyper);
    case ModelKind::tot: {
      double bound = lda_elbo(corpus, fit.posts, state.lambda, state.hyper);
      for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
        const auto& doc = corpus.docs[d];
        const auto mass = doc_topic_mass(doc, fit.posts[d], state.k);
        for (int j = 0; j < state.k; ++j)
          bound += mass[j] *
                   beta_log_pdf(doc.t, state.rho[j].rho1, state.rho[j].rho2);
      }
      return bound;
    }
    case ModelKind::btot:
      return btot_elbo(corpus, fit.posts, state.lambda, state.hyper,
                       state.moments, state.rho_post, state.prior,
                       state.prior_log_norm, state.delta,
                       state.include_rho_block);
    case ModelKind::wbtot:
      return wbtot_elbo(corpus, fit.wposts, fit.ny, state.lambda, state.hyper,
                        state.moments, state.rho_post, state.prior,
                        state.prior_log_norm, state.include_rho_block);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace ttm

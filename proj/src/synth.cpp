#include "ttm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "ttm/errors.hpp"
#include "ttm/model.hpp"

namespace ttm {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t doc_seed(uint64_t seed, int d) {
  return splitmix64(seed ^ splitmix64(static_cast<uint64_t>(d) + 1));
}

// Keeps generated timestamps strictly inside (0,1).
double clamp_unit(double t) {
  return std::min(1.0 - 1e-12, std::max(1e-12, t));
}

std::vector<double> dirichlet_draw(std::mt19937_64& rng,
                                   const std::vector<double>& alpha) {
  std::vector<double> draw(alpha.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    std::gamma_distribution<double> gamma(alpha[i], 1.0);
    draw[i] = std::max(gamma(rng), 1e-12);
    sum += draw[i];
  }
  for (auto& x : draw) x /= sum;
  return draw;
}

double beta_draw(std::mt19937_64& rng, const BetaParams& rho) {
  std::gamma_distribution<double> g1(rho.rho1, 1.0);
  std::gamma_distribution<double> g2(rho.rho2, 1.0);
  const double a = g1(rng);
  const double b = g2(rng);
  return clamp_unit(a / (a + b));
}

int sample_cdf(std::mt19937_64& rng, const std::vector<double>& cdf) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng) * cdf.back();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), x);
  return static_cast<int>(std::min<std::ptrdiff_t>(
      it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

GroundTruth sample_truth(const SynthConfig& cfg) {
  std::mt19937_64 rng(splitmix64(cfg.seed));
  GroundTruth truth;
  truth.k = cfg.k;
  truth.v = cfg.v;
  truth.alpha.assign(cfg.k, 0.5);
  truth.beta = dirichlet_draw(rng, std::vector<double>(cfg.v, 0.1));
  truth.beta.resize(static_cast<std::size_t>(cfg.k) * cfg.v);
  for (int j = 1; j < cfg.k; ++j) {
    const auto row = dirichlet_draw(rng, std::vector<double>(cfg.v, 0.1));
    std::copy(row.begin(), row.end(),
              truth.beta.begin() + static_cast<std::size_t>(j) * cfg.v);
  }
  // Beta modes spread over (0,1) at fixed concentration s = 30:
  // rho1 = 1 + mode (s - 2).
  const double s = 30.0;
  for (int j = 0; j < cfg.k; ++j) {
    const double mode = static_cast<double>(j + 1) / (cfg.k + 1);
    const double r1 = 1.0 + mode * (s - 2.0);
    truth.rho.push_back({r1, s - r1});
  }
  return truth;
}

}  // namespace

std::pair<Corpus, GroundTruth> generate_corpus(const SynthConfig& cfg,
                                               const GroundTruth* truth_in) {
  if (cfg.k < 1 || cfg.v < 1 || cfg.d < 1)
    throw ConfigError("generate_corpus needs k, v, d >= 1");
  if (!(cfg.mean_doc_len > 0.0))
    throw ConfigError("mean document length must be positive");

  GroundTruth truth = truth_in ? *truth_in : sample_truth(cfg);
  if (truth.k != cfg.k || truth.v != cfg.v)
    throw ConfigError("ground truth dimensions disagree with the config");
  if (static_cast<int>(truth.alpha.size()) != cfg.k ||
      static_cast<long long>(truth.beta.size()) !=
          static_cast<long long>(cfg.k) * cfg.v)
    throw ConfigError("ground truth alpha/beta shapes disagree with k, v");
  if (cfg.kind != GenKind::lda && static_cast<int>(truth.rho.size()) != cfg.k)
    throw ConfigError("ground truth rho must cover every topic");
  truth.theta.assign(cfg.d, {});
  truth.timestamps.assign(cfg.d, 0.0);
  truth.time_topic.assign(cfg.d, -1);

  // Per-topic word CDFs once; documents then sample by binary search.
  std::vector<std::vector<double>> word_cdf(cfg.k, std::vector<double>(cfg.v));
  for (int j = 0; j < cfg.k; ++j) {
    double cum = 0.0;
    for (int w = 0; w < cfg.v; ++w) {
      cum += truth.beta[static_cast<std::size_t>(j) * cfg.v + w];
      word_cdf[j][w] = cum;
    }
  }

  Corpus corpus;
  corpus.V = cfg.v;
  corpus.scale = TimeScale{0.0, 1.0, 0.0, false};  // identity: t is raw
  corpus.docs.reserve(cfg.d);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int d = 0; d < cfg.d; ++d) {
    std::mt19937_64 rng(doc_seed(cfg.seed, d));
    std::poisson_distribution<int> length(cfg.mean_doc_len);
    int n_d = 0;
    while (n_d < 1) n_d = length(rng);

    const std::vector<double> theta = dirichlet_draw(rng, truth.alpha);
    std::vector<double> theta_cdf(cfg.k);
    double cum = 0.0;
    for (int j = 0; j < cfg.k; ++j) {
      cum += theta[j];
      theta_cdf[j] = cum;
    }

    std::map<int, int> counts;
    for (int i = 0; i < n_d; ++i) {
      const int z = sample_cdf(rng, theta_cdf);
      const int w = sample_cdf(rng, word_cdf[z]);
      ++counts[w];
    }

    double t = 0.0;
    int y = -1;
    if (cfg.kind == GenKind::lda) {
      t = clamp_unit(unit(rng));
    } else {
      y = sample_cdf(rng, theta_cdf);
      t = beta_draw(rng, truth.rho[y]);
    }

    Document doc;
    doc.id = "synth-" + std::to_string(d);
    for (const auto& wc : counts) doc.counts.push_back(wc);
    doc.total_tokens = n_d;
    doc.t = t;
    doc.raw_timestamp = t;
    corpus.docs.push_back(std::move(doc));
    corpus.n_tok += n_d;

    truth.theta[d] = theta;
    truth.timestamps[d] = t;
    truth.time_topic[d] = y;
  }
  return {std::move(corpus), std::move(truth)};
}

Corpus adversarial_minibatch(int topic_starved, double t_common, int size,
                             int k, int v, int doc_len, uint64_t seed) {
  if (!(t_common > 0.0) || !(t_common < 1.0))
    throw ConfigError("t_common must lie strictly inside (0,1)");
  if (k < 2 || v < k) throw ConfigError("need k >= 2 and v >= k");
  if (topic_starved < 0 || topic_starved >= k)
    throw ConfigError("starved topic index out of range");
  if (size < 1 || doc_len < 1)
    throw ConfigError("size and doc_len must be >= 1");

  // Vocabulary in k equal blocks; the starved topic's block never appears.
  const int block = v / k;
  std::vector<int> allowed;
  for (int w = 0; w < v; ++w) {
    const int owner = std::min(w / std::max(block, 1), k - 1);
    if (owner != topic_starved) allowed.push_back(w);
  }

  Corpus corpus;
  corpus.V = v;
  corpus.scale = TimeScale{0.0, 1.0, 0.0, false};
  for (int d = 0; d < size; ++d) {
    std::mt19937_64 rng(doc_seed(seed, d));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(allowed.size()) - 1);
    std::map<int, int> counts;
    for (int i = 0; i < doc_len; ++i) ++counts[allowed[pick(rng)]];
    Document doc;
    doc.id = "adv-" + std::to_string(d);
    for (const auto& wc : counts) doc.counts.push_back(wc);
    doc.total_tokens = doc_len;
    doc.t = t_common;
    doc.raw_timestamp = t_common;
    corpus.docs.push_back(std::move(doc));
    corpus.n_tok += doc_len;
  }
  return corpus;
}

void save_ground_truth(const std::string& path, const GroundTruth& truth) {
  ModelState state;
  state.kind = ModelKind::tot;  // beta rows + point rho fit the tot layout
  state.k = truth.k;
  state.v = truth.v;
  state.hyper.alpha = truth.alpha;
  state.hyper.eta = 0.01;
  state.lambda = truth.beta;
  state.rho = truth.rho;
  state.scale = TimeScale{0.0, 1.0, 0.0, false};
  save_snapshot(path, state);
}

GroundTruth load_ground_truth(const std::string& path) {
  const ModelState state = load_snapshot(path);
  GroundTruth truth;
  truth.k = state.k;
  truth.v = state.v;
  truth.alpha = state.hyper.alpha;
  truth.beta.resize(state.lambda.size());
  for (int j = 0; j < state.k; ++j) {
    double sum = 0.0;
    for (int w = 0; w < state.v; ++w)
      sum += state.lambda[static_cast<std::size_t>(j) * state.v + w];
    for (int w = 0; w < state.v; ++w)
      truth.beta[static_cast<std::size_t>(j) * state.v + w] =
          state.lambda[static_cast<std::size_t>(j) * state.v + w] / sum;
  }
  truth.rho = state.rho;
  return truth;
}

}  // namespace ttm

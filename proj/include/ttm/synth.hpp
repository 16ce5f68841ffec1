// Synthetic corpora with known ground truth, drawn from the generative
// stories the models invert, plus the adversarial mini-batch used by the
// online-stability experiment.
//
// Timestamp generation follows the collapsed single-timestamp reading: each
// document draws one topic y_d from theta_d and one t_d from Beta(rho_{y_d}).
// The per-token timestamps of the literal story are never observed
// separately, so the collapsed draw is generatively equivalent for every
// model here; GenKind::lda instead draws t_d uniformly. All timestamps lie
// strictly inside (0,1).
//
// Documents are generated independently with per-document counter-derived
// seeds, so generation is deterministic given the seed and could be
// parallelized without changing output.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ttm/beta_estimation.hpp"
#include "ttm/corpus.hpp"

namespace ttm {

enum class GenKind { lda, tot_btot, wbtot };

struct GroundTruth {
  int k = 0;
  int v = 0;
  std::vector<double> alpha;               // symmetric document-topic prior
  std::vector<double> beta;                // k x v, rows normalized
  std::vector<BetaParams> rho;             // per-topic time density
  std::vector<std::vector<double>> theta;  // per document (filled by generation)
  std::vector<double> timestamps;          // per document, in (0,1)
  std::vector<int> time_topic;             // y_d, the topic that drew t_d
};

struct SynthConfig {
  GenKind kind = GenKind::tot_btot;
  int k = 2;
  int v = 50;
  int d = 100;
  double mean_doc_len = 20.0;  // Poisson mean, truncated at >= 1
  uint64_t seed = 0;
};

// truth == nullptr samples model-level truth from the seed: beta rows from a
// sparse Dirichlet(0.1), Beta modes equally spaced in (0,1) at concentration
// 30, symmetric alpha 0.5. A supplied truth needs k, v, alpha, beta, rho set.
std::pair<Corpus, GroundTruth> generate_corpus(const SynthConfig& cfg,
                                               const GroundTruth* truth = nullptr);

// Mini-batch whose documents all carry timestamp t_common and whose words
// avoid the starved topic's vocabulary block (vocabulary = k equal blocks of
// v/k words). This is the configuration that blows up the naive online ToT
// refit and that the Bayesian updates must absorb.
Corpus adversarial_minibatch(int topic_starved, double t_common, int size,
                             int k = 2, int v = 20, int doc_len = 8,
                             uint64_t seed = 0);

// Model-level truth (alpha, beta, rho) persisted through the model snapshot
// format; per-document theta and timestamps live in the corpus file and are
// not round-tripped here.
void save_ground_truth(const std::string& path, const GroundTruth& truth);
GroundTruth load_ground_truth(const std::string& path);

}  // namespace ttm

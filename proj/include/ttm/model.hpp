// Unified model state for the four topic models (LDA, classic ToT, BToT,
// WBToT) plus the corpus-level steps the training drivers are built from.
//
// A ModelState owns the corpus-wide variational parameters:
//   lambda_kw             all models (topic-word Dirichlet)
//   rho_k                 classic ToT (point Beta parameters)
//   (mu_k, psi_k)         BToT / WBToT (Beta-prior posterior), with cached
//                         moments <rho_k>, <log B(rho_k)>, log-normalizer
// plus the Dirichlet hyperparameters (alpha, eta), the Beta-prior (nu, chi),
// the time-modality weight scheme, and the time scale of the training data.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttm/baselines.hpp"
#include "ttm/bayes_tot.hpp"
#include "ttm/beta_prior.hpp"
#include "ttm/corpus.hpp"

namespace ttm {

enum class ModelKind { lda, tot, btot, wbtot };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

std::string to_string(MomentMethod method);
MomentMethod moment_method_from_string(const std::string& name);

// "const:<c>", "frac:<d>", "sqrt" (the CLI flag syntax).
std::string to_string(const NyScheme& scheme);
NyScheme ny_scheme_from_string(const std::string& text);

struct ModelState {
  ModelKind kind = ModelKind::lda;
  int k = 0;
  int v = 0;
  DirichletHyper hyper;
  std::vector<double> lambda;  // k x v row-major

  std::vector<BetaParams> rho;  // classic ToT only

  BetaPriorParams prior;                     // BToT / WBToT
  std::vector<BetaPriorPosterior> rho_post;  // per topic
  std::vector<Moments> moments;              // cache, see refresh_moments()
  MomentMethod moment_method = MomentMethod::laplace;
  double prior_log_norm = 0.0;  // log_norm(nu, chi), fixed per run

  NyScheme ny;             // WBToT time weight
  double delta = 1.0;      // BToT balancing variant; 1 = plain
  bool include_rho_block = true;  // rho prior/entropy terms in the bound

  TimeScale scale;

  bool has_time() const { return kind != ModelKind::lda; }
  bool is_bayes() const {
    return kind == ModelKind::btot || kind == ModelKind::wbtot;
  }

  std::vector<double> expected_log_beta() const;
  void refresh_moments();  // recompute the cache from (mu_k, psi_k)
};

// Seeded start: lambda entries drawn with mean 1 and variance 0.01 (floored
// at 0.01), rho = (1,1), Bayesian posteriors = prior.
ModelState init_model(ModelKind kind, int k, int v, const DirichletHyper& hyper,
                      const BetaPriorParams& prior, MomentMethod method,
                      const NyScheme& ny, double delta, uint64_t seed,
                      const TimeScale& scale);

// Per-corpus E-step output; wbtot uses the eps-extended posteriors.
struct FitResult {
  std::vector<DocPosterior> posts;
  std::vector<WbtotDocPosterior> wposts;
  std::vector<double> ny;  // per-document weights (wbtot)
};

FitResult e_step_corpus(const Corpus& corpus, const ModelState& state,
                        double tol = 1e-3, int max_iter = 100);

// Accumulated expected counts for one M-step.
struct SuffStats {
  std::vector<double> word;           // k x v
  std::vector<double> tn, ts1, ts2;   // per-topic time sums
  void init(int k, int v);
  std::vector<TimeSuffStats> time_stats() const;
};

SuffStats accumulate_stats(const Corpus& corpus, const ModelState& state,
                           const FitResult& fit);

void m_step_batch(ModelState& state, const SuffStats& stats);
void m_step_online(ModelState& state, const SuffStats& stats, double rho_t,
                   const OnlineConfig& cfg);

// Full variational bound for the state's model kind.
double model_elbo(const Corpus& corpus, const ModelState& state,
                  const FitResult& fit);

// Versioned snapshot persistence; field names are pinned by
// schemas/snapshot.schema.json and round trips are lossless.
void save_snapshot(const std::string& path, const ModelState& state);
ModelState load_snapshot(const std::string& path);

}  // namespace ttm

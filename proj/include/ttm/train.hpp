// Training drivers: multi-restart batch EM and single-writer online
// (stochastic natural-gradient) optimization for all four model kinds.
//
// Batch stopping rule: with P^t = exp(-L^t / N_tok) measured right after the
// E-step of iteration t (against the state that E-step saw), stop when
// P^{t-1} - P^t < perplexity_tol, with a hard cap of max_em_iter iterations.
// Restarts differ only in the lambda initialization seed; the snapshot with
// the largest final training ELBO wins.
//
// Online mode performs max_em_iter passes over the corpus in document order,
// updating after every mini-batch of S documents with mixing rate
// rho_t = (t + tau)^{-kappa} (t counts updates across passes). When a
// held-out corpus is supplied, its perplexity is recorded after every
// update — the convergence trace of the stream experiments.
#pragma once

#include <cstdint>
#include <vector>

#include "ttm/corpus.hpp"
#include "ttm/model.hpp"

namespace ttm {

enum class TrainMode { batch, online };
enum class HeldoutMode { full, words_only };

struct TrainConfig {
  ModelKind model = ModelKind::lda;
  int k = 10;
  TrainMode mode = TrainMode::batch;
  int restarts = 1;
  int max_em_iter = 400;  // batch: EM iterations; online: corpus passes
  double perplexity_tol = 1e-5;
  OnlineConfig online;  // S, tau, kappa; D_total is overwritten from data
  NyScheme ny;
  double delta = 1.0;
  BetaPriorParams prior{1.0, -1.2039728043259361, -1.2039728043259361};
  MomentMethod moments = MomentMethod::laplace;
  double alpha0 = 0.0;  // symmetric document-topic prior; <= 0 means 1/k
  double eta = 0.01;
  bool optimize_hyper = false;  // fixed-point alpha/eta updates per iteration
  double e_tol = 1e-3;
  int e_max_iter = 100;
  HeldoutMode heldout = HeldoutMode::full;
  uint64_t seed = 0;
};

struct IterationRecord {
  int iteration = 0;  // EM iteration (batch) or update index (online), 1-based
  double elbo = 0.0;
  double perplexity = 0.0;
  double heldout_perplexity = 0.0;  // NaN when no held-out corpus is supplied
  long long wall_ms = 0;
};

struct TrainResult {
  ModelState state;
  std::vector<IterationRecord> log;  // winning restart only
  double final_elbo = 0.0;           // training bound of the returned state
  double final_perplexity = 0.0;
  int iterations = 0;
  bool converged = false;  // batch only: stopping rule met before the cap
  int best_restart = 0;
};

// Bound restricted to per-document terms (word + theta + time modality),
// computed from a fresh E-step under the frozen state. words_only drops the
// time terms from the bound; the E-step itself always follows the model.
double heldout_bound(const Corpus& test, const ModelState& state,
                     HeldoutMode mode, double e_tol = 1e-3,
                     int e_max_iter = 100);
double heldout_perplexity(const Corpus& test, const ModelState& state,
                          HeldoutMode mode, double e_tol = 1e-3,
                          int e_max_iter = 100);

// heldout may be null; when present, online runs log per-update held-out
// perplexity and batch runs report it in the final record only.
TrainResult train(const Corpus& corpus, const Corpus* heldout,
                  const TrainConfig& cfg);

}  // namespace ttm

// Quantitative evaluation: perplexity, topic-time histograms with robust
// dispersion (MAD/IQR), symmetric KL distance between topic-word
// distributions, and top-word rankings (raw beta and the log-rank score
// r^log_kw = beta_kw (log beta_kw - mean_k' log beta_k'w)).
//
// Histogram masses live in raw time units: N_kt = sum_{d in bin t} theta_dk
// N_d with theta_dk = gamma_dk / sum_k' gamma_dk'. Dispersion is computed
// over bin centers weighted by mass (nearest-rank percentiles, no
// interpolation), so MAD/IQR are reported in the corpus's native time units.
// A literal count-series mode (dispersion of the N_kt values themselves) is
// kept for auditability.
#pragma once

#include <string>
#include <vector>

#include "ttm/corpus.hpp"
#include "ttm/model.hpp"

namespace ttm {

// exp(-elbo / n_tok); the training stopping rule compares successive values.
double perplexity(double elbo, long long n_tok);

// theta_dk = gamma_dk / sum_k' gamma_dk' per document, from either posterior
// family in the fit.
std::vector<std::vector<double>> posterior_thetas(const FitResult& fit);

struct TopicTimeHistogram {
  int topic = 0;
  std::vector<double> edges;  // B+1 ascending edges, raw time units
  std::vector<double> mass;   // B nonnegative masses
};

// Bins cover [scale.raw_min, scale.raw_max]; each document contributes
// theta_dk * N_d to the bin containing its raw timestamp.
std::vector<TopicTimeHistogram> topic_time_histogram(
    const Corpus& corpus, const std::vector<std::vector<double>>& thetas,
    double bin_width);

struct Dispersion {
  double mad = 0.0;
  double iqr = 0.0;
};

// Mass-weighted dispersion over bin centers (raw time units). Zero total
// mass raises EmptyTopic.
Dispersion weighted_dispersion(const TopicTimeHistogram& hist);

// Literal reading: unweighted dispersion of the count series N_kt itself.
Dispersion count_series_dispersion(const TopicTimeHistogram& hist);

// D(p||q) + D(q||p), natural log. Inputs must be strictly positive and
// normalized within 1e-8 (DomainError otherwise).
double sym_kl(const std::vector<double>& p, const std::vector<double>& q);

// All topic pairs from row-normalized lambda; k x k row-major, zero diagonal.
std::vector<double> sym_kl_matrix(const std::vector<double>& lambda, int k,
                                  int v);

enum class RankingKind { beta, r_log };

struct TopWordEntry {
  int word = 0;
  double score = 0.0;
};

struct TopWordList {
  int topic = 0;
  RankingKind ranking = RankingKind::beta;
  std::vector<TopWordEntry> entries;  // scores non-increasing, <= n entries
};

TopWordList top_words(const std::vector<double>& lambda, int k, int v,
                      int topic, int n, RankingKind ranking);

struct DispersionRow {
  int topic = 0;
  double mad = 0.0;
  double iqr = 0.0;
};

struct DispersionReport {
  std::string model;
  std::vector<DispersionRow> rows;
  double mean_mad = 0.0;
  double mean_iqr = 0.0;
};

DispersionReport dispersion_report(const std::string& model_name,
                                   const std::vector<TopicTimeHistogram>& hists,
                                   bool literal_counts = false);

// CSV exports (headers are a stable contract for downstream plotting).
//   histograms: topic,bin_start,bin_end,mass
//   dispersion: model,topic,mad,iqr then a model,mean_mad,mean_iqr block
//   top words:  topic,rank,word,score,ranking
//   sym-kl:     topic_i,topic_j,sym_kl
std::string histogram_csv(const std::vector<TopicTimeHistogram>& hists);
std::string dispersion_csv(const std::vector<DispersionReport>& reports);
std::string top_words_csv(const std::vector<TopWordList>& lists,
                          const Vocabulary& vocab);
std::string sym_kl_csv(const std::vector<double>& matrix, int k);

}  // namespace ttm

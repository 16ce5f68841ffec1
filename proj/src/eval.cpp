#include "ttm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ttm/errors.hpp"

namespace ttm {

double perplexity(double elbo, long long n_tok) {
  if (n_tok < 1) throw ConfigError("perplexity needs n_tok >= 1");
  return std::exp(-elbo / static_cast<double>(n_tok));
}

namespace {

std::vector<double> normalized_gamma(const std::vector<double>& gamma) {
  double sum = 0.0;
  for (double g : gamma) sum += g;
  std::vector<double> theta(gamma.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) theta[i] = gamma[i] / sum;
  return theta;
}

}  // namespace

std::vector<std::vector<double>> posterior_thetas(const FitResult& fit) {
  std::vector<std::vector<double>> thetas;
  if (!fit.wposts.empty()) {
    thetas.reserve(fit.wposts.size());
    for (const auto& post : fit.wposts)
      thetas.push_back(normalized_gamma(post.gamma));
  } else {
    thetas.reserve(fit.posts.size());
    for (const auto& post : fit.posts)
      thetas.push_back(normalized_gamma(post.gamma));
  }
  return thetas;
}

std::vector<TopicTimeHistogram> topic_time_histogram(
    const Corpus& corpus, const std::vector<std::vector<double>>& thetas,
    double bin_width) {
  if (!(bin_width > 0.0)) throw ConfigError("bin_width must be positive");
  if (thetas.size() != corpus.docs.size())
    throw ConfigError("thetas must cover the corpus");
  const int k = thetas.empty() ? 0 : static_cast<int>(thetas.front().size());

  const double lo = corpus.scale.raw_min;
  const double hi = corpus.scale.raw_max;
  const double span = hi - lo;
  const int bins =
      span > 0.0 ? static_cast<int>(std::ceil(span / bin_width)) : 1;

  std::vector<double> edges(bins + 1);
  for (int b = 0; b <= bins; ++b) edges[b] = lo + b * bin_width;

  std::vector<TopicTimeHistogram> hists(k);
  for (int j = 0; j < k; ++j) {
    hists[j].topic = j;
    hists[j].edges = edges;
    hists[j].mass.assign(bins, 0.0);
  }
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    const auto& doc = corpus.docs[d];
    int bin = span > 0.0
                  ? static_cast<int>((doc.raw_timestamp - lo) / bin_width)
                  : 0;
    bin = std::clamp(bin, 0, bins - 1);
    for (int j = 0; j < k; ++j)
      hists[j].mass[bin] += thetas[d][j] * doc.total_tokens;
  }
  return hists;
}

namespace {

// Nearest-rank weighted percentile: smallest value whose cumulative weight
// reaches p * total. values/weights are parallel; values need not be sorted.
double weighted_percentile(std::vector<std::pair<double, double>> vw,
                           double p) {
  std::sort(vw.begin(), vw.end());
  double total = 0.0;
  for (const auto& e : vw) total += e.second;
  const double target = p * total;
  double cum = 0.0;
  for (const auto& e : vw) {
    cum += e.second;
    if (cum >= target - 1e-12 * total) return e.first;
  }
  return vw.back().first;
}

}  // namespace

Dispersion weighted_dispersion(const TopicTimeHistogram& hist) {
  std::vector<std::pair<double, double>> vw;
  double total = 0.0;
  for (std::size_t b = 0; b < hist.mass.size(); ++b) {
    if (hist.mass[b] <= 0.0) continue;
    const double center = 0.5 * (hist.edges[b] + hist.edges[b + 1]);
    vw.emplace_back(center, hist.mass[b]);
    total += hist.mass[b];
  }
  if (total <= 0.0)
    throw EmptyTopic("topic " + std::to_string(hist.topic) +
                     ": zero histogram mass");
  const double median = weighted_percentile(vw, 0.5);
  std::vector<std::pair<double, double>> dev;
  dev.reserve(vw.size());
  for (const auto& e : vw) dev.emplace_back(std::abs(e.first - median), e.second);
  Dispersion out;
  out.mad = weighted_percentile(dev, 0.5);
  out.iqr = weighted_percentile(vw, 0.75) - weighted_percentile(vw, 0.25);
  return out;
}

Dispersion count_series_dispersion(const TopicTimeHistogram& hist) {
  if (hist.mass.empty())
    throw EmptyTopic("topic " + std::to_string(hist.topic) + ": no bins");
  std::vector<std::pair<double, double>> vw;
  vw.reserve(hist.mass.size());
  for (double m : hist.mass) vw.emplace_back(m, 1.0);
  const double median = weighted_percentile(vw, 0.5);
  std::vector<std::pair<double, double>> dev;
  dev.reserve(vw.size());
  for (const auto& e : vw) dev.emplace_back(std::abs(e.first - median), 1.0);
  Dispersion out;
  out.mad = weighted_percentile(dev, 0.5);
  out.iqr = weighted_percentile(vw, 0.75) - weighted_percentile(vw, 0.25);
  return out;
}

double sym_kl(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ConfigError("sym_kl: size mismatch");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0) || !(q[i] > 0.0))
      throw DomainError("sym_kl requires strictly positive distributions");
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > 1e-8 || std::abs(sq - 1.0) > 1e-8)
    throw DomainError("sym_kl requires normalized distributions");
  double div = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    div += (p[i] - q[i]) * (std::log(p[i]) - std::log(q[i]));
  return div;
}

namespace {

std::vector<double> beta_rows(const std::vector<double>& lambda, int k, int v) {
  std::vector<double> beta(lambda.size());
  for (int j = 0; j < k; ++j) {
    double sum = 0.0;
    for (int w = 0; w < v; ++w) sum += lambda[static_cast<std::size_t>(j) * v + w];
    for (int w = 0; w < v; ++w)
      beta[static_cast<std::size_t>(j) * v + w] =
          lambda[static_cast<std::size_t>(j) * v + w] / sum;
  }
  return beta;
}

}  // namespace

std::vector<double> sym_kl_matrix(const std::vector<double>& lambda, int k,
                                  int v) {
  const std::vector<double> beta = beta_rows(lambda, k, v);
  std::vector<double> matrix(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    const std::vector<double> pi(beta.begin() + static_cast<std::size_t>(i) * v,
                                 beta.begin() + static_cast<std::size_t>(i + 1) * v);
    for (int j = i + 1; j < k; ++j) {
      const std::vector<double> pj(
          beta.begin() + static_cast<std::size_t>(j) * v,
          beta.begin() + static_cast<std::size_t>(j + 1) * v);
      const double div = sym_kl(pi, pj);
      matrix[static_cast<std::size_t>(i) * k + j] = div;
      matrix[static_cast<std::size_t>(j) * k + i] = div;
    }
  }
  return matrix;
}

TopWordList top_words(const std::vector<double>& lambda, int k, int v,
                      int topic, int n, RankingKind ranking) {
  if (n < 1) throw ConfigError("top_words needs n >= 1");
  if (topic < 0 || topic >= k) throw ConfigError("topic index out of range");
  const std::vector<double> beta = beta_rows(lambda, k, v);

  std::vector<double> score(v);
  if (ranking == RankingKind::beta) {
    for (int w = 0; w < v; ++w)
      score[w] = beta[static_cast<std::size_t>(topic) * v + w];
  } else {
    // r^log_kw = beta_kw (log beta_kw - mean over topics of log beta_k'w).
    for (int w = 0; w < v; ++w) {
      double mean_log = 0.0;
      for (int j = 0; j < k; ++j)
        mean_log += std::log(beta[static_cast<std::size_t>(j) * v + w]);
      mean_log /= k;
      const double b = beta[static_cast<std::size_t>(topic) * v + w];
      score[w] = b * (std::log(b) - mean_log);
    }
  }

  std::vector<int> order(v);
  for (int w = 0; w < v; ++w) order[w] = w;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });

  TopWordList list;
  list.topic = topic;
  list.ranking = ranking;
  const int take = std::min(n, v);
  list.entries.reserve(take);
  for (int i = 0; i < take; ++i)
    list.entries.push_back({order[i], score[order[i]]});
  return list;
}

DispersionReport dispersion_report(const std::string& model_name,
                                   const std::vector<TopicTimeHistogram>& hists,
                                   bool literal_counts) {
  DispersionReport report;
  report.model = model_name;
  for (const auto& hist : hists) {
    const Dispersion d = literal_counts ? count_series_dispersion(hist)
                                        : weighted_dispersion(hist);
    report.rows.push_back({hist.topic, d.mad, d.iqr});
  }
  for (const auto& row : report.rows) {
    report.mean_mad += row.mad;
    report.mean_iqr += row.iqr;
  }
  if (!report.rows.empty()) {
    report.mean_mad /= report.rows.size();
    report.mean_iqr /= report.rows.size();
  }
  return report;
}

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string histogram_csv(const std::vector<TopicTimeHistogram>& hists) {
  std::ostringstream os;
  os << "topic,bin_start,bin_end,mass\n";
  for (const auto& hist : hists)
    for (std::size_t b = 0; b < hist.mass.size(); ++b)
      os << hist.topic << ',' << num(hist.edges[b]) << ','
         << num(hist.edges[b + 1]) << ',' << num(hist.mass[b]) << '\n';
  return os.str();
}

std::string dispersion_csv(const std::vector<DispersionReport>& reports) {
  std::ostringstream os;
  os << "model,topic,mad,iqr\n";
  for (const auto& report : reports)
    for (const auto& row : report.rows)
      os << report.model << ',' << row.topic << ',' << num(row.mad) << ','
         << num(row.iqr) << '\n';
  os << "model,mean_mad,mean_iqr\n";
  for (const auto& report : reports)
    os << report.model << ',' << num(report.mean_mad) << ','
       << num(report.mean_iqr) << '\n';
  return os.str();
}

std::string top_words_csv(const std::vector<TopWordList>& lists,
                          const Vocabulary& vocab) {
  std::ostringstream os;
  os << "topic,rank,word,score,ranking\n";
  for (const auto& list : lists) {
    const char* kind = list.ranking == RankingKind::beta ? "beta" : "r_log";
    for (std::size_t r = 0; r < list.entries.size(); ++r)
      os << list.topic << ',' << (r + 1) << ','
         << vocab.words[list.entries[r].word] << ','
         << num(list.entries[r].score) << ',' << kind << '\n';
  }
  return os.str();
}

std::string sym_kl_csv(const std::vector<double>& matrix, int k) {
  std::ostringstream os;
  os << "topic_i,topic_j,sym_kl\n";
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      os << i << ',' << j << ',' << num(matrix[static_cast<std::size_t>(i) * k + j])
         << '\n';
  return os.str();
}

}  // namespace ttm

#include "ttm/coherence.hpp"

#include <cmath>
#include <unordered_map>

#include "ttm/errors.hpp"

namespace ttm {

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

CoherenceResult coherence_cv(const std::vector<int>& top_words,
                             const std::vector<std::vector<int>>& reference,
                             int window, double npmi_eps) {
  if (top_words.empty()) throw ConfigError("coherence needs >= 1 top word");
  if (reference.empty()) throw ConfigError("coherence reference corpus is empty");
  if (window < 1) throw ConfigError("coherence window must be >= 1");

  const int n = static_cast<int>(top_words.size());
  std::unordered_map<int, int> index;
  for (int i = 0; i < n; ++i) index.emplace(top_words[i], i);

  // Boolean sliding-window counts: joint[i][j] = windows containing both,
  // diagonal = windows containing word i at all.
  long long n_windows = 0;
  std::vector<std::vector<long long>> joint(n, std::vector<long long>(n, 0));
  std::vector<int> in_window(n, 0);
  std::vector<int> present;
  auto top_index = [&](int token) {
    const auto it = index.find(token);
    return it == index.end() ? -1 : it->second;
  };
  auto record_window = [&]() {
    present.clear();
    for (int i = 0; i < n; ++i)
      if (in_window[i] > 0) present.push_back(i);
    ++n_windows;
    for (int a : present)
      for (int b : present) ++joint[a][b];
  };

  for (const auto& tokens : reference) {
    const int len = static_cast<int>(tokens.size());
    if (len == 0) continue;
    const int w = std::min(window, len);
    std::fill(in_window.begin(), in_window.end(), 0);
    for (int i = 0; i < w; ++i) {
      const int ti = top_index(tokens[i]);
      if (ti >= 0) ++in_window[ti];
    }
    record_window();
    for (int start = 1; start + w <= len; ++start) {
      const int out = top_index(tokens[start - 1]);
      if (out >= 0) --in_window[out];
      const int in = top_index(tokens[start + w - 1]);
      if (in >= 0) ++in_window[in];
      record_window();
    }
  }

  CoherenceResult result;
  for (int i = 0; i < n; ++i)
    if (joint[i][i] == 0) result.absent.push_back(top_words[i]);

  // NPMI context vectors; any pair touching an absent word stays zero.
  std::vector<std::vector<double>> npmi(n, std::vector<double>(n, 0.0));
  const double total = static_cast<double>(n_windows);
  for (int i = 0; i < n; ++i) {
    if (joint[i][i] == 0) continue;
    for (int j = 0; j < n; ++j) {
      if (joint[j][j] == 0) continue;
      const double p_i = joint[i][i] / total;
      const double p_j = joint[j][j] / total;
      const double p_ij = joint[i][j] / total;
      const double denom = -std::log(p_ij + npmi_eps);
      if (denom <= 0.0) {
        npmi[i][j] = 1.0;  // both words in every window
      } else {
        npmi[i][j] = (std::log(p_ij + npmi_eps) - std::log(p_i * p_j)) / denom;
      }
    }
  }

  std::vector<double> set_vector(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) set_vector[j] += npmi[i][j];

  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += cosine(npmi[i], set_vector);
  result.cv = sum / n;
  return result;
}

}  // namespace ttm

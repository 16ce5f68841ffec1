// Corpus ingestion: tokenized, timestamped documents -> sparse bag-of-words
// with timestamps normalized into the open unit interval.
//
// Input is line-delimited JSON, one document per line, with fields
//   id        string
//   tokens    array of word strings   (exactly one of tokens/counts)
//   counts    object word -> positive integer
//   timestamp number (epoch seconds, year number, any monotone scalar)
//
// Word ids are assigned in lexicographic order so builds are deterministic
// regardless of input ordering. Raw timestamps are mapped affinely onto
// [margin, 1-margin]; a degenerate corpus (all timestamps equal) maps to 0.5
// everywhere, keeping the pipeline total while the time modality is
// uninformative.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ttm {

struct RawDocument {
  std::string id;
  std::vector<std::string> tokens;  // ordered; counts-form input is expanded
  double raw_timestamp = 0.0;
};

struct Vocabulary {
  std::vector<std::string> words;              // id -> word, lexicographic
  std::unordered_map<std::string, int> index;  // word -> id
  std::vector<int> df;                         // id -> document frequency

  int size() const { return static_cast<int>(words.size()); }
  int id_of(const std::string& w) const {
    auto it = index.find(w);
    return it == index.end() ? -1 : it->second;
  }
};

struct Document {
  std::string id;
  std::vector<std::pair<int, int>> counts;  // (word_id, n_dw), sorted by id
  int total_tokens = 0;                     // N_d
  double t = 0.5;                           // normalized timestamp in (0,1)
  double raw_timestamp = 0.0;
};

// Affine, strictly order-preserving map raw -> [margin, 1-margin].
struct TimeScale {
  double raw_min = 0.0;
  double raw_max = 1.0;
  double margin = 0.01;
  bool degenerate = false;  // raw_min == raw_max: forward() is constant 0.5

  double forward(double raw) const;
  double inverse(double t) const;
};

struct Corpus {
  std::vector<Document> docs;
  int V = 0;
  long long n_tok = 0;  // sum of N_d
  TimeScale scale;

  int D() const { return static_cast<int>(docs.size()); }
};

// Reads line-delimited documents; throws ParseError (with 1-based line
// numbers) on malformed records and InvalidTimestamp on non-finite times.
std::vector<RawDocument> load_jsonl(const std::string& path);

// Writes documents in the same line format (counts form), preserving order.
void save_jsonl(const std::string& path, const std::vector<RawDocument>& docs);

// Retains words with df >= min_df and df/D <= max_df_frac; ids lexicographic.
// Throws ConfigError on bad filters, VocabularyEmpty when nothing survives.
Vocabulary build_vocabulary(const std::vector<RawDocument>& docs, int min_df,
                            double max_df_frac);

// Maps raw timestamps onto [margin, 1-margin]; degenerate input maps to 0.5.
// Throws ConfigError for margin outside (0, 0.5), InvalidTimestamp for
// non-finite values, DomainError for empty input.
std::pair<TimeScale, std::vector<double>> normalize_timestamps(
    const std::vector<double>& raw, double margin);

// Bag-of-words projection; out-of-vocabulary tokens are dropped silently and
// a document with no surviving token yields nullopt (discard).
std::optional<Document> to_bow(const RawDocument& doc, const Vocabulary& vocab, double t);

// Full pipeline: normalize timestamps over all docs, project each to a bag of
// words, discard empties.
Corpus build_corpus(const std::vector<RawDocument>& raw, const Vocabulary& vocab,
                    double margin);

// Deterministic disjoint partition into (train, test); both shares nonempty
// or SplitTooSmall. Throws ConfigError for test_frac outside (0,1).
std::pair<Corpus, Corpus> split(const Corpus& corpus, double test_frac, uint64_t seed);

// Vocabulary file: one word per line; line number == word id.
void save_vocabulary(const std::string& path, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::string& path);

// TimeScale persistence (small JSON object).
void save_time_scale(const std::string& path, const TimeScale& scale);
TimeScale load_time_scale(const std::string& path);

}  // namespace ttm

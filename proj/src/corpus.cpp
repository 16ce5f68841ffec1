#include "ttm/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ttm/errors.hpp"
#include "ttm/io_util.hpp"

namespace ttm {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

RawDocument parse_record(const json& rec, std::size_t line_no) {
  if (!rec.is_object()) parse_fail(line_no, "record is not a JSON object");

  RawDocument doc;
  if (!rec.contains("id") || !rec["id"].is_string())
    parse_fail(line_no, "missing or non-string 'id'");
  doc.id = rec["id"].get<std::string>();

  const bool has_tokens = rec.contains("tokens");
  const bool has_counts = rec.contains("counts");
  if (has_tokens == has_counts)
    parse_fail(line_no, "exactly one of 'tokens' or 'counts' is required");

  if (has_tokens) {
    const json& toks = rec["tokens"];
    if (!toks.is_array()) parse_fail(line_no, "'tokens' is not an array");
    doc.tokens.reserve(toks.size());
    for (const json& tok : toks) {
      if (!tok.is_string()) parse_fail(line_no, "'tokens' entries must be strings");
      std::string w = tok.get<std::string>();
      if (w.empty()) parse_fail(line_no, "'tokens' entries must be nonempty");
      doc.tokens.push_back(std::move(w));
    }
  } else {
    const json& counts = rec["counts"];
    if (!counts.is_object()) parse_fail(line_no, "'counts' is not an object");
    // nlohmann objects iterate in key order, so the expansion is deterministic.
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it.key().empty()) parse_fail(line_no, "'counts' keys must be nonempty");
      if (!it.value().is_number_integer())
        parse_fail(line_no, "'counts' values must be integers");
      const long long c = it.value().get<long long>();
      if (c <= 0) parse_fail(line_no, "'counts' values must be positive");
      for (long long r = 0; r < c; ++r) doc.tokens.push_back(it.key());
    }
  }

  if (!rec.contains("timestamp") || !rec["timestamp"].is_number())
    parse_fail(line_no, "missing or non-numeric 'timestamp'");
  doc.raw_timestamp = rec["timestamp"].get<double>();
  if (!std::isfinite(doc.raw_timestamp))
    throw InvalidTimestamp("line " + std::to_string(line_no) +
                           ": non-finite timestamp");
  return doc;
}

}  // namespace

std::vector<RawDocument> load_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open for reading: " + path);

  std::vector<RawDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;  // tolerate blank lines (e.g. trailing newline)
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      parse_fail(line_no, std::string("invalid JSON (") + e.what() + ")");
    }
    docs.push_back(parse_record(rec, line_no));
  }
  return docs;
}

void save_jsonl(const std::string& path, const std::vector<RawDocument>& docs) {
  std::ostringstream out;
  for (const RawDocument& doc : docs) {
    std::map<std::string, long long> counts;
    for (const std::string& w : doc.tokens) ++counts[w];
    json rec;
    rec["id"] = doc.id;
    rec["counts"] = json::object();
    for (const auto& [w, c] : counts) rec["counts"][w] = c;
    rec["timestamp"] = doc.raw_timestamp;
    out << rec.dump() << '\n';
  }
  write_file_atomic(path, out.str());
}

Vocabulary build_vocabulary(const std::vector<RawDocument>& docs, int min_df,
                            double max_df_frac) {
  if (min_df < 1) throw ConfigError("min_df must be >= 1");
  if (!(max_df_frac > 0.0) || max_df_frac > 1.0)
    throw ConfigError("max_df_frac must lie in (0, 1]");
  if (docs.empty()) throw VocabularyEmpty("no documents");

  std::map<std::string, int> df;  // ordered: gives lexicographic ids for free
  for (const RawDocument& doc : docs) {
    std::set<std::string> seen(doc.tokens.begin(), doc.tokens.end());
    for (const std::string& w : seen) ++df[w];
  }

  const double d = static_cast<double>(docs.size());
  Vocabulary vocab;
  for (const auto& [w, f] : df) {
    if (f >= min_df && static_cast<double>(f) / d <= max_df_frac) {
      vocab.index.emplace(w, vocab.size());
      vocab.words.push_back(w);
      vocab.df.push_back(f);
    }
  }
  if (vocab.words.empty())
    throw VocabularyEmpty("no word passes the document-frequency filters");
  return vocab;
}

std::pair<TimeScale, std::vector<double>> normalize_timestamps(
    const std::vector<double>& raw, double margin) {
  if (!(margin > 0.0) || !(margin < 0.5))
    throw ConfigError("margin must lie in (0, 0.5)");
  if (raw.empty()) throw DomainError("normalize_timestamps: empty input");
  for (double r : raw)
    if (!std::isfinite(r)) throw InvalidTimestamp("non-finite timestamp");

  TimeScale scale;
  scale.margin = margin;
  scale.raw_min = *std::min_element(raw.begin(), raw.end());
  scale.raw_max = *std::max_element(raw.begin(), raw.end());
  scale.degenerate = (scale.raw_min == scale.raw_max);

  std::vector<double> t(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) t[i] = scale.forward(raw[i]);
  return {scale, std::move(t)};
}

double TimeScale::forward(double raw) const {
  if (degenerate) return 0.5;
  return margin + (raw - raw_min) * (1.0 - 2.0 * margin) / (raw_max - raw_min);
}

double TimeScale::inverse(double t) const {
  if (degenerate) return raw_min;
  return raw_min + (t - margin) * (raw_max - raw_min) / (1.0 - 2.0 * margin);
}

std::optional<Document> to_bow(const RawDocument& doc, const Vocabulary& vocab,
                               double t) {
  std::map<int, int> counts;
  for (const std::string& w : doc.tokens) {
    const int id = vocab.id_of(w);
    if (id >= 0) ++counts[id];
  }
  if (counts.empty()) return std::nullopt;

  Document out;
  out.id = doc.id;
  out.t = t;
  out.raw_timestamp = doc.raw_timestamp;
  out.counts.assign(counts.begin(), counts.end());
  for (const auto& wc : out.counts) out.total_tokens += wc.second;
  return out;
}

Corpus build_corpus(const std::vector<RawDocument>& raw, const Vocabulary& vocab,
                    double margin) {
  std::vector<double> times;
  times.reserve(raw.size());
  for (const RawDocument& doc : raw) times.push_back(doc.raw_timestamp);

  auto [scale, t] = normalize_timestamps(times, margin);

  Corpus corpus;
  corpus.scale = scale;
  corpus.V = vocab.size();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (auto doc = to_bow(raw[i], vocab, t[i])) {
      corpus.n_tok += doc->total_tokens;
      corpus.docs.push_back(std::move(*doc));
    }
  }
  return corpus;
}

std::pair<Corpus, Corpus> split(const Corpus& corpus, double test_frac,
                                uint64_t seed) {
  if (!(test_frac > 0.0) || !(test_frac < 1.0))
    throw ConfigError("test_frac must lie in (0, 1)");

  const int d = corpus.D();
  const int n_test = static_cast<int>(std::llround(test_frac * d));
  if (n_test < 1 || n_test >= d)
    throw SplitTooSmall("split of " + std::to_string(d) + " documents at " +
                        std::to_string(test_frac) + " leaves an empty share");

  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<bool> in_test(d, false);
  for (int i = 0; i < n_test; ++i) in_test[order[i]] = true;

  Corpus train, test;
  train.V = test.V = corpus.V;
  train.scale = test.scale = corpus.scale;
  for (int i = 0; i < d; ++i) {
    Corpus& side = in_test[i] ? test : train;
    side.docs.push_back(corpus.docs[i]);
    side.n_tok += corpus.docs[i].total_tokens;
  }
  return {std::move(train), std::move(test)};
}

void save_vocabulary(const std::string& path, const Vocabulary& vocab) {
  std::ostringstream out;
  for (const std::string& w : vocab.words) out << w << '\n';
  write_file_atomic(path, out.str());
}

Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open for reading: " + path);
  Vocabulary vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    vocab.index.emplace(line, vocab.size());
    vocab.words.push_back(line);
  }
  vocab.df.assign(vocab.words.size(), 0);  // df is not persisted
  if (vocab.words.empty()) throw VocabularyEmpty("vocabulary file is empty");
  return vocab;
}

void save_time_scale(const std::string& path, const TimeScale& scale) {
  nlohmann::json j;
  j["raw_min"] = scale.raw_min;
  j["raw_max"] = scale.raw_max;
  j["margin"] = scale.margin;
  j["degenerate"] = scale.degenerate;
  write_file_atomic(path, j.dump(2) + "\n");
}

TimeScale load_time_scale(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("time scale file: ") + e.what());
  }
  TimeScale scale;
  scale.raw_min = j.at("raw_min").get<double>();
  scale.raw_max = j.at("raw_max").get<double>();
  scale.margin = j.at("margin").get<double>();
  scale.degenerate = j.at("degenerate").get<bool>();
  return scale;
}

}  // namespace ttm

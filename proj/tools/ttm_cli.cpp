// Command-line driver for the full experiment lifecycle:
//   prep            corpus artifacts from raw line-delimited documents
//   train           batch / online variational training with restarts
//   eval            metric CSV exports from a model snapshot
//   synth           synthetic corpora with persisted ground truth
//   stability-demo  naive online ToT vs online BToT on an adversarial batch
//
// Every subcommand accepts --config <file> with key=value lines (read by
// CLI11); command-line flags override config-file values. Artifact writes
// are atomic (write-then-rename) and every command is deterministic given
// its configuration, seeds included.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric
// failure.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ttm/baselines.hpp"
#include "ttm/coherence.hpp"
#include "ttm/corpus.hpp"
#include "ttm/errors.hpp"
#include "ttm/eval.hpp"
#include "ttm/io_util.hpp"
#include "ttm/model.hpp"
#include "ttm/synth.hpp"
#include "ttm/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ttm;

namespace {

// ---------------------------------------------------------------------------
// small shared helpers

std::string fmt17(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

TrainMode train_mode_from_string(const std::string& name) {
  if (name == "batch") return TrainMode::batch;
  if (name == "online") return TrainMode::online;
  throw ConfigError("unknown mode '" + name + "' (valid: batch, online)");
}

HeldoutMode heldout_mode_from_string(const std::string& name) {
  if (name == "full") return HeldoutMode::full;
  if (name == "words-only") return HeldoutMode::words_only;
  throw ConfigError("unknown heldout mode '" + name +
                    "' (valid: full, words-only)");
}

RankingKind ranking_from_string(const std::string& name) {
  if (name == "beta") return RankingKind::beta;
  if (name == "r_log") return RankingKind::r_log;
  throw ConfigError("unknown ranking '" + name + "' (valid: beta, r_log)");
}

GenKind gen_kind_from_string(const std::string& name) {
  if (name == "lda") return GenKind::lda;
  if (name == "tot") return GenKind::tot_btot;
  if (name == "wbtot") return GenKind::wbtot;
  throw ConfigError("unknown generator '" + name +
                    "' (valid: lda, tot, wbtot)");
}

// Rebuild a Corpus from prep artifacts: raw documents are projected through
// the stored vocabulary and the stored time scale (not a freshly fitted
// one, so train/test and train/eval stay on the same clock). Timestamps
// outside the stored range are clamped into the open unit interval.
Corpus corpus_from_artifacts(const std::vector<RawDocument>& raws,
                             const Vocabulary& vocab, const TimeScale& scale) {
  Corpus corpus;
  corpus.V = vocab.size();
  corpus.scale = scale;
  for (const RawDocument& raw : raws) {
    const double t =
        std::clamp(scale.forward(raw.raw_timestamp), 1e-12, 1.0 - 1e-12);
    if (auto doc = to_bow(raw, vocab, t)) {
      corpus.n_tok += doc->total_tokens;
      corpus.docs.push_back(std::move(*doc));
    }
  }
  if (corpus.docs.empty())
    throw VocabularyEmpty("no document survives vocabulary projection");
  return corpus;
}

// Inverse of the projection, for writing corpora back out as line-delimited
// token documents (counts form on disk).
std::vector<RawDocument> rawize(const Corpus& corpus, const Vocabulary& vocab) {
  std::vector<RawDocument> out;
  out.reserve(corpus.docs.size());
  for (const Document& doc : corpus.docs) {
    RawDocument raw;
    raw.id = doc.id;
    raw.raw_timestamp = doc.raw_timestamp;
    for (const auto& [word, count] : doc.counts)
      for (int i = 0; i < count; ++i) raw.tokens.push_back(vocab.words[word]);
    out.push_back(std::move(raw));
  }
  return out;
}

std::string sibling_default(const std::string& explicit_path,
                            const std::string& anchor,
                            const std::string& filename) {
  if (!explicit_path.empty()) return explicit_path;
  return (fs::path(anchor).parent_path() / filename).string();
}

void print_corpus_summary(const Corpus& corpus) {
  std::cout << "D:        " << corpus.D() << "\n";
  std::cout << "V:        " << corpus.V << "\n";
  std::cout << "N_tok:    " << corpus.n_tok << "\n";
  std::cout << "timespan: [" << corpus.scale.raw_min << ", "
            << corpus.scale.raw_max << "]\n";
}

// ---------------------------------------------------------------------------
// prep

struct PrepArgs {
  std::string input;
  std::string out_dir;
  int min_df = 1;
  double max_df_frac = 1.0;
  double margin = 0.01;
  double test_frac = 0.0;  // 0 disables the train/test split
  std::uint64_t seed = 0;
};

void cmd_prep(const PrepArgs& a) {
  const std::vector<RawDocument> raws = load_jsonl(a.input);
  const Vocabulary vocab = build_vocabulary(raws, a.min_df, a.max_df_frac);
  const Corpus corpus = build_corpus(raws, vocab, a.margin);

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);
  save_vocabulary((out / "vocab.txt").string(), vocab);
  save_time_scale((out / "time_scale.json").string(), corpus.scale);

  print_corpus_summary(corpus);
  if (a.test_frac > 0.0) {
    const auto [train_part, test_part] = split(corpus, a.test_frac, a.seed);
    save_jsonl((out / "train.jsonl").string(), rawize(train_part, vocab));
    save_jsonl((out / "test.jsonl").string(), rawize(test_part, vocab));
    std::cout << "split:    " << train_part.D() << " train / " << test_part.D()
              << " test\n";
    std::cout << "wrote: " << (out / "train.jsonl").string() << ", "
              << (out / "test.jsonl").string() << ", "
              << (out / "vocab.txt").string() << ", "
              << (out / "time_scale.json").string() << "\n";
  } else {
    save_jsonl((out / "corpus.jsonl").string(), rawize(corpus, vocab));
    std::cout << "wrote: " << (out / "corpus.jsonl").string() << ", "
              << (out / "vocab.txt").string() << ", "
              << (out / "time_scale.json").string() << "\n";
  }
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string corpus;
  std::string vocab;       // defaults to <corpus dir>/vocab.txt
  std::string time_scale;  // defaults to <corpus dir>/time_scale.json
  std::string test;        // optional held-out corpus
  std::string out_dir;

  std::string model = "lda";
  int k = 10;
  std::string mode = "batch";
  int restarts = 1;
  int max_iter = 400;
  double tol = 1e-5;
  int batch_size = 1;
  double tau = 0.0;
  double kappa = 1.0;
  std::string ny = "sqrt";
  double delta = 1.0;
  double nu = 1.0;
  double chi1 = -1.2039728043259361;  // log 0.3
  double chi2 = -1.2039728043259361;
  double alpha0 = 0.0;  // <= 0 means 1/K
  double eta = 0.01;
  bool optimize_hyper = false;
  std::string heldout = "full";
  std::string moments = "laplace";
  std::uint64_t seed = 0;
};

void cmd_train(const TrainArgs& a) {
  const Vocabulary vocab =
      load_vocabulary(sibling_default(a.vocab, a.corpus, "vocab.txt"));
  const TimeScale scale = load_time_scale(
      sibling_default(a.time_scale, a.corpus, "time_scale.json"));
  const Corpus corpus = corpus_from_artifacts(load_jsonl(a.corpus), vocab, scale);
  Corpus test;
  const bool have_test = !a.test.empty();
  if (have_test) test = corpus_from_artifacts(load_jsonl(a.test), vocab, scale);

  TrainConfig cfg;
  cfg.model = model_kind_from_string(a.model);
  cfg.k = a.k;
  cfg.mode = train_mode_from_string(a.mode);
  cfg.restarts = a.restarts;
  cfg.max_em_iter = a.max_iter;
  cfg.perplexity_tol = a.tol;
  cfg.online.S = a.batch_size;
  cfg.online.tau = a.tau;
  cfg.online.kappa = a.kappa;
  cfg.ny = ny_scheme_from_string(a.ny);
  cfg.delta = a.delta;
  cfg.prior = BetaPriorParams{a.nu, a.chi1, a.chi2};
  cfg.moments = moment_method_from_string(a.moments);
  cfg.alpha0 = a.alpha0;
  cfg.eta = a.eta;
  cfg.optimize_hyper = a.optimize_hyper;
  cfg.heldout = heldout_mode_from_string(a.heldout);
  cfg.seed = a.seed;

  const TrainResult result = train(corpus, have_test ? &test : nullptr, cfg);

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);
  save_snapshot((out / "model.json").string(), result.state);
  std::ostringstream log;
  for (const IterationRecord& rec : result.log) {
    json line;
    line["iteration"] = rec.iteration;
    line["elbo"] = rec.elbo;
    line["perplexity"] = rec.perplexity;
    line["wall_ms"] = rec.wall_ms;
    if (std::isfinite(rec.heldout_perplexity))
      line["heldout_perplexity"] = rec.heldout_perplexity;
    log << line.dump() << "\n";
  }
  write_file_atomic((out / "train_log.jsonl").string(), log.str());

  std::cout << "model:            " << to_string(result.state.kind)
            << " (k = " << result.state.k << ", " << a.mode << ")\n";
  std::cout << "restarts:         " << cfg.restarts << " (best "
            << result.best_restart << ")\n";
  std::cout << "iterations:       " << result.iterations
            << (cfg.mode == TrainMode::batch
                    ? (result.converged ? " (converged)" : " (iteration cap)")
                    : " updates")
            << "\n";
  std::cout << "final elbo:       " << fmt17(result.final_elbo) << "\n";
  std::cout << "final perplexity: " << fmt17(result.final_perplexity) << "\n";
  if (have_test && !result.log.empty() &&
      std::isfinite(result.log.back().heldout_perplexity))
    std::cout << "heldout perplexity: "
              << fmt17(result.log.back().heldout_perplexity) << "\n";
  std::cout << "wrote: " << (out / "model.json").string() << ", "
            << (out / "train_log.jsonl").string() << "\n";
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string snapshot;
  std::string corpus;
  std::string vocab;  // defaults to <corpus dir>/vocab.txt
  std::string out_dir;
  std::string metrics = "histograms,dispersion,topwords,symkl,coherence,perplexity";
  double bin_width = 0.0;  // 0: timespan / 50 (1.0 when degenerate)
  int top_n = 10;
  std::string ranking = "r_log";
  int window = 110;
  std::string heldout = "full";
};

std::set<std::string> parse_metrics(const std::string& csv) {
  static const std::set<std::string> valid = {
      "coherence", "dispersion", "histograms",
      "perplexity", "symkl",      "topwords"};
  std::set<std::string> out;
  std::stringstream stream(csv);
  std::string name;
  while (std::getline(stream, name, ',')) {
    if (valid.count(name) == 0) {
      std::string all;
      for (const std::string& v : valid) all += (all.empty() ? "" : ", ") + v;
      throw ConfigError("unknown metric '" + name + "' (valid: " + all + ")");
    }
    out.insert(name);
  }
  if (out.empty()) throw ConfigError("no metrics requested");
  return out;
}

void cmd_eval(const EvalArgs& a) {
  const std::set<std::string> metrics = parse_metrics(a.metrics);
  const RankingKind ranking = ranking_from_string(a.ranking);
  const HeldoutMode heldout = heldout_mode_from_string(a.heldout);

  const ModelState state = load_snapshot(a.snapshot);
  const Vocabulary vocab =
      load_vocabulary(sibling_default(a.vocab, a.corpus, "vocab.txt"));
  if (vocab.size() != state.v)
    throw ConfigError("vocabulary size " + std::to_string(vocab.size()) +
                      " does not match snapshot v = " + std::to_string(state.v));
  const std::vector<RawDocument> raws = load_jsonl(a.corpus);
  const Corpus corpus = corpus_from_artifacts(raws, vocab, state.scale);

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);
  auto emit = [&](const std::string& name, const std::string& content) {
    const std::string path = (out / name).string();
    write_file_atomic(path, content);
    std::cout << "wrote: " << path << "\n";
  };

  if (metrics.count("histograms") || metrics.count("dispersion")) {
    const FitResult fit = e_step_corpus(corpus, state);
    const auto thetas = posterior_thetas(fit);
    const double span = state.scale.raw_max - state.scale.raw_min;
    const double width =
        a.bin_width > 0.0 ? a.bin_width : (span > 0.0 ? span / 50.0 : 1.0);
    const auto hists = topic_time_histogram(corpus, thetas, width);
    if (metrics.count("histograms")) emit("histograms.csv", histogram_csv(hists));
    if (metrics.count("dispersion")) {
      const DispersionReport report =
          dispersion_report(to_string(state.kind), hists);
      emit("dispersion.csv", dispersion_csv({report}));
    }
  }

  std::vector<TopWordList> lists;
  if (metrics.count("topwords") || metrics.count("coherence")) {
    for (int topic = 0; topic < state.k; ++topic)
      lists.push_back(
          top_words(state.lambda, state.k, state.v, topic, a.top_n, ranking));
  }
  if (metrics.count("topwords")) emit("top_words.csv", top_words_csv(lists, vocab));

  if (metrics.count("coherence")) {
    std::vector<std::vector<int>> reference;
    for (const RawDocument& raw : raws) {
      std::vector<int> ids;
      for (const std::string& tok : raw.tokens) {
        const int id = vocab.id_of(tok);
        if (id >= 0) ids.push_back(id);
      }
      if (!ids.empty()) reference.push_back(std::move(ids));
    }
    std::ostringstream csv;
    csv << "topic,cv,absent\n";
    for (const TopWordList& list : lists) {
      std::vector<int> words;
      for (const TopWordEntry& entry : list.entries) words.push_back(entry.word);
      const CoherenceResult res = coherence_cv(words, reference, a.window);
      csv << list.topic << "," << fmt17(res.cv) << "," << res.absent.size()
          << "\n";
    }
    emit("coherence.csv", csv.str());
  }

  if (metrics.count("symkl"))
    emit("sym_kl.csv",
         sym_kl_csv(sym_kl_matrix(state.lambda, state.k, state.v), state.k));

  if (metrics.count("perplexity")) {
    const double value = heldout_perplexity(corpus, state, heldout);
    std::ostringstream csv;
    csv << "metric,value\nperplexity," << fmt17(value) << "\n";
    emit("perplexity.csv", csv.str());
    std::cout << "perplexity: " << fmt17(value) << "\n";
  }
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string gen = "tot";
  int k = 2;
  int vocab_size = 50;
  int docs = 100;
  double mean_len = 20.0;
  std::uint64_t seed = 0;
  std::string out_dir;
};

void cmd_synth(const SynthArgs& a) {
  SynthConfig cfg;
  cfg.kind = gen_kind_from_string(a.gen);
  cfg.k = a.k;
  cfg.v = a.vocab_size;
  cfg.d = a.docs;
  cfg.mean_doc_len = a.mean_len;
  cfg.seed = a.seed;
  const auto [corpus, truth] = generate_corpus(cfg);

  // Zero-padded word names keep lexicographic vocabulary order identical to
  // the generator's word ids, so prep-built corpora round trip exactly.
  int width = 1;
  for (int x = cfg.v - 1; x >= 10; x /= 10) ++width;
  Vocabulary vocab;
  for (int w = 0; w < cfg.v; ++w) {
    std::ostringstream name;
    name << "w" << std::setw(width) << std::setfill('0') << w;
    vocab.index.emplace(name.str(), w);
    vocab.words.push_back(name.str());
  }
  vocab.df.assign(cfg.v, 0);

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);
  save_jsonl((out / "corpus.jsonl").string(), rawize(corpus, vocab));
  save_vocabulary((out / "vocab.txt").string(), vocab);
  save_time_scale((out / "time_scale.json").string(), corpus.scale);
  save_ground_truth((out / "truth.json").string(), truth);

  print_corpus_summary(corpus);
  std::cout << "topics:   " << truth.k << "\n";
  std::cout << "wrote: " << (out / "corpus.jsonl").string() << ", "
            << (out / "vocab.txt").string() << ", "
            << (out / "time_scale.json").string() << ", "
            << (out / "truth.json").string() << "\n";
}

// ---------------------------------------------------------------------------
// stability-demo

struct StabilityArgs {
  double t_common = 0.7;
  int size = 100;
  int starved = 1;
  int k = 2;
  int vocab_size = 20;
  int doc_len = 8;
  int steps = 10;
  std::uint64_t seed = 0;
  double tau = 0.0;
  double kappa = 1.0;
  double nu = 1.0;
  double chi1 = -1.2039728043259361;
  double chi2 = -1.2039728043259361;
  bool benign = false;
  std::string out;  // optional JSON report path
};

void cmd_stability_demo(const StabilityArgs& a) {
  Corpus batch;
  if (a.benign) {
    SynthConfig cfg;
    cfg.kind = GenKind::tot_btot;
    cfg.k = a.k;
    cfg.v = a.vocab_size;
    cfg.d = a.size;
    cfg.mean_doc_len = a.doc_len;
    cfg.seed = a.seed;
    batch = generate_corpus(cfg).first;
  } else {
    batch = adversarial_minibatch(a.starved, a.t_common, a.size, a.k,
                                  a.vocab_size, a.doc_len, a.seed);
  }

  const DirichletHyper hyper{std::vector<double>(a.k, 1.0 / a.k), 0.01};
  const BetaPriorParams prior{a.nu, a.chi1, a.chi2};
  const NyScheme ny;
  OnlineConfig ocfg;
  ocfg.S = batch.D();
  ocfg.tau = a.tau;
  ocfg.kappa = a.kappa;
  ocfg.D_total = batch.D();  // treat the batch as the whole stream: D/S = 1

  // Naive side: classic ToT with an online lambda update and the naive
  // blended-statistics rho refit; failures are collected, never thrown.
  ModelState naive = init_model(ModelKind::tot, a.k, batch.V, hyper, prior,
                                MomentMethod::laplace, ny, 1.0, a.seed,
                                batch.scale);
  std::vector<double> naive_max_abs(a.k, 0.0);
  std::vector<std::vector<std::string>> naive_failures(a.k);
  for (int t = 1; t <= a.steps; ++t) {
    const FitResult fit = e_step_corpus(batch, naive);
    const SuffStats stats = accumulate_stats(batch, naive, fit);
    const double rate = mixing_rate(t, ocfg);
    naive.lambda = lda_m_step_online(naive.lambda, stats.word, a.k, batch.V,
                                     hyper.eta, rate, ocfg);
    const NaiveTotResult step =
        tot_online_m_step_naive(naive.rho, stats.time_stats(), rate);
    for (const NaiveTotFailure& f : step.failures)
      naive_failures[f.topic].push_back("step " + std::to_string(t) + ": " +
                                        f.reason);
    naive.rho = step.rho;
    for (int j = 0; j < a.k; ++j)
      naive_max_abs[j] =
          std::max({naive_max_abs[j], std::abs(naive.rho[j].rho1),
                    std::abs(naive.rho[j].rho2)});
  }
  bool naive_diverged = false;
  for (int j = 0; j < a.k; ++j)
    if (!naive_failures[j].empty() || naive_max_abs[j] > kRhoCap)
      naive_diverged = true;

  // Bayesian side: the same stream through the online BToT natural-gradient
  // update; the Holder bound is asserted inside every M-step.
  ModelState bayes = init_model(ModelKind::btot, a.k, batch.V, hyper, prior,
                                MomentMethod::laplace, ny, 1.0, a.seed,
                                batch.scale);
  for (int t = 1; t <= a.steps; ++t) {
    const FitResult fit = e_step_corpus(batch, bayes);
    const SuffStats stats = accumulate_stats(batch, bayes, fit);
    m_step_online(bayes, stats, mixing_rate(t, ocfg), ocfg);
  }
  bool bayes_bounded = true;
  for (int j = 0; j < a.k; ++j) {
    const BetaPriorPosterior& post = bayes.rho_post[j];
    const Moments& mom = bayes.moments[j];
    if (!std::isfinite(post.mu) || !std::isfinite(post.psi1) ||
        !std::isfinite(post.psi2) || !std::isfinite(mom.rho1) ||
        !std::isfinite(mom.rho2) || !holder_bound_ok(post, prior))
      bayes_bounded = false;
  }

  // Two-column console report.
  const int col = 58;
  auto clipped = [&](std::string text) {
    if (static_cast<int>(text.size()) > col - 2)
      text = text.substr(0, col - 4) + "..";
    return text;
  };
  auto naive_cell = [&](int j) {
    std::ostringstream os;
    if (!naive_failures[j].empty()) {
      os << "diverged (" << naive_failures[j].front() << ")";
    } else {
      os << "rho = (" << std::setprecision(6) << naive.rho[j].rho1 << ", "
         << naive.rho[j].rho2 << "), max |rho| = " << naive_max_abs[j];
    }
    return clipped(os.str());
  };
  auto bayes_cell = [&](int j) {
    std::ostringstream os;
    os << std::setprecision(6) << "mu = " << bayes.rho_post[j].mu
       << ", <rho> = (" << bayes.moments[j].rho1 << ", "
       << bayes.moments[j].rho2 << ")";
    return os.str();
  };
  std::cout << (a.benign ? "benign mini-batch" : "adversarial mini-batch")
            << ": " << batch.D() << " documents, " << a.steps
            << " online updates\n";
  std::cout << std::left << std::setw(8) << "topic" << std::setw(col)
            << "naive online ToT" << "online BToT\n";
  for (int j = 0; j < a.k; ++j)
    std::cout << std::left << std::setw(8) << j << std::setw(col)
              << naive_cell(j) << bayes_cell(j) << "\n";
  std::cout << std::left << std::setw(8) << "overall" << std::setw(col)
            << (naive_diverged ? "DIVERGED" : "BOUNDED")
            << (bayes_bounded ? "BOUNDED" : "UNBOUNDED") << "\n";

  if (!a.out.empty()) {
    json naive_topics = json::array();
    for (int j = 0; j < a.k; ++j) {
      json topic;
      topic["topic"] = j;
      topic["rho1"] = naive.rho[j].rho1;
      topic["rho2"] = naive.rho[j].rho2;
      topic["max_abs_rho"] = naive_max_abs[j];
      topic["failures"] = naive_failures[j];
      naive_topics.push_back(topic);
    }
    json bayes_topics = json::array();
    for (int j = 0; j < a.k; ++j) {
      json topic;
      topic["topic"] = j;
      topic["mu"] = bayes.rho_post[j].mu;
      topic["psi1"] = bayes.rho_post[j].psi1;
      topic["psi2"] = bayes.rho_post[j].psi2;
      topic["rho1_mean"] = bayes.moments[j].rho1;
      topic["rho2_mean"] = bayes.moments[j].rho2;
      topic["holder_ok"] = holder_bound_ok(bayes.rho_post[j], prior);
      bayes_topics.push_back(topic);
    }
    json report;
    report["format"] = "ttm-stability-report";
    report["version"] = 1;
    report["benign"] = a.benign;
    report["t_common"] = a.t_common;
    report["size"] = batch.D();
    report["steps"] = a.steps;
    report["k"] = a.k;
    report["v"] = batch.V;
    report["seed"] = a.seed;
    report["naive_tot"] = {
        {"status", naive_diverged ? "diverged" : "bounded"},
        {"topics", naive_topics}};
    report["online_btot"] = {
        {"status", bayes_bounded ? "bounded" : "diverged"},
        {"topics", bayes_topics}};
    write_file_atomic(a.out, report.dump(2) + "\n");
    std::cout << "report: " << a.out << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian topics-over-time: corpus prep, training, evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "key=value config file with one [subcommand] section per "
                 "command; command-line flags win");

  PrepArgs prep_args;
  CLI::App* prep = app.add_subcommand("prep", "build corpus artifacts");
  prep->configurable()->fallthrough();
  prep->add_option("--input", prep_args.input, "line-delimited documents")
      ->required();
  prep->add_option("--out-dir", prep_args.out_dir, "artifact directory")
      ->required();
  prep->add_option("--min-df", prep_args.min_df, "minimum document frequency");
  prep->add_option("--max-df-frac", prep_args.max_df_frac,
                   "maximum document-frequency fraction");
  prep->add_option("--margin", prep_args.margin, "timestamp margin in (0, 0.5)");
  prep->add_option("--test-frac", prep_args.test_frac,
                   "held-out fraction (0 disables the split)");
  prep->add_option("--seed", prep_args.seed, "split seed");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "fit a model");
  train_cmd->configurable()->fallthrough();
  train_cmd->add_option("--corpus", train_args.corpus, "training corpus (JSONL)")
      ->required();
  train_cmd->add_option("--vocab", train_args.vocab,
                        "vocabulary file (default: sibling vocab.txt)");
  train_cmd->add_option("--time-scale", train_args.time_scale,
                        "time scale file (default: sibling time_scale.json)");
  train_cmd->add_option("--test", train_args.test, "held-out corpus (JSONL)");
  train_cmd->add_option("--out-dir", train_args.out_dir, "run directory")
      ->required();
  train_cmd->add_option("--model", train_args.model, "lda|tot|btot|wbtot");
  train_cmd->add_option("--k", train_args.k, "number of topics");
  train_cmd->add_option("--mode", train_args.mode, "batch|online");
  train_cmd->add_option("--restarts", train_args.restarts, "seeded restarts");
  train_cmd->add_option("--max-iter", train_args.max_iter,
                        "EM iteration cap (online: passes)");
  train_cmd->add_option("--tol", train_args.tol, "perplexity stopping tolerance");
  train_cmd->add_option("--batch-size", train_args.batch_size,
                        "online mini-batch size S");
  train_cmd->add_option("--tau", train_args.tau, "online delay tau >= 0");
  train_cmd->add_option("--kappa", train_args.kappa,
                        "online forgetting rate in [0.5, 1]");
  train_cmd->add_option("--ny", train_args.ny, "const:<c>|frac:<d>|sqrt");
  train_cmd->add_option("--delta", train_args.delta,
                        "balancing weight in (0, 1]");
  train_cmd->add_option("--nu", train_args.nu, "Beta-prior strength");
  train_cmd->add_option("--chi1", train_args.chi1, "Beta-prior location chi^1");
  train_cmd->add_option("--chi2", train_args.chi2, "Beta-prior location chi^2");
  train_cmd->add_option("--alpha0", train_args.alpha0,
                        "symmetric alpha (<= 0: 1/K)");
  train_cmd->add_option("--eta", train_args.eta, "topic-word prior");
  train_cmd->add_flag("--optimize-hyper", train_args.optimize_hyper,
                      "fixed-point alpha/eta updates");
  train_cmd->add_option("--heldout", train_args.heldout, "full|words-only");
  train_cmd->add_option("--moments", train_args.moments, "laplace|quadrature");
  train_cmd->add_option("--seed", train_args.seed, "base seed");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "export metric CSVs");
  eval_cmd->configurable()->fallthrough();
  eval_cmd->add_option("--snapshot", eval_args.snapshot, "model snapshot")
      ->required();
  eval_cmd->add_option("--corpus", eval_args.corpus, "corpus file (JSONL)")
      ->required();
  eval_cmd->add_option("--vocab", eval_args.vocab,
                       "vocabulary file (default: sibling vocab.txt)");
  eval_cmd->add_option("--out-dir", eval_args.out_dir, "output directory")
      ->required();
  eval_cmd->add_option("--metrics", eval_args.metrics,
                       "comma list: histograms,dispersion,topwords,symkl,"
                       "coherence,perplexity");
  eval_cmd->add_option("--bin-width", eval_args.bin_width,
                       "histogram bin width, raw units (0: timespan/50)");
  eval_cmd->add_option("--top-n", eval_args.top_n, "top words per topic");
  eval_cmd->add_option("--ranking", eval_args.ranking, "beta|r_log");
  eval_cmd->add_option("--window", eval_args.window, "coherence window size");
  eval_cmd->add_option("--heldout", eval_args.heldout, "full|words-only");

  SynthArgs synth_args;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic corpus");
  synth_cmd->configurable()->fallthrough();
  synth_cmd->add_option("--gen", synth_args.gen, "lda|tot|wbtot");
  synth_cmd->add_option("--k", synth_args.k, "number of topics");
  synth_cmd->add_option("--vocab-size", synth_args.vocab_size, "vocabulary size");
  synth_cmd->add_option("--docs", synth_args.docs, "number of documents");
  synth_cmd->add_option("--mean-len", synth_args.mean_len,
                        "mean document length (Poisson, >= 1)");
  synth_cmd->add_option("--seed", synth_args.seed, "generator seed");
  synth_cmd->add_option("--out-dir", synth_args.out_dir, "artifact directory")
      ->required();

  StabilityArgs stab_args;
  CLI::App* stab_cmd = app.add_subcommand(
      "stability-demo", "naive online ToT vs online BToT on one mini-batch");
  stab_cmd->configurable()->fallthrough();
  stab_cmd->add_option("--t-common", stab_args.t_common,
                       "shared timestamp of the adversarial batch");
  stab_cmd->add_option("--size", stab_args.size, "mini-batch size");
  stab_cmd->add_option("--starved", stab_args.starved, "starved topic index");
  stab_cmd->add_option("--k", stab_args.k, "number of topics");
  stab_cmd->add_option("--vocab-size", stab_args.vocab_size, "vocabulary size");
  stab_cmd->add_option("--doc-len", stab_args.doc_len, "document length");
  stab_cmd->add_option("--steps", stab_args.steps, "online updates to run");
  stab_cmd->add_option("--seed", stab_args.seed, "seed");
  stab_cmd->add_option("--tau", stab_args.tau, "online delay tau >= 0");
  stab_cmd->add_option("--kappa", stab_args.kappa,
                       "online forgetting rate in [0.5, 1]");
  stab_cmd->add_option("--nu", stab_args.nu, "Beta-prior strength");
  stab_cmd->add_option("--chi1", stab_args.chi1, "Beta-prior location chi^1");
  stab_cmd->add_option("--chi2", stab_args.chi2, "Beta-prior location chi^2");
  stab_cmd->add_flag("--benign", stab_args.benign,
                     "use a well-mixed mini-batch instead");
  stab_cmd->add_option("--out", stab_args.out, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (prep->parsed()) cmd_prep(prep_args);
    if (train_cmd->parsed()) cmd_train(train_args);
    if (eval_cmd->parsed()) cmd_eval(eval_args);
    if (synth_cmd->parsed()) cmd_synth(synth_args);
    if (stab_cmd->parsed()) cmd_stability_demo(stab_args);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 10;
  }
}

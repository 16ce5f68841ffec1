#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "ttm/bayes_tot.hpp"
#include "ttm/errors.hpp"
#include "ttm/special.hpp"

using namespace ttm;

namespace {

Document make_doc(std::string id, std::vector<std::pair<int, int>> counts,
                  double t) {
  Document d;
  d.id = std::move(id);
  d.counts = std::move(counts);
  for (const auto& wc : d.counts) d.total_tokens += wc.second;
  d.t = t;
  d.raw_timestamp = t;
  return d;
}

Corpus random_corpus(std::mt19937_64& rng, int d_count, int v, int max_len) {
  Corpus c;
  c.V = v;
  std::uniform_int_distribution<int> len(3, max_len);
  std::uniform_int_distribution<int> word(0, v - 1);
  std::uniform_real_distribution<double> time(0.05, 0.95);
  for (int d = 0; d < d_count; ++d) {
    std::map<int, int> counts;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) ++counts[word(rng)];
    Document doc;
    doc.id = "d" + std::to_string(d);
    doc.counts.assign(counts.begin(), counts.end());
    doc.total_tokens = n;
    doc.t = time(rng);
    doc.raw_timestamp = doc.t;
    c.docs.push_back(std::move(doc));
    c.n_tok += n;
  }
  return c;
}

std::vector<double> random_lambda(std::mt19937_64& rng, int k, int v) {
  std::normal_distribution<double> init(1.0, 0.1);
  std::vector<double> lambda(static_cast<std::size_t>(k) * v);
  for (double& x : lambda) x = std::max(0.01, init(rng));
  return lambda;
}

Moments point_mass(double r1, double r2) {
  Moments m;
  m.rho1 = r1;
  m.rho2 = r2;
  m.log_b = log_beta(r1, r2);
  m.log_norm = 0.0;
  return m;
}

const BetaPriorParams kPrior{1.0, std::log(0.3), std::log(0.45)};

}  // namespace

TEST_CASE("ny_weight: schemes and validation") {
  CHECK(ny_weight(100, {NySchemeKind::fraction, 0.1}) == doctest::Approx(10.0));
  CHECK(ny_weight(81, {NySchemeKind::sqrt_len, 0.0}) == doctest::Approx(9.0));
  CHECK(ny_weight(1, {NySchemeKind::constant, 1.0}) == 1.0);
  CHECK(ny_weight(5000, {NySchemeKind::constant, 1.0}) == 1.0);
  CHECK_THROWS_AS(ny_weight(10, {NySchemeKind::constant, 0.0}), ConfigError);
  CHECK_THROWS_AS(ny_weight(10, {NySchemeKind::fraction, -0.2}), ConfigError);
  CHECK_THROWS_AS(ny_weight(0, {NySchemeKind::sqrt_len, 0.0}), DomainError);
}

TEST_CASE("btot_e_step: uniform moments reduce to LDA") {
  std::mt19937_64 rng(5);
  Corpus corpus = random_corpus(rng, 10, 8, 15);
  const int k = 3;
  std::vector<double> lambda = random_lambda(rng, k, corpus.V);
  std::vector<double> elb = expected_log_beta_from_lambda(lambda, k, corpus.V);
  std::vector<double> alpha = {0.3, 0.6, 0.9};
  std::vector<Moments> unit(k, point_mass(1.0, 1.0));  // log B(1,1) = 0
  for (const Document& doc : corpus.docs) {
    DocPosterior a = lda_e_step(doc, elb, corpus.V, alpha);
    DocPosterior b = btot_e_step(doc, elb, corpus.V, alpha, unit);
    for (int j = 0; j < k; ++j)
      CHECK(a.gamma[j] == doctest::Approx(b.gamma[j]).epsilon(1e-13));
  }
}

TEST_CASE("btot_e_step: point-mass moments reproduce the classic ToT step") {
  std::mt19937_64 rng(17);
  Corpus corpus = random_corpus(rng, 50, 10, 20);
  const int k = 2;
  std::vector<double> lambda = random_lambda(rng, k, corpus.V);
  std::vector<double> elb = expected_log_beta_from_lambda(lambda, k, corpus.V);
  std::vector<double> alpha = {0.5, 0.8};
  std::vector<BetaParams> rho = {{50.0, 2.0}, {2.0, 50.0}};
  std::vector<Moments> moments = {point_mass(50.0, 2.0), point_mass(2.0, 50.0)};
  for (const Document& doc : corpus.docs) {
    DocPosterior a = tot_e_step(doc, elb, corpus.V, alpha, rho);
    DocPosterior b = btot_e_step(doc, elb, corpus.V, alpha, moments);
    for (std::size_t i = 0; i < a.phi.size(); ++i)
      CHECK(a.phi[i] == doctest::Approx(b.phi[i]).epsilon(1e-10));
    for (int j = 0; j < k; ++j)
      CHECK(a.gamma[j] == doctest::Approx(b.gamma[j]).epsilon(1e-10));
  }

  // Same dominance example as the classic step: late doc, late topic.
  Document late = make_doc("late", {{0, 1}, {1, 2}}, 0.95);
  std::vector<double> flat = {-1.0, -1.3, -1.0, -1.3};
  DocPosterior post = btot_e_step(late, flat, 2, {0.5, 0.5}, moments);
  CHECK(post.phi[0] > 0.99);
  CHECK(post.phi[2] > 0.99);
}

TEST_CASE("btot_e_step: time-mirrored topics at t=0.5 stay symmetric") {
  Document doc = make_doc("d", {{0, 3}}, 0.5);
  std::vector<double> elb = {-1.0, -1.0};
  std::vector<Moments> moments = {point_mass(6.0, 2.5), point_mass(2.5, 6.0)};
  DocPosterior post = btot_e_step(doc, elb, 1, {0.5, 0.5}, moments);
  CHECK(post.phi[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(post.gamma[0] == doctest::Approx(post.gamma[1]).epsilon(1e-12));
}

TEST_CASE("wbtot_e_step: ny -> 0 recovers LDA") {
  std::mt19937_64 rng(23);
  Corpus corpus = random_corpus(rng, 20, 9, 18);
  const int k = 3;
  std::vector<double> lambda = random_lambda(rng, k, corpus.V);
  std::vector<double> elb = expected_log_beta_from_lambda(lambda, k, corpus.V);
  std::vector<double> alpha = {0.4, 0.6, 0.8};
  std::vector<Moments> moments = {point_mass(3.0, 6.0), point_mass(5.0, 5.0),
                                  point_mass(6.0, 3.0)};
  for (const Document& doc : corpus.docs) {
    DocPosterior a = lda_e_step(doc, elb, corpus.V, alpha);
    WbtotDocPosterior b =
        wbtot_e_step(doc, elb, corpus.V, alpha, moments, 1e-12);
    for (int j = 0; j < k; ++j)
      CHECK(a.gamma[j] == doctest::Approx(b.gamma[j]).epsilon(1e-10));
    for (std::size_t i = 0; i < a.phi.size(); ++i)
      CHECK(a.phi[i] == doctest::Approx(b.phi[i]).epsilon(1e-10));
  }
}

TEST_CASE("wbtot_e_step: ny=1 acts like one pseudo-token") {
  // Words pin phi (strongly separated rows), so the only difference from LDA
  // is the single ny-weighted pseudo-count entering gamma.
  Document doc = make_doc("d", {{0, 2}, {1, 3}, {2, 1}}, 0.6);
  const int k = 2, v = 3;
  std::vector<double> elb = {-0.2, -8.0, -8.0, -8.0, -0.2, -0.2};
  std::vector<double> alpha = {0.5, 0.5};
  std::vector<Moments> moments = {point_mass(6.0, 4.0), point_mass(4.0, 6.0)};

  DocPosterior lda = lda_e_step(doc, elb, v, alpha, 1e-8, 1000);
  WbtotDocPosterior wb =
      wbtot_e_step(doc, elb, v, alpha, moments, 1.0, 1e-8, 1000);
  for (int j = 0; j < k; ++j)
    CHECK(std::abs(wb.gamma[j] - lda.gamma[j]) <= 1.0 + 1e-9);

  // eps is one normalized multinomial regardless of ny.
  double eps_sum = 0.0;
  for (double e : wb.epsilon) eps_sum += e;
  CHECK(eps_sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("wbtot_e_step: separated time modes concentrate eps, not phi") {
  // Word evidence points at topic 1; the timestamp (t=0.8) matches topic 0's
  // late mode. eps follows time, phi follows words.
  Document doc = make_doc("d", {{0, 4}, {1, 4}}, 0.8);
  const int v = 2;
  std::vector<double> elb = {-6.0, -6.0,    // topic 0: words unlikely
                             -0.5, -0.5};   // topic 1: words likely
  std::vector<double> alpha = {0.5, 0.5};
  std::vector<Moments> moments = {point_mass(80.0, 20.0), point_mass(20.0, 80.0)};

  WbtotDocPosterior post =
      wbtot_e_step(doc, elb, v, alpha, moments, 10.0, 1e-6, 500);
  CHECK(post.epsilon[0] > 0.99);
  for (std::size_t u = 0; u < doc.counts.size(); ++u) {
    CHECK(post.phi[u * 2 + 0] + post.phi[u * 2 + 1] ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(post.phi[u * 2 + 1] > 0.9);  // still word-driven
  }
}

TEST_CASE("wbtot_e_step: gamma reconstruction holds exactly at exit") {
  std::mt19937_64 rng(31);
  Corpus corpus = random_corpus(rng, 15, 7, 12);
  const int k = 3;
  std::vector<double> lambda = random_lambda(rng, k, corpus.V);
  std::vector<double> elb = expected_log_beta_from_lambda(lambda, k, corpus.V);
  std::vector<double> alpha = {0.3, 0.5, 0.7};
  std::vector<Moments> moments = {point_mass(4.0, 7.0), point_mass(5.0, 5.0),
                                  point_mass(7.0, 4.0)};
  for (const Document& doc : corpus.docs) {
    const double ny = ny_weight(doc.total_tokens, {NySchemeKind::sqrt_len, 0.0});
    WbtotDocPosterior post =
        wbtot_e_step(doc, elb, corpus.V, alpha, moments, ny);
    std::vector<double> mass = doc_topic_mass(doc, post, k);
    for (int j = 0; j < k; ++j) {
      const double rebuilt = alpha[j] + mass[j] + ny * post.epsilon[j];
      CHECK(post.gamma[j] == doctest::Approx(rebuilt).epsilon(1e-12));
    }
  }
}

TEST_CASE("btot_m_step_batch: conjugate blends") {
  // Empty topic: posterior collapses to the prior.
  std::vector<TimeSuffStats> stats = {{0.0, 0.0, 0.0}};
  std::vector<BetaPriorPosterior> posts = btot_m_step_batch(stats, kPrior);
  CHECK(posts[0].mu == kPrior.nu);
  CHECK(posts[0].psi1 == kPrior.chi1);
  CHECK(posts[0].psi2 == kPrior.chi2);

  // Fixed point of blending: stats equal to the prior location.
  stats = {{kPrior.nu, kPrior.chi1, kPrior.chi2}};
  posts = btot_m_step_batch(stats, kPrior);
  CHECK(posts[0].mu == doctest::Approx(2.0 * kPrior.nu).epsilon(1e-15));
  CHECK(posts[0].psi1 == doctest::Approx(kPrior.chi1).epsilon(1e-15));
  CHECK(posts[0].psi2 == doctest::Approx(kPrior.chi2).epsilon(1e-15));

  // Pinned arithmetic example.
  BetaPriorParams prior{0.02, std::log(0.45), 2.0 * std::log(0.45)};
  stats = {{100.0, -1.0, -0.5}};
  posts = btot_m_step_batch(stats, prior);
  CHECK(posts[0].mu == doctest::Approx(100.02).epsilon(1e-15));
  CHECK(posts[0].psi1 ==
        doctest::Approx(-0.99995970959732416).epsilon(1e-14));
  CHECK(posts[0].psi2 ==
        doctest::Approx(-0.50021935920664584).epsilon(1e-14));
  // Independent weighted-average view of the same update.
  const double w_data = 100.0 / 100.02, w_prior = 0.02 / 100.02;
  CHECK(posts[0].psi1 ==
        doctest::Approx(w_data * -1.0 + w_prior * std::log(0.45)).epsilon(1e-13));
}

TEST_CASE("m-steps keep the Hoelder bound on random statistics") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> time(0.01, 0.99);
  std::uniform_int_distribution<int> nd(1, 40);
  for (int corpus = 0; corpus < 100; ++corpus) {
    const int k = 1 + corpus % 4;
    std::vector<TimeSuffStats> stats(k);
    for (int j = 0; j < k; ++j) {
      const int n = nd(rng);
      double s1 = 0.0, s2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double t = time(rng);
        s1 += std::log(t);
        s2 += std::log1p(-t);
      }
      stats[j] = TimeSuffStats::from_sums(n, s1, s2);
    }
    // Throws on violation; reaching the end of the loop is the assertion.
    std::vector<BetaPriorPosterior> batch = wbtot_m_step_batch(stats, kPrior);
    for (const BetaPriorPosterior& p : batch) CHECK(holder_bound_ok(p, kPrior));

    OnlineConfig cfg;
    cfg.S = 4;
    cfg.D_total = 40;
    std::vector<BetaPriorPosterior> online =
        btot_m_step_online(batch, stats, kPrior, 0.3, cfg);
    for (const BetaPriorPosterior& p : online) CHECK(holder_bound_ok(p, kPrior));
  }
}

TEST_CASE("btot_m_step_online: blend semantics") {
  OnlineConfig cfg;

  // Full corpus, rho=1, S=D: equals the batch update.
  std::vector<TimeSuffStats> stats = {{12.0, -1.1, -0.7}, {7.0, -0.9, -1.2}};
  cfg.S = 5;
  cfg.D_total = 5;
  std::vector<BetaPriorPosterior> init(2);
  init[0] = {3.0, -1.0, -1.0};
  init[1] = {4.0, -0.8, -1.3};
  std::vector<BetaPriorPosterior> online =
      btot_m_step_online(init, stats, kPrior, 1.0, cfg);
  std::vector<BetaPriorPosterior> batch = btot_m_step_batch(stats, kPrior);
  for (int j = 0; j < 2; ++j) {
    CHECK(online[j].mu == doctest::Approx(batch[j].mu).epsilon(1e-14));
    CHECK(online[j].psi1 == doctest::Approx(batch[j].psi1).epsilon(1e-14));
    CHECK(online[j].psi2 == doctest::Approx(batch[j].psi2).epsilon(1e-14));
  }

  // Starved topic with rho=1: collapses to the prior, no divergence.
  std::vector<TimeSuffStats> starved = {{0.0, 0.0, 0.0}, {5.0, -1.0, -0.8}};
  online = btot_m_step_online(init, starved, kPrior, 1.0, cfg);
  CHECK(online[0].mu == doctest::Approx(kPrior.nu).epsilon(1e-14));
  CHECK(online[0].psi1 == doctest::Approx(kPrior.chi1).epsilon(1e-14));

  // Hand-checked scalar blend at rho = 0.5.
  BetaPriorParams prior{1.0, -1.2, -1.5};
  std::vector<BetaPriorPosterior> cur = {{4.0, -1.0, -2.0}};
  std::vector<TimeSuffStats> mb = {{2.0, -0.9, -1.1}};
  OnlineConfig c2;
  c2.S = 1;
  c2.D_total = 3;  // effective mass 6
  std::vector<BetaPriorPosterior> out =
      btot_m_step_online(cur, mb, prior, 0.5, c2);
  CHECK(out[0].mu == doctest::Approx(5.5).epsilon(1e-14));
  CHECK(out[0].psi1 == doctest::Approx(-5.3 / 5.5).epsilon(1e-14));
  CHECK(out[0].psi2 == doctest::Approx(-8.05 / 5.5).epsilon(1e-14));

  // Two successive updates with identical stats compose like one update with
  // weight 1 - (1-r1)(1-r2).
  std::vector<BetaPriorPosterior> two =
      btot_m_step_online(btot_m_step_online(cur, mb, prior, 0.4, c2), mb, prior,
                         0.25, c2);
  const double eff = 1.0 - (1.0 - 0.4) * (1.0 - 0.25);
  std::vector<BetaPriorPosterior> one =
      btot_m_step_online(cur, mb, prior, eff, c2);
  CHECK(two[0].mu == doctest::Approx(one[0].mu).epsilon(1e-13));
  CHECK(two[0].psi1 == doctest::Approx(one[0].psi1).epsilon(1e-13));
  CHECK(two[0].psi2 == doctest::Approx(one[0].psi2).epsilon(1e-13));
}

TEST_CASE("btot_delta_variant: scaling and absorption identity") {
  std::vector<TimeSuffStats> stats = {{10.0, -1.0, -0.8}, {4.0, -1.3, -0.5}};

  // delta = 1 is the identity.
  std::vector<BetaPriorPosterior> plain = btot_m_step_batch(stats, kPrior, 1.0);
  std::vector<BetaPriorPosterior> ident =
      btot_m_step_batch(btot_delta_variant(stats, 1.0), kPrior);
  CHECK(plain[0].psi1 == ident[0].psi1);

  // delta = 0.5 halves every N entering mu and psi.
  std::vector<BetaPriorPosterior> half = btot_m_step_batch(stats, kPrior, 0.5);
  CHECK(half[0].mu == doctest::Approx(kPrior.nu + 5.0).epsilon(1e-15));
  CHECK(half[1].mu == doctest::Approx(kPrior.nu + 2.0).epsilon(1e-15));

  // Absorption: the delta-variant psi fixed point equals the plain update
  // under the rescaled prior strength nu/delta (the nu*chi products then
  // match delta-scaled statistics term by term).
  const double delta = 0.3;
  std::vector<BetaPriorPosterior> variant =
      btot_m_step_batch(stats, kPrior, delta);
  BetaPriorParams rescaled{kPrior.nu / delta, kPrior.chi1, kPrior.chi2};
  std::vector<BetaPriorPosterior> absorbed =
      btot_m_step_batch(stats, rescaled, 1.0);
  for (int j = 0; j < 2; ++j) {
    CHECK(variant[j].psi1 == doctest::Approx(absorbed[j].psi1).epsilon(1e-13));
    CHECK(variant[j].psi2 == doctest::Approx(absorbed[j].psi2).epsilon(1e-13));
  }

  CHECK_THROWS_AS(btot_delta_variant(stats, 0.0), ConfigError);
  CHECK_THROWS_AS(btot_delta_variant(stats, 1.5), ConfigError);
}

TEST_CASE("btot batch fixed point at nu=1e-8 meets the unregularized equations") {
  BetaPriorParams weak{1e-8, std::log(0.3), std::log(0.45)};
  std::vector<TimeSuffStats> stats = {{5.0, -1.0, -1.0}};
  std::vector<BetaPriorPosterior> posts = btot_m_step_batch(stats, weak);
  LaplaceResult lap = laplace_expansion(posts[0]);
  const double s = lap.mode.rho1 + lap.mode.rho2;
  const double r1 = digamma(lap.mode.rho1) - digamma(s) - stats[0].l1;
  const double r2 = digamma(lap.mode.rho2) - digamma(s) - stats[0].l2;
  CHECK(std::abs(r1) < 1e-6);
  CHECK(std::abs(r2) < 1e-6);
}

TEST_CASE("moment cache coherence: recomputation is bit-identical") {
  std::vector<BetaPriorPosterior> posts = {{40.0, std::log(0.4), std::log(0.35)},
                                           {9.0, std::log(0.25), std::log(0.6)}};
  for (MomentMethod method : {MomentMethod::laplace, MomentMethod::quadrature}) {
    std::vector<Moments> a = topic_moments(posts, method);
    std::vector<Moments> b = topic_moments(posts, method);
    for (std::size_t k = 0; k < posts.size(); ++k) {
      CHECK(a[k].rho1 == b[k].rho1);
      CHECK(a[k].rho2 == b[k].rho2);
      CHECK(a[k].log_b == b[k].log_b);
      CHECK(a[k].log_norm == b[k].log_norm);
    }
  }
}

TEST_CASE("btot_elbo: pinned single-doc regression value") {
  Corpus corpus;
  corpus.V = 2;
  corpus.docs.push_back(make_doc("d", {{0, 1}}, 0.3));
  corpus.n_tok = 1;
  std::vector<double> lambda = {1.0, 1.0};
  DirichletHyper hyper;
  hyper.alpha = {0.5};
  hyper.eta = 0.1;

  BetaPriorParams prior{2.0, std::log(0.3), std::log(0.45)};
  std::vector<BetaPriorPosterior> rho_posts = {
      {5.0, std::log(0.35), std::log(0.4)}};
  std::vector<Moments> moments = topic_moments(rho_posts, MomentMethod::laplace);
  const double prior_log_norm =
      beta_prior_moments({prior.nu, prior.chi1, prior.chi2},
                         MomentMethod::laplace)
          .log_norm;

  std::vector<double> elb = expected_log_beta_from_lambda(lambda, 1, 2);
  std::vector<DocPosterior> posts = {
      btot_e_step(corpus.docs[0], elb, 2, hyper.alpha, moments)};
  const double value = btot_elbo(corpus, posts, lambda, hyper, moments,
                                 rho_posts, prior, prior_log_norm);
  // Reference assembled term by term with 40-digit arithmetic; agreement is
  // limited by the mode solver's own stopping tolerance, not the formula.
  CHECK(value == doctest::Approx(-3.0449045877190088).epsilon(1e-9));
}

TEST_CASE("wbtot_elbo: ny=0 equals the LDA bound plus a constant block") {
  std::mt19937_64 rng(41);
  Corpus corpus = random_corpus(rng, 12, 8, 14);
  const int k = 2;
  std::vector<double> lambda = random_lambda(rng, k, corpus.V);
  DirichletHyper hyper;
  hyper.alpha = {0.5, 0.7};
  hyper.eta = 0.05;
  std::vector<double> elb = expected_log_beta_from_lambda(lambda, k, corpus.V);

  // Prior-only topic posteriors: the rho block vanishes identically.
  std::vector<BetaPriorPosterior> rho_posts = {
      {kPrior.nu, kPrior.chi1, kPrior.chi2},
      {kPrior.nu, kPrior.chi1, kPrior.chi2}};
  std::vector<Moments> moments = topic_moments(rho_posts, MomentMethod::laplace);
  const double prior_log_norm = moments[0].log_norm;

  std::vector<DocPosterior> lda_posts;
  std::vector<WbtotDocPosterior> wb_posts;
  std::vector<double> ny(corpus.docs.size(), 0.0);
  for (const Document& doc : corpus.docs) {
    DocPosterior p = lda_e_step(doc, elb, corpus.V, hyper.alpha);
    WbtotDocPosterior w;
    static_cast<DocPosterior&>(w) = p;
    w.epsilon.assign(k, 1.0 / k);
    lda_posts.push_back(std::move(p));
    wb_posts.push_back(std::move(w));
  }
  const double lda_value = lda_elbo(corpus, lda_posts, lambda, hyper);
  const double wb_value = wbtot_elbo(corpus, wb_posts, ny, lambda, hyper,
                                     moments, rho_posts, kPrior, prior_log_norm);
  CHECK(wb_value == doctest::Approx(lda_value).epsilon(1e-12));
}

TEST_CASE("batch EM: BToT and WBToT bounds are non-decreasing") {
  for (int trial = 0; trial < 6; ++trial) {
    std::mt19937_64 rng(2000 + trial);
    std::uniform_int_distribution<int> kd(2, 4), vd(6, 30), dd(8, 60);
    const int k = kd(rng), v = vd(rng), d = dd(rng);
    Corpus corpus = random_corpus(rng, d, v, 16);
    DirichletHyper hyper;
    hyper.alpha.assign(k, 0.5);
    hyper.eta = 0.05;

    const double prior_log_norm =
        beta_prior_moments({kPrior.nu, kPrior.chi1, kPrior.chi2},
                           MomentMethod::laplace)
            .log_norm;

    // --- BToT ---
    {
      std::vector<double> lambda = random_lambda(rng, k, v);
      std::vector<BetaPriorPosterior> rho_posts(
          k, {kPrior.nu, kPrior.chi1, kPrior.chi2});
      double prev = -std::numeric_limits<double>::infinity();
      for (int iter = 0; iter < 6; ++iter) {
        std::vector<double> elb = expected_log_beta_from_lambda(lambda, k, v);
        std::vector<Moments> moments =
            topic_moments(rho_posts, MomentMethod::laplace);
        std::vector<DocPosterior> posts;
        std::vector<double> stats(static_cast<std::size_t>(k) * v, 0.0);
        std::vector<double> tn(k, 0.0), ts1(k, 0.0), ts2(k, 0.0);
        for (const Document& doc : corpus.docs) {
          posts.push_back(btot_e_step(doc, elb, v, hyper.alpha, moments));
          std::vector<double> mass = doc_topic_mass(doc, posts.back(), k);
          for (std::size_t u = 0; u < doc.counts.size(); ++u)
            for (int j = 0; j < k; ++j)
              stats[static_cast<std::size_t>(j) * v + doc.counts[u].first] +=
                  doc.counts[u].second * posts.back().phi[u * k + j];
          for (int j = 0; j < k; ++j) {
            tn[j] += mass[j];
            ts1[j] += mass[j] * std::log(doc.t);
            ts2[j] += mass[j] * std::log1p(-doc.t);
          }
        }
        const double elbo = btot_elbo(corpus, posts, lambda, hyper, moments,
                                      rho_posts, kPrior, prior_log_norm);
        if (iter > 0) CHECK(elbo >= prev - 1e-6 * std::abs(prev));
        prev = elbo;
        lambda = lda_m_step_batch(stats, k, v, hyper.eta);
        std::vector<TimeSuffStats> tstats(k);
        for (int j = 0; j < k; ++j)
          tstats[j] = TimeSuffStats::from_sums(tn[j], ts1[j], ts2[j]);
        rho_posts = btot_m_step_batch(tstats, kPrior);
      }
    }

    // --- WBToT (sqrt weighting) ---
    {
      std::vector<double> lambda = random_lambda(rng, k, v);
      std::vector<BetaPriorPosterior> rho_posts(
          k, {kPrior.nu, kPrior.chi1, kPrior.chi2});
      double prev = -std::numeric_limits<double>::infinity();
      for (int iter = 0; iter < 6; ++iter) {
        std::vector<double> elb = expected_log_beta_from_lambda(lambda, k, v);
        std::vector<Moments> moments =
            topic_moments(rho_posts, MomentMethod::laplace);
        std::vector<WbtotDocPosterior> posts;
        std::vector<double> ny;
        std::vector<double> stats(static_cast<std::size_t>(k) * v, 0.0);
        std::vector<double> tn(k, 0.0), ts1(k, 0.0), ts2(k, 0.0);
        for (const Document& doc : corpus.docs) {
          ny.push_back(
              ny_weight(doc.total_tokens, {NySchemeKind::sqrt_len, 0.0}));
          posts.push_back(
              wbtot_e_step(doc, elb, v, hyper.alpha, moments, ny.back()));
          const WbtotDocPosterior& p = posts.back();
          for (std::size_t u = 0; u < doc.counts.size(); ++u)
            for (int j = 0; j < k; ++j)
              stats[static_cast<std::size_t>(j) * v + doc.counts[u].first] +=
                  doc.counts[u].second * p.phi[u * k + j];
          for (int j = 0; j < k; ++j) {
            const double w = ny.back() * p.epsilon[j];
            tn[j] += w;
            ts1[j] += w * std::log(doc.t);
            ts2[j] += w * std::log1p(-doc.t);
          }
        }
        const double elbo = wbtot_elbo(corpus, posts, ny, lambda, hyper,
                                       moments, rho_posts, kPrior,
                                       prior_log_norm);
        if (iter > 0) CHECK(elbo >= prev - 1e-6 * std::abs(prev));
        prev = elbo;
        lambda = lda_m_step_batch(stats, k, v, hyper.eta);
        std::vector<TimeSuffStats> tstats(k);
        for (int j = 0; j < k; ++j)
          tstats[j] = TimeSuffStats::from_sums(tn[j], ts1[j], ts2[j]);
        rho_posts = wbtot_m_step_batch(tstats, kPrior);
      }
    }
  }
}

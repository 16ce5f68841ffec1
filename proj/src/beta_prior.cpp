#include "ttm/beta_prior.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "ttm/errors.hpp"
#include "ttm/special.hpp"

namespace ttm {

namespace {

void validate_posterior(const BetaPriorPosterior& post, const char* who) {
  if (!(post.mu > 0.0) || !std::isfinite(post.mu)) {
    throw DomainError(std::string(who) + ": mu must be a positive finite real");
  }
  if (!std::isfinite(post.psi1) || !std::isfinite(post.psi2) ||
      !(std::exp(post.psi1) + std::exp(post.psi2) < 1.0)) {
    throw DomainError(std::string(who) + ": psi must satisfy exp(psi1)+exp(psi2) < 1");
  }
}

// omega(rho) = rho . psi - log B(rho).
double omega(double r1, double r2, double psi1, double psi2) {
  return r1 * psi1 + r2 * psi2 - log_beta(r1, r2);
}

// 20-point Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
// iteration on the Legendre polynomial recurrence.
struct GaussLegendre {
  std::array<double, 20> node{};
  std::array<double, 20> weight{};
  GaussLegendre() {
    constexpr int n = 20;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      node[i] = x;
      weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre& gl20() {
  static const GaussLegendre g;
  return g;
}

// Composite Gauss-Legendre nodes over [lo, hi] with `panels` equal panels.
void composite_nodes(double lo, double hi, int panels,
                     std::vector<double>* u, std::vector<double>* w) {
  const GaussLegendre& g = gl20();
  const double h = (hi - lo) / panels;
  u->clear();
  w->clear();
  u->reserve(static_cast<size_t>(panels) * g.node.size());
  w->reserve(static_cast<size_t>(panels) * g.node.size());
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    const double mid = a + 0.5 * h;
    for (size_t i = 0; i < g.node.size(); ++i) {
      u->push_back(mid + 0.5 * h * g.node[i]);
      w->push_back(0.5 * h * g.weight[i]);
    }
  }
}

}  // namespace

bool check_beta_prior_integrable(const BetaPriorParams& p) {
  if (!std::isfinite(p.nu) || !std::isfinite(p.chi1) || !std::isfinite(p.chi2)) return false;
  if (!(p.nu > 0.0)) return false;
  return std::exp(p.chi1) + std::exp(p.chi2) < 1.0;
}

LaplaceResult laplace_expansion(const BetaPriorPosterior& post) {
  validate_posterior(post, "laplace_expansion");
  // The mode rho0 solves the same digamma system as the Beta estimator; the
  // posterior invariant guarantees strict feasibility, so no extra slack.
  const BetaParams mode = detail::solve_beta_from_logstats_eps(post.psi1, post.psi2, 0.0);
  const double s = mode.rho1 + mode.rho2;
  const double t1 = trigamma(mode.rho1);
  const double t2 = trigamma(mode.rho2);
  const double ts = trigamma(s);
  // omega_ij = [[ts - t1, ts], [ts, ts - t2]]; negative definite at the mode,
  // with det = t1*t2 - ts*(t1+t2) > 0.
  const double det = t1 * t2 - ts * (t1 + t2);
  LaplaceResult r;
  r.mode = mode;
  r.log_b_at_mode = log_beta(mode.rho1, mode.rho2);
  r.hessian_logdet = std::log(det);
  r.log_norm = post.mu * omega(mode.rho1, mode.rho2, post.psi1, post.psi2) +
               std::log(2.0 * std::numbers::pi) - std::log(post.mu) - 0.5 * r.hessian_logdet;
  return r;
}

Moments quadrature_moments(const BetaPriorPosterior& post, const QuadratureOptions& opts) {
  validate_posterior(post, "quadrature_moments");
  const double mu = post.mu;
  const double psi1 = post.psi1;
  const double psi2 = post.psi2;

  const BetaParams mode = detail::solve_beta_from_logstats_eps(psi1, psi2, 0.0);
  const double u01 = std::log(mode.rho1);
  const double u02 = std::log(mode.rho2);

  // Log-integrand in u = log rho coordinates, Jacobian included:
  //   h(u) = mu * omega(e^u) + u1 + u2.
  auto h = [&](double u1, double u2) {
    const double r1 = std::exp(u1);
    const double r2 = std::exp(u2);
    return mu * omega(r1, r2, psi1, psi2) + u1 + u2;
  };
  const double ref = h(u01, u02);

  // Integration bounds per axis: start from the Laplace +-8 sigma window and
  // march outward until the log-integrand drops `tail_drop` below the mode;
  // the drop criterion (not the Gaussian width) is what keeps the window
  // honest for small mu, where the tails are exponential-linear.
  const double s = mode.rho1 + mode.rho2;
  const double ts = trigamma(s);
  const double curv1 = mu * (trigamma(mode.rho1) - ts) * mode.rho1 * mode.rho1;
  const double curv2 = mu * (trigamma(mode.rho2) - ts) * mode.rho2 * mode.rho2;
  auto march = [&](double u0_other, bool axis1, double dir, double sigma) {
    double w = 8.0 * sigma;
    for (int i = 0; i < 400; ++i) {
      const double u1 = axis1 ? (u01 + dir * w) : u0_other;
      const double u2 = axis1 ? u0_other : (u02 + dir * w);
      if (ref - h(u1, u2) > opts.tail_drop) return w;
      w *= 1.5;
    }
    throw QuadratureFailure("quadrature_moments: tail search did not terminate");
  };
  const double sig1 = 1.0 / std::sqrt(curv1);
  const double sig2 = 1.0 / std::sqrt(curv2);
  const double lo1 = u01 - march(u02, true, -1.0, sig1);
  const double hi1 = u01 + march(u02, true, +1.0, sig1);
  const double lo2 = u02 - march(u01, false, -1.0, sig2);
  const double hi2 = u02 + march(u01, false, +1.0, sig2);

  std::vector<double> u1, w1, u2, w2;
  double prev_i1 = 0.0, prev_m1 = 0.0, prev_m2 = 0.0, prev_mb = 0.0;
  bool have_prev = false;
  for (int round = 0; round <= opts.max_doublings; ++round) {
    const int panels = 1 << round;
    composite_nodes(lo1, hi1, panels, &u1, &w1);
    composite_nodes(lo2, hi2, panels, &u2, &w2);
    const size_t n1 = u1.size(), n2 = u2.size();

    // Separable pieces: h = A_i + B_j + mu * lgamma(r1_i + r2_j).
    std::vector<double> r1v(n1), a(n1), lg1(n1), r2v(n2), b(n2), lg2(n2);
    for (size_t i = 0; i < n1; ++i) {
      r1v[i] = std::exp(u1[i]);
      lg1[i] = std::lgamma(r1v[i]);
      a[i] = mu * (r1v[i] * psi1 - lg1[i]) + u1[i];
    }
    for (size_t j = 0; j < n2; ++j) {
      r2v[j] = std::exp(u2[j]);
      lg2[j] = std::lgamma(r2v[j]);
      b[j] = mu * (r2v[j] * psi2 - lg2[j]) + u2[j];
    }

    double i1 = 0.0, ir1 = 0.0, ir2 = 0.0, ib = 0.0;
    for (size_t i = 0; i < n1; ++i) {
      for (size_t j = 0; j < n2; ++j) {
        const double lgs = std::lgamma(r1v[i] + r2v[j]);
        const double val = std::exp(a[i] + b[j] + mu * lgs - ref) * (w1[i] * w2[j]);
        const double logb = lg1[i] + lg2[j] - lgs;
        i1 += val;
        ir1 += val * r1v[i];
        ir2 += val * r2v[j];
        ib += val * logb;
      }
    }
    if (!(i1 > 0.0) || !std::isfinite(i1)) {
      throw QuadratureFailure("quadrature_moments: normalization integral not positive finite");
    }
    const double m1 = ir1 / i1;
    const double m2 = ir2 / i1;
    const double mb = ib / i1;
    if (have_prev) {
      const double d1 = std::abs(m1 - prev_m1) / std::abs(m1);
      const double d2 = std::abs(m2 - prev_m2) / std::abs(m2);
      const double db = std::abs(mb - prev_mb) / std::max(1.0, std::abs(mb));
      const double dn = std::abs(std::log(i1) - std::log(prev_i1)) /
                        std::max(1.0, std::abs(ref + std::log(i1)));
      if (d1 < opts.rel_tol && d2 < opts.rel_tol && db < opts.rel_tol && dn < opts.rel_tol) {
        Moments m;
        m.rho1 = m1;
        m.rho2 = m2;
        m.log_b = mb;
        m.log_norm = ref + std::log(i1);
        return m;
      }
    }
    prev_i1 = i1;
    prev_m1 = m1;
    prev_m2 = m2;
    prev_mb = mb;
    have_prev = true;
  }
  throw QuadratureFailure("quadrature_moments: panel doubling did not converge to rel_tol");
}

Moments beta_prior_moments(const BetaPriorPosterior& post, MomentMethod method) {
  if (method == MomentMethod::quadrature) return quadrature_moments(post);
  const LaplaceResult lr = laplace_expansion(post);
  Moments m;
  m.rho1 = lr.mode.rho1;
  m.rho2 = lr.mode.rho2;
  m.log_b = lr.log_b_at_mode;
  m.log_norm = lr.log_norm;
  return m;
}

BetaParams rho_regularized(const TimeSuffStats& stats, const BetaPriorParams& prior) {
  if (!check_beta_prior_integrable(prior)) {
    throw DomainError("rho_regularized: prior (nu, chi) is not integrable");
  }
  const double denom = stats.n + prior.nu;
  const double b1 = (stats.n * stats.l1 + prior.nu * prior.chi1) / denom;
  const double b2 = (stats.n * stats.l2 + prior.nu * prior.chi2) / denom;
  // The blend is strictly inside the solvable region whenever l is a genuine
  // log-moment pair, but may sit much closer to the boundary than the raw
  // estimator's slack permits; solve without slack.
  return detail::solve_beta_from_logstats_eps(b1, b2, 0.0);
}

}  // namespace ttm

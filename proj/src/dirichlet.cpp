#include "ttm/dirichlet.hpp"

#include <algorithm>
#include <cmath>

#include "ttm/errors.hpp"
#include "ttm/special.hpp"

namespace ttm {

std::vector<double> dirichlet_mle_fixed_point(const std::vector<double>& mean_log_p,
                                              std::vector<double> init,
                                              int max_iter, double tol) {
  if (mean_log_p.empty() || init.size() != mean_log_p.size())
    throw DomainError("dirichlet_mle_fixed_point: dimension mismatch");
  const std::size_t k = init.size();
  for (double& a : init) a = std::max(a, kDirichletFloor);

  std::vector<double> a = std::move(init);
  for (int iter = 0; iter < max_iter; ++iter) {
    double sum = 0.0;
    for (double v : a) sum += v;
    const double psi_sum = digamma(sum);
    double max_rel = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double next = inv_digamma(psi_sum + mean_log_p[i]);
      if (!std::isfinite(next) || next < kDirichletFloor) next = kDirichletFloor;
      max_rel = std::max(max_rel, std::abs(next - a[i]) / std::max(a[i], 1e-12));
      a[i] = next;
    }
    if (max_rel < tol) break;
  }
  return a;
}

double dirichlet_mle_symmetric(double mean_log_p, int dim, double init,
                               int max_iter, double tol) {
  if (dim < 1) throw DomainError("dirichlet_mle_symmetric: dim must be >= 1");
  double a = std::max(init, kDirichletFloor);
  for (int iter = 0; iter < max_iter; ++iter) {
    double next = inv_digamma(digamma(dim * a) + mean_log_p);
    if (!std::isfinite(next) || next < kDirichletFloor) next = kDirichletFloor;
    const double rel = std::abs(next - a) / std::max(a, 1e-12);
    a = next;
    if (rel < tol) break;
  }
  return a;
}

}  // namespace ttm

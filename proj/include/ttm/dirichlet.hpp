// Dirichlet hyperparameter estimation by the classic digamma fixed point.
//
// Given mean sufficient statistics s_k = (1/D) sum_d <log p_dk> of probability
// vectors assumed Dirichlet(a), the maximizer of the expected log prior
// solves Psi(a_k) - Psi(sum_j a_j) = s_k. The fixed-point iteration
//   a_k <- invPsi( Psi(sum_j a_j) + s_k )
// is monotone in the objective and free of step-size tuning. A symmetric
// variant ties all components to one scalar.
#pragma once

#include <vector>

namespace ttm {

// Floor applied to every component so downstream digammas stay finite.
inline constexpr double kDirichletFloor = 1e-6;

// mean_log_p: s_k as above (each entry < 0). init: positive starting point.
std::vector<double> dirichlet_mle_fixed_point(const std::vector<double>& mean_log_p,
                                              std::vector<double> init,
                                              int max_iter = 1000,
                                              double tol = 1e-12);

// Symmetric case: one scalar a for a dim-dimensional Dirichlet, given the
// grand mean of <log p> over components and observations.
double dirichlet_mle_symmetric(double mean_log_p, int dim, double init,
                               int max_iter = 1000, double tol = 1e-12);

}  // namespace ttm

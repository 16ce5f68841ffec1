// Scalar special functions used throughout the models: digamma Psi(x),
// trigamma Psi'(x), their inverse (for Dirichlet hyperparameter fixed points),
// the log-Beta normalizer log B(a,b) = lgamma(a)+lgamma(b)-lgamma(a+b), and
// the Beta(a,b) log-density on (0,1).
//
// digamma/trigamma use the classic recurrence-plus-asymptotic-series scheme:
// the argument is shifted upward via Psi(x) = Psi(x+1) - 1/x (resp.
// Psi'(x) = Psi'(x+1) + 1/x^2) until the asymptotic series in 1/x^2 is
// accurate to ~1e-13 absolute, well inside the 1e-12 contract for x >= 1e-3.
#pragma once

namespace ttm {

// Psi(x) for x > 0; |error| < 1e-12 absolute for x >= 1e-3.
// Throws DomainError for x <= 0 or non-finite x.
double digamma(double x);

// Psi'(x) for x > 0 at comparable accuracy. Throws DomainError for x <= 0.
double trigamma(double x);

// Inverse of digamma: returns x > 0 with Psi(x) = y (Newton refinement of the
// standard piecewise initial guess; accurate to ~1e-12 relative).
double inv_digamma(double y);

// log B(a,b); requires a > 0 and b > 0, else DomainError.
double log_beta(double a, double b);

// Beta(a,b) log-density at t: (a-1) log t + (b-1) log(1-t) - log B(a,b).
// Requires 0 < t < 1 (DomainError otherwise) and valid (a,b).
double beta_log_pdf(double t, double a, double b);

}  // namespace ttm

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace fssm {

// Natural log of the gamma function, x > 0. Relative accuracy ~1e-14 across
// [1e-3, 1e6]; throws DomainError outside the domain.
double log_gamma(double x);

// Regularized incomplete beta I_x(a, b) for x in [0,1], a > 0, b > 0.
// Absolute accuracy better than 1e-12 including shape parameters below 1.
double regularized_incomplete_beta(double x, double a, double b);

// Adaptive Gauss-Kronrod (G7/K15) quadrature on [a, b] with interval
// bisection. Stops when the summed error estimate drops below abs_tol;
// throws AccuracyError carrying the best estimate if max_evals function
// evaluations are exhausted first.
double quadrature(const std::function<double(double)>& f, double a, double b,
                  double abs_tol = 1e-10, std::size_t max_evals = 1000000);

// Single non-adaptive G7/K15 pass on [a, b]; fills *err_estimate with
// |K15 - G7| when non-null. Exposed for the weight-consistency tests.
double gauss_kronrod_15(const std::function<double(double)>& f, double a, double b,
                        double* err_estimate);

// Standard normal CDF and quantile (inverse CDF). The quantile uses the
// AS241 rational approximations (relative accuracy ~1e-15); p must lie in
// (0, 1).
double normal_cdf(double x);
double normal_quantile(double p);

// log(Phi(x)) stable in the far left tail (asymptotic expansion past the
// erfc underflow point).
double log_normal_cdf(double x);

// Stable scalar helpers used across the samplers and the state updates.
inline double sigmoid(double x) {
  if (x >= 0.0) {
    double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline double log1pexp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// log(sum exp(v_i)) with the max subtracted; empty input yields -inf.
double logsumexp(const std::vector<double>& v);

}  // namespace fssm

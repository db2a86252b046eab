#include "fssm/samplers.hpp"

#include <cmath>

#include "fssm/errors.hpp"
#include "fssm/specials.hpp"

namespace fssm {

namespace {

constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kPiSq = 9.86960440108935861883;
constexpr double kLogPi = 1.14472988584940017414;
constexpr double kLog2OverPi = -0.45158270528945486473;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double draw_exponential(RngStream& rng) { return -std::log(rng.uniform()); }

// Inverse Gaussian IG(mu, lambda = 1), Michael-Schucany-Haas.
double draw_inverse_gaussian(RngStream& rng, double mu) {
  double n = draw_normal(rng, 0.0, 1.0);
  double v = n * n;
  double x = mu + 0.5 * mu * (mu * v - std::sqrt(4.0 * mu * v + mu * mu * v * v));
  if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
  return x;
}

// Gamma(1/2, rate 1/2) truncated to (pi/2, inf): shifted-exponential proposal.
double draw_trunc_gamma_half(RngStream& rng) {
  constexpr double kHalfPi = 1.57079632679489661923;
  constexpr double kSqrtHalfPi = 1.25331413731550025121;
  for (;;) {
    double x = 2.0 * draw_exponential(rng) + kHalfPi;
    if (rng.uniform() <= kSqrtHalfPi / std::sqrt(x)) return x;
  }
}

// Inverse Gaussian IG(1/z, 1) truncated to (0, t).
double draw_trunc_inverse_gaussian(RngStream& rng, double z, double t) {
  double mu = 1.0 / z;
  if (mu > t) {
    for (;;) {
      double x = 1.0 / draw_trunc_gamma_half(rng);
      if (std::log(rng.uniform()) < -0.5 * z * z * x) return x;
    }
  }
  for (;;) {
    double x = draw_inverse_gaussian(rng, mu);
    if (x < t) return x;
  }
}

// Piecewise coefficients a_n(x) of the Jacobi density series at t = 2/pi.
double pg_series_term(int n, double x, double t) {
  double nh = n + 0.5;
  double logf;
  if (x <= t) {
    logf = kLogPi + std::log(nh) + 1.5 * (kLog2OverPi - std::log(x)) - 2.0 * nh * nh / x;
  } else {
    logf = kLogPi + std::log(nh) - 0.5 * x * kPiSq * nh * nh;
  }
  return std::exp(logf);
}

// Mixing probability of the truncated-exponential branch, q / (p + q).
double pg_branch_ratio(double z) {
  double t = kTwoOverPi;
  double big_k = 0.5 * z * z + 0.125 * kPiSq;
  double log_a = std::log(4.0) - kLogPi - z;
  double log_k = std::log(big_k);
  double kt = big_k * t;
  double w = std::sqrt(0.5 * M_PI);
  double logf1 = log_a + log_normal_cdf(w * (t * z - 1.0)) + log_k + kt;
  double logf2 = log_a + 2.0 * z + log_normal_cdf(-w * (t * z + 1.0)) + log_k + kt;
  double p_over_q = std::exp(logf1) + std::exp(logf2);
  return 1.0 / (1.0 + p_over_q);
}

// Hyperbolic moment helpers on the halved scale h = |c| / 2.
void pg_unit_moments(double h, double* mean, double* var) {
  if (h < 1e-4) {
    double h2 = h * h;
    *mean = 0.25 * (1.0 - h2 / 3.0 + 2.0 * h2 * h2 / 15.0);
    *var = (1.0 / 24.0) * (1.0 - 0.8 * h2);
    return;
  }
  double th = std::tanh(h);
  *mean = 0.25 * th / h;
  *var = (h * th * th + th - h) / (16.0 * h * h * h);
}

// Deterministic inverse-CDF draw for a standard normal truncated to
// (alpha, beta) with alpha >= 0; stable arbitrarily far in the tail.
double tail_inverse_cdf(double u, double alpha, double beta) {
  double log_q_a = log_normal_cdf(-alpha);
  double log_q_b = std::isinf(beta) ? -std::numeric_limits<double>::infinity()
                                    : log_normal_cdf(-beta);
  // target upper-tail mass: Q(alpha)(1-u) + Q(beta) u
  double log_target = logsumexp({std::log1p(-u) + log_q_a,
                                 std::isinf(log_q_b) ? -std::numeric_limits<double>::infinity()
                                                     : std::log(u) + log_q_b});
  double x = alpha;
  for (int it = 0; it < 60; ++it) {
    double g = log_normal_cdf(-x) - log_target;
    // d/dx log Q(x) = -phi(x) / Q(x)
    double dg = -std::exp(-0.5 * x * x - kLogSqrt2Pi - log_normal_cdf(-x));
    double step = g / dg;
    double xn = x - step;
    if (xn < alpha) xn = 0.5 * (x + alpha);
    if (xn > beta) xn = 0.5 * (x + beta);
    if (std::fabs(xn - x) < 1e-14 * (1.0 + std::fabs(x))) return xn;
    x = xn;
  }
  return x;
}

// Standard normal truncated to (alpha, beta) on the standardized scale.
double draw_std_truncated(RngStream& rng, double alpha, double beta) {
  double mass = normal_cdf(beta) - normal_cdf(alpha);
  if (mass > 0.2) {
    for (int it = 0; it < 1000; ++it) {
      double x = draw_normal(rng, 0.0, 1.0);
      if (x > alpha && x < beta) return x;
    }
  }
  if (alpha <= 0.0 && beta >= 0.0) {
    // Narrow interval straddling the mode: uniform proposal.
    for (;;) {
      double x = alpha + (beta - alpha) * rng.uniform();
      if (std::log(rng.uniform()) <= -0.5 * x * x) return x;
    }
  }
  bool flip = false;
  if (beta <= 0.0) {
    double tmp = alpha;
    alpha = -beta;
    beta = -tmp;
    flip = true;
  }
  // Exponentially tilted proposal restricted to the interval.
  double lambda = 0.5 * (alpha + std::sqrt(alpha * alpha + 4.0));
  double mode = std::min(std::max(lambda, alpha), beta);
  double width = beta - alpha;
  for (int it = 0; it < 10000; ++it) {
    double u = rng.uniform();
    double x;
    if (std::isinf(width)) {
      x = alpha + draw_exponential(rng) / lambda;
    } else {
      // inverse CDF of Exp(lambda) truncated to (0, width)
      x = alpha - std::log1p(u * std::expm1(-lambda * width)) / lambda;
    }
    double log_accept = 0.5 * ((mode - lambda) * (mode - lambda) - (x - lambda) * (x - lambda));
    if (std::log(rng.uniform()) <= log_accept) return flip ? -x : x;
  }
  double x = tail_inverse_cdf(rng.uniform(), alpha, beta);
  return flip ? -x : x;
}

}  // namespace

double draw_normal(RngStream& rng, double mean, double sd) {
  if (!(sd >= 0.0)) throw DomainError("draw_normal: sd must be nonnegative");
  return mean + sd * normal_quantile(rng.uniform());
}

double draw_truncated_normal(RngStream& rng, double mean, double sd, double lo, double hi) {
  if (!(sd > 0.0)) throw DomainError("draw_truncated_normal: sd must be positive");
  if (!(lo < hi)) throw DomainError("draw_truncated_normal: lo must be below hi");
  double alpha = (lo - mean) / sd;
  double beta = (hi - mean) / sd;
  double x = draw_std_truncated(rng, alpha, beta);
  double out = mean + sd * x;
  // Guard against rounding onto a boundary.
  if (out <= lo) out = std::nextafter(lo, hi);
  if (out >= hi) out = std::nextafter(hi, lo);
  return out;
}

double draw_gamma(RngStream& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw DomainError("draw_gamma: shape and rate must be positive");
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    // Boost to shape+1, multiply by U^{1/shape}.
    boost = std::exp(std::log(rng.uniform()) / a);
    a += 1.0;
  }
  double d = a - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = draw_normal(rng, 0.0, 1.0);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = rng.uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return boost * d * v / rate;
  }
}

double draw_inverse_gamma(RngStream& rng, double shape, double rate) {
  double g = draw_gamma(rng, shape, rate);
  if (g <= 0.0) throw NumericalError("draw_inverse_gamma: underlying gamma draw underflowed");
  return 1.0 / g;
}

std::int64_t draw_poisson(RngStream& rng, double rate) {
  if (!(rate >= 0.0)) throw DomainError("draw_poisson: rate must be nonnegative");
  if (rate == 0.0) return 0;
  if (rate < 10.0) {
    // Inversion by uniform products.
    double limit = std::exp(-rate);
    double prod = rng.uniform();
    std::int64_t k = 0;
    while (prod > limit) {
      prod *= rng.uniform();
      ++k;
    }
    return k;
  }
  // Transformed rejection with squeeze (PTRS).
  double mu = rate;
  double b = 0.931 + 2.53 * std::sqrt(mu);
  double a = -0.059 + 0.02483 * b;
  double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  double v_r = 0.9277 - 3.6224 / (b - 2.0);
  double log_mu = std::log(mu);
  for (;;) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mu - mu - log_gamma(k + 1.0)) {
      return static_cast<std::int64_t>(kf);
    }
  }
}

double draw_polya_gamma_1(RngStream& rng, double c) {
  double z = 0.5 * std::fabs(c);
  double t = kTwoOverPi;
  double ratio = pg_branch_ratio(z);
  double big_k = 0.5 * z * z + 0.125 * kPiSq;
  for (;;) {
    double x;
    if (rng.uniform() < ratio) {
      x = t + draw_exponential(rng) / big_k;
    } else {
      x = draw_trunc_inverse_gaussian(rng, z, t);
    }
    // Alternating-series squeeze on the Jacobi coefficients.
    double s = pg_series_term(0, x, t);
    double y = rng.uniform() * s;
    int n = 0;
    for (;;) {
      ++n;
      if (n % 2 == 1) {
        s -= pg_series_term(n, x, t);
        if (y <= s) return 0.25 * x;
      } else {
        s += pg_series_term(n, x, t);
        if (y > s) break;
      }
    }
  }
}

double polya_gamma_mean(double b, double c) {
  double m, v;
  pg_unit_moments(0.5 * std::fabs(c), &m, &v);
  return b * m;
}

double polya_gamma_var(double b, double c) {
  double m, v;
  pg_unit_moments(0.5 * std::fabs(c), &m, &v);
  return b * v;
}

double draw_polya_gamma(RngStream& rng, std::int64_t b, double c) {
  if (b < 0) throw DomainError("draw_polya_gamma: b must be nonnegative");
  if (b == 0) return 0.0;
  if (!std::isfinite(c)) throw DomainError("draw_polya_gamma: tilt must be finite");
  if (b <= 170) {
    double sum = 0.0;
    for (std::int64_t j = 0; j < b; ++j) sum += draw_polya_gamma_1(rng, c);
    return sum;
  }
  double bb = static_cast<double>(b);
  double mean = polya_gamma_mean(bb, c);
  double sd = std::sqrt(polya_gamma_var(bb, c));
  // Central-limit branch; truncate at zero mass boundary (never binding in
  // practice since mean/sd grows like sqrt(b)).
  double x = draw_normal(rng, mean, sd);
  while (x <= 0.0) x = draw_normal(rng, mean, sd);
  return x;
}

}  // namespace fssm

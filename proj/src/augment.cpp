#include "fssm/augment.hpp"

#include <cmath>

#include "fssm/errors.hpp"
#include "fssm/samplers.hpp"
#include "fssm/specials.hpp"

namespace fssm {

void poisson_rates(double b, double c, double d, double u_ell, double log_s,
                   double* rate1, double* rate2) {
  // v/(v+s) and s/(v+s) through the logistic function of u - log s.
  double p_v = sigmoid(u_ell - log_s);
  double p_s = sigmoid(log_s - u_ell);
  double hi = std::max(b, d);
  *rate1 = std::fabs(b - d) * (b < d ? p_v * p_v : p_s * p_s);
  *rate2 = 2.0 * (hi - c) * p_v * p_s;
  if (*rate2 < 0.0) *rate2 = 0.0;  // cancellation guard; hi - c >= 0 in exact arithmetic
  if (*rate1 < 0.0) *rate1 = 0.0;
  if (!std::isfinite(*rate1) || !std::isfinite(*rate2))
    throw NumericalError("poisson_rates: non-finite rate");
}

ZDraw sample_z(RngStream& rng, double b, double c, double d, double u_ell, double log_s) {
  double r1, r2;
  poisson_rates(b, c, d, u_ell, log_s, &r1, &r2);
  ZDraw z;
  z.z1 = draw_poisson(rng, r1);
  z.z2 = draw_poisson(rng, r2);
  return z;
}

double sample_omega(RngStream& rng, std::int64_t z1, std::int64_t z2, double u_ell,
                    double log_s) {
  if (z1 < 0 || z2 < 0) throw DomainError("sample_omega: z draws must be nonnegative");
  std::int64_t n = z1 + z2;
  if (n == 0) return 0.0;
  return draw_polya_gamma(rng, 2 * n, u_ell - log_s);
}

PseudoObservation make_pseudo_obs(std::int64_t z1, double omega, double log_s, bool b_lt_d) {
  PseudoObservation obs;
  if (omega == 0.0) {
    if (z1 != 0)
      throw NumericalError("make_pseudo_obs: omega = 0 with z1 > 0 violates the augmentation");
    return obs;  // missing
  }
  if (!(omega > 0.0)) throw DomainError("make_pseudo_obs: omega must be nonnegative");
  double sign = b_lt_d ? 1.0 : -1.0;
  obs.value = log_s + sign * static_cast<double>(z1) / omega;
  obs.precision = omega;
  obs.missing = false;
  if (!std::isfinite(obs.value)) throw NumericalError("make_pseudo_obs: non-finite pseudo value");
  return obs;
}

double series_identity_check(double b, double c, double d, double v, double s, int N) {
  if (N < 1) throw DomainError("series_identity_check: N must be at least 1");
  if (!(v > 0.0) || !(s > 0.0)) throw DomainError("series_identity_check: v, s must be positive");
  // Rates written out in raw powers of v, s, (v+s); this routine exists to
  // validate the exponential-mixture identity, so it deliberately avoids
  // the logistic shortcut used by poisson_rates.
  double denom = (v + s) * (v + s);
  double r1 = std::fabs(b - d) * (b < d ? v * v : s * s) / denom;
  double r2 = 2.0 * (std::max(b, d) - c) * v * s / denom;
  if (r2 < 0.0 && r2 > -1e-12) r2 = 0.0;
  if (!(r1 >= 0.0) || !(r2 >= 0.0))
    throw DomainError("series_identity_check: negative rate from invalid (A, v) inputs");
  double log_r1 = r1 > 0.0 ? std::log(r1) : 0.0;
  double log_r2 = r2 > 0.0 ? std::log(r2) : 0.0;
  double sum = 0.0;
  for (int z1 = 0; z1 <= N; ++z1) {
    if (z1 > 0 && r1 == 0.0) break;
    double log_t1 = z1 * log_r1 - log_gamma(z1 + 1.0);
    for (int z2 = 0; z2 <= N; ++z2) {
      if (z2 > 0 && r2 == 0.0) break;
      double log_term = log_t1 + z2 * log_r2 - log_gamma(z2 + 1.0);
      if (log_term > 700.0)
        throw AccuracyError("series_identity_check: term overflow", sum, INFINITY);
      sum += std::exp(log_term);
    }
  }
  return sum;
}

}  // namespace fssm

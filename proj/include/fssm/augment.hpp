#pragma once

#include <cstdint>

#include "fssm/core.hpp"
#include "fssm/rng.hpp"

namespace fssm {

// One fictitious observation of the pseudo dynamic linear model. A zero
// precision is a first-class missing value, not an error.
struct PseudoObservation {
  double value = 0.0;
  double precision = 0.0;  // omega >= 0
  bool missing = true;
};

struct ZDraw {
  std::int64_t z1 = 0;
  std::int64_t z2 = 0;
};

// Rates of the two Poisson latents:
//   rate1 = |b - d| * (v^2 if b < d else s^2) / (v + s)^2
//   rate2 = 2 (max(b,d) - c) * v * s / (v + s)^2
// evaluated from (u_ell, log_s) without forming v or s, so extreme u is
// safe. Tiny negative rate2 from cancellation is clamped at zero.
void poisson_rates(double b, double c, double d, double u_ell, double log_s,
                   double* rate1, double* rate2);

ZDraw sample_z(RngStream& rng, double b, double c, double d, double u_ell, double log_s);

// omega | z ~ PG(2(z1+z2), u - log s); exactly 0 when z1 + z2 = 0.
double sample_omega(RngStream& rng, std::int64_t z1, std::int64_t z2, double u_ell,
                    double log_s);

// y~ = log s + z1 (2*1[b<d] - 1)/omega with precision omega; missing when
// omega = 0 (which requires z1 = 0).
PseudoObservation make_pseudo_obs(std::int64_t z1, double omega, double log_s, bool b_lt_d);

// Truncated double series sum_{z1,z2 <= N} of the augmentation's Poisson
// mixture weights; converges to exp{max(b,d) - (v,s) B (v,s)^T/(v+s)^2}.
// Test-only oracle hook.
double series_identity_check(double b, double c, double d, double v, double s, int N);

}  // namespace fssm

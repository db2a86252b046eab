#pragma once

#include <cstdint>

#include "fssm/rng.hpp"

namespace fssm {

// All samplers consume randomness exclusively from the passed stream, so a
// fixed (seed, stream_id) pair reproduces every draw sequence bit-exactly.

// N(mean, sd^2) by inverse CDF; sd >= 0.
double draw_normal(RngStream& rng, double mean, double sd);

// N(mean, sd^2) truncated to (lo, hi), lo < hi. Rejection for wide
// intervals, exponentially tilted rejection in the tails, and a
// deterministic log-tail inverse-CDF fallback so vanishing interval mass
// never loops forever.
double draw_truncated_normal(RngStream& rng, double mean, double sd, double lo, double hi);

// Gamma(shape, rate), density rate^shape x^{shape-1} e^{-rate x} / Gamma(shape).
double draw_gamma(RngStream& rng, double shape, double rate);

// InverseGamma(shape, rate), density rate^shape x^{-shape-1} e^{-rate/x} / Gamma(shape).
double draw_inverse_gamma(RngStream& rng, double shape, double rate);

// Poisson(rate), rate >= 0. Exact for all rates (inversion below 10,
// transformed-rejection above), including rates of order 1e4 and larger.
std::int64_t draw_poisson(RngStream& rng, double rate);

// Polya-Gamma PG(b, c) for integer b >= 0; b = 0 yields exactly 0. Sum of b
// exact PG(1, c) draws for b <= 170, moment-matched Gaussian beyond.
double draw_polya_gamma(RngStream& rng, std::int64_t b, double c);

// Exact PG(1, c) draw (alternating-series accept/reject on the Jacobi
// theta representation). Exposed for distribution tests.
double draw_polya_gamma_1(RngStream& rng, double c);

// Moments of PG(b, c); used by the Gaussian branch and by tests.
double polya_gamma_mean(double b, double c);
double polya_gamma_var(double b, double c);

}  // namespace fssm

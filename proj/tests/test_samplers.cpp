#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "fssm/errors.hpp"
#include "fssm/samplers.hpp"
#include "support/oracles.hpp"

using namespace fssm;

namespace {

std::vector<double> collect(RngStream& rng, int n, const std::function<double(RngStream&)>& d) {
  std::vector<double> xs;
  xs.reserve(n);
  for (int i = 0; i < n; ++i) xs.push_back(d(rng));
  return xs;
}

}  // namespace

TEST_CASE("normal draws pass a KS test and hit their moments") {
  RngStream rng(101, 0);
  const int n = 20000;
  auto xs = collect(rng, n, [](RngStream& r) { return draw_normal(r, 3.0, 2.0); });
  double d = oracles::ks_distance(xs, [](double x) { return oracles::normal_cdf((x - 3.0) / 2.0); });
  CHECK(d < oracles::ks_crit(n));
  auto m = oracles::moments(xs);
  CHECK(m.mean == doctest::Approx(3.0).epsilon(5.0 * 2.0 / std::sqrt((double)n) / 3.0));
  CHECK(m.var == doctest::Approx(4.0).epsilon(0.05));
  CHECK(draw_normal(rng, 1.5, 0.0) == 1.5);  // degenerate sd
}

TEST_CASE("truncated normal: interval membership and hard-tail oracle") {
  RngStream rng(202, 0);
  // Frozen truncated-moment oracle: N(5, 0.1^2) truncated to (-1, 1) puts
  // all mass in the extreme left tail of the proposal.
  const int n = 50000;
  auto xs = collect(rng, n,
                    [](RngStream& r) { return draw_truncated_normal(r, 5.0, 0.1, -1.0, 1.0); });
  for (double x : xs) {
    CHECK(x > -1.0);
    CHECK(x < 1.0);
  }
  auto m = oracles::moments(xs);
  double ref_mean = 0.99750311527927363;
  double ref_sd = 0.0024953323998846101;
  CHECK(m.mean == doctest::Approx(ref_mean).epsilon(5.0 * ref_sd / std::sqrt((double)n)));
  CHECK(std::sqrt(m.var) == doctest::Approx(ref_sd).epsilon(0.05));
}

TEST_CASE("truncated normal: KS against the analytic truncated CDF") {
  RngStream rng(303, 0);
  const int n = 20000;
  // Straddling interval.
  auto xs = collect(rng, n,
                    [](RngStream& r) { return draw_truncated_normal(r, 0.0, 1.0, -0.5, 2.0); });
  double z = oracles::normal_cdf(2.0) - oracles::normal_cdf(-0.5);
  double lo = oracles::normal_cdf(-0.5);
  double d = oracles::ks_distance(
      xs, [&](double x) { return (oracles::normal_cdf(x) - lo) / z; });
  CHECK(d < oracles::ks_crit(n));
  // Far one-sided tail: work with the mirrored CDF for precision.
  RngStream rng_tail(313, 0);
  const int n_tail = 50000;
  auto ys = collect(rng_tail, n_tail,
                    [](RngStream& r) { return draw_truncated_normal(r, 0.0, 1.0, 8.0, 9.0); });
  double p8 = oracles::normal_cdf(-8.0), p9 = oracles::normal_cdf(-9.0);
  double d2 = oracles::ks_distance(
      ys, [&](double x) { return (p8 - oracles::normal_cdf(-x)) / (p8 - p9); });
  CHECK(d2 < oracles::ks_crit(n_tail));
  for (double y : ys) {
    CHECK(y > 8.0);
    CHECK(y < 9.0);
  }
}

TEST_CASE("truncated normal: shifted and scaled consistency") {
  RngStream a(7, 0), b(7, 0);
  for (int i = 0; i < 200; ++i) {
    double x = draw_truncated_normal(a, 2.0, 3.0, -4.0, 5.0);
    double z = draw_truncated_normal(b, 0.0, 1.0, -2.0, 1.0);
    CHECK(x == doctest::Approx(2.0 + 3.0 * z).epsilon(1e-12));
  }
  CHECK_THROWS_AS(draw_truncated_normal(a, 0.0, 1.0, 2.0, 2.0), DomainError);
  CHECK_THROWS_AS(draw_truncated_normal(a, 0.0, -1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("gamma draws pass KS tests across the shape regimes") {
  RngStream rng(404, 0);
  const int n = 20000;
  for (double shape : {0.5, 1.0, 4.5, 37.0}) {
    double rate = 2.5;
    auto xs = collect(rng, n, [&](RngStream& r) { return draw_gamma(r, shape, rate); });
    double d = oracles::ks_distance(
        xs, [&](double x) { return oracles::gamma_p(shape, rate * x); });
    CHECK_MESSAGE(d < oracles::ks_crit(n), "shape ", shape);
    auto m = oracles::moments(xs);
    CHECK(m.mean == doctest::Approx(shape / rate).epsilon(0.05));
  }
  CHECK_THROWS_AS(draw_gamma(rng, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(draw_gamma(rng, 1.0, -1.0), DomainError);
}

TEST_CASE("inverse gamma matches its reciprocal-gamma definition") {
  RngStream rng(505, 0);
  const int n = 20000;
  double shape = 3.0, rate = 0.3;
  auto xs = collect(rng, n, [&](RngStream& r) { return draw_inverse_gamma(r, shape, rate); });
  std::vector<double> inv;
  for (double x : xs) {
    CHECK(x > 0.0);
    inv.push_back(1.0 / x);
  }
  double d = oracles::ks_distance(inv, [&](double g) { return oracles::gamma_p(shape, rate * g); });
  CHECK(d < oracles::ks_crit(n));
  // Mean rate/(shape-1) for shape > 1.
  auto m = oracles::moments(xs);
  CHECK(m.mean == doctest::Approx(rate / (shape - 1.0)).epsilon(0.1));
}

TEST_CASE("poisson draws: inversion and rejection regimes") {
  RngStream rng(606, 0);
  const int n = 200000;
  for (double rate : {0.3, 3.7, 47.5, 12345.0}) {
    double sum = 0.0, sumsq = 0.0;
    std::int64_t zero = 0;
    for (int i = 0; i < n; ++i) {
      auto k = draw_poisson(rng, rate);
      CHECK(k >= 0);
      sum += static_cast<double>(k);
      sumsq += static_cast<double>(k) * static_cast<double>(k);
      if (k == 0) ++zero;
    }
    double mean = sum / n, var = sumsq / n - mean * mean;
    double se = std::sqrt(rate / n);
    CHECK_MESSAGE(std::fabs(mean - rate) < 5.0 * se, "rate ", rate);
    CHECK_MESSAGE(var == doctest::Approx(rate).epsilon(0.05), "rate ", rate);
    if (rate < 5.0) {
      double p0 = std::exp(-rate);
      double se0 = std::sqrt(p0 * (1 - p0) / n);
      CHECK(std::fabs(static_cast<double>(zero) / n - p0) < 5.0 * se0);
    }
  }
  CHECK(draw_poisson(rng, 0.0) == 0);
  CHECK_THROWS_AS(draw_poisson(rng, -1.0), DomainError);
}

TEST_CASE("polya-gamma moment functions match the convolution series") {
  // Frozen references from the infinite gamma-convolution representation.
  CHECK(polya_gamma_mean(1, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(polya_gamma_var(1, 0.0) == doctest::Approx(1.0 / 24.0).epsilon(1e-10));
  CHECK(polya_gamma_mean(2, 1.5) == doctest::Approx(0.423432634924858213).epsilon(1e-13));
  CHECK(polya_gamma_var(2, 1.5) == doctest::Approx(0.055617658126307778).epsilon(1e-10));
  CHECK(polya_gamma_mean(4, -2.0) == doctest::Approx(0.761594155955764888).epsilon(1e-13));
  CHECK(polya_gamma_var(4, -2.0) == doctest::Approx(0.085404953585434705).epsilon(1e-10));
  CHECK(polya_gamma_mean(200, 1.2) == doctest::Approx(44.7541305831696075).epsilon(1e-13));
  CHECK(polya_gamma_var(200, 1.2) == doctest::Approx(6.37169614847810201).epsilon(1e-10));
  // Tiny-argument series branch must join the analytic form smoothly.
  CHECK(polya_gamma_mean(1, 2e-5) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(polya_gamma_var(1, 2e-5) == doctest::Approx(1.0 / 24.0).epsilon(1e-9));
}

TEST_CASE("polya-gamma empirical moments: exact-sum regime") {
  RngStream rng(707, 0);
  const int n = 200000;
  struct Case { std::int64_t b; double c; };
  for (auto [b, c] : {Case{1, 0.0}, Case{2, 1.5}, Case{4, -2.0}}) {
    double mean_ref = polya_gamma_mean(static_cast<double>(b), c);
    double var_ref = polya_gamma_var(static_cast<double>(b), c);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      double w = draw_polya_gamma(rng, b, c);
      CHECK(w > 0.0);
      sum += w;
      sumsq += w * w;
    }
    double mean = sum / n, var = sumsq / n - mean * mean;
    double se = std::sqrt(var_ref / n);
    CHECK_MESSAGE(std::fabs(mean - mean_ref) < 5.0 * se, "b=", b, " c=", c);
    CHECK_MESSAGE(var == doctest::Approx(var_ref).epsilon(0.05), "b=", b, " c=", c);
  }
  CHECK(draw_polya_gamma(rng, 0, 3.0) == 0.0);
  CHECK_THROWS_AS(draw_polya_gamma(rng, -1, 0.0), DomainError);
}

TEST_CASE("polya-gamma empirical moments: gaussian regime stays positive") {
  RngStream rng(808, 0);
  const int n = 100000;
  double mean_ref = polya_gamma_mean(200.0, 1.2);
  double var_ref = polya_gamma_var(200.0, 1.2);
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double w = draw_polya_gamma(rng, 200, 1.2);
    CHECK(w > 0.0);
    sum += w;
    sumsq += w * w;
  }
  double mean = sum / n, var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean - mean_ref) < 5.0 * std::sqrt(var_ref / n));
  CHECK(var == doctest::Approx(var_ref).epsilon(0.05));
}

TEST_CASE("samplers are deterministic under a fixed stream") {
  RngStream a(9001, 4), b(9001, 4);
  for (int i = 0; i < 50; ++i) {
    CHECK(draw_normal(a, 0.0, 1.0) == draw_normal(b, 0.0, 1.0));
    CHECK(draw_gamma(a, 2.5, 1.0) == draw_gamma(b, 2.5, 1.0));
    CHECK(draw_poisson(a, 7.7) == draw_poisson(b, 7.7));
    CHECK(draw_polya_gamma(a, 3, 0.8) == draw_polya_gamma(b, 3, 0.8));
    CHECK(draw_truncated_normal(a, 0.5, 2.0, -1.0, 1.0) ==
          draw_truncated_normal(b, 0.5, 2.0, -1.0, 1.0));
  }
}

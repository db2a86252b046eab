#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fssm/basis.hpp"
#include "fssm/errors.hpp"
#include "fssm/specials.hpp"

using namespace fssm;

namespace {

BasisFunction beta(double a, double b) { return {BasisFamily::Beta, a, b}; }
BasisFunction pareto(double a, double b) { return {BasisFamily::Pareto, a, b}; }

}  // namespace

TEST_CASE("eval_basis closed-form checks") {
  CHECK(eval_basis(pareto(1.0, 1.0), 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(eval_basis(beta(1.0, 1.0), 0.25) == doctest::Approx(0.25).epsilon(1e-14));
  // Pareto(0.5, 1) at 0.75: 1 - sqrt(0.25) = 0.5.
  CHECK(eval_basis(pareto(0.5, 1.0), 0.75) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(eval_basis(pareto(0.5, 1.0), 0.5) ==
        doctest::Approx(0.2928932188134525).epsilon(1e-13));
  CHECK(eval_basis(beta(2.0, 3.0), 0.7) ==
        doctest::Approx(0.916299999999999966).epsilon(1e-12));
  // Boundary pinning for assorted parameters.
  for (auto f : {beta(1.0, 1.0), beta(3.0, 1.0), beta(1.0, 0.3), pareto(0.5, 0.5),
                 pareto(1.0, 0.2), pareto(0.05, 1.0)}) {
    CHECK(std::fabs(eval_basis(f, 0.0)) <= 1e-12);
    CHECK(std::fabs(eval_basis(f, 1.0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("eval_basis domain errors") {
  CHECK_THROWS_AS(eval_basis(beta(1.0, 1.0), -0.1), DomainError);
  CHECK_THROWS_AS(eval_basis(beta(1.0, 1.0), 1.1), DomainError);
  CHECK_THROWS_AS(eval_basis(beta(-1.0, 1.0), 0.5), DomainError);
  CHECK_THROWS_AS(eval_basis(beta(1.0, 0.0), 0.5), DomainError);
  // Pareto parameters are restricted to (0, 1].
  CHECK_THROWS_AS(eval_basis(pareto(1.2, 1.0), 0.5), DomainError);
  CHECK_THROWS_AS(eval_basis(pareto(1.0, 1.2), 0.5), DomainError);
  CHECK_THROWS_AS(eval_basis(pareto(0.0, 1.0), 0.5), DomainError);
}

TEST_CASE("basis_gini closed forms and quadrature cross-checks") {
  CHECK(basis_gini(pareto(1.0, 1.0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(basis_gini(beta(1.0, 1.0)) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(basis_gini(pareto(0.5, 1.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // Beta basis Gini has the independent closed form (a - b)/(a + b):
  // int_0^1 I_x(a,b) dx = 1 - E[Beta(a,b)] by parts.
  CHECK(basis_gini(beta(1.0, 0.3)) == doctest::Approx(0.7 / 1.3).epsilon(1e-9));
  CHECK(basis_gini(beta(3.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(basis_gini(beta(2.5, 1.7)) == doctest::Approx(0.8 / 4.2).epsilon(1e-9));
  CHECK(basis_gini(beta(1.5, 1.0)) == doctest::Approx(0.2).epsilon(1e-9));
  std::mt19937 gen(4242);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 50; ++i) {
    double a = u(gen), b = u(gen);
    double closed = basis_gini(pareto(a, b));
    double quad = 1.0 - 2.0 * quadrature([&](double x) { return eval_basis(pareto(a, b), x); },
                                         0.0, 1.0, 1e-10);
    CHECK(closed == doctest::Approx(quad).epsilon(1e-8));
    CHECK(closed >= -1e-12);
    CHECK(closed < 1.0);
  }
  for (int i = 0; i < 20; ++i) {
    double a = 1.0 + 3.0 * u(gen), b = u(gen);
    CHECK(basis_gini(beta(a, b)) == doctest::Approx((a - b) / (a + b)).epsilon(1e-8));
  }
}

TEST_CASE("build_basis_set on the oracle scenario set") {
  std::vector<double> args{0.2, 0.4, 0.6, 0.8};
  auto set = build_basis_set({beta(1.0, 1.0), beta(3.0, 1.0), beta(1.0, 0.3)}, args);
  CHECK(set.L() == 3);
  CHECK(set.K() == 4);
  for (int k = 0; k < 4; ++k)
    CHECK(set.H(k, 0) == doctest::Approx(args[k]).epsilon(1e-13));
  CHECK(set.H(1, 1) == doctest::Approx(0.4 * 0.4 * 0.4).epsilon(1e-13));
  CHECK(set.ginis[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(set.ginis[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(set.ginis[2] == doctest::Approx(0.7 / 1.3).epsilon(1e-9));
  // Column monotonicity and range invariants.
  for (int l = 0; l < set.L(); ++l)
    for (int k = 0; k < set.K(); ++k) {
      CHECK(set.H(k, l) >= 0.0);
      CHECK(set.H(k, l) <= 1.0);
      if (k > 0) CHECK(set.H(k, l) >= set.H(k - 1, l) - 1e-13);
    }
}

TEST_CASE("build_basis_set accepts the L=5 real-data basis set") {
  auto set = build_basis_set({beta(1.0, 1.0), beta(1.5, 1.0), beta(3.0, 1.0), beta(1.0, 0.7),
                              beta(1.0, 0.3)},
                             {0.2, 0.4, 0.6, 0.8});
  CHECK(set.L() == 5);
  CHECK(set.K() == 4);
  CHECK(set.ginis[1] == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("build_basis_set validation errors name the offending entry") {
  std::vector<double> args{0.2, 0.4, 0.6, 0.8};
  CHECK_THROWS_AS(build_basis_set({beta(1.0, 1.0)}, args), ConfigError);
  CHECK_THROWS_AS(build_basis_set({beta(1.0, 1.0), beta(-2.0, 1.0)}, args), ConfigError);
  CHECK_THROWS_AS(build_basis_set({beta(1.0, 1.0), pareto(1.5, 1.0)}, args), ConfigError);
  // Unsorted, duplicate, and out-of-range arguments.
  CHECK_THROWS_AS(build_basis_set({beta(1.0, 1.0), beta(2.0, 1.0)}, {0.4, 0.2}), ConfigError);
  CHECK_THROWS_AS(build_basis_set({beta(1.0, 1.0), beta(2.0, 1.0)}, {0.2, 0.2}), ConfigError);
  CHECK_THROWS_AS(build_basis_set({beta(1.0, 1.0), beta(2.0, 1.0)}, {0.0, 0.5}), ConfigError);
  CHECK_THROWS_AS(build_basis_set({beta(1.0, 1.0), beta(2.0, 1.0)}, {0.5, 1.0}), ConfigError);
  try {
    build_basis_set({beta(1.0, 1.0), beta(-2.0, 1.0)}, args);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("monotonicity and convexity on a fine grid") {
  for (auto f : {beta(1.0, 1.0), beta(1.5, 1.0), beta(3.0, 1.0), beta(1.0, 0.7), beta(1.0, 0.3),
                 pareto(0.5, 0.5), pareto(1.0, 0.3), pareto(0.2, 1.0)}) {
    double prev = 0.0;
    std::vector<double> vals;
    for (int g = 0; g <= 1000; ++g) {
      double v = eval_basis(f, g / 1000.0);
      CHECK(v >= prev - 1e-12);
      prev = v;
      vals.push_back(v);
    }
    for (std::size_t i = 1; i + 1 < vals.size(); ++i)
      CHECK(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] >= -1e-9);
  }
}

TEST_CASE("warn_nonconvex flags concave beta bases only") {
  // Beta(0.5, 3) has a decreasing density near 0, so its CDF is concave
  // there; the default model bases are all convex.
  auto flagged = warn_nonconvex({beta(1.0, 1.0), beta(0.5, 3.0), beta(3.0, 1.0),
                                 pareto(0.5, 0.5)});
  CHECK(flagged == std::vector<int>{1});
  CHECK(warn_nonconvex({beta(1.0, 1.0), beta(1.0, 0.3)}).empty());
}

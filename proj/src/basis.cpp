#include "fssm/basis.hpp"

#include <cmath>

#include "fssm/errors.hpp"
#include "fssm/specials.hpp"

namespace fssm {

namespace {

void validate_params(const BasisFunction& f) {
  if (!(f.a > 0.0) || !(f.b > 0.0))
    throw DomainError("basis: shape parameters must be positive");
  if (f.family == BasisFamily::Pareto && (f.a > 1.0 || f.b > 1.0))
    throw DomainError("basis: Pareto family requires a and b in (0, 1]");
}

}  // namespace

std::string basis_family_name(BasisFamily f) {
  return f == BasisFamily::Beta ? "beta" : "pareto";
}

double eval_basis(const BasisFunction& f, double x) {
  validate_params(f);
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("eval_basis: x must lie in [0, 1]");
  if (f.family == BasisFamily::Beta) return regularized_incomplete_beta(x, f.a, f.b);
  // (1 - (1-x)^a)^(1/b); endpoints pinned exactly.
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double inner = -std::expm1(f.a * std::log1p(-x));
  return std::exp(std::log(inner) / f.b);
}

double basis_gini(const BasisFunction& f) {
  validate_params(f);
  if (f.family == BasisFamily::Pareto) {
    double log_beta = log_gamma(1.0 / f.a) + log_gamma(1.0 / f.b + 1.0) -
                      log_gamma(1.0 / f.a + 1.0 / f.b + 1.0);
    return 1.0 - 2.0 * std::exp(log_beta) / f.a;
  }
  double integral = quadrature([&f](double x) { return eval_basis(f, x); }, 0.0, 1.0, 1e-10);
  return 1.0 - 2.0 * integral;
}

BasisSet build_basis_set(const std::vector<BasisFunction>& bases,
                         const std::vector<double>& arguments) {
  if (bases.size() < 2) throw ConfigError("basis set: at least two basis functions required");
  for (std::size_t l = 0; l < bases.size(); ++l) {
    try {
      validate_params(bases[l]);
    } catch (const DomainError& e) {
      throw ConfigError("basis set entry " + std::to_string(l + 1) + ": " + e.what());
    }
  }
  if (arguments.empty()) throw ConfigError("basis set: empty argument grid");
  for (std::size_t k = 0; k < arguments.size(); ++k) {
    if (!(arguments[k] > 0.0 && arguments[k] < 1.0))
      throw ConfigError("basis set argument " + std::to_string(k + 1) +
                        ": must lie strictly inside (0, 1)");
    if (k > 0 && !(arguments[k] > arguments[k - 1]))
      throw ConfigError("basis set argument " + std::to_string(k + 1) +
                        ": arguments must be strictly increasing");
  }
  BasisSet set;
  set.bases = bases;
  set.arguments = arguments;
  int K = set.K(), L = set.L();
  set.H.resize(K, L);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) set.H(k, l) = eval_basis(bases[l], arguments[k]);
  set.ginis.resize(L);
  for (int l = 0; l < L; ++l) set.ginis[l] = basis_gini(bases[l]);
  return set;
}

std::vector<int> warn_nonconvex(const std::vector<BasisFunction>& bases, int grid_points) {
  std::vector<int> flagged;
  double h = 1.0 / (grid_points - 1);
  for (std::size_t l = 0; l < bases.size(); ++l) {
    std::vector<double> vals(grid_points);
    for (int i = 0; i < grid_points; ++i) vals[i] = eval_basis(bases[l], i * h);
    bool convex = true;
    for (int i = 1; i + 1 < grid_points; ++i) {
      if (vals[i + 1] - 2.0 * vals[i] + vals[i - 1] < -1e-9) {
        convex = false;
        break;
      }
    }
    if (!convex) flagged.push_back(static_cast<int>(l));
  }
  return flagged;
}

}  // namespace fssm

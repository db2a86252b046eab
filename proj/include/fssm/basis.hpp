#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fssm {

enum class BasisFamily { Beta, Pareto };

// One shape-constrained basis curve h on [0,1] with h(0)=0, h(1)=1.
// Beta: h(x) = I_x(a, b) (regularized incomplete beta), a > 0, b > 0.
// Pareto: h(x) = (1 - (1-x)^a)^(1/b), a and b in (0, 1].
struct BasisFunction {
  BasisFamily family;
  double a;
  double b;
};

struct BasisSet {
  std::vector<BasisFunction> bases;   // length L >= 2
  std::vector<double> arguments;      // x_1 < ... < x_K in (0,1)
  Eigen::MatrixXd H;                  // K x L, H(k,l) = h_l(x_k)
  std::vector<double> ginis;          // per-basis Gini coefficients

  int L() const { return static_cast<int>(bases.size()); }
  int K() const { return static_cast<int>(arguments.size()); }
};

// h(x) for one basis; x in [0,1]. Throws DomainError on invalid parameters
// or arguments.
double eval_basis(const BasisFunction& f, double x);

// Gini coefficient 1 - 2*int_0^1 h. Pareto in closed form
// 1 - 2 B(1/a, 1/b + 1)/a; Beta by adaptive quadrature at 1e-10.
double basis_gini(const BasisFunction& f);

// Validates parameters and arguments (ConfigError naming the offending
// entry), precomputes H and the ginis.
BasisSet build_basis_set(const std::vector<BasisFunction>& bases,
                         const std::vector<double>& arguments);

// Indices of bases whose second differences on a uniform grid go below
// -1e-9, i.e. curves that are not convex and therefore not valid Lorenz
// curves. Reporting only; construction does not reject them.
std::vector<int> warn_nonconvex(const std::vector<BasisFunction>& bases, int grid_points = 1000);

std::string basis_family_name(BasisFamily f);

}  // namespace fssm

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fssm/basis.hpp"

namespace fssm {

// Observed panel: y(t-1, k-1) holds y_{tk} for t = 1..T, k = 1..K. K = 0 is
// permitted internally (prior-only chains in tests); the CLI requires K >= 1.
struct FunctionalPanel {
  Eigen::MatrixXd y;               // T x K
  std::vector<double> arguments;   // length K, matches the basis set grid

  int T() const { return static_cast<int>(y.rows()); }
  int K() const { return static_cast<int>(y.cols()); }
  void validate() const;
};

struct ModelParams {
  Eigen::VectorXd mu;      // length L-1
  Eigen::VectorXd phi;     // length L-1, entries in (-1,1)
  Eigen::VectorXd sigma2;  // length L-1, positive
  double nu2 = 1.0;        // observation variance (tied across t,k)

  int Lm1() const { return static_cast<int>(mu.size()); }
  void validate() const;
};

// Model hyperparameters: inverse-gamma blocks are IG(n0/2, d0/2).
struct PriorHyperparams {
  Eigen::VectorXd mu_mean, mu_var;      // length L-1
  Eigen::VectorXd phi_mean, phi_var;    // length L-1
  Eigen::VectorXd sigma2_n0, sigma2_d0; // length L-1
  double nu2_n0 = 1e-3, nu2_d0 = 1e-3;  // observation (or mixture component) variance

  void validate(int Lm1) const;
  // Default priors broadcast across l; mixture components default to
  // n0 = d0 = 0.01 for the variance block instead of 1e-3.
  static PriorHyperparams defaults(int Lm1, bool mixture = false);
};

// Latent path u (rows t = 0..T) and the derived weights pi (rows t = 1..T).
struct LatentState {
  Eigen::MatrixXd u;   // (T+1) x (L-1)
  Eigen::MatrixXd pi;  // T x L, each row on the simplex

  void refresh_pi_row(int t);  // t in 1..T
  void refresh_pi();
};

// Poisson and Polya-Gamma augmentation draws, all indexed (t-1, l-1).
struct AugmentationVars {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> z1, z2;  // T x (L-1)
  Eigen::MatrixXd omega;                                               // T x (L-1)

  void resize(int T, int Lm1);
};

// pi_1 = 1/(1+sum exp(u)), pi_{l+1} = exp(u_l)/(1+sum exp(u)); max-subtracted.
Eigen::VectorXd softmax_weights(const Eigen::VectorXd& u_row);

// H * pi; entries in [0,1], nondecreasing when every basis column is.
Eigen::VectorXd mean_curve(const Eigen::VectorXd& pi, const Eigen::MatrixXd& H);

// A_t = sum_k (y_tk 1_L - h_k)(y_tk 1_L - h_k)^T / (2 nu2_tk); PSD.
Eigen::MatrixXd compute_A(const Eigen::VectorXd& y_row, const Eigen::MatrixXd& H,
                          const Eigen::VectorXd& nu2_row);

struct BQuad {
  double b, c, d;  // entries of the collapsed 2x2 PSD form
  double s;        // sum of v excluding component ell+1
  double log_s;    // log of s, stable for extreme u
};

// Collapse A onto (v_ell, rest) for component ell in 1..L-1. v_row is
// (1, e^{u_1}, ..., e^{u_{L-1}}).
BQuad compute_B_and_s(const Eigen::MatrixXd& A, const Eigen::VectorXd& v_row, int ell);

// Same collapse parameterized by u directly; never exponentiates u, so it
// is safe for |u| far beyond the overflow point.
BQuad compute_B_and_s_log(const Eigen::MatrixXd& A, const Eigen::VectorXd& u_row, int ell);

// sum_k log N(y_tk; (H pi)_k, nu2_tk)
double log_observation_density(const Eigen::VectorXd& y_row, const Eigen::VectorXd& pi,
                               const Eigen::MatrixXd& H, const Eigen::VectorXd& nu2_row);

}  // namespace fssm

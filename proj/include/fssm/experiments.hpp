#pragma once

#include <utility>
#include <vector>

#include "fssm/core.hpp"
#include "fssm/gibbs.hpp"
#include "fssm/rng.hpp"

namespace fssm {

// Ground truth of one synthetic scenario: panel plus the generating state
// path, weights, Gini series, parameters and basis.
struct SyntheticTruth {
  FunctionalPanel panel;
  Eigen::MatrixXd u;        // (T+1) x (L-1)
  Eigen::MatrixXd pi;       // T x L
  Eigen::VectorXd gini;     // length T
  ModelParams params;
  BasisSet basis;
};

// T=200 panel from the oracle Beta bases {(1,1),(3,1),(1,0.3)} with
// mu = (0.1, -0.3), sigma2 = (0.005, 0.005), nu2 = 1e-4, arguments 0.2k
// (K=4) or 0.1k (K=9), u_0 stationary.
SyntheticTruth generate_synthetic(RngStream& rng, int K, double phi);

// G_t = sum_l pi_{tl} G_l for each draw.
std::vector<Eigen::VectorXd> gini_series(const std::vector<Eigen::MatrixXd>& weights_draws,
                                         const std::vector<double>& basis_ginis);

// Nonparametric Gini bounds from Lorenz points (x_k, f_k) with implicit
// (0,0) and (1,1). Lower: chord polygon. Upper: minimal convex curve
// through the points (adjacent chords extended to intersections).
std::pair<double, double> polygon_gini_bounds(const std::vector<double>& x,
                                              const std::vector<double>& f);

struct PredictiveLoss {
  double ppv = 0.0;
  double ppse = 0.0;
  double log_ppv = 0.0;   // -inf sentinel when ppv = 0
  double log_ppse = 0.0;  // -inf sentinel when ppse = 0
};

// PPV = sum Var(yhat), PPSE = PPV + sum (E[yhat] - y)^2 over the panel.
PredictiveLoss posterior_predictive_loss(const Eigen::MatrixXd& y,
                                         const std::vector<Eigen::MatrixXd>& predictive_draws);

// Effective sample size by the initial-monotone-positive-sequence
// truncation of the autocorrelations; needs at least 100 draws. A
// zero-variance sequence returns n by convention.
double ess(const std::vector<double>& draws);

struct IntervalMetrics {
  double rmse_x100;
  double cp;
  double al;
};

// RMSE (x100) of posterior means, coverage and mean length of equal-tailed
// credible intervals. draws is n_draws x n_elements.
IntervalMetrics interval_metrics(const Eigen::VectorXd& truth, const Eigen::MatrixXd& draws,
                                 double level = 0.95);

// Type-7 (linear interpolation) sample quantile; sorts a copy.
double sample_quantile(std::vector<double> values, double p);

}  // namespace fssm

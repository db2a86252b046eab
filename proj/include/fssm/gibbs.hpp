#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fssm/basis.hpp"
#include "fssm/core.hpp"
#include "fssm/rng.hpp"

namespace fssm {

struct McmcConfig {
  int n_iter = 30000;
  int n_burnin = 10000;
  int thin = 1;
  std::uint64_t seed = 1;
  int n_chains = 1;
  bool store_states = false;
  int threads = 0;  // 0 means one thread per chain

  void validate() const;
};

// Thinned post-burn-in draws, possibly merged over chains.
struct DrawStore {
  std::string model;  // "fssm" or "mixture"
  int T = 0;
  int L = 0;
  std::vector<int> chain;                  // per draw
  std::vector<int> iter;                   // per draw, post-burn-in sweep index
  std::vector<ModelParams> params;         // per draw
  std::vector<Eigen::VectorXd> comp_var;   // per draw, mixture only (length L)
  std::vector<Eigen::MatrixXd> weights;    // per draw, T x L; filled when store_states
  std::vector<Eigen::VectorXd> gini;       // per draw, length T
  std::vector<double> phi_accept_rate;     // per chain
  std::vector<double> wall_seconds;        // per chain

  std::size_t n_draws() const { return params.size(); }
  void append(const DrawStore& other);
};

// Single-site parameter updates of the state equation. ell is 1-based
// (component u_{., ell}); u holds rows t = 0..T in its (T+1) rows.

struct PhiDraw {
  double phi;
  bool accepted;
};

// Independence MH step: proposal TN_(-1,1)(m1, v1^2) built from the printed
// conditional sums (numerator over t=1..T, denominator over t=2..T; the
// stationary-initial-state term absorbs the missing t=1 square), accepted
// with min{1, sqrt((1-phi_new^2)/(1-phi_old^2))}.
PhiDraw update_phi(RngStream& rng, int ell, const Eigen::MatrixXd& u, double phi_old,
                   double mu, double sigma2, const PriorHyperparams& prior);

// IG((T + n0 + 1)/2, d1/2) with the mu-centered residual sum
// d1 = sum_t ((u_t-mu) - phi (u_{t-1}-mu))^2 + d0 + (1-phi^2)(u_0-mu)^2.
double update_sigma2(RngStream& rng, int ell, const Eigen::MatrixXd& u, double phi, double mu,
                     const PriorHyperparams& prior);

double update_mu(RngStream& rng, int ell, const Eigen::MatrixXd& u, double phi, double sigma2,
                 const PriorHyperparams& prior);

// IG((TK + n0)/2, (sum of squared residuals y - H pi + d0)/2).
double update_nu2(RngStream& rng, const FunctionalPanel& panel, const Eigen::MatrixXd& H,
                  const Eigen::MatrixXd& pi_all, const PriorHyperparams& prior);

// One full state block: for each ell = 1..L-1 in order, recompute the
// collapsed quadratic per t, draw (z1, z2), omega, build pseudo
// observations, run the smoother for column ell, refresh the weights.
// A_t is computed once from (panel, H, nu2) at entry.
void update_states(RngStream& rng, const FunctionalPanel& panel, const BasisSet& basis,
                   const ModelParams& params, LatentState& latent, AugmentationVars& aug);

// Nonnegative least squares min ||A x - b|| s.t. x >= 0 (Lawson-Hanson).
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// Data-informed initialization (static NNLS weight fit; prior-mean
// parameters with documented fallbacks when the IG mean is undefined).
ModelParams initial_params(const FunctionalPanel& panel, const BasisSet& basis,
                           const PriorHyperparams& prior);
LatentState initial_latent(const FunctionalPanel& panel, const BasisSet& basis);

// One chain on stream chain_index of config.seed.
DrawStore run_chain(const McmcConfig& config, const FunctionalPanel& panel,
                    const BasisSet& basis, const PriorHyperparams& priors,
                    int chain_index = 0);

// All chains, parallel up to config.threads, merged in chain order.
DrawStore run_chains(const McmcConfig& config, const FunctionalPanel& panel,
                     const BasisSet& basis, const PriorHyperparams& priors);

}  // namespace fssm

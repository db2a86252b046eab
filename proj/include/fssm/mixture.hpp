#pragma once

#include <cstdint>

#include "fssm/gibbs.hpp"

namespace fssm {

// Label field and component variances of the mixture-of-normals comparator.
struct MixtureAug {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> labels;  // T x K, values 1..L
  Eigen::MatrixXd omega;                                               // T x (L-1), positive
  Eigen::VectorXd comp_var;                                            // length L

  // N_{tl} = #{k : labels(t,k) = l+1} for l = 0..L-1 (0-based column l).
  Eigen::MatrixXi counts(int L) const;
};

// Categorical draw over components, P(z=l) proportional to
// N(y; h_{k,l}, nu_l^2) exp(u_{l-1}) with u_0 = 0; computed in log space.
Eigen::VectorXi sample_labels(RngStream& rng, const Eigen::VectorXd& y_row,
                              const Eigen::MatrixXd& H, const Eigen::VectorXd& comp_var,
                              const Eigen::VectorXd& u_row);

// IG((n0 + count)/2, (d0 + assigned residual sum)/2) for component ell (1..L).
double update_component_variance(RngStream& rng, int ell, const Eigen::MatrixXd& y,
                                 const Eigen::Matrix<std::uint8_t, Eigen::Dynamic,
                                                     Eigen::Dynamic>& labels,
                                 const Eigen::MatrixXd& H, const PriorHyperparams& prior);

// State block of the mixture sampler: per ell, omega ~ PG(K, xi) with
// xi = u_ell - log sum_{l' != ell} exp(u_l'), pseudo data
// log-sum + (2 N - K)/(2 omega), then the same AR(1) smoother.
void update_mixture_states(RngStream& rng, const MixtureAug& aug_labels, int K,
                           const ModelParams& params, LatentState& latent,
                           Eigen::MatrixXd* omega_out);

DrawStore run_mixture_chain(const McmcConfig& config, const FunctionalPanel& panel,
                            const BasisSet& basis, const PriorHyperparams& priors,
                            int chain_index = 0);

DrawStore run_mixture_chains(const McmcConfig& config, const FunctionalPanel& panel,
                             const BasisSet& basis, const PriorHyperparams& priors);

}  // namespace fssm

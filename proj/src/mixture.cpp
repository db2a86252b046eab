#include "fssm/mixture.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "fssm/errors.hpp"
#include "fssm/ffbs.hpp"
#include "fssm/samplers.hpp"
#include "fssm/specials.hpp"

namespace fssm {

namespace {

constexpr double kLog2Pi = 1.83787706640934548356;
// Component variances live on a clamped range so that an empty component
// under a near-improper IG prior (draws beyond double range are genuine
// tail events of that prior) keeps the chain finite.
constexpr double kVarFloor = 1e-12;
constexpr double kVarCeil = 1e12;

double log_s_excluding(const Eigen::VectorXd& u_row, int ell) {
  // log sum over components l' != ell of exp(u_{l'}) with u_0 = 0;
  // ell indexes u (1..L-1), component ell+1.
  std::vector<double> logv;
  logv.reserve(u_row.size());
  if (ell != 0) logv.push_back(0.0);
  for (int j = 0; j < static_cast<int>(u_row.size()); ++j)
    if (j + 1 != ell) logv.push_back(u_row[j]);
  return logsumexp(logv);
}

}  // namespace

Eigen::MatrixXi MixtureAug::counts(int L) const {
  Eigen::MatrixXi n = Eigen::MatrixXi::Zero(labels.rows(), L);
  for (Eigen::Index t = 0; t < labels.rows(); ++t)
    for (Eigen::Index k = 0; k < labels.cols(); ++k) {
      int lab = labels(t, k);
      if (lab < 1 || lab > L) throw DomainError("mixture: label outside 1..L");
      n(t, lab - 1) += 1;
    }
  return n;
}

Eigen::VectorXi sample_labels(RngStream& rng, const Eigen::VectorXd& y_row,
                              const Eigen::MatrixXd& H, const Eigen::VectorXd& comp_var,
                              const Eigen::VectorXd& u_row) {
  int K = static_cast<int>(y_row.size());
  int L = static_cast<int>(H.cols());
  if (comp_var.size() != L || u_row.size() != L - 1)
    throw ShapeError("sample_labels: dimension mismatch");
  Eigen::VectorXi labels(K);
  std::vector<double> logw(L);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      double r = y_row[k] - H(k, l);
      double log_density = -0.5 * (kLog2Pi + std::log(comp_var[l]) + r * r / comp_var[l]);
      logw[l] = log_density + (l == 0 ? 0.0 : u_row[l - 1]);
    }
    double norm = logsumexp(logw);
    double target = std::log(rng.uniform());
    double acc = -std::numeric_limits<double>::infinity();
    int pick = L - 1;
    for (int l = 0; l < L; ++l) {
      acc = logsumexp({acc, logw[l] - norm});
      if (target <= acc) {
        pick = l;
        break;
      }
    }
    labels[k] = pick + 1;
  }
  return labels;
}

double update_component_variance(RngStream& rng, int ell, const Eigen::MatrixXd& y,
                                 const Eigen::Matrix<std::uint8_t, Eigen::Dynamic,
                                                     Eigen::Dynamic>& labels,
                                 const Eigen::MatrixXd& H, const PriorHyperparams& prior) {
  int L = static_cast<int>(H.cols());
  if (ell < 1 || ell > L) throw DomainError("update_component_variance: ell must lie in 1..L");
  double n1 = prior.nu2_n0;
  double d1 = prior.nu2_d0;
  for (Eigen::Index t = 0; t < y.rows(); ++t)
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
      if (labels(t, k) == ell) {
        double r = y(t, k) - H(k, ell - 1);
        n1 += 1.0;
        d1 += r * r;
      }
    }
  // Draw the underlying gamma directly: with an empty component and a
  // near-improper prior the gamma variate can underflow to zero, which is
  // the prior's genuine far tail and belongs at the ceiling.
  double g = draw_gamma(rng, 0.5 * n1, 0.5 * d1);
  double draw = g > 0.0 ? 1.0 / g : kVarCeil;
  return std::min(std::max(draw, kVarFloor), kVarCeil);
}

void update_mixture_states(RngStream& rng, const MixtureAug& aug_labels, int K,
                           const ModelParams& params, LatentState& latent,
                           Eigen::MatrixXd* omega_out) {
  int T = static_cast<int>(latent.u.rows()) - 1;
  int Lm1 = static_cast<int>(latent.u.cols());
  Eigen::MatrixXi N = aug_labels.counts(Lm1 + 1);
  std::vector<PseudoObservation> pseudo(T);
  for (int ell = 1; ell <= Lm1; ++ell) {
    int j = ell - 1;
    for (int t = 1; t <= T; ++t) {
      double log_s = log_s_excluding(latent.u.row(t).transpose(), ell);
      double xi = latent.u(t, j) - log_s;
      double omega = draw_polya_gamma(rng, K, xi);
      PseudoObservation obs;
      if (omega > 0.0) {
        obs.value = log_s + (2.0 * N(t - 1, ell) - K) / (2.0 * omega);
        obs.precision = omega;
        obs.missing = false;
      }
      pseudo[t - 1] = obs;
      if (omega_out) (*omega_out)(t - 1, j) = omega;
    }
    Ar1Spec spec{params.phi[j], params.mu[j], params.sigma2[j]};
    latent.u.col(j) = ffbs_draw(rng, spec, pseudo);
  }
  latent.refresh_pi();
}

DrawStore run_mixture_chain(const McmcConfig& config, const FunctionalPanel& panel,
                            const BasisSet& basis, const PriorHyperparams& priors,
                            int chain_index) {
  config.validate();
  panel.validate();
  int T = panel.T();
  int K = panel.K();
  int L = basis.L();
  int Lm1 = L - 1;
  priors.validate(Lm1);
  if (K != basis.K() && K > 0)
    throw ShapeError("run_mixture_chain: panel and basis argument grids differ in length");
  if (L > 255) throw ConfigError("mixture: at most 255 components supported");

  auto t_start = std::chrono::steady_clock::now();
  RngStream rng(config.seed, static_cast<std::uint64_t>(chain_index));
  ModelParams params = initial_params(panel, basis, priors);
  LatentState latent = initial_latent(panel, basis);
  MixtureAug aug;
  aug.labels.resize(T, K);
  aug.omega.setZero(T, Lm1);
  aug.comp_var = Eigen::VectorXd::Constant(L, params.nu2);
  for (int t = 1; t <= T; ++t) {
    if (K == 0) break;
    Eigen::VectorXi lab = sample_labels(rng, panel.y.row(t - 1).transpose(), basis.H,
                                        aug.comp_var, latent.u.row(t).transpose());
    for (int k = 0; k < K; ++k) aug.labels(t - 1, k) = static_cast<std::uint8_t>(lab[k]);
  }

  Eigen::VectorXd basis_gini_vec =
      Eigen::Map<const Eigen::VectorXd>(basis.ginis.data(), L);

  DrawStore store;
  store.model = "mixture";
  store.T = T;
  store.L = L;
  long phi_proposals = 0, phi_accepts = 0;
  int total = config.n_burnin + config.n_iter;
  for (int it = 0; it < total; ++it) {
    try {
      for (int ell = 1; ell <= Lm1; ++ell) {
        int j = ell - 1;
        PhiDraw pd = update_phi(rng, ell, latent.u, params.phi[j], params.mu[j],
                                params.sigma2[j], priors);
        params.phi[j] = pd.phi;
        ++phi_proposals;
        if (pd.accepted) ++phi_accepts;
        params.sigma2[j] = update_sigma2(rng, ell, latent.u, params.phi[j], params.mu[j], priors);
        params.mu[j] = update_mu(rng, ell, latent.u, params.phi[j], params.sigma2[j], priors);
      }
      for (int t = 1; t <= T; ++t) {
        if (K == 0) break;
        Eigen::VectorXi lab = sample_labels(rng, panel.y.row(t - 1).transpose(), basis.H,
                                            aug.comp_var, latent.u.row(t).transpose());
        for (int k = 0; k < K; ++k) aug.labels(t - 1, k) = static_cast<std::uint8_t>(lab[k]);
      }
      for (int l = 1; l <= L; ++l)
        aug.comp_var[l - 1] = update_component_variance(rng, l, panel.y, aug.labels, basis.H,
                                                        priors);
      update_mixture_states(rng, aug, K, params, latent, &aug.omega);
    } catch (const NumericalError& e) {
      throw NumericalError("mixture chain " + std::to_string(chain_index) +
                           " aborted at sweep " + std::to_string(it) + ": " + e.what());
    }
    if (it >= config.n_burnin && (it - config.n_burnin) % config.thin == 0) {
      store.chain.push_back(chain_index);
      store.iter.push_back(it - config.n_burnin);
      store.params.push_back(params);
      store.comp_var.push_back(aug.comp_var);
      if (config.store_states) store.weights.push_back(latent.pi);
      store.gini.push_back(latent.pi * basis_gini_vec);
    }
  }
  store.phi_accept_rate.push_back(
      phi_proposals > 0 ? static_cast<double>(phi_accepts) / phi_proposals : 0.0);
  store.wall_seconds.push_back(
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count());
  return store;
}

DrawStore run_mixture_chains(const McmcConfig& config, const FunctionalPanel& panel,
                             const BasisSet& basis, const PriorHyperparams& priors) {
  config.validate();
  int threads = config.threads == 0 ? config.n_chains : config.threads;
  std::vector<DrawStore> results(config.n_chains);
  std::vector<std::string> failures(config.n_chains);
  for (int begin = 0; begin < config.n_chains; begin += threads) {
    int end = std::min(begin + threads, config.n_chains);
    std::vector<std::thread> pool;
    for (int c = begin; c < end; ++c) {
      pool.emplace_back([&, c]() {
        try {
          results[c] = run_mixture_chain(config, panel, basis, priors, c);
        } catch (const std::exception& e) {
          failures[c] = e.what();
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures)
    if (!f.empty()) throw NumericalError(f);
  DrawStore merged;
  merged.model = "mixture";
  merged.T = panel.T();
  merged.L = basis.L();
  for (const auto& r : results) merged.append(r);
  return merged;
}

}  // namespace fssm

#include "fssm/gibbs.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "fssm/augment.hpp"
#include "fssm/errors.hpp"
#include "fssm/ffbs.hpp"
#include "fssm/samplers.hpp"

namespace fssm {

void McmcConfig::validate() const {
  if (n_iter <= 0) throw ConfigError("mcmc.n_iter: must be positive");
  if (n_burnin < 0) throw ConfigError("mcmc.n_burnin: must be nonnegative");
  if (thin < 1) throw ConfigError("mcmc.thin: must be at least 1");
  if (n_chains < 1) throw ConfigError("mcmc.n_chains: must be at least 1");
  if (threads < 0) throw ConfigError("mcmc.threads: must be nonnegative");
}

void DrawStore::append(const DrawStore& other) {
  chain.insert(chain.end(), other.chain.begin(), other.chain.end());
  iter.insert(iter.end(), other.iter.begin(), other.iter.end());
  params.insert(params.end(), other.params.begin(), other.params.end());
  comp_var.insert(comp_var.end(), other.comp_var.begin(), other.comp_var.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  gini.insert(gini.end(), other.gini.begin(), other.gini.end());
  phi_accept_rate.insert(phi_accept_rate.end(), other.phi_accept_rate.begin(),
                         other.phi_accept_rate.end());
  wall_seconds.insert(wall_seconds.end(), other.wall_seconds.begin(), other.wall_seconds.end());
}

PhiDraw update_phi(RngStream& rng, int ell, const Eigen::MatrixXd& u, double phi_old,
                   double mu, double sigma2, const PriorHyperparams& prior) {
  int T = static_cast<int>(u.rows()) - 1;
  int j = ell - 1;
  double s_cross = 0.0;  // sum_{t=1}^T (u_t - mu)(u_{t-1} - mu)
  double s_sq = 0.0;     // sum_{t=2}^T (u_{t-1} - mu)^2
  for (int t = 1; t <= T; ++t) {
    double prev = u(t - 1, j) - mu;
    s_cross += (u(t, j) - mu) * prev;
    if (t >= 2) s_sq += prev * prev;
  }
  double v1 = 1.0 / (s_sq / sigma2 + 1.0 / prior.phi_var[j]);
  if (!(v1 > 0.0) || !std::isfinite(v1))
    throw NumericalError("update_phi: degenerate proposal variance");
  double m1 = v1 * (s_cross / sigma2 + prior.phi_mean[j] / prior.phi_var[j]);
  double cand = draw_truncated_normal(rng, m1, std::sqrt(v1), -1.0, 1.0);
  double log_acc = 0.5 * (std::log1p(-cand * cand) - std::log1p(-phi_old * phi_old));
  if (std::log(rng.uniform()) < log_acc) return {cand, true};
  return {phi_old, false};
}

double update_sigma2(RngStream& rng, int ell, const Eigen::MatrixXd& u, double phi, double mu,
                     const PriorHyperparams& prior) {
  int T = static_cast<int>(u.rows()) - 1;
  int j = ell - 1;
  double rss = 0.0;
  for (int t = 1; t <= T; ++t) {
    double e = (u(t, j) - mu) - phi * (u(t - 1, j) - mu);
    rss += e * e;
  }
  double u0c = u(0, j) - mu;
  double n1 = T + prior.sigma2_n0[j] + 1.0;
  double d1 = rss + prior.sigma2_d0[j] + (1.0 - phi * phi) * u0c * u0c;
  return draw_inverse_gamma(rng, 0.5 * n1, 0.5 * d1);
}

double update_mu(RngStream& rng, int ell, const Eigen::MatrixXd& u, double phi, double sigma2,
                 const PriorHyperparams& prior) {
  int T = static_cast<int>(u.rows()) - 1;
  int j = ell - 1;
  double one_minus = 1.0 - phi;
  double s_innov = 0.0;  // sum_{t=1}^T (u_t - phi u_{t-1})
  for (int t = 1; t <= T; ++t) s_innov += u(t, j) - phi * u(t - 1, j);
  double one_minus_sq = 1.0 - phi * phi;
  double prec = (one_minus_sq + T * one_minus * one_minus) / sigma2 + 1.0 / prior.mu_var[j];
  double v1 = 1.0 / prec;
  double m1 = v1 * (one_minus * s_innov / sigma2 + one_minus_sq * u(0, j) / sigma2 +
                    prior.mu_mean[j] / prior.mu_var[j]);
  return draw_normal(rng, m1, std::sqrt(v1));
}

double update_nu2(RngStream& rng, const FunctionalPanel& panel, const Eigen::MatrixXd& H,
                  const Eigen::MatrixXd& pi_all, const PriorHyperparams& prior) {
  int T = panel.T();
  int K = panel.K();
  double rss = 0.0;
  for (int t = 1; t <= T; ++t) {
    Eigen::VectorXd mean = H * pi_all.row(t - 1).transpose();
    for (int k = 0; k < K; ++k) {
      double r = panel.y(t - 1, k) - mean[k];
      rss += r * r;
    }
  }
  double n1 = static_cast<double>(T) * K + prior.nu2_n0;
  double d1 = rss + prior.nu2_d0;
  return draw_inverse_gamma(rng, 0.5 * n1, 0.5 * d1);
}

void update_states(RngStream& rng, const FunctionalPanel& panel, const BasisSet& basis,
                   const ModelParams& params, LatentState& latent, AugmentationVars& aug) {
  int T = panel.T();
  int L = basis.L();
  // A_t depends only on (y_t, H, nu2), so one computation serves every ell.
  std::vector<Eigen::MatrixXd> A(T);
  Eigen::VectorXd nu2_row = Eigen::VectorXd::Constant(panel.K(), params.nu2);
  for (int t = 1; t <= T; ++t) {
    A[t - 1] = panel.K() > 0 ? compute_A(panel.y.row(t - 1).transpose(), basis.H, nu2_row)
                             : Eigen::MatrixXd::Zero(L, L);
  }
  std::vector<PseudoObservation> pseudo(T);
  for (int ell = 1; ell <= L - 1; ++ell) {
    int j = ell - 1;
    for (int t = 1; t <= T; ++t) {
      try {
        BQuad q = compute_B_and_s_log(A[t - 1], latent.u.row(t).transpose(), ell);
        double u_ell = latent.u(t, j);
        ZDraw z = sample_z(rng, q.b, q.c, q.d, u_ell, q.log_s);
        double omega = sample_omega(rng, z.z1, z.z2, u_ell, q.log_s);
        pseudo[t - 1] = make_pseudo_obs(z.z1, omega, q.log_s, q.b < q.d);
        aug.z1(t - 1, j) = z.z1;
        aug.z2(t - 1, j) = z.z2;
        aug.omega(t - 1, j) = omega;
      } catch (const NumericalError& e) {
        throw NumericalError("state update failed at t=" + std::to_string(t) +
                             ", ell=" + std::to_string(ell) + ": " + e.what());
      }
    }
    Ar1Spec spec{params.phi[j], params.mu[j], params.sigma2[j]};
    latent.u.col(j) = ffbs_draw(rng, spec, pseudo);
    // The next component's s depends on this column, so weights refresh now.
    latent.refresh_pi();
  }
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  int n = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  double tol = 1e-12 * A.cwiseAbs().maxCoeff() * std::max(1.0, b.cwiseAbs().maxCoeff());
  for (int outer = 0; outer < 6 * n + 10; ++outer) {
    Eigen::VectorXd w = A.transpose() * (b - A * x);
    int best = -1;
    double best_w = tol;
    for (int jj = 0; jj < n; ++jj) {
      if (!passive[jj] && w[jj] > best_w) {
        best_w = w[jj];
        best = jj;
      }
    }
    if (best < 0) break;
    passive[best] = true;
    for (int inner = 0; inner < 6 * n + 10; ++inner) {
      std::vector<int> idx;
      for (int jj = 0; jj < n; ++jj)
        if (passive[jj]) idx.push_back(jj);
      Eigen::MatrixXd Ap(A.rows(), idx.size());
      for (std::size_t q = 0; q < idx.size(); ++q) Ap.col(q) = A.col(idx[q]);
      Eigen::VectorXd z = Ap.colPivHouseholderQr().solve(b);
      bool all_pos = true;
      for (Eigen::Index q = 0; q < z.size(); ++q)
        if (z[q] <= 0.0) all_pos = false;
      if (all_pos) {
        x.setZero();
        for (std::size_t q = 0; q < idx.size(); ++q) x[idx[q]] = z[q];
        break;
      }
      double alpha = 1.0;
      for (std::size_t q = 0; q < idx.size(); ++q) {
        if (z[q] <= 0.0) {
          double xq = x[idx[q]];
          if (xq - z[q] > 0.0) alpha = std::min(alpha, xq / (xq - z[q]));
        }
      }
      for (std::size_t q = 0; q < idx.size(); ++q) {
        x[idx[q]] += alpha * (z[q] - x[idx[q]]);
        if (x[idx[q]] <= 1e-14) {
          x[idx[q]] = 0.0;
          passive[idx[q]] = false;
        }
      }
    }
  }
  return x;
}

namespace {

double ig_mean_or(double n0, double d0, double fallback) {
  // IG(n0/2, d0/2) has mean d0/(n0 - 2) only when n0 > 2.
  if (n0 > 2.0) return d0 / (n0 - 2.0);
  return fallback;
}

}  // namespace

LatentState initial_latent(const FunctionalPanel& panel, const BasisSet& basis) {
  int T = panel.T();
  int L = basis.L();
  Eigen::VectorXd pi0;
  if (panel.K() > 0) {
    Eigen::VectorXd ybar = panel.y.colwise().mean().transpose();
    Eigen::VectorXd w = nnls(basis.H, ybar);
    w = w.cwiseMax(1e-6);
    pi0 = w / w.sum();
  } else {
    pi0 = Eigen::VectorXd::Constant(L, 1.0 / L);
  }
  Eigen::VectorXd u_row(L - 1);
  for (int l = 1; l < L; ++l) u_row[l - 1] = std::log(pi0[l]) - std::log(pi0[0]);
  LatentState latent;
  latent.u = u_row.transpose().replicate(T + 1, 1);
  latent.pi.resize(T, L);
  latent.refresh_pi();
  return latent;
}

ModelParams initial_params(const FunctionalPanel& panel, const BasisSet& basis,
                           const PriorHyperparams& prior) {
  int Lm1 = basis.L() - 1;
  prior.validate(Lm1);
  ModelParams p;
  p.mu = prior.mu_mean;
  p.phi.resize(Lm1);
  for (int j = 0; j < Lm1; ++j)
    p.phi[j] = std::min(0.999, std::max(-0.999, prior.phi_mean[j]));
  p.sigma2.resize(Lm1);
  for (int j = 0; j < Lm1; ++j)
    p.sigma2[j] = ig_mean_or(prior.sigma2_n0[j], prior.sigma2_d0[j], 0.01);
  double resid_var = 0.01;
  if (panel.K() > 0) {
    LatentState l0 = initial_latent(panel, basis);
    Eigen::VectorXd mean = basis.H * l0.pi.row(0).transpose();
    double rss = 0.0;
    for (int t = 0; t < panel.T(); ++t)
      for (int k = 0; k < panel.K(); ++k) {
        double r = panel.y(t, k) - mean[k];
        rss += r * r;
      }
    resid_var = std::max(rss / std::max(1, panel.T() * panel.K()), 1e-8);
  }
  p.nu2 = ig_mean_or(prior.nu2_n0, prior.nu2_d0, resid_var);
  return p;
}

DrawStore run_chain(const McmcConfig& config, const FunctionalPanel& panel,
                    const BasisSet& basis, const PriorHyperparams& priors, int chain_index) {
  config.validate();
  panel.validate();
  int T = panel.T();
  int L = basis.L();
  int Lm1 = L - 1;
  priors.validate(Lm1);
  if (panel.K() != basis.K() && panel.K() > 0)
    throw ShapeError("run_chain: panel and basis argument grids differ in length");

  auto t_start = std::chrono::steady_clock::now();
  RngStream rng(config.seed, static_cast<std::uint64_t>(chain_index));
  ModelParams params = initial_params(panel, basis, priors);
  LatentState latent = initial_latent(panel, basis);
  AugmentationVars aug;
  aug.resize(T, Lm1);

  Eigen::VectorXd basis_gini_vec =
      Eigen::Map<const Eigen::VectorXd>(basis.ginis.data(), L);

  DrawStore store;
  store.model = "fssm";
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
      params.nu2 = update_nu2(rng, panel, basis.H, latent.pi, priors);
      update_states(rng, panel, basis, params, latent, aug);
    } catch (const NumericalError& e) {
      throw NumericalError("chain " + std::to_string(chain_index) + " aborted at sweep " +
                           std::to_string(it) + ": " + e.what());
    }
    if (it >= config.n_burnin && (it - config.n_burnin) % config.thin == 0) {
      store.chain.push_back(chain_index);
      store.iter.push_back(it - config.n_burnin);
      store.params.push_back(params);
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

DrawStore run_chains(const McmcConfig& config, const FunctionalPanel& panel,
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
          results[c] = run_chain(config, panel, basis, priors, c);
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
  merged.model = "fssm";
  merged.T = panel.T();
  merged.L = basis.L();
  for (const auto& r : results) merged.append(r);
  return merged;
}

}  // namespace fssm

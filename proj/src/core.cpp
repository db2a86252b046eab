#include "fssm/core.hpp"

#include <cmath>

#include "fssm/errors.hpp"
#include "fssm/specials.hpp"

namespace fssm {

void FunctionalPanel::validate() const {
  if (y.cols() != static_cast<Eigen::Index>(arguments.size()))
    throw ShapeError("panel: argument grid length does not match column count");
  if (y.rows() < 1) throw ShapeError("panel: at least one time point required");
  if (!y.allFinite()) throw DomainError("panel: observations must be finite");
  for (std::size_t k = 0; k < arguments.size(); ++k) {
    if (!(arguments[k] > 0.0 && arguments[k] < 1.0))
      throw DomainError("panel: arguments must lie strictly inside (0, 1)");
    if (k > 0 && !(arguments[k] > arguments[k - 1]))
      throw DomainError("panel: arguments must be strictly increasing");
  }
}

void ModelParams::validate() const {
  auto n = mu.size();
  if (phi.size() != n || sigma2.size() != n)
    throw ShapeError("params: mu, phi, sigma2 must share length L-1");
  for (Eigen::Index l = 0; l < n; ++l) {
    if (!(std::fabs(phi[l]) < 1.0)) throw DomainError("params: phi must lie in (-1, 1)");
    if (!(sigma2[l] > 0.0)) throw DomainError("params: sigma2 must be positive");
    if (!std::isfinite(mu[l])) throw DomainError("params: mu must be finite");
  }
  if (!(nu2 > 0.0)) throw DomainError("params: nu2 must be positive");
}

void PriorHyperparams::validate(int Lm1) const {
  auto check_len = [Lm1](const Eigen::VectorXd& v, const char* name) {
    if (v.size() != Lm1) throw ShapeError(std::string("prior: wrong length for ") + name);
  };
  check_len(mu_mean, "mu_mean");
  check_len(mu_var, "mu_var");
  check_len(phi_mean, "phi_mean");
  check_len(phi_var, "phi_var");
  check_len(sigma2_n0, "sigma2_n0");
  check_len(sigma2_d0, "sigma2_d0");
  for (int l = 0; l < Lm1; ++l) {
    if (!(mu_var[l] > 0.0) || !(phi_var[l] > 0.0) || !(sigma2_n0[l] > 0.0) ||
        !(sigma2_d0[l] > 0.0))
      throw DomainError("prior: variances and inverse-gamma hyperparameters must be positive");
  }
  if (!(nu2_n0 > 0.0) || !(nu2_d0 > 0.0))
    throw DomainError("prior: nu2 hyperparameters must be positive");
}

PriorHyperparams PriorHyperparams::defaults(int Lm1, bool mixture) {
  PriorHyperparams p;
  p.mu_mean = Eigen::VectorXd::Zero(Lm1);
  p.mu_var = Eigen::VectorXd::Constant(Lm1, 25.0);
  p.phi_mean = Eigen::VectorXd::Constant(Lm1, 0.8);
  p.phi_var = Eigen::VectorXd::Constant(Lm1, 0.04);
  p.sigma2_n0 = Eigen::VectorXd::Constant(Lm1, 1e-3);
  p.sigma2_d0 = Eigen::VectorXd::Constant(Lm1, 1e-3);
  p.nu2_n0 = mixture ? 0.01 : 1e-3;
  p.nu2_d0 = mixture ? 0.01 : 1e-3;
  return p;
}

void LatentState::refresh_pi_row(int t) {
  pi.row(t - 1) = softmax_weights(u.row(t)).transpose();
}

void LatentState::refresh_pi() {
  for (int t = 1; t <= static_cast<int>(pi.rows()); ++t) refresh_pi_row(t);
}

void AugmentationVars::resize(int T, int Lm1) {
  z1.setZero(T, Lm1);
  z2.setZero(T, Lm1);
  omega.setZero(T, Lm1);
}

Eigen::VectorXd softmax_weights(const Eigen::VectorXd& u_row) {
  if (!u_row.allFinite()) throw DomainError("softmax_weights: non-finite input");
  int L = static_cast<int>(u_row.size()) + 1;
  Eigen::VectorXd logv(L);
  logv[0] = 0.0;
  logv.tail(L - 1) = u_row;
  double m = logv.maxCoeff();
  Eigen::VectorXd w = (logv.array() - m).exp();
  w /= w.sum();
  // Renormalize once more to absorb accumulation error in long chains.
  w /= w.sum();
  return w;
}

Eigen::VectorXd mean_curve(const Eigen::VectorXd& pi, const Eigen::MatrixXd& H) {
  if (pi.size() != H.cols()) throw ShapeError("mean_curve: weight length must equal basis count");
  return H * pi;
}

Eigen::MatrixXd compute_A(const Eigen::VectorXd& y_row, const Eigen::MatrixXd& H,
                          const Eigen::VectorXd& nu2_row) {
  int K = static_cast<int>(H.rows());
  int L = static_cast<int>(H.cols());
  if (y_row.size() != K || nu2_row.size() != K)
    throw ShapeError("compute_A: y and nu2 must have K entries");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(L, L);
  for (int k = 0; k < K; ++k) {
    if (!(nu2_row[k] > 0.0)) throw DomainError("compute_A: nu2 must be positive");
    Eigen::VectorXd r = Eigen::VectorXd::Constant(L, y_row[k]) - H.row(k).transpose();
    A.noalias() += r * r.transpose() / (2.0 * nu2_row[k]);
  }
  return A;
}

namespace {

BQuad collapse(const Eigen::MatrixXd& A, const Eigen::VectorXd& logv, int ell) {
  int L = static_cast<int>(A.rows());
  if (ell < 1 || ell >= L) throw DomainError("compute_B_and_s: ell must lie in 1..L-1");
  // Weights over the retained components, overflow-safe via max subtraction.
  double m = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < L; ++j)
    if (j != ell && logv[j] > m) m = logv[j];
  double denom = 0.0;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(L);
  for (int j = 0; j < L; ++j) {
    if (j == ell) continue;
    w[j] = std::exp(logv[j] - m);
    denom += w[j];
  }
  w /= denom;
  BQuad out;
  out.log_s = m + std::log(denom);
  out.s = std::exp(out.log_s);
  out.b = A(ell, ell);
  out.c = 0.0;
  out.d = 0.0;
  for (int j = 0; j < L; ++j) {
    if (j == ell) continue;
    out.c += A(ell, j) * w[j];
    for (int j2 = 0; j2 < L; ++j2) {
      if (j2 == ell) continue;
      out.d += w[j] * A(j, j2) * w[j2];
    }
  }
  return out;
}

}  // namespace

BQuad compute_B_and_s(const Eigen::MatrixXd& A, const Eigen::VectorXd& v_row, int ell) {
  int L = static_cast<int>(A.rows());
  if (v_row.size() != L) throw ShapeError("compute_B_and_s: v must have L entries");
  if (v_row[0] != 1.0) throw DomainError("compute_B_and_s: v[0] must equal 1");
  Eigen::VectorXd logv(L);
  for (int j = 0; j < L; ++j) {
    if (!(v_row[j] > 0.0)) throw DomainError("compute_B_and_s: v entries must be positive");
    logv[j] = std::log(v_row[j]);
  }
  return collapse(A, logv, ell);
}

BQuad compute_B_and_s_log(const Eigen::MatrixXd& A, const Eigen::VectorXd& u_row, int ell) {
  int L = static_cast<int>(A.rows());
  if (u_row.size() != L - 1) throw ShapeError("compute_B_and_s_log: u must have L-1 entries");
  Eigen::VectorXd logv(L);
  logv[0] = 0.0;
  logv.tail(L - 1) = u_row;
  return collapse(A, logv, ell);
}

double log_observation_density(const Eigen::VectorXd& y_row, const Eigen::VectorXd& pi,
                               const Eigen::MatrixXd& H, const Eigen::VectorXd& nu2_row) {
  constexpr double kLog2Pi = 1.83787706640934548356;
  Eigen::VectorXd mean = mean_curve(pi, H);
  if (y_row.size() != mean.size() || nu2_row.size() != mean.size())
    throw ShapeError("log_observation_density: dimension mismatch");
  double out = 0.0;
  for (Eigen::Index k = 0; k < y_row.size(); ++k) {
    double r = y_row[k] - mean[k];
    out += -0.5 * (kLog2Pi + std::log(nu2_row[k]) + r * r / nu2_row[k]);
  }
  return out;
}

}  // namespace fssm

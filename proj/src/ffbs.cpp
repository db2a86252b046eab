#include "fssm/ffbs.hpp"

#include <cmath>

#include "fssm/errors.hpp"
#include "fssm/samplers.hpp"

namespace fssm {

void Ar1Spec::validate() const {
  if (!(std::fabs(phi) < 1.0)) throw DomainError("ar1: |phi| must be below 1");
  if (!(sigma2 > 0.0)) throw DomainError("ar1: sigma2 must be positive");
  if (!std::isfinite(mu)) throw DomainError("ar1: mu must be finite");
}

Eigen::VectorXd ffbs_draw(RngStream& rng, const Ar1Spec& spec,
                          const std::vector<PseudoObservation>& pseudo) {
  spec.validate();
  int T = static_cast<int>(pseudo.size());
  Eigen::VectorXd m(T + 1), P(T + 1);
  m[0] = spec.mu;
  P[0] = spec.sigma2 / (1.0 - spec.phi * spec.phi);
  double drift = (1.0 - spec.phi) * spec.mu;
  // Forward filter; the observation update uses the precision omega so a
  // missing point (omega = 0) is exactly a no-op.
  for (int t = 1; t <= T; ++t) {
    double m_pred = drift + spec.phi * m[t - 1];
    double p_pred = spec.phi * spec.phi * P[t - 1] + spec.sigma2;
    const PseudoObservation& obs = pseudo[t - 1];
    if (obs.missing || obs.precision == 0.0) {
      m[t] = m_pred;
      P[t] = p_pred;
    } else {
      double denom = 1.0 + obs.precision * p_pred;
      P[t] = p_pred / denom;
      m[t] = m_pred + (p_pred * obs.precision / denom) * (obs.value - m_pred);
    }
    if (P[t] < -1e-10) throw NumericalError("ffbs: negative filtered variance");
    if (P[t] < 0.0) P[t] = 0.0;
    if (!std::isfinite(m[t]) || !std::isfinite(P[t]))
      throw NumericalError("ffbs: non-finite filter state");
  }
  // Backward sample: u_T from the filtered law, then the AR(1) bridge.
  Eigen::VectorXd u(T + 1);
  u[T] = draw_normal(rng, m[T], std::sqrt(P[T]));
  for (int t = T - 1; t >= 0; --t) {
    double denom = spec.phi * spec.phi * P[t] + spec.sigma2;
    double gain = spec.phi * P[t] / denom;
    double mean = m[t] + gain * (u[t + 1] - (drift + spec.phi * m[t]));
    double var = P[t] * (1.0 - gain * spec.phi);
    if (var < 0.0) {
      if (var < -1e-10) throw NumericalError("ffbs: negative smoothing variance");
      var = 0.0;
    }
    u[t] = draw_normal(rng, mean, std::sqrt(var));
  }
  return u;
}

}  // namespace fssm

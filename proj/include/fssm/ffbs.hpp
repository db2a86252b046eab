#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fssm/augment.hpp"
#include "fssm/rng.hpp"

namespace fssm {

// Univariate stationary AR(1): u_t | u_{t-1} ~ N((1-phi) mu + phi u_{t-1}, sigma2),
// u_0 ~ N(mu, sigma2 / (1 - phi^2)).
struct Ar1Spec {
  double phi;
  double mu;
  double sigma2;

  void validate() const;
};

// Exact joint draw of u_0..u_T given pseudo observations y~_t ~ N(u_t, 1/omega_t)
// for t = 1..T; missing entries (omega = 0) contribute nothing. Forward
// Kalman filter in information form, then backward sampling.
Eigen::VectorXd ffbs_draw(RngStream& rng, const Ar1Spec& spec,
                          const std::vector<PseudoObservation>& pseudo);

}  // namespace fssm

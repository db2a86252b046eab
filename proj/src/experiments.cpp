#include "fssm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fssm/errors.hpp"
#include "fssm/samplers.hpp"

namespace fssm {

SyntheticTruth generate_synthetic(RngStream& rng, int K, double phi) {
  if (K < 1) throw DomainError("generate_synthetic: K must be positive");
  if (!(std::fabs(phi) < 1.0)) throw DomainError("generate_synthetic: |phi| must be below 1");
  const int T = 200;
  std::vector<BasisFunction> bases = {{BasisFamily::Beta, 1.0, 1.0},
                                      {BasisFamily::Beta, 3.0, 1.0},
                                      {BasisFamily::Beta, 1.0, 0.3}};
  std::vector<double> args(K);
  for (int k = 1; k <= K; ++k) args[k - 1] = static_cast<double>(k) / (K + 1);
  SyntheticTruth truth;
  truth.basis = build_basis_set(bases, args);
  int L = truth.basis.L();
  int Lm1 = L - 1;
  truth.params.mu = Eigen::VectorXd(Lm1);
  truth.params.mu << 0.1, -0.3;
  truth.params.phi = Eigen::VectorXd::Constant(Lm1, phi);
  truth.params.sigma2 = Eigen::VectorXd::Constant(Lm1, 0.005);
  truth.params.nu2 = 1e-4;

  truth.u.resize(T + 1, Lm1);
  for (int j = 0; j < Lm1; ++j) {
    double sd0 = std::sqrt(truth.params.sigma2[j] / (1.0 - phi * phi));
    truth.u(0, j) = draw_normal(rng, truth.params.mu[j], sd0);
    double sd = std::sqrt(truth.params.sigma2[j]);
    for (int t = 1; t <= T; ++t) {
      double mean = (1.0 - phi) * truth.params.mu[j] + phi * truth.u(t - 1, j);
      truth.u(t, j) = draw_normal(rng, mean, sd);
    }
  }
  truth.pi.resize(T, L);
  truth.gini.resize(T);
  truth.panel.y.resize(T, K);
  truth.panel.arguments = args;
  double nu = std::sqrt(truth.params.nu2);
  Eigen::VectorXd gini_vec = Eigen::Map<const Eigen::VectorXd>(truth.basis.ginis.data(), L);
  for (int t = 1; t <= T; ++t) {
    Eigen::VectorXd pi = softmax_weights(truth.u.row(t).transpose());
    truth.pi.row(t - 1) = pi.transpose();
    truth.gini[t - 1] = pi.dot(gini_vec);
    Eigen::VectorXd mean = truth.basis.H * pi;
    for (int k = 0; k < K; ++k) truth.panel.y(t - 1, k) = mean[k] + draw_normal(rng, 0.0, nu);
  }
  return truth;
}

std::vector<Eigen::VectorXd> gini_series(const std::vector<Eigen::MatrixXd>& weights_draws,
                                         const std::vector<double>& basis_ginis) {
  Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(basis_ginis.data(), basis_ginis.size());
  std::vector<Eigen::VectorXd> out;
  out.reserve(weights_draws.size());
  for (const auto& w : weights_draws) {
    if (w.cols() != g.size()) throw ShapeError("gini_series: weight/gini length mismatch");
    out.push_back(w * g);
  }
  return out;
}

namespace {

struct Line {
  double intercept, slope;
  double at(double x) const { return intercept + slope * x; }
};

Line through(double x0, double y0, double x1, double y1) {
  double slope = (y1 - y0) / (x1 - x0);
  return {y0 - slope * x0, slope};
}

// Integral over [lo, hi] of max(A(x), B(x)).
double integrate_max(const Line& A, const Line& B, double lo, double hi) {
  std::vector<double> breaks = {lo, hi};
  if (A.slope != B.slope) {
    double xs = (B.intercept - A.intercept) / (A.slope - B.slope);
    if (xs > lo && xs < hi) breaks.insert(breaks.begin() + 1, xs);
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = breaks[i], b = breaks[i + 1];
    double mid = 0.5 * (a + b);
    const Line& top = A.at(mid) >= B.at(mid) ? A : B;
    total += 0.5 * (top.at(a) + top.at(b)) * (b - a);
  }
  return total;
}

}  // namespace

std::pair<double, double> polygon_gini_bounds(const std::vector<double>& x,
                                              const std::vector<double>& f) {
  int K = static_cast<int>(x.size());
  if (K < 1 || f.size() != x.size())
    throw DomainError("polygon_gini_bounds: need at least one (x, f) point");
  for (int k = 0; k < K; ++k) {
    if (!(x[k] > 0.0 && x[k] < 1.0))
      throw DomainError("polygon_gini_bounds: x must lie strictly inside (0, 1)");
    if (k > 0 && !(x[k] > x[k - 1]))
      throw DomainError("polygon_gini_bounds: x must be strictly increasing");
    if (!(f[k] >= 0.0 && f[k] <= 1.0))
      throw DomainError("polygon_gini_bounds: f must lie in [0, 1]");
    if (k > 0 && f[k] < f[k - 1])
      throw DomainError("polygon_gini_bounds: f must be nondecreasing");
  }
  // Augmented nodes with the implicit corners.
  std::vector<double> xs(K + 2), fs(K + 2);
  xs[0] = 0.0;
  fs[0] = 0.0;
  for (int k = 0; k < K; ++k) {
    xs[k + 1] = x[k];
    fs[k + 1] = f[k];
  }
  xs[K + 1] = 1.0;
  fs[K + 1] = 1.0;

  // Lower bound: the chord polygon lies above any convex curve through the
  // points, so its Gini bounds from below.
  double lower = 1.0;
  for (int k = 1; k <= K + 1; ++k) lower -= (fs[k - 1] + fs[k]) * (xs[k] - xs[k - 1]);

  // Upper bound: minimal convex curve; on each segment the envelope is the
  // larger of the previous chord extended forward and the next chord
  // extended backward. Virtual boundary chords: horizontal through (0,0),
  // vertical at x = 1 (the final rise carries no area).
  double area = 0.0;
  for (int seg = 1; seg <= K + 1; ++seg) {
    Line prev = (seg == 1) ? Line{0.0, 0.0}
                           : through(xs[seg - 2], fs[seg - 2], xs[seg - 1], fs[seg - 1]);
    if (seg == K + 1) {
      area += 0.5 * (prev.at(xs[seg - 1]) + prev.at(xs[seg])) * (xs[seg] - xs[seg - 1]);
    } else {
      Line next = through(xs[seg], fs[seg], xs[seg + 1], fs[seg + 1]);
      area += integrate_max(prev, next, xs[seg - 1], xs[seg]);
    }
  }
  double upper = 1.0 - 2.0 * area;
  return {lower, upper};
}

PredictiveLoss posterior_predictive_loss(const Eigen::MatrixXd& y,
                                         const std::vector<Eigen::MatrixXd>& predictive_draws)
{
  if (predictive_draws.empty())
    throw DomainError("posterior_predictive_loss: no predictive draws");
  std::size_t n = predictive_draws.size();
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(y.rows(), y.cols());
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(y.rows(), y.cols());
  for (const auto& d : predictive_draws) {
    if (d.rows() != y.rows() || d.cols() != y.cols())
      throw ShapeError("posterior_predictive_loss: draw shape mismatch");
    mean += d;
    sq += d.cwiseProduct(d);
  }
  mean /= static_cast<double>(n);
  sq /= static_cast<double>(n);
  PredictiveLoss out;
  out.ppv = (sq - mean.cwiseProduct(mean)).cwiseMax(0.0).sum();
  out.ppse = out.ppv + (mean - y).squaredNorm();
  out.log_ppv = out.ppv > 0.0 ? std::log(out.ppv) : -std::numeric_limits<double>::infinity();
  out.log_ppse = out.ppse > 0.0 ? std::log(out.ppse) : -std::numeric_limits<double>::infinity();
  return out;
}

double ess(const std::vector<double>& draws) {
  int n = static_cast<int>(draws.size());
  if (n < 100) throw DomainError("ess: at least 100 draws required");
  auto [mn, mx] = std::minmax_element(draws.begin(), draws.end());
  // Exact constancy, not c0 == 0: the mean of a constant need not be
  // representable, leaving c0 a positive roundoff residue.
  if (*mn == *mx) return static_cast<double>(n);
  double mean = 0.0;
  for (double d : draws) mean += d;
  mean /= n;
  double c0 = 0.0;
  for (double d : draws) c0 += (d - mean) * (d - mean);
  c0 /= n;
  if (!(c0 > 0.0)) return static_cast<double>(n);  // constant series convention
  auto rho = [&](int lag) {
    double c = 0.0;
    for (int i = 0; i + lag < n; ++i) c += (draws[i] - mean) * (draws[i + lag] - mean);
    return c / n / c0;
  };
  // Initial monotone positive sequence over paired autocorrelations.
  double tau = 0.0;
  double prev_gamma = std::numeric_limits<double>::infinity();
  for (int m = 0; 2 * m + 1 < n; ++m) {
    double gamma = rho(2 * m) + rho(2 * m + 1);
    if (gamma <= 0.0) break;
    gamma = std::min(gamma, prev_gamma);
    prev_gamma = gamma;
    tau += 2.0 * gamma;
  }
  tau -= 1.0;
  if (tau < 1e-12) tau = 1e-12;
  double out = n / tau;
  return std::min(out, static_cast<double>(n));
}

double sample_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("sample_quantile: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sample_quantile: p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  double h = (values.size() - 1) * p;
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = h - lo;
  return values[lo] + frac * (values[hi] - values[lo]);
}

IntervalMetrics interval_metrics(const Eigen::VectorXd& truth, const Eigen::MatrixXd& draws,
                                 double level) {
  if (draws.cols() != truth.size())
    throw ShapeError("interval_metrics: truth length must match draw columns");
  if (draws.rows() < 1) throw DomainError("interval_metrics: no draws");
  double tail = 0.5 * (1.0 - level);
  int n_elem = static_cast<int>(truth.size());
  double sqerr = 0.0, covered = 0.0, length = 0.0;
  std::vector<double> col(draws.rows());
  for (int e = 0; e < n_elem; ++e) {
    for (Eigen::Index i = 0; i < draws.rows(); ++i) col[i] = draws(i, e);
    double mean = draws.col(e).mean();
    double lo = sample_quantile(col, tail);
    double hi = sample_quantile(col, 1.0 - tail);
    sqerr += (mean - truth[e]) * (mean - truth[e]);
    if (truth[e] >= lo && truth[e] <= hi) covered += 1.0;
    length += hi - lo;
  }
  IntervalMetrics m;
  m.rmse_x100 = 100.0 * std::sqrt(sqerr / n_elem);
  m.cp = covered / n_elem;
  m.al = length / n_elem;
  return m;
}

}  // namespace fssm

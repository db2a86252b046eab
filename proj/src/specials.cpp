#include "fssm/specials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "fssm/errors.hpp"

namespace fssm {

namespace {

// Lanczos g=7, n=9.
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double log_gamma_lanczos(double x) {
  // Valid for x >= 0.5.
  double z = x - 1.0;
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + i);
  double t = z + 7.5;
  return kLogSqrt2Pi + (z + 0.5) * std::log(t) - t + std::log(a);
}

// Lentz continued fraction for the incomplete beta.
double betacf(double x, double a, double b) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kFpMin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("regularized_incomplete_beta: continued fraction did not converge");
}

// QUADPACK dqk15 abscissae and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b, estimate, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gk15_interval(const std::function<double(double)>& f, double a, double b) {
  double center = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  double fc = f(center);
  double result_g = fc * kWg[3];
  double result_k = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    double x = half * kXgk[j];
    double fsum = f(center - x) + f(center + x);
    result_k += kWgk[j] * fsum;
    if (j % 2 == 1) result_g += kWg[j / 2] * fsum;
  }
  Interval out;
  out.a = a;
  out.b = b;
  out.estimate = result_k * half;
  out.error = std::fabs((result_k - result_g) * half);
  return out;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  if (x < 0.5) {
    // Reflection keeps the Lanczos argument away from the pole.
    return std::log(M_PI / std::sin(M_PI * x)) - log_gamma_lanczos(1.0 - x);
  }
  return log_gamma_lanczos(x);
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw DomainError("regularized_incomplete_beta: shapes must be positive");
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError("regularized_incomplete_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double log_bt = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                  b * std::log1p(-x);
  double bt = std::exp(log_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(x, a, b) / a;
  return 1.0 - bt * betacf(1.0 - x, b, a) / b;
}

double gauss_kronrod_15(const std::function<double(double)>& f, double a, double b,
                        double* err_estimate) {
  Interval iv = gk15_interval(f, a, b);
  if (err_estimate) *err_estimate = iv.error;
  return iv.estimate;
}

double quadrature(const std::function<double(double)>& f, double a, double b,
                  double abs_tol, std::size_t max_evals) {
  if (!(abs_tol > 0.0)) throw DomainError("quadrature: abs_tol must be positive");
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  auto ensure_finite = [&](const Interval& iv, double best, double err) {
    if (!(std::isfinite(iv.estimate) && std::isfinite(iv.error)))
      throw AccuracyError("quadrature: integrand produced a non-finite value", best, err);
  };
  std::priority_queue<Interval> queue;
  queue.push(gk15_interval(f, a, b));
  ensure_finite(queue.top(), 0.0, std::numeric_limits<double>::infinity());
  std::size_t evals = 15;
  double total_estimate = queue.top().estimate;
  double total_error = queue.top().error;
  while (total_error > abs_tol) {
    if (evals + 30 > max_evals) {
      throw AccuracyError("quadrature: evaluation budget exhausted", sign * total_estimate,
                          total_error);
    }
    Interval worst = queue.top();
    queue.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval at floating-point resolution; its error can shrink no further.
      throw AccuracyError("quadrature: interval underflow before tolerance met",
                          sign * total_estimate, total_error);
    }
    Interval left = gk15_interval(f, worst.a, mid);
    Interval right = gk15_interval(f, mid, worst.b);
    evals += 30;
    ensure_finite(left, sign * total_estimate, total_error);
    ensure_finite(right, sign * total_estimate, total_error);
    total_estimate += left.estimate + right.estimate - worst.estimate;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  return sign * total_estimate;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double log_normal_cdf(double x) {
  if (x > -36.0) {
    double p = normal_cdf(x);
    if (p > 1e-300) return std::log(p);
  }
  // Asymptotic series for the lower tail: Phi(x) ~ phi(x)/|x| (1 - 1/x^2 + 3/x^4 - 15/x^6).
  double z = -x;
  double z2 = z * z;
  double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z * z - kLogSqrt2Pi - std::log(z) + std::log(series);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  // AS241 algorithm PPND16.
  double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    double r = 0.180625 - q * q;
    double num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                       6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                     1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                   1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    double den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                       3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                     5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                   4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    double num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                       2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                     3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                   4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    double den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                       1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                     6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                   2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                       1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                     2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                   5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    double den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                       1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                     1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                   5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

double logsumexp(const std::vector<double>& v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace fssm

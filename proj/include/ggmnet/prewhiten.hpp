#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ggmnet {

/// AR(1)-GARCH(1,1) parameters:
///   r_t = c + phi * r_{t-1} + eps_t,  eps_t = sigma_t * z_t,
///   sigma_t^2 = omega + a * eps_{t-1}^2 + b * sigma_{t-1}^2.
struct ArGarchParams {
  double c = 0.0;
  double phi = 0.0;
  double omega = 1e-4;
  double a = 0.0;
  double b = 0.0;

  void validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("ArGarchParams: omega must be positive");
    if (!(a >= 0.0 && b >= 0.0)) throw std::invalid_argument("ArGarchParams: a, b must be nonnegative");
    if (!(a + b < 1.0)) throw std::invalid_argument("ArGarchParams: a + b must be below 1");
    if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("ArGarchParams: |phi| must be below 1");
  }
};

struct ArGarchFit {
  ArGarchParams params;
  double loglik = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

namespace detail {

/// Derivative-free Nelder-Mead minimizer with standard coefficients.
/// Deterministic: fixed initial simplex steps, no random restarts.
inline Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                   Eigen::VectorXd x0, double step, int max_iter, double ftol,
                                   int* iterations_out = nullptr, bool* converged_out = nullptr) {
  const int d = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> xs(d + 1, x0);
  std::vector<double> fs(d + 1);
  for (int i = 1; i <= d; ++i) xs[i][i - 1] += step;
  for (int i = 0; i <= d; ++i) fs[i] = f(xs[i]);

  auto order = [&] {
    std::vector<int> idx(d + 1);
    for (int i = 0; i <= d; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Eigen::VectorXd> xs2(d + 1);
    std::vector<double> fs2(d + 1);
    for (int i = 0; i <= d; ++i) {
      xs2[i] = xs[idx[i]];
      fs2[i] = fs[idx[i]];
    }
    xs.swap(xs2);
    fs.swap(fs2);
  };

  int iter = 0;
  bool converged = false;
  for (; iter < max_iter; ++iter) {
    order();
    if (std::abs(fs[d] - fs[0]) <= ftol * (1.0 + std::abs(fs[0]))) {
      converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) centroid += xs[i];
    centroid /= d;

    const Eigen::VectorXd reflected = centroid + (centroid - xs[d]);
    const double fr = f(reflected);
    if (fr < fs[0]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[d]);
      const double fe = f(expanded);
      if (fe < fr) {
        xs[d] = expanded;
        fs[d] = fe;
      } else {
        xs[d] = reflected;
        fs[d] = fr;
      }
    } else if (fr < fs[d - 1]) {
      xs[d] = reflected;
      fs[d] = fr;
    } else {
      const Eigen::VectorXd contracted = centroid + 0.5 * (xs[d] - centroid);
      const double fc = f(contracted);
      if (fc < fs[d]) {
        xs[d] = contracted;
        fs[d] = fc;
      } else {
        for (int i = 1; i <= d; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = f(xs[i]);
        }
      }
    }
  }
  order();
  if (iterations_out) *iterations_out = iter;
  if (converged_out) *converged_out = converged;
  return xs[0];
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Unconstrained optimizer coordinates -> constrained GARCH parameters.
/// The (a, b) pair is parametrized by total s = a + b in (0,1) and split
/// ratio, so stationarity holds by construction.
inline ArGarchParams decode_params(const Eigen::VectorXd& x) {
  ArGarchParams p;
  p.c = x[0];
  p.phi = std::tanh(x[1]);
  p.omega = std::exp(x[2]);
  const double total = sigmoid(x[3]);
  const double ratio = sigmoid(x[4]);
  p.a = total * ratio;
  p.b = total * (1.0 - ratio);
  return p;
}

inline Eigen::VectorXd encode_params(const ArGarchParams& p) {
  Eigen::VectorXd x(5);
  x[0] = p.c;
  x[1] = std::atanh(std::clamp(p.phi, -0.999, 0.999));
  x[2] = std::log(p.omega);
  const double total = std::clamp(p.a + p.b, 1e-6, 1.0 - 1e-6);
  const double ratio = std::clamp(p.a / total, 1e-6, 1.0 - 1e-6);
  x[3] = logit(total);
  x[4] = logit(ratio);
  return x;
}

/// Gaussian log-likelihood over t = 2..T. The recursion starts at
/// sigma_1^2 = Var(r), eps_1 = r_1 - mean(r).
inline double ar_garch_loglik(const std::vector<double>& r, const ArGarchParams& p) {
  const std::size_t T = r.size();
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(T);
  double var = 0.0;
  for (double v : r) var += (v - mean) * (v - mean);
  var /= static_cast<double>(T);

  double eps_prev = r[0] - mean;
  double sig2_prev = var;
  double ll = 0.0;
  constexpr double log2pi = 1.8378770664093454836;
  for (std::size_t t = 1; t < T; ++t) {
    const double sig2 = p.omega + p.a * eps_prev * eps_prev + p.b * sig2_prev;
    const double eps = r[t] - p.c - p.phi * r[t - 1];
    ll += -0.5 * (log2pi + std::log(sig2) + eps * eps / sig2);
    eps_prev = eps;
    sig2_prev = sig2;
  }
  return ll;
}

}  // namespace detail

/// Gaussian quasi-maximum-likelihood fit via Nelder-Mead on transformed
/// coordinates (constraints hold by construction). Starting point:
/// c = mean, phi = 0, omega = 0.1*var, a = 0.05, b = 0.9. A second
/// simplex round restarts at the first optimum to escape stagnation.
inline ArGarchFit fit_ar1_garch11(const std::vector<double>& r, int max_iter = 4000) {
  if (r.size() < 50) throw std::invalid_argument("fit_ar1_garch11: need at least 50 observations");
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(r.size());
  double var = 0.0;
  for (double v : r) var += (v - mean) * (v - mean);
  var /= static_cast<double>(r.size());
  if (!(var > 0.0)) throw std::invalid_argument("fit_ar1_garch11: series has zero variance");

  const auto objective = [&](const Eigen::VectorXd& x) {
    return -detail::ar_garch_loglik(r, detail::decode_params(x));
  };

  ArGarchParams start;
  start.c = mean;
  start.phi = 0.0;
  start.omega = 0.1 * var;
  start.a = 0.05;
  start.b = 0.9;

  int it1 = 0, it2 = 0;
  bool conv1 = false, conv2 = false;
  Eigen::VectorXd x = detail::nelder_mead(objective, detail::encode_params(start), 0.25, max_iter,
                                          1e-12, &it1, &conv1);
  x = detail::nelder_mead(objective, x, 0.05, max_iter, 1e-12, &it2, &conv2);

  ArGarchFit fit;
  fit.params = detail::decode_params(x);
  fit.loglik = detail::ar_garch_loglik(r, fit.params);
  fit.iterations = it1 + it2;
  // Persistence pushed against the stationarity boundary counts as a
  // boundary solution and is flagged, not rejected.
  fit.converged = conv1 && conv2 && (fit.params.a + fit.params.b) < 0.999;
  return fit;
}

/// Residuals z_t = eps_t / sigma_t for t = 2..T (length T-1); with
/// standardize = false the raw eps_t are returned instead.
inline std::vector<double> standardized_residuals(const std::vector<double>& r,
                                                  const ArGarchParams& params,
                                                  bool standardize = true) {
  params.validate();
  if (r.size() < 2) throw std::invalid_argument("standardized_residuals: need at least 2 observations");
  const std::size_t T = r.size();
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(T);
  double var = 0.0;
  for (double v : r) var += (v - mean) * (v - mean);
  var /= static_cast<double>(T);

  std::vector<double> z;
  z.reserve(T - 1);
  double eps_prev = r[0] - mean;
  double sig2_prev = var;
  for (std::size_t t = 1; t < T; ++t) {
    const double sig2 = params.omega + params.a * eps_prev * eps_prev + params.b * sig2_prev;
    const double eps = r[t] - params.c - params.phi * r[t - 1];
    z.push_back(standardize ? eps / std::sqrt(sig2) : eps);
    eps_prev = eps;
    sig2_prev = sig2;
  }
  return z;
}

}  // namespace ggmnet

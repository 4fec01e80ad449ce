#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>

#include "ggmnet/types.hpp"

namespace ggmnet {

/// Soft-thresholding operator sign(c) * (|c| - t)_+.
inline double soft_threshold(double c, double t) {
  if (c > t) return c - t;
  if (c < -t) return c + t;
  return 0.0;
}

struct RegressionFit {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  double residual_variance = 0.0;
  int iterations = 0;
  double final_delta = 0.0;
  bool converged = false;
};

struct EnetOptions {
  int max_iter = 10000;
  double tol = 1e-7;
  std::optional<Eigen::VectorXd> warm_start;
};

namespace detail {

/// Coordinate descent on the Gram form of
///   (1/n)||y - Xb||^2 + lambda * [alpha * |b|_1 + (1-alpha) * |b|_2^2],
/// given the sample-scale moments G = X^T X / n and g = X^T y / n for
/// centered data. Each update is
///   b_j = Soft(g_j - sum_{t != j} G_jt b_t, lambda*alpha/2) / (G_jj + lambda*(1-alpha)).
/// Columns with G_jj = 0 (zero variance) keep b_j = 0.
struct EnetState {
  Eigen::VectorXd b;
  int iterations = 0;
  double final_delta = 0.0;
  bool converged = false;
};

inline EnetState enet_gram_cd(const Eigen::MatrixXd& G, const Eigen::VectorXd& g,
                              const PenaltyParams& params, int max_iter, double tol,
                              Eigen::VectorXd b0) {
  const Eigen::Index q = G.rows();
  EnetState st;
  st.b = b0.size() == q ? std::move(b0) : Eigen::VectorXd::Zero(q).eval();
  const double thresh = 0.5 * params.lambda * params.alpha;
  const double ridge = params.lambda * (1.0 - params.alpha);

  Eigen::VectorXd q_vec = G * st.b;  // q_vec_j = (G b)_j, kept in sync with b
  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < q; ++j) {
      const double gjj = G(j, j);
      const double old = st.b[j];
      double updated = 0.0;
      if (gjj > 0.0) {
        const double cj = g[j] - q_vec[j] + gjj * old;
        updated = soft_threshold(cj, thresh) / (gjj + ridge);
      }
      const double change = updated - old;
      if (change != 0.0) {
        st.b[j] = updated;
        q_vec.noalias() += G.col(j) * change;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    st.iterations = sweep;
    st.final_delta = max_change;
    if (max_change < tol) {
      st.converged = true;
      break;
    }
  }
  return st;
}

}  // namespace detail

/// Minimizes (1/n)||y - a - Xb||^2 + lambda*[alpha*|b|_1 + (1-alpha)*|b|_2^2]
/// with the intercept a unpenalized (handled by centering). The residual
/// sum of squares is normalized by n so that lambda acts on sample-scale
/// moments: this is the convention of the reference coordinate-descent
/// solvers, and it keeps one lambda grid meaningful for the likelihood
/// and regression estimators alike. Predictors are used as-is; callers
/// wanting standardization must rescale first.
inline RegressionFit fit_elastic_net(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                     const PenaltyParams& params, const EnetOptions& opts = {}) {
  const Eigen::Index n = X.rows();
  const Eigen::Index q = X.cols();
  if (n < 2) throw std::invalid_argument("fit_elastic_net: need at least 2 observations");
  if (q < 1) throw std::invalid_argument("fit_elastic_net: need at least 1 predictor");
  if (y.size() != n) throw std::invalid_argument("fit_elastic_net: y length mismatch");
  if (!y.allFinite() || !X.allFinite()) throw std::invalid_argument("fit_elastic_net: non-finite input");

  const double y_mean = y.mean();
  const Eigen::VectorXd x_means = X.colwise().mean();
  const Eigen::VectorXd yc = y.array() - y_mean;
  const Eigen::MatrixXd Xc = X.rowwise() - x_means.transpose();

  const Eigen::MatrixXd G = Xc.transpose() * Xc / static_cast<double>(n);
  const Eigen::VectorXd g = Xc.transpose() * yc / static_cast<double>(n);

  auto st = detail::enet_gram_cd(G, g, params, opts.max_iter, opts.tol,
                                 opts.warm_start.value_or(Eigen::VectorXd::Zero(q)));

  RegressionFit fit;
  fit.coefficients = std::move(st.b);
  fit.intercept = y_mean - x_means.dot(fit.coefficients);
  fit.iterations = st.iterations;
  fit.final_delta = st.final_delta;
  fit.converged = st.converged;
  const double mean_rss = yc.squaredNorm() / static_cast<double>(n) -
                          2.0 * fit.coefficients.dot(g) +
                          fit.coefficients.dot(G * fit.coefficients);
  fit.residual_variance = std::max(0.0, mean_rss);
  return fit;
}

}  // namespace ggmnet

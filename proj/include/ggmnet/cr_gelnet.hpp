#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "ggmnet/elastic_net.hpp"
#include "ggmnet/types.hpp"

namespace ggmnet {

/// Column-wise precision estimate from the p conditional regressions;
/// not symmetric in general. Diagonal entries are 1/Var(residual_i) > 0.
struct AsymEstimate {
  Eigen::MatrixXd values;

  int dim() const { return static_cast<int>(values.rows()); }
};

enum class SymmetrizeRule { L2, MinEl };

namespace detail {

struct CrRaw {
  AsymEstimate estimate;
  int max_iterations = 0;
  double max_final_delta = 0.0;
  bool all_converged = true;
};

/// Shared machinery for CR-gelnet and two-stage neighborhood selection:
/// regress each column on the rest through the n-divisor sample covariance
/// (the Gram matrix of the centered data on the 1/n scale).
/// visit(i, fit_coeffs_over_others, residual_variance) is called per column,
/// where fit_coeffs_over_others[r] maps to variable index r < i ? r : r+1.
template <typename Visit>
inline void for_each_conditional_fit(const Dataset& data, const PenaltyParams& params,
                                     const EnetOptions& opts, CrRaw* diag, Visit&& visit) {
  const int n = data.rows();
  const int p = data.cols();
  const Eigen::MatrixXd centered = data.values().rowwise() - data.values().colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);

  Eigen::MatrixXd G(p - 1, p - 1);
  Eigen::VectorXd g(p - 1);
  for (int i = 0; i < p; ++i) {
    int r = 0;
    for (int a = 0; a < p; ++a) {
      if (a == i) continue;
      g[r] = cov(a, i);
      int c = 0;
      for (int b = 0; b < p; ++b) {
        if (b == i) continue;
        G(r, c) = cov(a, b);
        ++c;
      }
      ++r;
    }
    auto st = enet_gram_cd(G, g, params, opts.max_iter, opts.tol,
                           Eigen::VectorXd::Zero(p - 1));
    const double resid_var = std::max(0.0, cov(i, i) - 2.0 * st.b.dot(g) + st.b.dot(G * st.b));
    if (diag) {
      diag->max_iterations = std::max(diag->max_iterations, st.iterations);
      diag->max_final_delta = std::max(diag->max_final_delta, st.final_delta);
      diag->all_converged = diag->all_converged && st.converged;
    }
    visit(i, st.b, resid_var);
  }
}

inline CrRaw cr_raw_impl(const Dataset& data, const PenaltyParams& params, const EnetOptions& opts) {
  const int p = data.cols();
  const Eigen::VectorXd sample_var =
      ((data.values().rowwise() - data.values().colwise().mean()).colwise().squaredNorm() /
       static_cast<double>(data.rows()))
          .transpose();
  CrRaw out;
  out.estimate.values = Eigen::MatrixXd::Identity(p, p);
  for_each_conditional_fit(
      data, params, opts, &out, [&](int i, const Eigen::VectorXd& b, double resid_var) {
        if (resid_var == 0.0 || resid_var < 1e-12 * sample_var[i]) {
          throw std::runtime_error("cr_gelnet: degenerate fit for variable " + std::to_string(i) +
                                   " (zero residual variance; perfect collinearity)");
        }
        out.estimate.values(i, i) = 1.0 / resid_var;
        int r = 0;
        for (int j = 0; j < p; ++j) {
          if (j == i) continue;
          out.estimate.values(j, i) = -b[r] / resid_var;
          ++r;
        }
      });
  return out;
}

}  // namespace detail

/// One elastic-net regression of each variable on all others, all with the
/// same (alpha, lambda); column i of the result is (1/var_i, -b_i/var_i)
/// with var_i the residual variance under the n divisor.
inline AsymEstimate cr_raw_estimate(const Dataset& data, const PenaltyParams& params,
                                    const EnetOptions& opts = {}) {
  return detail::cr_raw_impl(data, params, opts).estimate;
}

/// Replaces (i,j) and (j,i) by their average; zero stays zero only when
/// both entries vanish.
inline SymMatrix symmetrize_l2(const AsymEstimate& raw) {
  return SymMatrix(0.5 * (raw.values + raw.values.transpose().eval()));
}

/// Keeps whichever of (i,j), (j,i) is smaller in absolute value, sign
/// included; on exact magnitude ties the upper-triangle entry wins.
inline SymMatrix symmetrize_minel(const AsymEstimate& raw) {
  const int p = raw.dim();
  Eigen::MatrixXd out = raw.values;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const double upper = raw.values(i, j);
      const double lower = raw.values(j, i);
      const double kept = std::abs(lower) < std::abs(upper) ? lower : upper;
      out(i, j) = kept;
      out(j, i) = kept;
    }
  }
  return SymMatrix(std::move(out));
}

/// CR-gelnet: p conditional regressions, rescaled into a raw precision
/// estimate, then symmetrized. The output is not guaranteed positive
/// definite; theta_pd reports the Cholesky check and nothing is repaired.
inline EstimationResult cr_estimate(const Dataset& data, const PenaltyParams& params,
                                    SymmetrizeRule rule, const EnetOptions& opts = {}) {
  auto raw = detail::cr_raw_impl(data, params, opts);
  SymMatrix theta = rule == SymmetrizeRule::L2 ? symmetrize_l2(raw.estimate)
                                               : symmetrize_minel(raw.estimate);
  EstimationResult res{theta,
                       std::nullopt,
                       params,
                       raw.max_iterations,
                       raw.max_final_delta,
                       raw.all_converged,
                       is_positive_definite(theta),
                       std::nullopt};
  return res;
}

}  // namespace ggmnet

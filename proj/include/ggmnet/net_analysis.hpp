#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ggmnet/estimators.hpp"
#include "ggmnet/model_select.hpp"
#include "ggmnet/prewhiten.hpp"
#include "ggmnet/types.hpp"

namespace ggmnet {

/// Graph measures over the unweighted graph with edges |p_ij| > tol;
/// strength additionally uses the partial-correlation magnitudes as
/// weights. Distances average over connected ordered pairs only.
struct NetworkMeasures {
  double mean_degree = 0.0;
  double mean_distance = 0.0;
  double mean_eccentricity = 0.0;
  double mean_clustering = 0.0;
  double mean_strength = 0.0;
  bool connected = false;
  std::vector<double> degree;
  std::vector<double> eccentricity;
  std::vector<double> clustering;
  std::vector<double> strength;
};

inline NetworkMeasures graph_measures(const SymMatrix& p_mat, double tol = kZeroTol,
                                      bool absolute_strength = true) {
  const int p = p_mat.dim();
  for (int i = 0; i < p; ++i) {
    if (p_mat(i, i) != 0.0) {
      throw std::invalid_argument("graph_measures: diagonal must be zero (partial correlations)");
    }
  }
  std::vector<std::vector<int>> nbr(p);
  NetworkMeasures m;
  m.degree.assign(p, 0.0);
  m.strength.assign(p, 0.0);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (j == i) continue;
      if (std::abs(p_mat(i, j)) > tol) {
        nbr[i].push_back(j);
        m.degree[i] += 1.0;
        m.strength[i] += absolute_strength ? std::abs(p_mat(i, j)) : p_mat(i, j);
      }
    }
  }

  m.clustering.assign(p, 0.0);
  for (int i = 0; i < p; ++i) {
    const auto& ni = nbr[i];
    if (ni.size() < 2) continue;
    int links = 0;
    for (std::size_t a = 0; a < ni.size(); ++a) {
      for (std::size_t b = a + 1; b < ni.size(); ++b) {
        if (std::abs(p_mat(ni[a], ni[b])) > tol) ++links;
      }
    }
    m.clustering[i] = 2.0 * links / (static_cast<double>(ni.size()) * (ni.size() - 1));
  }

  // BFS from every node: per-node eccentricity plus the global sum of
  // shortest-path lengths over reachable ordered pairs.
  m.eccentricity.assign(p, 0.0);
  double dist_sum = 0.0;
  long long reachable_pairs = 0;
  bool all_connected = true;
  std::vector<int> dist(p);
  for (int s = 0; s < p; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int w : nbr[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
      }
    }
    int ecc = 0;
    for (int t = 0; t < p; ++t) {
      if (t == s) continue;
      if (dist[t] < 0) {
        all_connected = false;
        continue;
      }
      ecc = std::max(ecc, dist[t]);
      dist_sum += dist[t];
      ++reachable_pairs;
    }
    m.eccentricity[s] = ecc;
  }
  m.connected = all_connected && p > 0;

  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  m.mean_degree = mean(m.degree);
  m.mean_clustering = mean(m.clustering);
  m.mean_strength = mean(m.strength);
  m.mean_eccentricity = mean(m.eccentricity);
  m.mean_distance = reachable_pairs > 0 ? dist_sum / static_cast<double>(reachable_pairs) : 0.0;
  return m;
}

/// Steady state of a unit-step contagion process, s = (I - P)^{-1} e.
/// Requires spectral radius of P below 1, otherwise the series diverges.
inline Eigen::VectorXd shock_diffusion(const SymMatrix& p_mat, const Eigen::VectorXd& e) {
  const int p = p_mat.dim();
  if (e.size() != p) throw std::invalid_argument("shock_diffusion: shock vector length mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p_mat.mat(), Eigen::EigenvaluesOnly);
  const double radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius < 1.0)) {
    throw std::runtime_error("shock_diffusion: spectral radius " + std::to_string(radius) +
                             " is not below 1; the diffusion series diverges");
  }
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(p, p) - p_mat.mat();
  return system.ldlt().solve(e);
}

/// How each rolling window picks its penalty: a grid search per window,
/// or fixed parameters when no grid is configured.
struct RollingConfig {
  EstimatorSpec estimator;
  bool prewhiten = false;
  std::optional<GridSpec> grid;
  Criterion criterion = Criterion::Bic;
  int folds = 5;
  std::uint64_t seed = 0;
  PenaltyParams fixed_params;
  double edge_tol = kZeroTol;
  bool absolute_strength = true;
};

struct RollingPoint {
  int window_end = 0;  // number of rows consumed by this window
  double mean_strength = 0.0;
  bool failed = false;
};

/// Mean network strength over sliding windows of `window` observations,
/// advancing by `shift`. A failing window is emitted with its failure
/// marker and the run continues.
inline std::vector<RollingPoint> rolling_strength(const Dataset& data, int window, int shift,
                                                  const RollingConfig& cfg) {
  if (window < 2 || window > data.rows()) {
    throw std::invalid_argument("rolling_strength: window must lie in [2, n]");
  }
  if (shift < 1) throw std::invalid_argument("rolling_strength: shift must be positive");

  std::vector<RollingPoint> out;
  for (int start = 0; start + window <= data.rows(); start += shift) {
    RollingPoint pt;
    pt.window_end = start + window;
    try {
      Eigen::MatrixXd slice = data.values().middleRows(start, window);
      if (cfg.prewhiten) {
        Eigen::MatrixXd resid(slice.rows() - 1, slice.cols());
        for (int j = 0; j < slice.cols(); ++j) {
          std::vector<double> series(slice.col(j).data(), slice.col(j).data() + slice.rows());
          const auto fit = fit_ar1_garch11(series);
          const auto z = standardized_residuals(series, fit.params);
          for (std::size_t t = 0; t < z.size(); ++t) resid(t, j) = z[t];
        }
        slice = std::move(resid);
      }
      const Dataset win(std::move(slice), data.labels());
      PenaltyParams params = cfg.fixed_params;
      if (cfg.grid) {
        const auto report = grid_search(win, cfg.estimator, *cfg.grid, cfg.criterion, cfg.folds,
                                        cfg.seed, 1);
        params = report.best;
      }
      const auto fit = run_estimator(cfg.estimator, win, params);
      const auto measures =
          graph_measures(partial_correlation(fit.theta_hat), cfg.edge_tol, cfg.absolute_strength);
      pt.mean_strength = measures.mean_strength;
    } catch (const std::exception&) {
      pt.failed = true;
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace ggmnet

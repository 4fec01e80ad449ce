#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ggmnet/cr_gelnet.hpp"
#include "ggmnet/elastic_net.hpp"
#include "ggmnet/types.hpp"

namespace ggmnet {

enum class EdgeRule { And, Or };

/// Meinshausen-Buhlmann style neighborhood selection with elastic-net
/// regressions: edge (i,j) is kept when both coefficient directions are
/// nonzero (And) or at least one is (Or). "Nonzero" means |b| > kZeroTol.
inline EdgeSet neighborhood_select(const Dataset& data, const PenaltyParams& params,
                                   EdgeRule rule, const EnetOptions& opts = {}) {
  const int p = data.cols();
  Eigen::MatrixXd nonzero = Eigen::MatrixXd::Zero(p, p);
  detail::for_each_conditional_fit(data, params, opts, nullptr,
                                   [&](int i, const Eigen::VectorXd& b, double) {
                                     int r = 0;
                                     for (int j = 0; j < p; ++j) {
                                       if (j == i) continue;
                                       nonzero(i, j) = std::abs(b[r]) > kZeroTol ? 1.0 : 0.0;
                                       ++r;
                                     }
                                   });
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const bool a = nonzero(i, j) != 0.0;
      const bool b = nonzero(j, i) != 0.0;
      const bool keep = rule == EdgeRule::And ? (a && b) : (a || b);
      if (keep) edges.emplace_back(i, j);
    }
  }
  return EdgeSet(p, std::move(edges));
}

/// Maximizes log det(Theta) - tr(S*Theta) subject to theta_ij = 0 for
/// every pair outside the edge set, by cycling block updates: for each
/// row/column k the free components of w12 solve the reduced system
/// restricted to edges incident to k, and zeros are imposed elsewhere.
/// At the fixed point Theta^{-1} matches S on the diagonal and on every
/// selected edge; off-pattern entries of Theta are exact zeros.
inline EstimationResult constrained_mle(const SymMatrix& S, const EdgeSet& edges,
                                        double tol = 1e-6, int max_sweeps = 500) {
  const int p = S.dim();
  if (edges.node_count() != p) throw std::invalid_argument("constrained_mle: edge set dimension mismatch");

  Eigen::MatrixXd W = S.mat();
  {
    Eigen::LLT<Eigen::MatrixXd> llt(W);
    if (llt.info() != Eigen::Success) {
      const double eps = 1e-3 * W.diagonal().mean();
      W += eps * Eigen::MatrixXd::Identity(p, p);
      Eigen::LLT<Eigen::MatrixXd> llt2(W);
      if (llt2.info() != Eigen::Success) {
        throw std::runtime_error("constrained_mle: S not positive definite even after ridge jitter");
      }
    }
  }

  std::vector<std::vector<int>> nbr(p);
  for (auto [i, j] : edges.edges()) {
    nbr[i].push_back(j);
    nbr[j].push_back(i);
  }

  // beta_k restricted to the free set, solved against the current W.
  auto solve_beta = [&](int k, Eigen::VectorXd& beta_free) {
    const auto& free = nbr[k];
    const int f = static_cast<int>(free.size());
    if (f == 0) return;
    Eigen::MatrixXd Wff(f, f);
    Eigen::VectorXd sf(f);
    for (int a = 0; a < f; ++a) {
      sf[a] = S(free[a], k);
      for (int b = 0; b < f; ++b) Wff(a, b) = W(free[a], free[b]);
    }
    beta_free = Wff.ldlt().solve(sf);
    if (!beta_free.allFinite()) {
      throw std::runtime_error("constrained_mle: reduced solve failed at block " + std::to_string(k));
    }
  };

  double sweep_delta = 0.0;
  bool converged = false;
  int sweeps = 0;
  Eigen::VectorXd beta_free;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int k = 0; k < p; ++k) {
      solve_beta(k, beta_free);
      const auto& free = nbr[k];
      for (int j = 0; j < p; ++j) {
        if (j == k) continue;
        double w = 0.0;
        for (int a = 0; a < static_cast<int>(free.size()); ++a) {
          w += W(j, free[a]) * beta_free[a];
        }
        max_change = std::max(max_change, std::abs(w - W(j, k)));
        W(j, k) = w;
        W(k, j) = w;
      }
    }
    sweeps = sweep;
    sweep_delta = max_change;
    if (max_change < tol) {
      converged = true;
      break;
    }
  }

  // Recover Theta column by column from the converged W; both mirror
  // positions are written so the matrix ends exactly symmetric and
  // off-pattern entries are exact zeros.
  Eigen::MatrixXd Theta = Eigen::MatrixXd::Zero(p, p);
  for (int k = 0; k < p; ++k) {
    solve_beta(k, beta_free);
    const auto& free = nbr[k];
    double quad = 0.0;
    for (int a = 0; a < static_cast<int>(free.size()); ++a) quad += beta_free[a] * W(free[a], k);
    const double denom = W(k, k) - quad;
    if (!(denom > 0.0)) {
      throw std::runtime_error("constrained_mle: nonpositive theta22 denominator at block " +
                               std::to_string(k));
    }
    const double theta22 = 1.0 / denom;
    Theta(k, k) = theta22;
    for (int a = 0; a < static_cast<int>(free.size()); ++a) {
      const double v = -beta_free[a] * theta22;
      Theta(free[a], k) = v;
      Theta(k, free[a]) = v;
    }
  }

  SymMatrix theta(std::move(Theta));
  EstimationResult res{theta,
                       std::nullopt,
                       PenaltyParams(),
                       sweeps,
                       sweep_delta,
                       converged,
                       is_positive_definite(theta),
                       edges};
  return res;
}

struct TwoStageConfig {
  EnetOptions enet;
  double mle_tol = 1e-6;
  int mle_max_sweeps = 500;
};

/// 2S-gelnet: neighborhood selection fixes the sparsity pattern, then the
/// constrained MLE fills in the precision entries. The selected edge set
/// rides along in the result.
inline EstimationResult two_stage_estimate(const Dataset& data, const PenaltyParams& params,
                                           EdgeRule rule, const TwoStageConfig& cfg = {}) {
  EdgeSet edges = neighborhood_select(data, params, rule, cfg.enet);
  EstimationResult res = constrained_mle(data.sample_covariance(), edges, cfg.mle_tol,
                                         cfg.mle_max_sweeps);
  res.params = params;
  return res;
}

}  // namespace ggmnet

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ggmnet {

/// Absolute threshold below which a coefficient counts as an exact zero.
/// Coordinate descent produces hard zeros, so this only absorbs rounding.
inline constexpr double kZeroTol = 1e-10;

/// Dense symmetric real matrix. Construction symmetrizes by averaging
/// (m + m^T)/2 and rejects inputs whose asymmetry exceeds 1e-8 relative
/// to the largest entry magnitude. Immutable afterwards.
class SymMatrix {
 public:
  explicit SymMatrix(Eigen::MatrixXd m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw std::invalid_argument("SymMatrix: input must be square with dim >= 1");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= 1e-8 * scale)) {
      throw std::invalid_argument("SymMatrix: asymmetry " + std::to_string(asym) +
                                  " exceeds 1e-8 relative tolerance");
    }
    values_ = 0.5 * (m + m.transpose().eval());
  }

  static SymMatrix identity(int p) { return SymMatrix(Eigen::MatrixXd::Identity(p, p)); }

  int dim() const { return static_cast<int>(values_.rows()); }
  double operator()(int i, int j) const { return values_(i, j); }
  const Eigen::MatrixXd& mat() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

/// Elastic-net mixing pair: alpha in [0,1] balances l1 vs squared-l2,
/// lambda >= 0 scales the penalty. lambda = 0 is the unpenalized limit.
struct PenaltyParams {
  double alpha = 1.0;
  double lambda = 0.0;

  PenaltyParams() = default;
  PenaltyParams(double a, double l) : alpha(a), lambda(l) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("PenaltyParams: alpha must lie in [0,1]");
    if (!(l >= 0.0)) throw std::invalid_argument("PenaltyParams: lambda must be nonnegative");
  }
};

/// Set of unordered node pairs (i, j), i < j, over p nodes.
class EdgeSet {
 public:
  explicit EdgeSet(int p, std::vector<std::pair<int, int>> edges = {}) : p_(p) {
    if (p < 1) throw std::invalid_argument("EdgeSet: node count must be positive");
    edges_.reserve(edges.size());
    for (auto [i, j] : edges) {
      if (i == j) throw std::invalid_argument("EdgeSet: self-loop at node " + std::to_string(i));
      if (i > j) std::swap(i, j);
      if (i < 0 || j >= p) throw std::invalid_argument("EdgeSet: edge index out of range");
      edges_.emplace_back(i, j);
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
      throw std::invalid_argument("EdgeSet: duplicate edge");
    }
  }

  int node_count() const { return p_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  bool contains(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(i, j));
  }

  /// Edges sorted lexicographically, each with i < j.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  std::size_t total_pairs() const {
    return static_cast<std::size_t>(p_) * static_cast<std::size_t>(p_ - 1) / 2;
  }

  bool operator==(const EdgeSet& o) const { return p_ == o.p_ && edges_ == o.edges_; }

 private:
  int p_;
  std::vector<std::pair<int, int>> edges_;
};

/// n x p observation matrix, optionally with column labels.
class Dataset {
 public:
  explicit Dataset(Eigen::MatrixXd values, std::optional<std::vector<std::string>> labels = std::nullopt)
      : values_(std::move(values)), labels_(std::move(labels)) {
    if (values_.rows() < 2) throw std::invalid_argument("Dataset: need at least 2 observations");
    if (values_.cols() < 2) throw std::invalid_argument("Dataset: need at least 2 variables");
    if (!values_.allFinite()) throw std::invalid_argument("Dataset: non-finite entry");
    if (labels_ && static_cast<int>(labels_->size()) != values_.cols()) {
      throw std::invalid_argument("Dataset: label count does not match column count");
    }
  }

  int rows() const { return static_cast<int>(values_.rows()); }
  int cols() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::optional<std::vector<std::string>>& labels() const { return labels_; }

  Eigen::VectorXd column_means() const { return values_.colwise().mean(); }

  /// Sample covariance with divisor n, columns centered at their means.
  SymMatrix sample_covariance() const {
    Eigen::MatrixXd centered = values_.rowwise() - values_.colwise().mean();
    Eigen::MatrixXd s = (centered.transpose() * centered) / static_cast<double>(rows());
    return SymMatrix(std::move(s));
  }

 private:
  Eigen::MatrixXd values_;
  std::optional<std::vector<std::string>> labels_;
};

/// Output of a precision-matrix estimator.
struct EstimationResult {
  SymMatrix theta_hat;
  std::optional<SymMatrix> w_hat;  // covariance estimate; gelnet only
  PenaltyParams params;
  int iterations = 0;
  double final_delta = 0.0;
  bool converged = false;
  bool theta_pd = false;
  std::optional<EdgeSet> selected_edges;  // two-stage only
};

/// True iff a Cholesky factorization succeeds with all pivots positive.
inline bool is_positive_definite(const SymMatrix& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m.mat());
  return llt.info() == Eigen::Success;
}

/// Partial correlations p_ij = -theta_ij / sqrt(theta_ii * theta_jj),
/// diagonal set to zero by convention.
inline SymMatrix partial_correlation(const SymMatrix& theta) {
  const int p = theta.dim();
  for (int i = 0; i < p; ++i) {
    if (!(theta(i, i) > 0.0)) {
      throw std::domain_error("partial_correlation: nonpositive diagonal entry at index " +
                              std::to_string(i));
    }
  }
  Eigen::VectorXd inv_sqrt = theta.mat().diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd pc = -(inv_sqrt.asDiagonal() * theta.mat() * inv_sqrt.asDiagonal());
  pc.diagonal().setZero();
  return SymMatrix(std::move(pc));
}

/// Edges (i, j) with |theta_ij| > tol.
inline EdgeSet edge_set_of(const SymMatrix& theta, double tol = kZeroTol) {
  const int p = theta.dim();
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (std::abs(theta(i, j)) > tol) edges.emplace_back(i, j);
    }
  }
  return EdgeSet(p, std::move(edges));
}

}  // namespace ggmnet

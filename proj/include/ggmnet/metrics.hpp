#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ggmnet/types.hpp"

namespace ggmnet {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

struct ClassificationScores {
  double accuracy = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

inline ConfusionCounts confusion(const EdgeSet& truth, const EdgeSet& estimate) {
  if (truth.node_count() != estimate.node_count()) {
    throw std::invalid_argument("confusion: node count mismatch");
  }
  std::vector<std::pair<int, int>> common;
  std::set_intersection(truth.edges().begin(), truth.edges().end(), estimate.edges().begin(),
                        estimate.edges().end(), std::back_inserter(common));
  ConfusionCounts c;
  c.tp = common.size();
  c.fp = estimate.size() - c.tp;
  c.fn = truth.size() - c.tp;
  c.tn = truth.total_pairs() - c.tp - c.fp - c.fn;
  return c;
}

/// Degenerate denominators resolve to 0: precision when nothing was
/// selected, recall when there are no true edges, F1 when both vanish.
inline ClassificationScores classification_scores(const ConfusionCounts& c) {
  if (c.total() == 0) throw std::invalid_argument("classification_scores: empty confusion counts");
  ClassificationScores s;
  const auto tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const auto tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  s.accuracy = (tp + tn) / static_cast<double>(c.total());
  s.precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
  s.recall = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  s.fpr = (fp + tn) > 0.0 ? fp / (fp + tn) : 0.0;
  s.tpr = s.recall;
  return s;
}

struct RocPoint {
  double lambda = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocPath {
  std::vector<RocPoint> points;
  std::optional<int> selected_index;
};

/// One (fpr, tpr) point per supplied lambda, at whatever fixed alpha the
/// caller used to produce the estimates.
inline RocPath roc_path(const EdgeSet& truth, const std::vector<std::pair<double, EdgeSet>>& estimates) {
  RocPath path;
  path.points.reserve(estimates.size());
  for (const auto& [lambda, est] : estimates) {
    const auto scores = classification_scores(confusion(truth, est));
    path.points.push_back({lambda, scores.fpr, scores.tpr});
  }
  return path;
}

/// sqrt(sum_i sum_j |p_ij - q_ij|^2) over all entries, both triangles.
inline double frobenius_distance(const SymMatrix& p_true, const SymMatrix& p_hat) {
  if (p_true.dim() != p_hat.dim()) throw std::invalid_argument("frobenius_distance: dimension mismatch");
  return (p_true.mat() - p_hat.mat()).norm();
}

}  // namespace ggmnet

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ggmnet/estimators.hpp"
#include "ggmnet/parallel.hpp"
#include "ggmnet/random.hpp"
#include "ggmnet/types.hpp"

namespace ggmnet {

struct GridSpec {
  std::vector<double> alphas;
  std::vector<double> lambdas;
};

/// Evenly spaced grid: n_alphas points on [0,1], n_lambdas on [0, lambda_max].
inline GridSpec linear_grid(int n_alphas, int n_lambdas, double lambda_max = 0.4) {
  if (n_alphas < 1 || n_lambdas < 1) throw std::invalid_argument("linear_grid: need at least one point per axis");
  GridSpec g;
  g.alphas.reserve(n_alphas);
  g.lambdas.reserve(n_lambdas);
  for (int i = 0; i < n_alphas; ++i) {
    g.alphas.push_back(n_alphas == 1 ? 1.0 : static_cast<double>(i) / (n_alphas - 1));
  }
  for (int i = 0; i < n_lambdas; ++i) {
    g.lambdas.push_back(n_lambdas == 1 ? lambda_max
                                       : lambda_max * static_cast<double>(i) / (n_lambdas - 1));
  }
  return g;
}

/// The simulation study's grid: 41 alphas on [0,1], 101 lambdas on [0,0.4].
inline GridSpec paper_grid() { return linear_grid(41, 101, 0.4); }

enum class Criterion { Bic, Cv };

inline std::string criterion_name(Criterion c) { return c == Criterion::Bic ? "bic" : "cv"; }

inline Criterion criterion_from_name(const std::string& s) {
  if (s == "bic") return Criterion::Bic;
  if (s == "cv") return Criterion::Cv;
  throw std::invalid_argument("unknown criterion '" + s + "' (valid: bic, cv)");
}

namespace detail {

/// Gaussian fit term -[log det(Theta) - tr(S*Theta)], +inf when Theta is
/// not positive definite (log det undefined).
inline double negative_gaussian_fit(const SymMatrix& theta, const SymMatrix& S) {
  Eigen::LLT<Eigen::MatrixXd> llt(theta.mat());
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -(logdet - (S.mat() * theta.mat()).trace());
}

}  // namespace detail

/// BIC = -n*[log det(Theta) - tr(S*Theta)] + log(n)*k with k the number of
/// nonzero upper-triangle off-diagonal entries (the edge count). Non-PD
/// estimates score +inf.
inline double bic_score(const SymMatrix& theta_hat, const SymMatrix& S, int n) {
  if (theta_hat.dim() != S.dim()) throw std::invalid_argument("bic_score: dimension mismatch");
  if (n < 1) throw std::invalid_argument("bic_score: n must be positive");
  const double fit = detail::negative_gaussian_fit(theta_hat, S);
  if (std::isinf(fit)) return fit;
  const double k = static_cast<double>(edge_set_of(theta_hat).size());
  return static_cast<double>(n) * fit + std::log(static_cast<double>(n)) * k;
}

namespace detail {

/// Contiguous fold blocks over a seeded shuffle of row indices.
inline std::vector<std::vector<int>> fold_assignments(int n, int folds, std::uint64_t seed) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  rng::Engine eng(rng::mix(seed));
  rng::shuffle(idx, eng);
  std::vector<std::vector<int>> out(folds);
  for (int f = 0; f < folds; ++f) {
    const int lo = static_cast<int>(static_cast<long long>(f) * n / folds);
    const int hi = static_cast<int>(static_cast<long long>(f + 1) * n / folds);
    out[f].assign(idx.begin() + lo, idx.begin() + hi);
  }
  return out;
}

inline Dataset subset_rows(const Dataset& data, const std::vector<int>& rows) {
  Eigen::MatrixXd m(rows.size(), data.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(i) = data.values().row(rows[i]);
  return Dataset(std::move(m), data.labels());
}

/// Held-out covariance with the training means subtracted, divisor n_test.
inline SymMatrix heldout_covariance(const Dataset& data, const std::vector<int>& rows,
                                    const Eigen::VectorXd& train_means) {
  Eigen::MatrixXd m(rows.size(), data.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.row(i) = data.values().row(rows[i]) - train_means.transpose();
  }
  return SymMatrix((m.transpose() * m / static_cast<double>(rows.size())).eval());
}

}  // namespace detail

/// Mean held-out negative Gaussian log-likelihood over seeded contiguous
/// folds. Any estimator failure (or a non-PD estimate, which has no
/// likelihood) makes the score +inf.
inline double cv_score(const Dataset& data, const EstimatorSpec& spec, const PenaltyParams& params,
                       int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("cv_score: need at least 2 folds");
  if (data.rows() < folds) throw std::invalid_argument("cv_score: more folds than observations");
  const auto assignment = detail::fold_assignments(data.rows(), folds, seed);
  double total = 0.0;
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_rows;
    train_rows.reserve(data.rows() - assignment[f].size());
    for (int g = 0; g < folds; ++g) {
      if (g == f) continue;
      train_rows.insert(train_rows.end(), assignment[g].begin(), assignment[g].end());
    }
    try {
      const Dataset train = detail::subset_rows(data, train_rows);
      const EstimationResult fit = run_estimator(spec, train, params);
      const SymMatrix s_test = detail::heldout_covariance(data, assignment[f], train.column_means());
      const double score = detail::negative_gaussian_fit(fit.theta_hat, s_test);
      if (std::isinf(score) || std::isnan(score)) return std::numeric_limits<double>::infinity();
      total += score;
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return total / folds;
}

struct SelectionReport {
  GridSpec grid;
  Eigen::MatrixXd scores;  // |alphas| x |lambdas|
  PenaltyParams best;
  Criterion criterion = Criterion::Bic;
  std::optional<int> folds;
  std::uint64_t seed = 0;
};

/// Argmin over the grid; scores within 1e-12 relative of the minimum count
/// as ties and resolve to the smallest alpha, then the smallest lambda.
inline PenaltyParams select_best(const Eigen::MatrixXd& scores, const GridSpec& grid) {
  if (scores.rows() != static_cast<Eigen::Index>(grid.alphas.size()) ||
      scores.cols() != static_cast<Eigen::Index>(grid.lambdas.size())) {
    throw std::invalid_argument("select_best: score matrix shape does not match grid");
  }
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < scores.rows(); ++a) {
    for (Eigen::Index l = 0; l < scores.cols(); ++l) {
      if (scores(a, l) < best) best = scores(a, l);
    }
  }
  if (std::isinf(best)) throw std::runtime_error("select_best: no finite score on the grid");
  const double tie = 1e-12 * std::max(1.0, std::abs(best));
  for (Eigen::Index a = 0; a < scores.rows(); ++a) {
    for (Eigen::Index l = 0; l < scores.cols(); ++l) {
      if (scores(a, l) <= best + tie) return PenaltyParams(grid.alphas[a], grid.lambdas[l]);
    }
  }
  throw std::logic_error("select_best: unreachable");
}

/// Scores the whole grid for one dataset. BIC estimates on the full data;
/// CV refits per fold. Gelnet/glasso rows run as warm-started lambda paths;
/// parallel tasks are (alpha row x fold) units. For glasso the alpha axis
/// collapses to the single value 1.
inline SelectionReport grid_search(const Dataset& data, const EstimatorSpec& spec,
                                   const GridSpec& grid_in, Criterion criterion, int folds = 5,
                                   std::uint64_t seed = 0, int n_threads = 0) {
  GridSpec grid = grid_in;
  if (!estimator_uses_alpha(spec.kind)) grid.alphas = {1.0};
  const std::size_t na = grid.alphas.size();
  const std::size_t nl = grid.lambdas.size();

  SelectionReport report;
  report.grid = grid;
  report.criterion = criterion;
  report.seed = seed;
  if (criterion == Criterion::Cv) report.folds = folds;
  report.scores = Eigen::MatrixXd::Constant(na, nl, std::numeric_limits<double>::infinity());

  const bool path_capable =
      spec.kind == EstimatorKind::Gelnet || spec.kind == EstimatorKind::Glasso;

  if (criterion == Criterion::Bic) {
    const SymMatrix S = data.sample_covariance();
    const int n = data.rows();
    parallel_for(na, n_threads, [&](std::size_t a) {
      if (path_capable) {
        try {
          const auto path = gelnet_path(S, grid.alphas[a], grid.lambdas, spec.gelnet);
          for (std::size_t l = 0; l < nl; ++l) {
            report.scores(a, l) = bic_score(path[l].theta_hat, S, n);
          }
        } catch (const std::exception&) {
          // leave the whole row at +inf
        }
      } else {
        for (std::size_t l = 0; l < nl; ++l) {
          try {
            const auto fit =
                run_estimator(spec, data, PenaltyParams(grid.alphas[a], grid.lambdas[l]));
            report.scores(a, l) = bic_score(fit.theta_hat, S, n);
          } catch (const std::exception&) {
            // leave +inf
          }
        }
      }
    });
  } else {
    const auto assignment = detail::fold_assignments(data.rows(), folds, seed);
    // Pre-split folds once; tasks are (alpha, fold) pairs.
    std::vector<Dataset> trains;
    std::vector<SymMatrix> tests;
    for (int f = 0; f < folds; ++f) {
      std::vector<int> train_rows;
      for (int g = 0; g < folds; ++g) {
        if (g == f) continue;
        train_rows.insert(train_rows.end(), assignment[g].begin(), assignment[g].end());
      }
      trains.push_back(detail::subset_rows(data, train_rows));
      tests.push_back(detail::heldout_covariance(data, assignment[f], trains.back().column_means()));
    }
    // Each (alpha, fold) task writes its own slot; fold contributions are
    // summed in fixed order afterwards so results never depend on thread
    // scheduling.
    std::vector<Eigen::MatrixXd> fold_scores(folds, Eigen::MatrixXd::Zero(na, nl));
    std::vector<std::vector<char>> fold_failed(folds, std::vector<char>(na * nl, 0));
    parallel_for(na * folds, n_threads, [&](std::size_t task) {
      const std::size_t a = task / folds;
      const int f = static_cast<int>(task % folds);
      auto mark_failed = [&](std::size_t l) { fold_failed[f][a * nl + l] = 1; };
      if (path_capable) {
        try {
          const SymMatrix S_train = trains[f].sample_covariance();
          const auto path = gelnet_path(S_train, grid.alphas[a], grid.lambdas, spec.gelnet);
          for (std::size_t l = 0; l < nl; ++l) {
            const double s = detail::negative_gaussian_fit(path[l].theta_hat, tests[f]);
            fold_scores[f](a, l) = s;
            if (!std::isfinite(s)) mark_failed(l);
          }
        } catch (const std::exception&) {
          for (std::size_t l = 0; l < nl; ++l) mark_failed(l);
        }
      } else {
        for (std::size_t l = 0; l < nl; ++l) {
          try {
            const auto fit = run_estimator(spec, trains[f],
                                           PenaltyParams(grid.alphas[a], grid.lambdas[l]));
            const double s = detail::negative_gaussian_fit(fit.theta_hat, tests[f]);
            fold_scores[f](a, l) = s;
            if (!std::isfinite(s)) mark_failed(l);
          } catch (const std::exception&) {
            mark_failed(l);
          }
        }
      }
    });
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t l = 0; l < nl; ++l) {
        bool failed = false;
        double total = 0.0;
        for (int f = 0; f < folds; ++f) {
          failed = failed || fold_failed[f][a * nl + l] != 0;
          total += fold_scores[f](a, l);
        }
        report.scores(a, l) =
            failed ? std::numeric_limits<double>::infinity() : total / folds;
      }
    }
  }

  report.best = select_best(report.scores, report.grid);
  return report;
}

}  // namespace ggmnet

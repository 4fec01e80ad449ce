#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ggmnet/elastic_net.hpp"
#include "ggmnet/types.hpp"

namespace ggmnet {

struct GelnetConfig {
  double delta = 1e-4;       // convergence threshold on max |W - W_old|
  int max_sweeps = 500;
  double inner_tol = 1e-7;   // per-block coordinate descent tolerance
  int inner_max_iter = 1000;
  bool jitter_if_singular = true;
  bool track_objective = false;
};

/// Penalized log-likelihood: log det(Theta) - tr(S*Theta)
///   - alpha*lambda*|Theta|_1,off - (1-alpha)*lambda*|Theta|_2,off^2.
/// Diagonal entries are excluded from both norms. Returns -inf if Theta
/// is not positive definite.
///
/// Note the squared-l2 term carries no 1/2 factor, while the stationarity
/// system the solver drives to zero uses its derivative 2*(1-alpha)*lambda*Theta;
/// both sides here follow that same convention.
inline double gelnet_objective(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& S,
                               const PenaltyParams& params) {
  Eigen::LLT<Eigen::MatrixXd> llt(theta);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  double l1 = 0.0, l2sq = 0.0;
  for (Eigen::Index i = 0; i < theta.rows(); ++i) {
    for (Eigen::Index j = 0; j < theta.cols(); ++j) {
      if (i == j) continue;
      l1 += std::abs(theta(i, j));
      l2sq += theta(i, j) * theta(i, j);
    }
  }
  return logdet - (S * theta).trace() - params.alpha * params.lambda * l1 -
         (1.0 - params.alpha) * params.lambda * l2sq;
}

/// Coordinate-descent solve of the per-block stationarity system
///   W11*b - s12 + alpha*lambda*sgn(b) + 2*(1-alpha)*lambda*theta22*b = 0
/// via b_j = -Soft(c_j, alpha*lambda) / (h_j + 2*(1-alpha)*lambda*theta22)
/// with c_j = sum_{t != j} W11_jt b_t - s12_j and h_j = W11_jj.
inline Eigen::VectorXd solve_block(const Eigen::MatrixXd& W11, const Eigen::VectorXd& s12,
                                   double theta22, const PenaltyParams& params,
                                   Eigen::VectorXd b_init, double tol, int max_iter,
                                   int* iterations = nullptr) {
  const Eigen::Index m = W11.rows();
  if (s12.size() != m) throw std::invalid_argument("solve_block: s12 size mismatch");
  if (!(theta22 > 0.0)) throw std::invalid_argument("solve_block: theta22 must be positive");
  Eigen::VectorXd b = b_init.size() == m ? std::move(b_init) : Eigen::VectorXd::Zero(m).eval();
  const double thresh = params.alpha * params.lambda;
  const double ridge = 2.0 * (1.0 - params.alpha) * params.lambda * theta22;

  Eigen::VectorXd wb = W11 * b;
  int sweeps = 0;
  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double denom = W11(j, j) + ridge;
      if (!(denom > 0.0)) {
        throw std::runtime_error("solve_block: nonpositive curvature at coordinate " +
                                 std::to_string(j));
      }
      const double old = b[j];
      const double cj = wb[j] - W11(j, j) * old - s12[j];
      const double updated = -soft_threshold(cj, thresh) / denom;
      const double change = updated - old;
      if (change != 0.0) {
        b[j] = updated;
        wb.noalias() += W11.col(j) * change;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    sweeps = sweep;
    if (max_change < tol) break;
  }
  if (iterations) *iterations = sweeps;
  return b;
}

namespace detail {

/// Mutable solver state so a lambda path can reuse W, Theta and the
/// per-block coefficient warm starts from the previous solution.
struct GelnetState {
  Eigen::MatrixXd W;
  Eigen::MatrixXd Theta;
  Eigen::MatrixXd B;  // (p-1) x p, column k holds the block-k coefficients
};

inline GelnetState gelnet_init(const Eigen::MatrixXd& S, bool jitter_if_singular) {
  const Eigen::Index p = S.rows();
  GelnetState st;
  st.W = S;
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() == Eigen::Success) {
    st.Theta = llt.solve(Eigen::MatrixXd::Identity(p, p));
  } else if (jitter_if_singular) {
    const double eps = 1e-3 * S.diagonal().mean();
    Eigen::MatrixXd Sj = S + eps * Eigen::MatrixXd::Identity(p, p);
    Eigen::LLT<Eigen::MatrixXd> llt2(Sj);
    if (llt2.info() != Eigen::Success) {
      throw std::runtime_error("gelnet: S not invertible even after ridge jitter");
    }
    st.Theta = llt2.solve(Eigen::MatrixXd::Identity(p, p));
  } else {
    throw std::runtime_error("gelnet: S is singular and jitter is disabled");
  }
  st.Theta = 0.5 * (st.Theta + st.Theta.transpose().eval());
  st.B = Eigen::MatrixXd::Zero(p - 1, p);
  return st;
}

inline EstimationResult gelnet_run(const Eigen::MatrixXd& S, const PenaltyParams& params,
                                   const GelnetConfig& cfg, GelnetState& st,
                                   std::vector<double>* objective_trace) {
  const Eigen::Index p = S.rows();
  Eigen::MatrixXd W11(p - 1, p - 1);
  Eigen::VectorXd s12(p - 1), w12(p - 1), b(p - 1);

  double sweep_delta = 0.0;
  bool converged = false;
  int sweeps = 0;
  if (objective_trace) objective_trace->push_back(gelnet_objective(st.Theta, S, params));

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    const Eigen::MatrixXd W_old = st.W;
    for (Eigen::Index k = 0; k < p; ++k) {
      // Partition out row/column k.
      Eigen::Index r = 0;
      for (Eigen::Index i = 0; i < p; ++i) {
        if (i == k) continue;
        s12[r] = S(i, k);
        b[r] = st.B(r, k);
        Eigen::Index c = 0;
        for (Eigen::Index j = 0; j < p; ++j) {
          if (j == k) continue;
          W11(r, c) = st.W(i, j);
          ++c;
        }
        ++r;
      }
      const double theta22_in = st.Theta(k, k);
      b = solve_block(W11, s12, theta22_in, params, std::move(b), cfg.inner_tol,
                      cfg.inner_max_iter);
      st.B.col(k) = b;

      w12.noalias() = W11 * b;
      const double w22 = st.W(k, k);  // equals S(k,k); diagonal never penalized
      const double denom = w22 - b.dot(w12);
      if (!(denom > 0.0)) {
        throw std::runtime_error("gelnet: nonpositive theta22 denominator at block " +
                                 std::to_string(k));
      }
      const double theta22 = 1.0 / denom;
      r = 0;
      for (Eigen::Index i = 0; i < p; ++i) {
        if (i == k) continue;
        st.W(i, k) = w12[r];
        st.W(k, i) = w12[r];
        const double theta12 = -b[r] * theta22;
        st.Theta(i, k) = theta12;
        st.Theta(k, i) = theta12;
        ++r;
      }
      st.Theta(k, k) = theta22;
    }
    sweeps = sweep;
    sweep_delta = (st.W - W_old).cwiseAbs().maxCoeff();
    if (objective_trace) objective_trace->push_back(gelnet_objective(st.Theta, S, params));
    if (sweep_delta < cfg.delta) {
      converged = true;
      break;
    }
  }

  SymMatrix theta(st.Theta);
  EstimationResult res{theta,
                       SymMatrix(st.W),
                       params,
                       sweeps,
                       sweep_delta,
                       converged,
                       is_positive_definite(theta),
                       std::nullopt};
  return res;
}

}  // namespace detail

/// Block coordinate descent for the elastic-net penalized Gaussian
/// log-likelihood. Starts from W = S, Theta = S^{-1} (ridge jitter
/// 1e-3*mean(diag S) if S is singular and jitter is enabled). Blocks are
/// visited in ascending order; per-block coefficients warm-start from the
/// previous sweep. Convergence: max |W - W_old| < cfg.delta after a full
/// sweep. The diagonal of W stays equal to the diagonal of S throughout.
inline EstimationResult gelnet_estimate(const SymMatrix& S, const PenaltyParams& params,
                                        const GelnetConfig& cfg = {},
                                        std::vector<double>* objective_trace = nullptr) {
  if (S.dim() < 2) throw std::invalid_argument("gelnet_estimate: need dim >= 2");
  for (int i = 0; i < S.dim(); ++i) {
    if (!(S(i, i) > 0.0)) {
      throw std::invalid_argument("gelnet_estimate: nonpositive diagonal in S at index " +
                                  std::to_string(i));
    }
  }
  auto st = detail::gelnet_init(S.mat(), cfg.jitter_if_singular);
  std::vector<double> trace;
  auto res = detail::gelnet_run(S.mat(), params, cfg, st,
                                cfg.track_objective || objective_trace ? &trace : nullptr);
  if (objective_trace) *objective_trace = trace;
  return res;
}

/// Solves the whole lambda path at fixed alpha, warm-starting each
/// solution (W, Theta and block coefficients) from the previous one.
/// Lambdas are visited in the order given; results are index-aligned.
inline std::vector<EstimationResult> gelnet_path(const SymMatrix& S, double alpha,
                                                 const std::vector<double>& lambdas,
                                                 const GelnetConfig& cfg = {}) {
  std::vector<EstimationResult> out;
  out.reserve(lambdas.size());
  auto st = detail::gelnet_init(S.mat(), cfg.jitter_if_singular);
  for (const double lambda : lambdas) {
    const PenaltyParams params(alpha, lambda);
    out.push_back(detail::gelnet_run(S.mat(), params, cfg, st, nullptr));
  }
  return out;
}

}  // namespace ggmnet

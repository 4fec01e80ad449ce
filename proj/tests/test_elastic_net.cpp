#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "ggmnet/elastic_net.hpp"
#include "oracles.hpp"

using namespace ggmnet;

namespace {

struct Problem {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
};

Problem random_problem(int n, int q, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal;
  Problem pr;
  pr.X.resize(n, q);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) pr.X(i, j) = normal(eng);
  }
  Eigen::VectorXd beta(q);
  for (int j = 0; j < q; ++j) beta[j] = (j % 2 == 0) ? 1.0 : -0.5;
  pr.y = pr.X * beta;
  for (int i = 0; i < n; ++i) pr.y[i] += 0.3 * normal(eng) + 2.0;
  return pr;
}

double enet_objective(const Problem& pr, const RegressionFit& fit, const PenaltyParams& params) {
  const Eigen::VectorXd resid =
      pr.y.array() - fit.intercept - (pr.X * fit.coefficients).array();
  return resid.squaredNorm() / pr.y.size() +
         params.lambda * (params.alpha * fit.coefficients.lpNorm<1>() +
                          (1.0 - params.alpha) * fit.coefficients.squaredNorm());
}

}  // namespace

TEST_CASE("soft_threshold formula", "[enet]") {
  CHECK(soft_threshold(0.5, 0.2) == Catch::Approx(0.3));
  CHECK(soft_threshold(-0.1, 0.2) == 0.0);
  CHECK(soft_threshold(-0.5, 0.2) == Catch::Approx(-0.3));
  for (double c : {-2.0, -0.3, 0.0, 0.7, 5.0}) {
    CHECK(soft_threshold(c, 0.0) == c);
  }
}

TEST_CASE("unpenalized fit matches OLS", "[enet]") {
  const Problem pr = random_problem(60, 4, 11);
  const RegressionFit fit = fit_elastic_net(pr.y, pr.X, PenaltyParams(1.0, 0.0));
  CHECK(fit.converged);

  Eigen::MatrixXd design(pr.X.rows(), pr.X.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(pr.X.cols()) = pr.X;
  const Eigen::VectorXd ols = design.colPivHouseholderQr().solve(pr.y);
  CHECK(std::abs(fit.intercept - ols[0]) < 1e-8);
  for (int j = 0; j < pr.X.cols(); ++j) {
    CHECK(std::abs(fit.coefficients[j] - ols[j + 1]) < 1e-8);
  }
}

TEST_CASE("lasso null threshold zeroes every coefficient", "[enet]") {
  const Problem pr = random_problem(50, 5, 21);
  const Eigen::MatrixXd Xc = pr.X.rowwise() - pr.X.colwise().mean();
  const Eigen::VectorXd corr = Xc.transpose() * (pr.y.array() - pr.y.mean()).matrix() / pr.y.size();
  // Tight sample-scale threshold: all-zero is stationary once
  // lambda/2 >= max_j |cov_n(x_j, y)|.
  const double lambda = 2.0 * corr.cwiseAbs().maxCoeff() * 1.0001;
  const RegressionFit fit = fit_elastic_net(pr.y, pr.X, PenaltyParams(1.0, lambda));
  CHECK(fit.coefficients.isZero(0.0));
  CHECK(fit.intercept == Catch::Approx(pr.y.mean()));
  // A fortiori for the much larger unscaled-correlation bound.
  const double above =
      2.0 * (Xc.transpose() * (pr.y.array() - pr.y.mean()).matrix()).cwiseAbs().maxCoeff();
  CHECK(fit_elastic_net(pr.y, pr.X, PenaltyParams(1.0, above)).coefficients.isZero(0.0));
}

TEST_CASE("univariate closed form", "[enet]") {
  // Single standardized predictor: b = Soft(x'y, lambda*alpha/2) / (x'x + lambda*(1-alpha)).
  std::mt19937_64 eng(5);
  std::normal_distribution<double> normal;
  const int n = 80;
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = normal(eng);
    y[i] = 0.8 * X(i, 0) + 0.1 * normal(eng);
  }
  X.col(0).array() -= X.col(0).mean();
  X.col(0) /= std::sqrt(X.col(0).squaredNorm() / n);
  const PenaltyParams params(0.5, 0.4);
  const RegressionFit fit = fit_elastic_net(y, X, params);
  const Eigen::VectorXd yc = y.array() - y.mean();
  const Eigen::VectorXd xc = X.col(0).array() - X.col(0).mean();
  const double expected =
      soft_threshold(xc.dot(yc) / n, params.lambda * params.alpha / 2.0) /
      (xc.squaredNorm() / n + params.lambda * (1.0 - params.alpha));
  REQUIRE(expected != 0.0);
  CHECK(fit.coefficients[0] == Catch::Approx(expected).epsilon(1e-10));
}

TEST_CASE("zero-variance predictor is forced to zero", "[enet]") {
  const Problem pr = random_problem(40, 3, 33);
  Eigen::MatrixXd X = pr.X;
  X.col(1).setConstant(4.2);
  const RegressionFit fit = fit_elastic_net(pr.y, X, PenaltyParams(0.5, 0.3));
  CHECK(fit.coefficients[1] == 0.0);
  CHECK(fit.converged);
}

TEST_CASE("KKT conditions hold at the solution", "[enet]") {
  for (unsigned seed : {1u, 2u, 3u, 4u}) {
    const Problem pr = random_problem(70, 6, seed);
    for (const auto& params : {PenaltyParams(1.0, 0.3), PenaltyParams(0.5, 0.15),
                               PenaltyParams(0.0, 0.08), PenaltyParams(0.7, 0.02)}) {
      // The KKT residual scales with the Gram matrix, so pin the solver
      // tolerance well below the 1e-6 bound being asserted.
      EnetOptions opts;
      opts.tol = 1e-11;
      const RegressionFit fit = fit_elastic_net(pr.y, pr.X, params, opts);
      REQUIRE(fit.converged);
      const Eigen::MatrixXd Xc = pr.X.rowwise() - pr.X.colwise().mean();
      const Eigen::VectorXd yc = pr.y.array() - pr.y.mean();
      const Eigen::VectorXd resid = yc - Xc * fit.coefficients;
      const double n = static_cast<double>(pr.y.size());
      for (int j = 0; j < pr.X.cols(); ++j) {
        const double grad = -2.0 * Xc.col(j).dot(resid) / n +
                            2.0 * params.lambda * (1.0 - params.alpha) * fit.coefficients[j];
        if (fit.coefficients[j] != 0.0) {
          const double stationarity =
              grad + params.lambda * params.alpha * (fit.coefficients[j] > 0 ? 1.0 : -1.0);
          CHECK(std::abs(stationarity) < 1e-6);
        } else {
          CHECK(std::abs(grad) <= params.lambda * params.alpha + 1e-6);
        }
      }
    }
  }
}

TEST_CASE("objective is non-increasing across sweeps", "[enet]") {
  const Problem pr = random_problem(50, 5, 77);
  const PenaltyParams params(0.6, 0.15);
  // Run the solver one sweep at a time via warm starts and track the objective.
  EnetOptions opts;
  opts.max_iter = 1;
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(5);
  double prev = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < 30; ++sweep) {
    opts.warm_start = warm;
    const RegressionFit fit = fit_elastic_net(pr.y, pr.X, params, opts);
    const double obj = enet_objective(pr, fit, params);
    CHECK(obj <= prev + 1e-9);
    prev = obj;
    warm = fit.coefficients;
  }
}

TEST_CASE("solution invariant to predictor order", "[enet]") {
  const Problem pr = random_problem(60, 5, 91);
  const PenaltyParams params(0.8, 0.1);
  const RegressionFit fit = fit_elastic_net(pr.y, pr.X, params);

  std::vector<int> perm = {3, 0, 4, 1, 2};
  Eigen::MatrixXd Xp(pr.X.rows(), pr.X.cols());
  for (int j = 0; j < pr.X.cols(); ++j) Xp.col(j) = pr.X.col(perm[j]);
  const RegressionFit fit_p = fit_elastic_net(pr.y, Xp, params);

  const Problem prp{pr.y, Xp};
  CHECK(std::abs(enet_objective(pr, fit, params) - enet_objective(prp, fit_p, params)) < 1e-10);
  for (int j = 0; j < pr.X.cols(); ++j) {
    CHECK(fit_p.coefficients[j] == Catch::Approx(fit.coefficients[perm[j]]).margin(1e-7));
  }
}

TEST_CASE("non-convergence is flagged but still returned", "[enet]") {
  const Problem pr = random_problem(100, 8, 13);
  EnetOptions opts;
  opts.max_iter = 1;
  const RegressionFit fit = fit_elastic_net(pr.y, pr.X, PenaltyParams(0.2, 0.01), opts);
  CHECK_FALSE(fit.converged);
  CHECK(fit.iterations == 1);
  CHECK(fit.coefficients.size() == 8);
}

TEST_CASE("warm start reaches the same optimum", "[enet]") {
  const Problem pr = random_problem(60, 5, 55);
  const PenaltyParams params(0.5, 0.05);
  const RegressionFit cold = fit_elastic_net(pr.y, pr.X, params);
  EnetOptions opts;
  opts.warm_start = Eigen::VectorXd::Constant(5, 0.7);
  const RegressionFit warm = fit_elastic_net(pr.y, pr.X, params, opts);
  CHECK((cold.coefficients - warm.coefficients).cwiseAbs().maxCoeff() < 1e-6);
}

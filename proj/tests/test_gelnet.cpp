#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "ggmnet/gelnet.hpp"
#include "oracles.hpp"

using namespace ggmnet;

namespace {

/// Max off-diagonal residual of the stationarity system
/// Theta^{-1} - S - alpha*lambda*Gamma - 2*(1-alpha)*lambda*Theta = 0,
/// where entries with theta_ij = 0 only need the subgradient interval.
double stationarity_residual(const EstimationResult& res, const SymMatrix& S) {
  const Eigen::MatrixXd inv = res.theta_hat.mat().inverse();
  const double al = res.params.alpha * res.params.lambda;
  const double rl = 2.0 * (1.0 - res.params.alpha) * res.params.lambda;
  double worst = 0.0;
  for (int i = 0; i < S.dim(); ++i) {
    for (int j = 0; j < S.dim(); ++j) {
      if (i == j) continue;
      const double theta = res.theta_hat(i, j);
      const double base = inv(i, j) - S(i, j) - rl * theta;
      if (theta != 0.0) {
        worst = std::max(worst, std::abs(base - al * (theta > 0 ? 1.0 : -1.0)));
      } else {
        worst = std::max(worst, std::max(0.0, std::abs(base) - al));
      }
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("identity covariance with no penalty is a fixed point", "[gelnet]") {
  const auto res = gelnet_estimate(SymMatrix::identity(3), PenaltyParams(1.0, 0.0));
  CHECK(res.converged);
  CHECK(res.theta_hat.mat().isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-12));
  REQUIRE(res.w_hat);
  CHECK(res.w_hat->mat().isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-12));
}

TEST_CASE("solve_block decoupled coordinates", "[gelnet]") {
  SECTION("zero covariance column gives zero block") {
    const Eigen::VectorXd b = solve_block(Eigen::MatrixXd::Identity(2, 2),
                                          Eigen::VectorXd::Zero(2), 1.0, PenaltyParams(1.0, 0.2),
                                          Eigen::VectorXd::Zero(2), 1e-10, 100);
    CHECK(b.isZero(0.0));
  }
  SECTION("identity W11 matches the scalar formula b_j = -Soft(-s_j, alpha*lambda)") {
    Eigen::VectorXd s12(2);
    s12 << 0.5, -0.1;
    const PenaltyParams params(1.0, 0.2);
    const Eigen::VectorXd b = solve_block(Eigen::MatrixXd::Identity(2, 2), s12, 1.0, params,
                                          Eigen::VectorXd::Zero(2), 1e-12, 100);
    CHECK(b[0] == Catch::Approx(-soft_threshold(-0.5, 0.2)));
    CHECK(b[0] == Catch::Approx(0.3));
    CHECK(b[1] == 0.0);
  }
}

TEST_CASE("solve_block agrees with the sign-enumeration QP oracle", "[gelnet]") {
  for (unsigned seed : {2u, 3u, 5u, 8u, 13u}) {
    const Eigen::MatrixXd W11 = oracles::random_pd(3, seed);
    std::mt19937_64 eng(seed * 17);
    std::normal_distribution<double> normal;
    Eigen::VectorXd s12(3);
    for (int i = 0; i < 3; ++i) s12[i] = 0.5 * normal(eng);
    const double theta22 = 1.3;
    const PenaltyParams params(0.5, 0.2);
    const Eigen::VectorXd b = solve_block(W11, s12, theta22, params, Eigen::VectorXd::Zero(3),
                                          1e-12, 10000);
    // The block stationarity system is the KKT system of
    // min 0.5 b'W b - s12'b + alpha*lambda*|b|_1 + (1-alpha)*lambda*theta22*|b|_2^2.
    const Eigen::VectorXd oracle =
        oracles::enumerate_block_qp(W11, s12, theta22, params.alpha, params.lambda);
    CHECK((b - oracle).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("alpha=1 path matches the ADMM oracle", "[gelnet]") {
  GelnetConfig cfg;
  cfg.delta = 1e-7;
  for (unsigned seed : {1u, 2u, 3u}) {
    const Eigen::MatrixXd S = oracles::random_pd(4, seed);
    const auto res = gelnet_estimate(SymMatrix(S), PenaltyParams(1.0, 0.1), cfg);
    REQUIRE(res.converged);
    const Eigen::MatrixXd oracle = oracles::admm_gelnet(S, 1.0, 0.1);
    CHECK((res.theta_hat.mat() - oracle).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("general alpha matches the ADMM oracle", "[gelnet]") {
  GelnetConfig cfg;
  cfg.delta = 1e-7;
  const Eigen::MatrixXd S = oracles::random_pd(4, 42);
  for (const double alpha : {0.0, 0.3, 0.7}) {
    const auto res = gelnet_estimate(SymMatrix(S), PenaltyParams(alpha, 0.15), cfg);
    REQUIRE(res.converged);
    const Eigen::MatrixXd oracle = oracles::admm_gelnet(S, alpha, 0.15);
    CHECK((res.theta_hat.mat() - oracle).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("stationarity residual at convergence", "[gelnet]") {
  GelnetConfig cfg;
  cfg.delta = 1e-8;
  cfg.inner_tol = 1e-10;
  SECTION("alpha = 0 ridge-type case") {
    const Eigen::MatrixXd S = oracles::random_pd(3, 7);
    const auto res = gelnet_estimate(SymMatrix(S), PenaltyParams(0.0, 0.2), cfg);
    REQUIRE(res.converged);
    CHECK(stationarity_residual(res, SymMatrix(S)) < 1e-5);
  }
  SECTION("alpha in {0, 0.5, 1}") {
    const Eigen::MatrixXd S = oracles::random_pd(5, 19);
    for (const double alpha : {0.0, 0.5, 1.0}) {
      const auto res = gelnet_estimate(SymMatrix(S), PenaltyParams(alpha, 0.1), cfg);
      REQUIRE(res.converged);
      CHECK(stationarity_residual(res, SymMatrix(S)) < 1e-5);
    }
  }
}

TEST_CASE("diagonal of W equals diagonal of S and W*Theta is near identity", "[gelnet]") {
  const Eigen::MatrixXd S = oracles::random_pd(6, 31);
  GelnetConfig cfg;
  cfg.delta = 1e-6;
  const auto res = gelnet_estimate(SymMatrix(S), PenaltyParams(0.6, 0.12), cfg);
  REQUIRE(res.converged);
  REQUIRE(res.w_hat);
  for (int i = 0; i < 6; ++i) {
    CHECK(res.w_hat->mat()(i, i) == S(i, i));
  }
  const Eigen::MatrixXd prod = res.w_hat->mat() * res.theta_hat.mat();
  CHECK((prod - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(res.theta_pd);
}

TEST_CASE("objective is non-decreasing across sweeps", "[gelnet]") {
  const Eigen::MatrixXd S = oracles::random_pd(5, 23);
  for (const double alpha : {0.0, 0.5, 1.0}) {
    std::vector<double> trace;
    GelnetConfig cfg;
    cfg.track_objective = true;
    (void)gelnet_estimate(SymMatrix(S), PenaltyParams(alpha, 0.15), cfg, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) {
      CHECK(trace[i] >= trace[i - 1] - 1e-9);
    }
  }
}

TEST_CASE("warm-started path lands on the cold-start fixed point", "[gelnet]") {
  const Eigen::MatrixXd S = oracles::random_pd(4, 3);
  GelnetConfig cfg;
  cfg.delta = 1e-8;
  const std::vector<double> lambdas = {0.02, 0.08, 0.2};
  const auto path = gelnet_path(SymMatrix(S), 0.5, lambdas, cfg);
  REQUIRE(path.size() == 3);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const auto cold = gelnet_estimate(SymMatrix(S), PenaltyParams(0.5, lambdas[i]), cfg);
    const double obj_warm = gelnet_objective(path[i].theta_hat.mat(), S, path[i].params);
    const double obj_cold = gelnet_objective(cold.theta_hat.mat(), S, cold.params);
    CHECK(std::abs(obj_warm - obj_cold) < 1e-8);
  }
}

TEST_CASE("singular S falls back to the ridge jitter", "[gelnet]") {
  Eigen::MatrixXd S(3, 3);
  S << 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0;  // rank deficient
  GelnetConfig cfg;
  CHECK_NOTHROW(gelnet_estimate(SymMatrix(S), PenaltyParams(1.0, 0.3), cfg));
  cfg.jitter_if_singular = false;
  CHECK_THROWS_AS(gelnet_estimate(SymMatrix(S), PenaltyParams(1.0, 0.3), cfg), std::runtime_error);
}

TEST_CASE("sweep limit exhaustion is flagged", "[gelnet]") {
  const Eigen::MatrixXd S = oracles::random_pd(6, 77);
  GelnetConfig cfg;
  cfg.max_sweeps = 1;
  cfg.delta = 1e-14;
  const auto res = gelnet_estimate(SymMatrix(S), PenaltyParams(0.5, 0.05), cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 1);
}

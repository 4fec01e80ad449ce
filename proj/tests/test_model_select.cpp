#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>

#include "ggmnet/model_select.hpp"
#include "ggmnet/netgen.hpp"
#include "oracles.hpp"

using namespace ggmnet;

TEST_CASE("paper grid endpoints and spacing", "[select]") {
  const GridSpec g = paper_grid();
  REQUIRE(g.alphas.size() == 41);
  REQUIRE(g.lambdas.size() == 101);
  CHECK(g.alphas.front() == 0.0);
  CHECK(g.alphas.back() == 1.0);
  CHECK(g.alphas[1] == Catch::Approx(0.025));
  CHECK(g.lambdas.front() == 0.0);
  CHECK(g.lambdas.back() == Catch::Approx(0.4));
  CHECK(g.lambdas[1] == Catch::Approx(0.004));
  CHECK(g.alphas.size() * g.lambdas.size() == 4141);
}

TEST_CASE("bic formula", "[select]") {
  SECTION("identity fit with zero edges") {
    // log det I = 0 and trace(I) = p, so BIC = 100 * p.
    const int p = 4;
    CHECK(bic_score(SymMatrix::identity(p), SymMatrix::identity(p), 100) ==
          Catch::Approx(100.0 * p));
  }
  SECTION("denser estimate with equal likelihood scores strictly worse") {
    const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(3, 3);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Identity(3, 3);
    dense(0, 1) = dense(1, 0) = 1e-6;
    const double sparse_bic = bic_score(SymMatrix::identity(3), SymMatrix(S), 50);
    const double dense_bic = bic_score(SymMatrix(dense), SymMatrix(S), 50);
    CHECK(dense_bic > sparse_bic);
    CHECK(dense_bic - sparse_bic == Catch::Approx(std::log(50.0)).epsilon(1e-3));
  }
  SECTION("hand-evaluated 3x3 case") {
    Eigen::MatrixXd theta(3, 3);
    theta << 1.5, -0.4, 0.0, -0.4, 2.0, 0.3, 0.0, 0.3, 1.0;
    const Eigen::MatrixXd S = oracles::random_pd(3, 6);
    const int n = 37;
    const double logdet = std::log(theta.determinant());
    const double expected = -n * (logdet - (S * theta).trace()) + std::log(n) * 2;
    CHECK(bic_score(SymMatrix(theta), SymMatrix(S), n) == Catch::Approx(expected).epsilon(1e-12));
  }
  SECTION("non-PD estimate scores +inf") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK(std::isinf(bic_score(SymMatrix(bad), SymMatrix::identity(2), 10)));
  }
  SECTION("invariant to simultaneous permutation") {
    const Eigen::MatrixXd S = oracles::random_pd(4, 8);
    Eigen::MatrixXd theta = S.inverse();
    theta = 0.5 * (theta + theta.transpose().eval());
    const std::vector<int> perm = {2, 0, 3, 1};
    Eigen::MatrixXd Sp(4, 4), Tp(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        Sp(i, j) = S(perm[i], perm[j]);
        Tp(i, j) = theta(perm[i], perm[j]);
      }
    }
    CHECK(bic_score(SymMatrix(theta), SymMatrix(S), 60) ==
          Catch::Approx(bic_score(SymMatrix(Tp), SymMatrix(Sp), 60)).epsilon(1e-12));
  }
}

TEST_CASE("cv score sanity", "[select]") {
  EstimatorSpec spec;
  spec.kind = EstimatorKind::TwoStageAnd;
  SECTION("finite across a small grid on independent data") {
    const Dataset data = sample_gaussian(SymMatrix::identity(5), 200, 3);
    for (const double lambda : {0.0, 0.1, 0.4}) {
      const double s = cv_score(data, spec, PenaltyParams(0.5, lambda), 5, 7);
      CHECK(std::isfinite(s));
    }
  }
  SECTION("deterministic given the seed") {
    const Dataset data = sample_gaussian(SymMatrix::identity(4), 100, 5);
    const double a = cv_score(data, spec, PenaltyParams(0.5, 0.1), 5, 42);
    const double b = cv_score(data, spec, PenaltyParams(0.5, 0.1), 5, 42);
    CHECK(a == b);
  }
  SECTION("identical folds produce identical fold scores") {
    // Duplicated data: fold 1 holds the duplicate of every row in fold 0,
    // so train sets and held-out covariances coincide and the two fold
    // scores agree bit for bit.
    const Dataset base = sample_gaussian(SymMatrix::identity(3), 40, 9);
    Eigen::MatrixXd doubled(80, 3);
    doubled.topRows(40) = base.values();
    doubled.bottomRows(40) = base.values();
    const Dataset data{std::move(doubled)};
    std::vector<int> fold0(40), fold1(40);
    std::iota(fold0.begin(), fold0.end(), 0);
    std::iota(fold1.begin(), fold1.end(), 40);
    double scores[2];
    const std::vector<std::vector<int>> folds = {fold0, fold1};
    for (int f = 0; f < 2; ++f) {
      const Dataset train = detail::subset_rows(data, folds[1 - f]);
      const auto fit = run_estimator(spec, train, PenaltyParams(1.0, 0.05));
      const SymMatrix s_test = detail::heldout_covariance(data, folds[f], train.column_means());
      scores[f] = detail::negative_gaussian_fit(fit.theta_hat, s_test);
    }
    CHECK(scores[0] == scores[1]);
  }
  SECTION("hand-computed predictive term for a fixed theta") {
    Eigen::MatrixXd theta(2, 2);
    theta << 2.0, -0.5, -0.5, 1.5;
    Eigen::MatrixXd s_test(2, 2);
    s_test << 1.1, 0.2, 0.2, 0.9;
    const double logdet = std::log(theta.determinant());
    const double expected = -(logdet - (s_test * theta).trace());
    CHECK(detail::negative_gaussian_fit(SymMatrix(theta), SymMatrix(s_test)) ==
          Catch::Approx(expected).epsilon(1e-12));
  }
  SECTION("fold count validation") {
    const Dataset data = sample_gaussian(SymMatrix::identity(3), 10, 1);
    CHECK_THROWS_AS(cv_score(data, spec, PenaltyParams(1.0, 0.1), 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(cv_score(data, spec, PenaltyParams(1.0, 0.1), 11, 0), std::invalid_argument);
  }
}

TEST_CASE("select_best tie breaking", "[select]") {
  GridSpec grid;
  grid.alphas = {0.5, 1.0};
  grid.lambdas = {0.1, 0.2};
  SECTION("unique minimum wins") {
    Eigen::MatrixXd scores(2, 2);
    scores << 5.0, 3.0, 4.0, 6.0;
    const PenaltyParams best = select_best(scores, grid);
    CHECK(best.alpha == 0.5);
    CHECK(best.lambda == 0.2);
  }
  SECTION("alpha tie resolves to the smaller alpha") {
    Eigen::MatrixXd scores(2, 2);
    scores << 1.0, 9.0, 1.0, 9.0;
    const PenaltyParams best = select_best(scores, grid);
    CHECK(best.alpha == 0.5);
    CHECK(best.lambda == 0.1);
  }
  SECTION("lambda tie resolves to the smaller lambda") {
    Eigen::MatrixXd scores(2, 2);
    scores << 2.0, 2.0, 9.0, 9.0;
    const PenaltyParams best = select_best(scores, grid);
    CHECK(best.alpha == 0.5);
    CHECK(best.lambda == 0.1);
  }
  SECTION("all infinite fails loudly") {
    Eigen::MatrixXd scores = Eigen::MatrixXd::Constant(2, 2, std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(select_best(scores, grid), std::runtime_error);
  }
}

TEST_CASE("grid search returns a grid member achieving the minimum", "[select]") {
  TopologySpec tspec;
  tspec.kind = Topology::Band;
  tspec.p = 6;
  tspec.bandwidth = 1;
  const GroundTruth gt = make_ground_truth(tspec);
  const Dataset data = sample_gaussian(gt.sigma, 300, 21);
  const GridSpec grid = linear_grid(5, 9, 0.4);

  for (const auto kind : {EstimatorKind::TwoStageAnd, EstimatorKind::Gelnet, EstimatorKind::CrL2}) {
    EstimatorSpec spec;
    spec.kind = kind;
    const SelectionReport report = grid_search(data, spec, grid, Criterion::Bic, 5, 1, 2);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < report.scores.rows(); ++a) {
      for (Eigen::Index l = 0; l < report.scores.cols(); ++l) best = std::min(best, report.scores(a, l));
    }
    bool found_alpha = false;
    for (const double a : report.grid.alphas) found_alpha |= a == report.best.alpha;
    bool found_lambda = false;
    for (const double l : report.grid.lambdas) found_lambda |= l == report.best.lambda;
    CHECK(found_alpha);
    CHECK(found_lambda);
    // The reported best matches the minimal score.
    Eigen::Index ai = -1, li = -1;
    for (Eigen::Index a = 0; a < report.scores.rows(); ++a) {
      if (report.grid.alphas[a] == report.best.alpha) ai = a;
    }
    for (Eigen::Index l = 0; l < report.scores.cols(); ++l) {
      if (report.grid.lambdas[l] == report.best.lambda) li = l;
    }
    REQUIRE(ai >= 0);
    REQUIRE(li >= 0);
    CHECK(report.scores(ai, li) <= best + 1e-12 * std::max(1.0, std::abs(best)));
  }
}

TEST_CASE("glasso grid collapses the alpha axis", "[select]") {
  const Dataset data = sample_gaussian(SymMatrix::identity(4), 120, 2);
  EstimatorSpec spec;
  spec.kind = EstimatorKind::Glasso;
  const SelectionReport report =
      grid_search(data, spec, linear_grid(5, 7, 0.4), Criterion::Bic, 5, 1, 1);
  CHECK(report.grid.alphas == std::vector<double>{1.0});
  CHECK(report.scores.rows() == 1);
  CHECK(report.best.alpha == 1.0);
}

TEST_CASE("warm-started gelnet grid row matches pointwise estimates", "[select]") {
  const Dataset data = sample_gaussian(SymMatrix(oracles::random_pd(4, 31)), 150, 8);
  EstimatorSpec spec;
  spec.kind = EstimatorKind::Gelnet;
  const GridSpec grid = linear_grid(3, 6, 0.4);
  const SelectionReport report = grid_search(data, spec, grid, Criterion::Bic, 5, 1, 1);
  const SymMatrix S = data.sample_covariance();
  for (std::size_t a = 0; a < grid.alphas.size(); ++a) {
    for (std::size_t l = 0; l < grid.lambdas.size(); ++l) {
      const auto cold =
          gelnet_estimate(S, PenaltyParams(grid.alphas[a], grid.lambdas[l]), spec.gelnet);
      const double cold_bic = bic_score(cold.theta_hat, S, data.rows());
      CHECK(report.scores(a, l) == Catch::Approx(cold_bic).margin(2e-2));
    }
  }
}

TEST_CASE("cv grid search is reproducible bit for bit", "[select]") {
  const Dataset data = sample_gaussian(SymMatrix::identity(4), 100, 77);
  EstimatorSpec spec;
  spec.kind = EstimatorKind::CrMinEl;
  const GridSpec grid = linear_grid(3, 5, 0.4);
  const SelectionReport r1 = grid_search(data, spec, grid, Criterion::Cv, 5, 99, 2);
  const SelectionReport r2 = grid_search(data, spec, grid, Criterion::Cv, 5, 99, 2);
  CHECK((r1.scores - r2.scores).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r1.best.alpha == r2.best.alpha);
  CHECK(r1.best.lambda == r2.best.lambda);
}

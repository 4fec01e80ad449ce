#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "ggmnet/prewhiten.hpp"

using namespace ggmnet;

namespace {

std::vector<double> simulate_ar_garch(const ArGarchParams& p, int T, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> r(T);
  double sig2 = p.omega / (1.0 - p.a - p.b);
  double eps = 0.0;
  double prev = 0.0;
  for (int t = 0; t < T; ++t) {
    sig2 = p.omega + p.a * eps * eps + p.b * sig2;
    eps = std::sqrt(sig2) * normal(eng);
    r[t] = p.c + p.phi * prev + eps;
    prev = r[t];
  }
  return r;
}

}  // namespace

TEST_CASE("simulate-then-fit recovers the generating parameters", "[garch][slow]") {
  ArGarchParams truth;
  truth.c = 0.0;
  truth.phi = 0.2;
  truth.omega = 0.05;
  truth.a = 0.1;
  truth.b = 0.8;
  const auto r = simulate_ar_garch(truth, 20000, 42);
  const ArGarchFit fit = fit_ar1_garch11(r);
  CHECK(fit.converged);
  CHECK(std::abs(fit.params.phi - truth.phi) < 0.05);
  CHECK(std::abs(fit.params.a - truth.a) < 0.05);
  CHECK(std::abs(fit.params.b - truth.b) < 0.05);
  CHECK(std::abs(fit.params.c - truth.c) < 0.05);
}

TEST_CASE("iid input leaves little for the GARCH terms", "[garch]") {
  std::mt19937_64 eng(7);
  std::normal_distribution<double> normal;
  std::vector<double> r(4000);
  for (auto& v : r) v = normal(eng);
  const ArGarchFit fit = fit_ar1_garch11(r);

  // Either the volatility terms nearly vanish, or the likelihood gain over
  // the constant-variance model is negligible.
  ArGarchParams constant = fit.params;
  constant.a = 0.0;
  constant.b = 0.0;
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= r.size();
  double var = 0.0;
  for (double v : r) var += (v - mean) * (v - mean);
  var /= r.size();
  constant.c = mean;
  constant.phi = 0.0;
  constant.omega = var;
  const double ll_const = detail::ar_garch_loglik(r, constant);
  CHECK((fit.params.a + fit.params.b < 0.15 || fit.loglik - ll_const < 2.0));
}

TEST_CASE("constant series is rejected", "[garch]") {
  const std::vector<double> flat(100, 1.25);
  CHECK_THROWS_AS(fit_ar1_garch11(flat), std::invalid_argument);
  CHECK_THROWS_AS(fit_ar1_garch11(std::vector<double>(10, 0.0)), std::invalid_argument);
}

TEST_CASE("fit is deterministic", "[garch]") {
  const auto r = simulate_ar_garch(ArGarchParams{0.01, 0.1, 0.02, 0.05, 0.9}, 2000, 9);
  const ArGarchFit a = fit_ar1_garch11(r);
  const ArGarchFit b = fit_ar1_garch11(r);
  CHECK(a.params.c == b.params.c);
  CHECK(a.params.phi == b.params.phi);
  CHECK(a.params.omega == b.params.omega);
  CHECK(a.params.a == b.params.a);
  CHECK(a.params.b == b.params.b);
  CHECK(a.loglik == b.loglik);
}

TEST_CASE("fitted likelihood beats the starting point", "[garch]") {
  const auto r = simulate_ar_garch(ArGarchParams{0.0, 0.3, 0.1, 0.15, 0.7}, 3000, 33);
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= r.size();
  double var = 0.0;
  for (double v : r) var += (v - mean) * (v - mean);
  var /= r.size();
  ArGarchParams start;
  start.c = mean;
  start.phi = 0.0;
  start.omega = 0.1 * var;
  start.a = 0.05;
  start.b = 0.9;
  const ArGarchFit fit = fit_ar1_garch11(r);
  CHECK(fit.loglik >= detail::ar_garch_loglik(r, start));
}

TEST_CASE("standardized residuals", "[garch]") {
  SECTION("constant-variance reduction scales by sqrt(omega)") {
    std::mt19937_64 eng(5);
    std::normal_distribution<double> normal;
    std::vector<double> r(200);
    for (auto& v : r) v = normal(eng);
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= r.size();
    double var = 0.0;
    for (double v : r) var += (v - mean) * (v - mean);
    var /= r.size();
    ArGarchParams p;
    p.c = 0.0;
    p.phi = 0.0;
    p.omega = var;
    p.a = 0.0;
    p.b = 0.0;
    const auto z = standardized_residuals(r, p);
    REQUIRE(z.size() == r.size() - 1);
    for (std::size_t t = 1; t < r.size(); ++t) {
      CHECK(z[t - 1] == Catch::Approx(r[t] / std::sqrt(var)));
    }
  }
  SECTION("known-parameter simulation gives unit-variance residuals") {
    ArGarchParams truth;
    truth.c = 0.0;
    truth.phi = 0.2;
    truth.omega = 0.05;
    truth.a = 0.1;
    truth.b = 0.8;
    const auto r = simulate_ar_garch(truth, 20000, 11);
    const auto z = standardized_residuals(r, truth);
    double m = 0.0;
    for (double v : z) m += v;
    m /= z.size();
    double var = 0.0;
    for (double v : z) var += (v - m) * (v - m);
    var /= z.size();
    CHECK(std::abs(var - 1.0) < 0.05);
  }
  SECTION("raw residuals skip the scaling") {
    std::vector<double> r = {0.1, 0.3, -0.2, 0.4, 0.0};
    ArGarchParams p;
    p.c = 0.1;
    p.phi = 0.5;
    p.omega = 0.2;
    p.a = 0.1;
    p.b = 0.2;
    const auto raw = standardized_residuals(r, p, false);
    REQUIRE(raw.size() == 4);
    CHECK(raw[0] == Catch::Approx(0.3 - 0.1 - 0.5 * 0.1));
  }
  SECTION("invalid parameters are rejected") {
    std::vector<double> r = {0.1, 0.2, 0.3};
    ArGarchParams p;
    p.omega = 0.1;
    p.a = 0.6;
    p.b = 0.5;  // a + b >= 1
    CHECK_THROWS_AS(standardized_residuals(r, p), std::invalid_argument);
  }
}

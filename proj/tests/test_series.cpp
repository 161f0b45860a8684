// Trend fitting and ratio estimation against hand computations and an
// independent QR least-squares solve.
#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "trendratio/series.hpp"

using namespace trendratio;

namespace {

TrendSeries make_series(const Eigen::VectorXd& v, const std::string& label = "s") {
  return TrendSeries{label, v};
}

PairSystem linear_pair_system(int T, double b1, double b2, double noise1,
                              double noise2, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd y1(T), y2(T);
  for (int t = 0; t < T; ++t) {
    y1[t] = 0.3 + b1 * (t + 1) + noise1 * nd(gen);
    y2[t] = -1.1 + b2 * (t + 1) + noise2 * nd(gen);
  }
  PairSystem sys;
  sys.pairs.push_back({make_series(y1, "num"), make_series(y2, "den")});
  return sys;
}

}  // namespace

TEST_CASE("trend_sum_squares closed form matches the summation loop") {
  for (int T : {2, 3, 4, 10, 67, 100, 251}) {
    CHECK(trend_sum_squares(T) == doctest::Approx(oracle::trend_sum_squares_loop(T)).epsilon(1e-14));
  }
  // Frozen spot values from the summation loop.
  CHECK(trend_sum_squares(3) == doctest::Approx(2.0));
  CHECK(trend_sum_squares(2) == doctest::Approx(0.5));
  CHECK(trend_sum_squares(67) == doctest::Approx(25058.0));
  CHECK_THROWS_AS(trend_sum_squares(1), std::invalid_argument);
}

TEST_CASE("ols_trend reproduces the hand-computed four-point fit") {
  Eigen::VectorXd y(4);
  y << 1.0, 3.0, 2.0, 5.0;
  const TrendFit fit = ols_trend(y);
  CHECK(fit.slope == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  // Residuals orthogonal to both regressors.
  CHECK(std::abs(fit.residuals.sum()) < 1e-12);
  double tdot = 0.0;
  for (int t = 0; t < 4; ++t) tdot += (t + 1) * fit.residuals[t];
  CHECK(std::abs(tdot) < 1e-12);
}

TEST_CASE("ols_trend agrees with an independent QR least-squares solve") {
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    const Eigen::MatrixXd u = oracle::ar1_matrix(83, 1, 0.6, seed);
    Eigen::VectorXd y = u.col(0);
    for (int t = 0; t < y.size(); ++t) y[t] += 2.5 - 0.07 * (t + 1);
    const TrendFit fit = ols_trend(y);
    const Eigen::Vector2d qr = oracle::ols_trend_qr(y);
    CHECK(fit.intercept == doctest::Approx(qr[0]).epsilon(1e-10));
    CHECK(fit.slope == doctest::Approx(qr[1]).epsilon(1e-10));
  }
}

TEST_CASE("ols_trend rejects short or non-finite input") {
  Eigen::VectorXd shorty(3);
  shorty << 1, 2, 3;
  CHECK_THROWS_AS(ols_trend(shorty), std::invalid_argument);
  Eigen::VectorXd bad(5);
  bad << 1, 2, std::nan(""), 4, 5;
  CHECK_THROWS_AS(ols_trend(bad), std::invalid_argument);
}

TEST_CASE("iv_system ratio equals the ratio of OLS slopes") {
  for (unsigned seed : {11u, 12u, 13u}) {
    PairSystem sys = linear_pair_system(120, 0.04, 0.11, 0.8, 1.3, seed);
    const RatioFit fit = iv_system(sys);
    const double b1 = fit.slopes[0].numerator.slope;
    const double b2 = fit.slopes[0].denominator.slope;
    CHECK(fit.theta[0] == doctest::Approx(b1 / b2).epsilon(1e-12));
    CHECK_FALSE(fit.any_degenerate());
  }
}

TEST_CASE("iv_system residual identities") {
  PairSystem sys = linear_pair_system(90, 0.02, 0.05, 1.0, 0.7, 21u);
  const RatioFit fit = iv_system(sys);
  const Eigen::Index T = fit.T;
  // Columns sum to zero and are orthogonal to the centered trend.
  CHECK(std::abs(fit.residuals.col(0).sum()) < 1e-9);
  double tdot = 0.0;
  const double tbar = (T + 1) / 2.0;
  for (Eigen::Index t = 0; t < T; ++t) tdot += (t + 1 - tbar) * fit.residuals(t, 0);
  const double scale = fit.residuals.col(0).cwiseAbs().maxCoeff() * trend_sum_squares(T);
  CHECK(std::abs(tdot) < 1e-10 * scale);
}

TEST_CASE("noiseless pair recovers the exact ratio with zero residuals") {
  const int T = 40;
  Eigen::VectorXd y1(T), y2(T);
  for (int t = 0; t < T; ++t) {
    y1[t] = 1.0 + 0.21 * (t + 1);
    y2[t] = -2.0 + 0.7 * (t + 1);
  }
  PairSystem sys;
  sys.pairs.push_back({make_series(y1), make_series(y2)});
  const RatioFit fit = iv_system(sys);
  CHECK(fit.theta[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fit.residuals.col(0).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("flat denominator is flagged, not divided") {
  const int T = 50;
  Eigen::VectorXd y1(T), y2(T);
  std::mt19937_64 gen(99);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int t = 0; t < T; ++t) {
    y1[t] = 0.5 * (t + 1) + nd(gen);
    y2[t] = 4.0;  // exactly constant: zero trend sum
  }
  PairSystem sys;
  sys.pairs.push_back({make_series(y1), make_series(y2, "flat")});
  const RatioFit fit = iv_system(sys);
  REQUIRE(fit.degenerate.size() == 1);
  CHECK(fit.degenerate[0]);
  CHECK_FALSE(std::isfinite(fit.theta[0]));
}

TEST_CASE("pair system validation") {
  Eigen::VectorXd a(6), b(5);
  a.setOnes();
  b.setOnes();
  PairSystem sys;
  sys.pairs.push_back({make_series(a), make_series(b)});
  CHECK_THROWS_AS(sys.length(), std::invalid_argument);
  PairSystem empty;
  CHECK_THROWS_AS(empty.length(), std::invalid_argument);
  CHECK_THROWS_AS(iv_system(empty), std::invalid_argument);
}

TEST_CASE("intercept shifts leave the ratio fit unchanged") {
  PairSystem sys = linear_pair_system(75, 0.03, 0.09, 0.9, 1.1, 31u);
  const RatioFit base = iv_system(sys);
  PairSystem shifted = sys;
  shifted.pairs[0].numerator.values.array() += 17.25;
  shifted.pairs[0].denominator.values.array() -= 6.5;
  const RatioFit moved = iv_system(shifted);
  CHECK(moved.theta[0] == doctest::Approx(base.theta[0]).epsilon(1e-12));
  CHECK((moved.residuals - base.residuals).cwiseAbs().maxCoeff() <
        1e-12 * (1.0 + base.residuals.cwiseAbs().maxCoeff()));
}

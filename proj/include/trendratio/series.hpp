// series.hpp - linear-trend fits and trend-slope ratio estimation
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace trendratio {

// A single observed time series on the regular grid t = 1..T.
struct TrendSeries {
  std::string label;
  Eigen::VectorXd values;
};

// Two series whose trend-slope ratio theta = slope(numerator)/slope(denominator)
// is the object of interest.
struct TrendPair {
  TrendSeries numerator;
  TrendSeries denominator;
};

// A system of pairs sharing one time grid.
struct PairSystem {
  std::vector<TrendPair> pairs;
  Eigen::Index length() const;  // common T; validates coherence
};

// Least-squares fit of y_t = a + b t + u_t.
struct TrendFit {
  double intercept = 0.0;
  double slope = 0.0;
  Eigen::VectorXd residuals;
};

struct PairSlopes {
  TrendFit numerator;
  TrendFit denominator;
};

// Ratio estimates and the residuals the robust variance estimators consume.
struct RatioFit {
  Eigen::VectorXd theta;         // per-pair slope ratio (NaN where degenerate)
  Eigen::VectorXd denom_sums;    // per-pair sum (t - tbar) (y2_t - y2bar)
  Eigen::MatrixXd residuals;     // T x n, column i = y1 - y1bar - theta_i (y2 - y2bar)
  std::vector<PairSlopes> slopes;
  std::vector<bool> degenerate;  // true where the denominator trend is numerically flat
  Eigen::Index T = 0;
  bool any_degenerate() const;
};

// Sum of squared centered trend regressors, sum_{t=1}^{T} (t - (T+1)/2)^2
// = T (T^2 - 1) / 12.  Throws for T < 2.
double trend_sum_squares(Eigen::Index T);

// OLS fit of an intercept + linear trend.  Requires length >= 4 and all
// finite values; throws std::invalid_argument otherwise.
TrendFit ols_trend(Eigen::Ref<const Eigen::VectorXd> y);
TrendFit ols_trend(const TrendSeries& s);

// Instrumental-variable style ratio estimation for every pair in the system.
// theta_i equals the ratio of the pair's OLS trend slopes; pairs whose
// denominator trend sum is numerically zero are flagged instead of throwing.
RatioFit iv_system(const PairSystem& sys);

// Throws std::invalid_argument when the series is unusable (length < 4 or
// non-finite entries); used by every entry point that accepts raw data.
void validate_series(const TrendSeries& s);

}  // namespace trendratio

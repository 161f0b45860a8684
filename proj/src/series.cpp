// series.cpp - trend fits and the slope-ratio system estimator
#include "trendratio/series.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace trendratio {

namespace {

// Centered trend regressor t - (T+1)/2 for t = 1..T.
Eigen::VectorXd centered_trend(Eigen::Index T) {
  Eigen::VectorXd d(T);
  const double tbar = 0.5 * static_cast<double>(T + 1);
  for (Eigen::Index t = 0; t < T; ++t) d[t] = static_cast<double>(t + 1) - tbar;
  return d;
}

}  // namespace

void validate_series(const TrendSeries& s) {
  if (s.values.size() < 4)
    throw std::invalid_argument("series '" + s.label + "' has fewer than 4 observations");
  if (!s.values.allFinite())
    throw std::invalid_argument("series '" + s.label + "' contains non-finite values");
}

Eigen::Index PairSystem::length() const {
  if (pairs.empty()) throw std::invalid_argument("pair system is empty");
  const Eigen::Index T = pairs.front().numerator.values.size();
  for (const auto& p : pairs) {
    validate_series(p.numerator);
    validate_series(p.denominator);
    if (p.numerator.values.size() != T || p.denominator.values.size() != T)
      throw std::invalid_argument("pair system series have unequal lengths");
  }
  return T;
}

bool RatioFit::any_degenerate() const {
  for (bool d : degenerate)
    if (d) return true;
  return false;
}

double trend_sum_squares(Eigen::Index T) {
  if (T < 2) throw std::invalid_argument("trend_sum_squares requires T >= 2");
  const double n = static_cast<double>(T);
  return n * (n * n - 1.0) / 12.0;
}

TrendFit ols_trend(Eigen::Ref<const Eigen::VectorXd> y) {
  const Eigen::Index T = y.size();
  if (T < 4) throw std::invalid_argument("ols_trend requires at least 4 observations");
  if (!y.allFinite()) throw std::invalid_argument("ols_trend input contains non-finite values");

  const Eigen::VectorXd d = centered_trend(T);
  const double ybar = y.mean();
  const double tbar = 0.5 * static_cast<double>(T + 1);

  // slope = sum (t - tbar)(y_t - ybar) / sum (t - tbar)^2
  const double slope = d.dot(((y.array() - ybar).matrix())) / trend_sum_squares(T);

  TrendFit fit;
  fit.slope = slope;
  fit.intercept = ybar - slope * tbar;
  fit.residuals = (y.array() - ybar).matrix() - slope * d;
  return fit;
}

TrendFit ols_trend(const TrendSeries& s) {
  validate_series(s);
  return ols_trend(s.values);
}

RatioFit iv_system(const PairSystem& sys) {
  const Eigen::Index T = sys.length();
  const Eigen::Index n = static_cast<Eigen::Index>(sys.pairs.size());
  const Eigen::VectorXd d = centered_trend(T);

  RatioFit fit;
  fit.T = T;
  fit.theta.resize(n);
  fit.denom_sums.resize(n);
  fit.residuals.resize(T, n);
  fit.slopes.resize(static_cast<std::size_t>(n));
  fit.degenerate.assign(static_cast<std::size_t>(n), false);

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pair = sys.pairs[static_cast<std::size_t>(i)];
    const Eigen::VectorXd y1c = pair.numerator.values.array() - pair.numerator.values.mean();
    const Eigen::VectorXd y2c = pair.denominator.values.array() - pair.denominator.values.mean();

    const double num_sum = d.dot(y1c);
    const double den_sum = d.dot(y2c);
    fit.denom_sums[i] = den_sum;

    // The denominator trend is numerically flat when its trend sum is zero
    // relative to the scale of the series; flag it so callers can warn
    // instead of dividing into noise.
    const double scale = std::sqrt(y2c.squaredNorm() / static_cast<double>(T));
    const double tol = 1e-12 * trend_sum_squares(T) * scale;
    const bool flat = std::abs(den_sum) <= tol;
    fit.degenerate[static_cast<std::size_t>(i)] = flat;

    const double theta = flat ? std::numeric_limits<double>::quiet_NaN() : num_sum / den_sum;
    fit.theta[i] = theta;
    fit.residuals.col(i) = y1c - theta * y2c;

    fit.slopes[static_cast<std::size_t>(i)].numerator = ols_trend(pair.numerator.values);
    fit.slopes[static_cast<std::size_t>(i)].denominator = ols_trend(pair.denominator.values);
  }
  return fit;
}

}  // namespace trendratio

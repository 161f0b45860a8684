// inference.hpp - robust tests and confidence sets for trend-slope ratios:
// Wald/t tests on linear restrictions, the slope-product equality test, and
// Fieller-type ratio confidence sets.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "trendratio/fixedb.hpp"
#include "trendratio/kernels.hpp"
#include "trendratio/lrv.hpp"
#include "trendratio/series.hpp"

namespace trendratio {

// Raised when a statistic cannot be formed (for example a singular robust
// covariance with a nonzero restriction value).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// H0: R theta = r with R of full row rank q <= n.
struct LinearHypothesis {
  Eigen::MatrixXd R;
  Eigen::VectorXd r;

  Eigen::Index restrictions() const { return R.rows(); }
};

// Convenience restriction theta_i - theta_j = 0 on an n-pair system.
LinearHypothesis ratio_equality(Eigen::Index n, Eigen::Index i, Eigen::Index j);

struct InferenceOptions {
  Kernel kernel = Kernel::Daniell;
  BandwidthRule bandwidth = BandwidthRule::andrews();
  double level = 0.05;         // two-sided for t-type statistics
  SimulationConfig sim;        // used when the critical value must be simulated
  CvCache* cache = nullptr;    // optional store for simulated critical values
};

// Wald test of R theta = r using the instrumental-variable ratio system.
struct WaldTest {
  double statistic = 0.0;            // compared on the Wald scale
  CriticalValue cv;
  bool reject = false;
  Eigen::VectorXd theta;             // per-pair ratio estimates (NaN if flagged)
  LrvEstimate lrv;                   // robust covariance actually used
  bool degenerate = false;
  std::string note;
};
WaldTest wald_iv(const RatioFit& fit, const LinearHypothesis& hyp,
                 const InferenceOptions& opts = {});

// t test of a single restriction c' theta = r; also reports the symmetric
// confidence interval for c' theta at the same level.
struct TTest {
  double statistic = 0.0;
  double estimate = 0.0;             // c' theta
  double se = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  CriticalValue cv;
  bool reject = false;
  Eigen::VectorXd theta;
  LrvEstimate lrv;
  bool degenerate = false;
  std::string note;
};
TTest t_iv(const RatioFit& fit, const Eigen::RowVectorXd& c, double r,
           const InferenceOptions& opts = {});

// Slope-product equality test of theta_i = theta_j that avoids dividing by
// the denominator slopes: g = b1_i b2_j - b1_j b2_i with a delta-method
// long-run variance from the four trend-regression residual series.
struct ProductTest {
  double statistic = 0.0;
  double g = 0.0;                    // slope-product difference
  double lambda_sq = 0.0;            // delta-method long-run variance of g
  CriticalValue cv;
  bool reject = false;
  LrvEstimate lrv;
  bool degenerate = false;
  std::string note;
};
ProductTest product_test(const PairSystem& sys, Eigen::Index i, Eigen::Index j,
                         const InferenceOptions& opts = {});

// Fieller confidence set for a single ratio: inverts the family of t tests
// of b1 - theta0 b2 = 0, whose acceptance region is a quadratic in theta0.
struct FiellerSet {
  enum class Shape { Interval, UnionOfRays, WholeLine, Empty };
  Shape shape = Shape::Interval;
  // Interval: [lower, upper] (either end may be infinite).
  // UnionOfRays: (-inf, lower] U [upper, inf).
  double lower = 0.0;
  double upper = 0.0;
  double theta = 0.0;                // point estimate (NaN when degenerate)
  CriticalValue cv;
  LrvEstimate lrv;
  bool degenerate = false;
  std::string note;
};
FiellerSet fieller_ci(const TrendPair& pair, const InferenceOptions& opts = {});

// Robust confidence interval for a single trend slope.
struct SlopeInference {
  double slope = 0.0;
  double se = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  CriticalValue cv;
  LrvEstimate lrv;
};
SlopeInference slope_ci(const TrendSeries& s, const InferenceOptions& opts = {});

const char* to_string(FiellerSet::Shape shape);

}  // namespace trendratio

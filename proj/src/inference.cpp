// inference.cpp - robust Wald/t tests, the slope-product statistic, Fieller
// sets, and slope confidence intervals.
#include "trendratio/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace trendratio {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_hypothesis(const LinearHypothesis& hyp, Eigen::Index n) {
  const Eigen::Index q = hyp.R.rows();
  if (hyp.R.cols() != n)
    throw std::invalid_argument("restriction matrix has wrong column count");
  if (hyp.r.size() != q)
    throw std::invalid_argument("restriction value has wrong length");
  if (q < 1 || q > n)
    throw std::invalid_argument("restriction count must lie in [1, n]");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(hyp.R);
  const double tol = 1e-12 * svd.singularValues().maxCoeff();
  if ((svd.singularValues().array() > tol).count() < q)
    throw std::invalid_argument("restriction matrix is rank deficient");
}

// Restriction-aware view of the ratio system: degenerate pairs are dropped
// when the restriction ignores them and block the test when it does not.
struct Prepared {
  bool blocked = false;
  std::string note;
  std::vector<Eigen::Index> cols;  // usable pair indices
  Eigen::MatrixXd Rv;              // restriction on the usable pairs
  Eigen::VectorXd theta_v;
  Eigen::MatrixXd V;               // robust covariance of theta over usable pairs
  LrvEstimate om;
  double sst = 0.0;
};

Prepared prepare(const RatioFit& fit, const Eigen::MatrixXd& R,
                 const InferenceOptions& opts) {
  Prepared pre;
  const Eigen::Index n = fit.theta.size();
  for (Eigen::Index p = 0; p < n; ++p) {
    if (!fit.degenerate[static_cast<std::size_t>(p)]) {
      pre.cols.push_back(p);
      continue;
    }
    if (R.col(p).cwiseAbs().maxCoeff() > 0.0) {
      pre.blocked = true;
      std::ostringstream msg;
      msg << "restriction involves pair " << p
          << " whose denominator trend is numerically flat";
      pre.note = msg.str();
      return pre;
    }
  }
  if (pre.cols.empty()) {
    pre.blocked = true;
    pre.note = "no usable pairs: every denominator trend is numerically flat";
    return pre;
  }

  const Eigen::Index nv = static_cast<Eigen::Index>(pre.cols.size());
  Eigen::MatrixXd E(fit.T, nv);
  pre.Rv.resize(R.rows(), nv);
  pre.theta_v.resize(nv);
  Eigen::VectorXd denom(nv);
  for (Eigen::Index c = 0; c < nv; ++c) {
    const Eigen::Index p = pre.cols[static_cast<std::size_t>(c)];
    E.col(c) = fit.residuals.col(p);
    pre.Rv.col(c) = R.col(p);
    pre.theta_v[c] = fit.theta[p];
    denom[c] = fit.denom_sums[p];
  }

  const double M = opts.bandwidth.resolve(E, opts.kernel);
  pre.om = lrv(E, opts.kernel, M);
  pre.sst = trend_sum_squares(fit.T);
  const Eigen::VectorXd dinv = denom.cwiseInverse();
  pre.V = pre.sst * dinv.asDiagonal() * pre.om.omega * dinv.asDiagonal();
  return pre;
}

CriticalValue resolve_cv(const InferenceOptions& opts, double b, int q) {
  return critical_value(opts.kernel, b, opts.level, q, opts.sim, opts.cache);
}

}  // namespace

LinearHypothesis ratio_equality(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  if (n < 2 || i < 0 || j < 0 || i >= n || j >= n || i == j)
    throw std::invalid_argument("ratio equality needs two distinct pair indices");
  LinearHypothesis hyp;
  hyp.R = Eigen::MatrixXd::Zero(1, n);
  hyp.R(0, i) = 1.0;
  hyp.R(0, j) = -1.0;
  hyp.r = Eigen::VectorXd::Zero(1);
  return hyp;
}

WaldTest wald_iv(const RatioFit& fit, const LinearHypothesis& hyp,
                 const InferenceOptions& opts) {
  validate_hypothesis(hyp, fit.theta.size());
  WaldTest out;
  out.theta = fit.theta;

  const Prepared pre = prepare(fit, hyp.R, opts);
  if (pre.blocked) {
    out.statistic = kNan;
    out.degenerate = true;
    out.note = pre.note;
    return out;
  }
  out.lrv = pre.om;

  const Eigen::VectorXd g = pre.Rv * pre.theta_v - hyp.r;
  const Eigen::MatrixXd mid = pre.Rv * pre.V * pre.Rv.transpose();
  const int q = static_cast<int>(hyp.R.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mid);
  const double max_eig = es.eigenvalues().cwiseAbs().maxCoeff();
  const double tol = 1e-12 * std::max(max_eig, 1e-300);
  if (es.eigenvalues().minCoeff() <= tol) {
    if (g.lpNorm<Eigen::Infinity>() == 0.0) {
      out.statistic = 0.0;
      out.degenerate = true;
      out.note = "restriction value and its robust variance are both zero";
      out.cv = resolve_cv(opts, pre.om.b, q);
      out.reject = false;
      return out;
    }
    std::ostringstream msg;
    msg << "robust covariance of the restriction is singular while R theta - r = ["
        << g.transpose() << "] is nonzero";
    throw numerical_error(msg.str());
  }

  const Eigen::VectorXd w = es.eigenvectors().transpose() * g;
  out.statistic = (w.array().square() / es.eigenvalues().array()).sum();
  out.cv = resolve_cv(opts, pre.om.b, q);
  out.reject = out.statistic > out.cv.wald_value();
  return out;
}

TTest t_iv(const RatioFit& fit, const Eigen::RowVectorXd& c, double r,
           const InferenceOptions& opts) {
  if (c.size() != fit.theta.size())
    throw std::invalid_argument("restriction vector has wrong length");
  if (c.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("restriction vector is zero");

  TTest out;
  out.theta = fit.theta;

  const Prepared pre = prepare(fit, c, opts);
  if (pre.blocked) {
    out.statistic = kNan;
    out.estimate = kNan;
    out.se = kNan;
    out.ci_lower = kNan;
    out.ci_upper = kNan;
    out.degenerate = true;
    out.note = pre.note;
    return out;
  }
  out.lrv = pre.om;

  out.estimate = (pre.Rv * pre.theta_v).value();
  const double var = (pre.Rv * pre.V * pre.Rv.transpose()).value();
  out.se = var > 0.0 ? std::sqrt(var) : 0.0;
  out.cv = resolve_cv(opts, pre.om.b, 1);

  const double diff = out.estimate - r;
  if (out.se == 0.0) {
    out.degenerate = true;
    if (diff == 0.0) {
      out.statistic = 0.0;
      out.reject = false;
      out.note = "restriction value and its robust variance are both zero";
    } else {
      out.statistic = diff > 0.0 ? kInf : -kInf;
      out.reject = true;
      out.note = "robust variance is zero while the restriction value is not";
    }
    out.ci_lower = out.estimate;
    out.ci_upper = out.estimate;
    return out;
  }

  out.statistic = diff / out.se;
  out.reject = std::abs(out.statistic) > out.cv.value;
  out.ci_lower = out.estimate - out.cv.value * out.se;
  out.ci_upper = out.estimate + out.cv.value * out.se;
  return out;
}

ProductTest product_test(const PairSystem& sys, Eigen::Index i, Eigen::Index j,
                         const InferenceOptions& opts) {
  const Eigen::Index n = static_cast<Eigen::Index>(sys.pairs.size());
  if (i < 0 || j < 0 || i >= n || j >= n || i == j)
    throw std::invalid_argument("product test needs two distinct pair indices");
  const Eigen::Index T = sys.length();

  const TrendFit f1i = ols_trend(sys.pairs[static_cast<std::size_t>(i)].numerator);
  const TrendFit f1j = ols_trend(sys.pairs[static_cast<std::size_t>(j)].numerator);
  const TrendFit f2i = ols_trend(sys.pairs[static_cast<std::size_t>(i)].denominator);
  const TrendFit f2j = ols_trend(sys.pairs[static_cast<std::size_t>(j)].denominator);

  Eigen::MatrixXd U(T, 4);
  U.col(0) = f1i.residuals;
  U.col(1) = f1j.residuals;
  U.col(2) = f2i.residuals;
  U.col(3) = f2j.residuals;

  ProductTest out;
  out.g = f1i.slope * f2j.slope - f1j.slope * f2i.slope;
  Eigen::Vector4d grad(f2j.slope, -f2i.slope, -f1j.slope, f1i.slope);

  // The variance of g is the long-run variance of the scalar combination
  // grad' U_t, so the bandwidth search runs on that series rather than on
  // the four residual columns separately.
  const Eigen::MatrixXd v = U * grad;
  const double M = opts.bandwidth.resolve(v, opts.kernel);
  out.lrv = lrv(v, opts.kernel, M);
  out.lambda_sq = std::max(0.0, out.lrv.omega(0, 0));
  out.cv = resolve_cv(opts, out.lrv.b, 1);

  const double sst = trend_sum_squares(T);
  if (out.lambda_sq == 0.0) {
    out.degenerate = true;
    if (out.g == 0.0) {
      out.statistic = 0.0;
      out.reject = false;
      out.note = "slope-product difference and its robust variance are both zero";
    } else {
      out.statistic = out.g > 0.0 ? kInf : -kInf;
      out.reject = true;
      out.note = "robust variance is zero while the slope-product difference is not";
    }
    return out;
  }

  out.statistic = out.g * std::sqrt(sst / out.lambda_sq);
  out.reject = std::abs(out.statistic) > out.cv.value;
  return out;
}

FiellerSet fieller_ci(const TrendPair& pair, const InferenceOptions& opts) {
  validate_series(pair.numerator);
  validate_series(pair.denominator);
  if (pair.numerator.values.size() != pair.denominator.values.size())
    throw std::invalid_argument("pair series have different lengths");
  const Eigen::Index T = pair.numerator.values.size();

  const TrendFit f1 = ols_trend(pair.numerator);
  const TrendFit f2 = ols_trend(pair.denominator);
  Eigen::MatrixXd U(T, 2);
  U.col(0) = f1.residuals;
  U.col(1) = f2.residuals;

  FiellerSet out;
  const double M = opts.bandwidth.resolve(U, opts.kernel);
  out.lrv = lrv(U, opts.kernel, M);
  out.cv = resolve_cv(opts, out.lrv.b, 1);

  const double sst = trend_sum_squares(T);
  const double b1 = f1.slope;
  const double b2 = f2.slope;

  const Eigen::VectorXd y2 = pair.denominator.values;
  const Eigen::VectorXd y2c = y2.array() - y2.mean();
  const double flat_tol =
      1e-12 * sst * std::sqrt(y2c.squaredNorm() / static_cast<double>(T));
  if (std::abs(b2 * sst) <= flat_tol) {
    out.degenerate = true;
    out.theta = kNan;
    out.note = "denominator trend is numerically flat; ratio point estimate unavailable";
  } else {
    out.theta = b1 / b2;
  }

  const double c = out.cv.value * out.cv.value / sst;
  const double w11 = out.lrv.omega(0, 0);
  const double w12 = out.lrv.omega(0, 1);
  const double w22 = out.lrv.omega(1, 1);
  const double A = b2 * b2 - c * w22;
  const double B = -2.0 * b1 * b2 + 2.0 * c * w12;
  const double C = b1 * b1 - c * w11;

  const double scale_a = std::max(b2 * b2, std::abs(c * w22));
  const double scale_b = std::max(std::abs(2.0 * b1 * b2), std::abs(2.0 * c * w12));
  if (std::abs(A) <= 1e-13 * scale_a) {
    // Boundary case: the acceptance region is linear in theta0.
    if (std::abs(B) <= 1e-13 * std::max(scale_b, 1e-300)) {
      out.shape = C <= 0.0 ? FiellerSet::Shape::WholeLine : FiellerSet::Shape::Empty;
      out.lower = -kInf;
      out.upper = kInf;
      return out;
    }
    out.shape = FiellerSet::Shape::Interval;
    if (B > 0.0) {
      out.lower = -kInf;
      out.upper = -C / B;
    } else {
      out.lower = -C / B;
      out.upper = kInf;
    }
    return out;
  }

  if (out.lrv.omega.norm() == 0.0) {
    out.degenerate = true;
    if (out.note.empty())
      out.note = "zero long-run variance; the set collapses to the point estimate";
  }

  const double disc = B * B - 4.0 * A * C;
  if (A > 0.0) {
    if (disc < 0.0) {
      out.shape = FiellerSet::Shape::Empty;
      out.lower = kNan;
      out.upper = kNan;
      return out;
    }
    // disc == 0 is the vanishing-noise boundary: a single-point interval.
    const double center = -B / (2.0 * A);
    const double half = std::sqrt(disc) / (2.0 * std::abs(A));
    out.shape = FiellerSet::Shape::Interval;
    out.lower = center - half;
    out.upper = center + half;
    return out;
  }
  if (disc <= 0.0) {
    out.shape = FiellerSet::Shape::WholeLine;
    out.lower = -kInf;
    out.upper = kInf;
    return out;
  }
  const double center = -B / (2.0 * A);
  const double half = std::sqrt(disc) / (2.0 * std::abs(A));
  out.shape = FiellerSet::Shape::UnionOfRays;
  out.lower = center - half;
  out.upper = center + half;
  return out;
}

SlopeInference slope_ci(const TrendSeries& s, const InferenceOptions& opts) {
  validate_series(s);
  const TrendFit fit = ols_trend(s);
  Eigen::MatrixXd U(fit.residuals.size(), 1);
  U.col(0) = fit.residuals;

  SlopeInference out;
  out.slope = fit.slope;
  const double M = opts.bandwidth.resolve(U, opts.kernel);
  out.lrv = lrv(U, opts.kernel, M);
  out.cv = resolve_cv(opts, out.lrv.b, 1);
  const double sst = trend_sum_squares(fit.residuals.size());
  const double var = out.lrv.omega(0, 0) / sst;
  out.se = var > 0.0 ? std::sqrt(var) : 0.0;
  out.ci_lower = out.slope - out.cv.value * out.se;
  out.ci_upper = out.slope + out.cv.value * out.se;
  return out;
}

const char* to_string(FiellerSet::Shape shape) {
  switch (shape) {
    case FiellerSet::Shape::Interval: return "interval";
    case FiellerSet::Shape::UnionOfRays: return "union-of-rays";
    case FiellerSet::Shape::WholeLine: return "whole-line";
    case FiellerSet::Shape::Empty: return "empty";
  }
  return "unknown";
}

}  // namespace trendratio

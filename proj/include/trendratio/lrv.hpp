// lrv.hpp - kernel-weighted long-run variance estimation and bandwidth rules
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "trendratio/kernels.hpp"

namespace trendratio {

// Result of a long-run variance estimation, with the bandwidth actually used.
struct LrvEstimate {
  Eigen::MatrixXd omega;      // m x m weighted covariance sum
  double bandwidth = 0.0;     // M, in observations (possibly fractional)
  double b = 0.0;             // M / T
  Kernel kernel = Kernel::Daniell;
};

// Sample autocovariance Gamma_j = T^{-1} sum_{t=j+1}^{T} u_t u_{t-j}' with
// the full-sample divisor T.  Rows of u are time, columns are components.
Eigen::MatrixXd autocovariance(Eigen::Ref<const Eigen::MatrixXd> u, Eigen::Index lag);

// All lags 0..T-1 in one pass; entry [j] is Gamma_j.
std::vector<Eigen::MatrixXd> autocovariances(Eigen::Ref<const Eigen::MatrixXd> u);

// Omega = Gamma_0 + sum_{j>=1} k(j/M) (Gamma_j + Gamma_j').
// Requires 0 < M <= T; bandwidth may be fractional.
LrvEstimate lrv(Eigen::Ref<const Eigen::MatrixXd> u, Kernel k, double bandwidth);

// Same weighted sum assembled from precomputed autocovariances (hot loops
// reuse the Gamma_j across several bandwidths).
LrvEstimate lrv_from_autocovariances(const std::vector<Eigen::MatrixXd>& gammas,
                                     Eigen::Index T, Kernel k, double bandwidth);

// AR(1) plug-in bandwidth: each column gets a least-squares AR(1) fit
// (rho, innovation variance), the fits are pooled into the usual curvature
// ratio alpha(q) with unit weights, and the bandwidth is
// c_k (alpha(q) T)^(1/(2q+1)) clamped to [1, T].
double andrews_bandwidth(Eigen::Ref<const Eigen::MatrixXd> u, Kernel k);

// Bandwidth policy: either a fixed fraction b of the sample size (M = b T)
// or the data-driven AR(1) plug-in rule.
class BandwidthRule {
 public:
  static BandwidthRule fixed_fraction(double b);
  static BandwidthRule andrews();

  // Resolves to a concrete bandwidth M for the given residual matrix.
  double resolve(Eigen::Ref<const Eigen::MatrixXd> u, Kernel k) const;

  bool is_andrews() const { return andrews_; }
  double fraction() const;     // only valid for fixed-fraction rules
  std::string label() const;   // "a91" or "b<fraction>"

 private:
  BandwidthRule(bool andrews, double fraction) : andrews_(andrews), fraction_(fraction) {}
  bool andrews_ = false;
  double fraction_ = 0.0;
};

}  // namespace trendratio

// lrv.cpp - weighted covariance sums and the AR(1) plug-in bandwidth
#include "trendratio/lrv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace trendratio {

Eigen::MatrixXd autocovariance(Eigen::Ref<const Eigen::MatrixXd> u, Eigen::Index lag) {
  const Eigen::Index T = u.rows();
  if (T < 1) throw std::invalid_argument("autocovariance: empty residual matrix");
  if (lag < 0 || lag >= T) throw std::invalid_argument("autocovariance: lag out of range");
  // Gamma_j(a,b) = T^{-1} sum_t u_{t,a} u_{t-j,b}
  return u.bottomRows(T - lag).transpose() * u.topRows(T - lag) / static_cast<double>(T);
}

std::vector<Eigen::MatrixXd> autocovariances(Eigen::Ref<const Eigen::MatrixXd> u) {
  const Eigen::Index T = u.rows();
  std::vector<Eigen::MatrixXd> gammas;
  gammas.reserve(static_cast<std::size_t>(T));
  for (Eigen::Index j = 0; j < T; ++j) gammas.push_back(autocovariance(u, j));
  return gammas;
}

LrvEstimate lrv_from_autocovariances(const std::vector<Eigen::MatrixXd>& gammas,
                                     Eigen::Index T, Kernel k, double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("lrv: bandwidth must be positive");
  if (bandwidth > static_cast<double>(T))
    throw std::invalid_argument("lrv: bandwidth exceeds the sample size");
  if (gammas.empty()) throw std::invalid_argument("lrv: no autocovariances");

  const bool compact = (k == Kernel::Bartlett || k == Kernel::Parzen);
  Eigen::MatrixXd omega = gammas[0];
  for (Eigen::Index j = 1; j < static_cast<Eigen::Index>(gammas.size()); ++j) {
    const double x = static_cast<double>(j) / bandwidth;
    if (compact && x >= 1.0) break;  // weights identically zero from here on
    const double w = kernel_weight(k, x);
    if (w == 0.0) continue;
    const auto& g = gammas[static_cast<std::size_t>(j)];
    omega.noalias() += w * (g + g.transpose());
  }

  LrvEstimate est;
  est.omega = std::move(omega);
  est.bandwidth = bandwidth;
  est.b = bandwidth / static_cast<double>(T);
  est.kernel = k;
  return est;
}

LrvEstimate lrv(Eigen::Ref<const Eigen::MatrixXd> u, Kernel k, double bandwidth) {
  return lrv_from_autocovariances(autocovariances(u), u.rows(), k, bandwidth);
}

double andrews_bandwidth(Eigen::Ref<const Eigen::MatrixXd> u, Kernel k) {
  const Eigen::Index T = u.rows();
  const Eigen::Index m = u.cols();
  if (T < 4) throw std::invalid_argument("andrews_bandwidth: need at least 4 observations");
  if (m < 1) throw std::invalid_argument("andrews_bandwidth: empty residual matrix");

  const int q = kernel_exponent(k);
  double num = 0.0;  // curvature-weighted spectral mass
  double den = 0.0;  // level-weighted spectral mass
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto head = u.col(a).head(T - 1);
    const auto tail = u.col(a).tail(T - 1);
    const double ss = head.squaredNorm();
    double rho = 0.0;
    double sigma2 = 0.0;
    if (ss > 0.0) {
      rho = tail.dot(head) / ss;
      rho = std::clamp(rho, -0.97, 0.97);
      sigma2 = (tail - rho * head).squaredNorm() / static_cast<double>(T - 1);
    }
    const double s4 = sigma2 * sigma2;
    const double omr = 1.0 - rho;
    den += s4 / std::pow(omr, 4);
    if (q == 1) {
      num += 4.0 * rho * rho * s4 / (std::pow(omr, 6) * (1.0 + rho) * (1.0 + rho));
    } else {
      num += 4.0 * rho * rho * s4 / std::pow(omr, 8);
    }
  }

  double alpha = (den > 0.0) ? num / den : 0.0;
  const double ck = bandwidth_constant(k);
  double M = ck * std::pow(alpha * static_cast<double>(T), 1.0 / (2.0 * q + 1.0));
  if (!std::isfinite(M)) M = 1.0;
  return std::clamp(M, 1.0, static_cast<double>(T));
}

BandwidthRule BandwidthRule::fixed_fraction(double b) {
  if (!(b > 0.0) || b > 1.0)
    throw std::invalid_argument("bandwidth fraction must lie in (0, 1]");
  return BandwidthRule(false, b);
}

BandwidthRule BandwidthRule::andrews() { return BandwidthRule(true, 0.0); }

double BandwidthRule::resolve(Eigen::Ref<const Eigen::MatrixXd> u, Kernel k) const {
  if (andrews_) return andrews_bandwidth(u, k);
  return fraction_ * static_cast<double>(u.rows());
}

double BandwidthRule::fraction() const {
  if (andrews_) throw std::logic_error("data-driven bandwidth rule has no fixed fraction");
  return fraction_;
}

std::string BandwidthRule::label() const {
  if (andrews_) return "a91";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "b%g", fraction_);
  return buf;
}

}  // namespace trendratio

// fixedb.hpp - fixed-bandwidth limit machinery: the path functional behind
// the robust t/Wald limits, the null-distribution simulator, critical-value
// lookup, and the file-backed critical-value cache.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "trendratio/kernels.hpp"

namespace trendratio {

// Paths sampled on the regular grid r_i = i/N, i = 1..N (row i-1 holds the
// value at r_i).  Columns are independent path dimensions.
struct PathGrid {
  Eigen::MatrixXd values;
  Eigen::Index steps() const { return values.rows(); }
  Eigen::Index dims() const { return values.cols(); }
};

// Upper 2.5% critical value of the robust trend t statistic under the
// Daniell kernel as a quintic in the bandwidth fraction b (two-sided 5%).
// Domain (0, 1].
double cv_daniell_0025(double b);

// The limit functional P_b applied to a path grid, branching on the kernel
// class:
//   Type1    : double integral of -k_b''(r-s) Q(r) Q(s)'
//   Type2    : same restricted to |r-s| < b plus the edge-derivative term
//   Bartlett : (2/b) int Q Q' - (1/b) int [Q(r+b) Q(r)' + Q(r) Q(r+b)']
// with k_b(x) = k(x/b).  Returns a dims x dims matrix.
Eigen::MatrixXd pb_functional(const PathGrid& path, Kernel k, double b);

// Dense symmetric N x N matrix K with Q' K Q == pb_functional on the same
// grid; the simulator samples the induced quadratic form spectrally.
Eigen::MatrixXd pb_quadratic_form_matrix(Kernel k, double b, Eigen::Index step_count);

enum class CvSource { Polynomial, Simulated, Cache };
enum class CvStatistic { AbsT, Wald };  // |t| quantile vs Wald quantile

struct CriticalValue {
  double value = 0.0;
  double level = 0.05;  // two-sided size for t; test size for Wald
  double b = 0.0;
  Kernel kernel = Kernel::Daniell;
  int q = 1;
  CvSource source = CvSource::Polynomial;
  CvStatistic statistic = CvStatistic::AbsT;
  int step_count = 0;
  long replications = 0;
  std::uint64_t seed = 0;

  // The value on the Wald scale (squares an |t| threshold).
  double wald_value() const;
};

struct SimulationConfig {
  int step_count = 1000;
  long replications = 50000;
  std::uint64_t seed = 86451578ull;
  int threads = 0;  // 0: hardware concurrency
};

// Simulates the joint null limit (Z*, P_b) of the trend-ratio statistics.
// The discretized path functional is an N x N quadratic form in the iid
// step innovations; diagonalizing it once lets every replication be drawn
// in O(N) without changing the sampled distribution.
class NullLimitSimulator {
 public:
  NullLimitSimulator(Kernel k, double b, int step_count);

  struct Draw {
    Eigen::VectorXd z;    // q-vector, each component ~ N(0,1) in the limit
    Eigen::MatrixXd pb;   // q x q limit covariance functional
  };
  Draw draw(std::uint64_t master_seed, long replication, int q) const;

  double abs_t_draw(std::uint64_t master_seed, long replication) const;
  double wald_draw(std::uint64_t master_seed, long replication, int q) const;

  int step_count() const { return N_; }
  const Eigen::VectorXd& spectrum() const { return lambda_; }

 private:
  int N_;
  Eigen::VectorXd lambda_;  // eigenvalues of the path-space quadratic form
  Eigen::VectorXd proj_;    // instrument direction rotated into that basis
  std::uint64_t cell_ = 0;  // stream id separating simulator configurations
};

// Simulates a bridge-like path grid directly from step innovations; the
// slow route the spectral simulator is validated against in tests.
PathGrid simulate_bridge_paths(int step_count, int dims, std::uint64_t seed);

// Null critical value for a q-restriction test by Monte Carlo: the empirical
// (1 - level) quantile of |t| (q = 1) or of the Wald draw (q >= 2).
CriticalValue simulate_null_cv(Kernel k, double b, double level, int q,
                               const SimulationConfig& cfg = {});

// File-backed store of simulated critical values keyed by every parameter
// that affects the draw.
class CvCache {
 public:
  CvCache() = default;                                // in-memory only
  explicit CvCache(const std::filesystem::path& file);  // loads if present

  std::optional<CriticalValue> find(Kernel k, double b, double level, int q,
                                    const SimulationConfig& cfg) const;
  void store(const CriticalValue& cv);  // inserts and persists if file-backed
  std::size_t size() const { return entries_.size(); }
  const std::filesystem::path& file() const { return file_; }

 private:
  std::map<std::string, CriticalValue> entries_;
  std::filesystem::path file_;
  void save() const;
};

// Resolution policy: the Daniell two-sided 5% single-restriction value comes
// from the polynomial; everything else is simulated, consulting (and
// filling) the cache when one is supplied.
CriticalValue critical_value(Kernel k, double b, double level, int q,
                             const SimulationConfig& cfg = {}, CvCache* cache = nullptr);

}  // namespace trendratio

// montecarlo.hpp - paired-trend data-generating process and the size/power
// experiment runner with table-style CSV/JSON emission.
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trendratio/fixedb.hpp"
#include "trendratio/kernels.hpp"
#include "trendratio/lrv.hpp"
#include "trendratio/series.hpp"

namespace trendratio {

// Two pairs of trending series with AR(1) noise started at exactly zero.
// Ordering of ar/slopes: (pair-1 numerator, pair-1 denominator,
// pair-2 numerator, pair-2 denominator).  Innovations have unit variance,
// correlation `within_pair_corr` inside a pair, and none across pairs.
struct DgpSpec {
  Eigen::Index T = 100;
  std::array<double, 4> ar = {0.0, 0.0, 0.0, 0.0};
  double within_pair_corr = 0.0;
  std::array<double, 4> slopes = {0.0, 0.0, 0.0, 0.0};

  void validate() const;
};

// One draw of the two-pair system (intercepts are zero; they do not affect
// any statistic).
PairSystem simulate_system(const DgpSpec& dgp, std::uint64_t seed);

// Both equality statistics for every bandwidth rule, sharing one pass of
// sample autocovariances.  fixed_cvs[i] is the two-sided critical value for
// rules[i] when it is a fixed fraction; data-dependent rules evaluate the
// polynomial at the realized fraction and therefore require the Daniell
// kernel at the 5% level.
struct PairedStats {
  double t_iv = 0.0;
  double t_prod = 0.0;
  double b_iv = 0.0;    // realized bandwidth fraction behind t_iv
  double b_prod = 0.0;
  double cv_iv = 0.0;
  double cv_prod = 0.0;
  bool reject_iv = false;
  bool reject_prod = false;
};
std::vector<PairedStats> paired_statistics(const PairSystem& sys, Kernel k,
                                           const std::vector<BandwidthRule>& rules,
                                           const std::vector<double>& fixed_cvs);

// Size/power experiment over a grid of common denominator slopes beta2 and
// second-pair ratios theta2 (theta1 is fixed; slopes follow
// beta1 = theta * beta2 in each pair).
struct ExperimentSpec {
  Eigen::Index T = 100;
  std::array<double, 4> ar = {0.0, 0.0, 0.0, 0.0};
  double within_pair_corr = 0.0;
  std::vector<double> beta2 = {10.0};
  std::vector<double> theta2 = {1.0};
  double theta1 = 1.0;
  std::vector<BandwidthRule> bandwidths = {BandwidthRule::andrews()};
  Kernel kernel = Kernel::Daniell;
  double level = 0.05;
  long replications = 10000;
  std::uint64_t seed = 20240901ull;
  int threads = 0;
  SimulationConfig sim;        // only consulted when a fixed-rule cv must be simulated
  CvCache* cache = nullptr;
};

struct ExperimentCell {
  double beta2 = 0.0;
  double theta2 = 1.0;
  std::vector<double> rate_iv;   // per bandwidth rule
  std::vector<double> rate_prod;
  std::vector<double> se_iv;     // binomial standard errors
  std::vector<double> se_prod;
};

struct ExperimentTable {
  Eigen::Index T = 0;
  std::array<double, 4> ar = {0.0, 0.0, 0.0, 0.0};
  double within_pair_corr = 0.0;
  double theta1 = 1.0;
  Kernel kernel = Kernel::Daniell;
  double level = 0.05;
  long replications = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> rule_labels;
  std::vector<ExperimentCell> cells;
};

// Null rejection table: forces theta2 = {1} so every cell sits under H0.
ExperimentTable rejection_table(const ExperimentSpec& spec);

// Power curve over the spec's theta2 grid (the theta2 = 1 row reproduces the
// null rejections).
ExperimentTable power_curve(const ExperimentSpec& spec);

// Wide-format emission mirroring the published table layout, plus a JSON
// audit block carrying every reproduction-relevant setting.
void write_csv(const ExperimentTable& table, std::ostream& os);
void write_json(const ExperimentTable& table, std::ostream& os);

}  // namespace trendratio

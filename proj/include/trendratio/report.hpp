// Reporting layer: turns a dataset plus a list of ratio requests into the
// three standard tables (per-series trend slopes, ratio confidence sets, and
// pairwise ratio comparisons) with CSV and JSON emitters.  Estimates are
// stored unscaled; presentation scale factors are applied by the writers and
// recorded in the JSON audit block.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trendratio/dataset.hpp"
#include "trendratio/inference.hpp"

namespace trendratio {

struct RatioRequest {
  std::string label;        // display name, e.g. "obs 850/sfc"
  std::string numerator;    // series label in the dataset
  std::string denominator;  // series label in the dataset
};

struct ReportSpec {
  std::vector<RatioRequest> ratios;
  std::vector<std::string> trend_series;  // extra slope rows; referenced series
                                          // are always included
  InferenceOptions options;
  double slope_scale = 1.0;  // e.g. 10 reports per-decade slopes for annual data
  double g_scale = 1.0;      // e.g. 1e4 for slope-product differences
};

struct TrendRow {
  std::string label;
  double slope = 0.0, se = 0.0, ci_lower = 0.0, ci_upper = 0.0;
  double b = 0.0, cv = 0.0;
  bool degenerate = false;
};

struct RatioRow {
  std::string label, numerator, denominator;
  double theta = 0.0;
  FiellerSet::Shape shape = FiellerSet::Shape::Interval;
  double lower = 0.0, upper = 0.0;
  double b = 0.0, cv = 0.0;
  bool degenerate = false;
  std::string note;
};

struct CompareRow {
  std::string label_a, label_b;
  double delta = 0.0, delta_lower = 0.0, delta_upper = 0.0;
  bool delta_star = false;  // interval excludes zero
  double g = 0.0, g_lower = 0.0, g_upper = 0.0;
  bool g_star = false;
  double b_iv = 0.0, b_prod = 0.0, cv_iv = 0.0, cv_prod = 0.0;
  bool degenerate = false;
  std::string note;
};

struct Report {
  std::string dataset;
  Eigen::Index T = 0;
  double start_time = 0.0, time_step = 1.0;
  Kernel kernel = Kernel::Daniell;
  std::string bandwidth_label;
  double level = 0.05;
  std::uint64_t seed = 0;  // critical-value simulation seed (unused by the
                           // polynomial path, recorded for reproducibility)
  double slope_scale = 1.0, g_scale = 1.0;
  std::vector<TrendRow> trends;
  std::vector<RatioRow> ratios;
  std::vector<CompareRow> comparisons;
};

// Runs every requested estimate.  Throws std::invalid_argument when a request
// names a series the dataset does not hold.
Report run_report(const Dataset& data, const ReportSpec& spec);

// Writers; scaled values use the stored scale factors.
void write_trend_csv(const Report& report, std::ostream& os);
void write_ratio_csv(const Report& report, std::ostream& os);
void write_compare_csv(const Report& report, std::ostream& os);
void write_report_json(const Report& report, std::ostream& os);

}  // namespace trendratio

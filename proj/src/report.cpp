// report.cpp - table assembly over the inference layer plus CSV/JSON output.
#include "trendratio/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace trendratio {

namespace {

using nlohmann::json;

void append_unique(std::vector<std::string>& labels, const std::string& label) {
  if (std::find(labels.begin(), labels.end(), label) == labels.end())
    labels.push_back(label);
}

TrendPair make_pair(const Dataset& data, const RatioRequest& req) {
  TrendPair pair;
  pair.numerator = data.at(req.numerator);
  pair.denominator = data.at(req.denominator);
  return pair;
}

bool excludes_zero(double lower, double upper) { return lower > 0.0 || upper < 0.0; }

// NaN-safe %.10g cell; JSON gets the raw doubles instead.
void put(std::ostream& os, double value) {
  char buf[40];
  if (std::isnan(value))
    os << "nan";
  else if (std::isinf(value))
    os << (value > 0 ? "inf" : "-inf");
  else {
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    os << buf;
  }
}

json number_or_null(double value) {
  if (std::isnan(value)) return nullptr;
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

}  // namespace

Report run_report(const Dataset& data, const ReportSpec& spec) {
  Report out;
  out.dataset = data.name;
  out.T = data.length();
  out.start_time = data.start_time;
  out.time_step = data.time_step;
  out.kernel = spec.options.kernel;
  out.bandwidth_label = spec.options.bandwidth.label();
  out.level = spec.options.level;
  out.seed = spec.options.sim.seed;
  out.slope_scale = spec.slope_scale;
  out.g_scale = spec.g_scale;

  // Slope rows: explicitly requested series first, then every referenced one.
  std::vector<std::string> slope_labels;
  for (const std::string& label : spec.trend_series) {
    data.at(label);  // fail fast with the offending name
    append_unique(slope_labels, label);
  }
  for (const RatioRequest& req : spec.ratios) {
    append_unique(slope_labels, req.numerator);
    append_unique(slope_labels, req.denominator);
  }
  for (const std::string& label : slope_labels) {
    const SlopeInference s = slope_ci(data.at(label), spec.options);
    TrendRow row;
    row.label = label;
    row.slope = s.slope;
    row.se = s.se;
    row.ci_lower = s.ci_lower;
    row.ci_upper = s.ci_upper;
    row.b = s.lrv.b;
    row.cv = s.cv.value;
    row.degenerate = s.se == 0.0;
    out.trends.push_back(std::move(row));
  }

  for (const RatioRequest& req : spec.ratios) {
    const FiellerSet set = fieller_ci(make_pair(data, req), spec.options);
    RatioRow row;
    row.label = req.label.empty() ? req.numerator + "/" + req.denominator : req.label;
    row.numerator = req.numerator;
    row.denominator = req.denominator;
    row.theta = set.theta;
    row.shape = set.shape;
    row.lower = set.lower;
    row.upper = set.upper;
    row.b = set.lrv.b;
    row.cv = set.cv.value;
    row.degenerate = set.degenerate;
    row.note = set.note;
    out.ratios.push_back(std::move(row));
  }

  const double sst = out.T >= 2 ? trend_sum_squares(out.T) : 0.0;
  for (std::size_t a = 0; a + 1 < spec.ratios.size(); ++a) {
    for (std::size_t b = a + 1; b < spec.ratios.size(); ++b) {
      PairSystem sys;
      sys.pairs = {make_pair(data, spec.ratios[a]), make_pair(data, spec.ratios[b])};
      CompareRow row;
      row.label_a = out.ratios[a].label;
      row.label_b = out.ratios[b].label;

      const RatioFit fit = iv_system(sys);
      Eigen::RowVectorXd c(2);
      c << 1.0, -1.0;
      const TTest diff = t_iv(fit, c, 0.0, spec.options);
      row.delta = diff.estimate;
      row.delta_lower = diff.ci_lower;
      row.delta_upper = diff.ci_upper;
      row.delta_star = excludes_zero(diff.ci_lower, diff.ci_upper);
      row.b_iv = diff.lrv.b;
      row.cv_iv = diff.cv.value;

      const ProductTest prod = product_test(sys, 0, 1, spec.options);
      const double half =
          prod.cv.value * std::sqrt(std::max(0.0, prod.lambda_sq) / sst);
      row.g = prod.g;
      row.g_lower = prod.g - half;
      row.g_upper = prod.g + half;
      row.g_star = excludes_zero(row.g_lower, row.g_upper);
      row.b_prod = prod.lrv.b;
      row.cv_prod = prod.cv.value;

      row.degenerate = diff.degenerate || prod.degenerate;
      if (!diff.note.empty())
        row.note = diff.note;
      else if (!prod.note.empty())
        row.note = prod.note;
      out.comparisons.push_back(std::move(row));
    }
  }
  return out;
}

void write_trend_csv(const Report& report, std::ostream& os) {
  os << "series,slope,se,ci_lower,ci_upper,b,cv,degenerate\n";
  for (const TrendRow& row : report.trends) {
    os << row.label << ",";
    put(os, row.slope * report.slope_scale);
    os << ",";
    put(os, row.se * report.slope_scale);
    os << ",";
    put(os, row.ci_lower * report.slope_scale);
    os << ",";
    put(os, row.ci_upper * report.slope_scale);
    os << ",";
    put(os, row.b);
    os << ",";
    put(os, row.cv);
    os << "," << (row.degenerate ? "degenerate" : "") << "\n";
  }
}

void write_ratio_csv(const Report& report, std::ostream& os) {
  os << "ratio,numerator,denominator,estimate,shape,ci_lower,ci_upper,b,cv,degenerate\n";
  for (const RatioRow& row : report.ratios) {
    os << row.label << "," << row.numerator << "," << row.denominator << ",";
    put(os, row.theta);
    os << "," << to_string(row.shape) << ",";
    put(os, row.lower);
    os << ",";
    put(os, row.upper);
    os << ",";
    put(os, row.b);
    os << ",";
    put(os, row.cv);
    os << "," << (row.degenerate ? "degenerate" : "") << "\n";
  }
}

void write_compare_csv(const Report& report, std::ostream& os) {
  os << "ratio_a,ratio_b,delta,delta_ci_lower,delta_ci_upper,delta_star,"
        "g_scaled,g_ci_lower,g_ci_upper,g_star,b_iv,b_prod,degenerate\n";
  for (const CompareRow& row : report.comparisons) {
    os << row.label_a << "," << row.label_b << ",";
    put(os, row.delta);
    os << ",";
    put(os, row.delta_lower);
    os << ",";
    put(os, row.delta_upper);
    os << "," << (row.delta_star ? "*" : "") << ",";
    put(os, row.g * report.g_scale);
    os << ",";
    put(os, row.g_lower * report.g_scale);
    os << ",";
    put(os, row.g_upper * report.g_scale);
    os << "," << (row.g_star ? "*" : "") << ",";
    put(os, row.b_iv);
    os << ",";
    put(os, row.b_prod);
    os << "," << (row.degenerate ? "degenerate" : "") << "\n";
  }
}

void write_report_json(const Report& report, std::ostream& os) {
  json audit;
  audit["dataset"] = report.dataset;
  audit["T"] = report.T;
  audit["start_time"] = report.start_time;
  audit["time_step"] = report.time_step;
  audit["kernel"] = to_string(report.kernel);
  audit["bandwidth"] = report.bandwidth_label;
  audit["level"] = report.level;
  audit["seed"] = report.seed;
  audit["slope_scale"] = report.slope_scale;
  audit["g_scale"] = report.g_scale;

  audit["trends"] = json::array();
  for (const TrendRow& row : report.trends) {
    json r;
    r["series"] = row.label;
    r["slope"] = number_or_null(row.slope);
    r["se"] = number_or_null(row.se);
    r["ci"] = {number_or_null(row.ci_lower), number_or_null(row.ci_upper)};
    r["b"] = row.b;
    r["cv"] = row.cv;
    r["degenerate"] = row.degenerate;
    audit["trends"].push_back(std::move(r));
  }

  audit["ratios"] = json::array();
  for (const RatioRow& row : report.ratios) {
    json r;
    r["ratio"] = row.label;
    r["numerator"] = row.numerator;
    r["denominator"] = row.denominator;
    r["estimate"] = number_or_null(row.theta);
    r["shape"] = to_string(row.shape);
    r["ci"] = {number_or_null(row.lower), number_or_null(row.upper)};
    r["b"] = row.b;
    r["cv"] = row.cv;
    r["degenerate"] = row.degenerate;
    if (!row.note.empty()) r["note"] = row.note;
    audit["ratios"].push_back(std::move(r));
  }

  audit["comparisons"] = json::array();
  for (const CompareRow& row : report.comparisons) {
    json r;
    r["ratio_a"] = row.label_a;
    r["ratio_b"] = row.label_b;
    r["delta"] = number_or_null(row.delta);
    r["delta_ci"] = {number_or_null(row.delta_lower), number_or_null(row.delta_upper)};
    r["delta_star"] = row.delta_star;
    r["g"] = number_or_null(row.g);
    r["g_ci"] = {number_or_null(row.g_lower), number_or_null(row.g_upper)};
    r["g_star"] = row.g_star;
    r["b_iv"] = row.b_iv;
    r["b_prod"] = row.b_prod;
    r["cv_iv"] = row.cv_iv;
    r["cv_prod"] = row.cv_prod;
    r["degenerate"] = row.degenerate;
    if (!row.note.empty()) r["note"] = row.note;
    audit["comparisons"].push_back(std::move(r));
  }
  os << audit.dump(2) << "\n";
}

}  // namespace trendratio

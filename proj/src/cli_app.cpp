// cli_app.cpp - subcommand surface over the dataset/report/montecarlo layers.
#include "trendratio/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trendratio/dataset.hpp"
#include "trendratio/montecarlo.hpp"
#include "trendratio/report.hpp"

namespace trendratio {

namespace {

BandwidthRule parse_bandwidth(const std::string& text) {
  if (text == "a91" || text == "A91") return BandwidthRule::andrews();
  std::size_t used = 0;
  double fraction = 0.0;
  try {
    fraction = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size())
    throw std::invalid_argument("bandwidth must be 'a91' or a fraction in (0, 1], got '" +
                                text + "'");
  return BandwidthRule::fixed_fraction(fraction);
}

RatioRequest parse_ratio(const std::string& text) {
  std::string body = text;
  RatioRequest req;
  if (const auto eq = body.find('='); eq != std::string::npos) {
    req.label = body.substr(0, eq);
    body = body.substr(eq + 1);
  }
  const auto slash = body.find('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == body.size())
    throw std::invalid_argument("ratio must look like [label=]numerator/denominator, got '" +
                                text + "'");
  req.numerator = body.substr(0, slash);
  req.denominator = body.substr(slash + 1);
  return req;
}

std::filesystem::path open_out(const std::string& dir, const char* name,
                               std::ofstream& os) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  os.open(path);
  if (!os) throw std::invalid_argument("cannot write '" + path.string() + "'");
  return path;
}

struct CommonOptions {
  std::string kernel = "daniell";
  std::string bandwidth = "a91";
  double level = 0.05;
  std::uint64_t seed = SimulationConfig{}.seed;
  std::string out_dir = ".";
  std::string format = "both";
  std::string cache_file;
  int threads = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--kernel", kernel, "bartlett|parzen|qs|daniell")
        ->capture_default_str();
    cmd->add_option("--bandwidth", bandwidth, "a91 or a fraction in (0, 1]")
        ->capture_default_str();
    cmd->add_option("--level", level, "two-sided test level")->capture_default_str();
    cmd->add_option("--seed", seed, "seed for simulated critical values")
        ->capture_default_str();
    cmd->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    cmd->add_option("--format", format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}))
        ->capture_default_str();
    cmd->add_option("--cv-cache", cache_file, "critical-value cache file");
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)")
        ->capture_default_str();
  }

  InferenceOptions inference(CvCache* cache) const {
    InferenceOptions opts;
    opts.kernel = kernel_from_string(kernel);
    opts.bandwidth = parse_bandwidth(bandwidth);
    opts.level = level;
    opts.sim.seed = seed;
    opts.sim.threads = threads;
    opts.cache = cache;
    return opts;
  }

  std::unique_ptr<CvCache> make_cache() const {
    if (cache_file.empty()) return nullptr;
    return std::make_unique<CvCache>(cache_file);
  }

  bool want_csv() const { return format != "json"; }
  bool want_json() const { return format != "csv"; }
};

void emit_report(const Report& report, const CommonOptions& common, bool with_ratios,
                 bool with_comparisons, std::ostream& log) {
  std::ofstream os;
  if (common.want_csv()) {
    log << "wrote " << open_out(common.out_dir, "trend.csv", os).string() << "\n";
    write_trend_csv(report, os);
    os.close();
    if (with_ratios) {
      log << "wrote " << open_out(common.out_dir, "ratio.csv", os).string() << "\n";
      write_ratio_csv(report, os);
      os.close();
    }
    if (with_comparisons) {
      log << "wrote " << open_out(common.out_dir, "compare.csv", os).string() << "\n";
      write_compare_csv(report, os);
      os.close();
    }
  }
  if (common.want_json()) {
    log << "wrote " << open_out(common.out_dir, "report.json", os).string() << "\n";
    write_report_json(report, os);
    os.close();
  }
}

void emit_table(const ExperimentTable& table, const CommonOptions& common,
                const char* stem, std::ostream& log) {
  std::ofstream os;
  if (common.want_csv()) {
    const std::string name = std::string(stem) + ".csv";
    log << "wrote " << open_out(common.out_dir, name.c_str(), os).string() << "\n";
    write_csv(table, os);
    os.close();
  }
  if (common.want_json()) {
    const std::string name = std::string(stem) + ".json";
    log << "wrote " << open_out(common.out_dir, name.c_str(), os).string() << "\n";
    write_json(table, os);
    os.close();
  }
}

std::array<double, 4> parse_ar(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0, 0.0, 0.0};
  if (values.size() == 1) return {values[0], values[0], values[0], values[0]};
  if (values.size() == 4) return {values[0], values[1], values[2], values[3]};
  throw std::invalid_argument("--ar needs one shared value or all four coefficients");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"serial-correlation-robust inference for ratios of linear trend slopes"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "TOML/INI file of options; sections name subcommands "
                 "(e.g. [simulate.null]); give it before the subcommand");

  // Shared state filled by whichever subcommand runs.
  CommonOptions common;
  std::string data_file;
  std::vector<std::string> series_labels;
  std::vector<std::string> ratio_specs;
  double slope_scale = 10.0;
  double g_scale = 1e4;

  auto add_data_options = [&](CLI::App* cmd, bool needs_ratios) {
    common.attach(cmd);
    cmd->add_option("--data", data_file, "input CSV (time column first)")->required();
    cmd->add_option("--scale-per", slope_scale,
                    "slope presentation scale (10 = per decade for annual data)")
        ->capture_default_str();
    if (needs_ratios)
      cmd->add_option("--ratio", ratio_specs, "[label=]numerator/denominator")
          ->required()
          ->delimiter(',');
  };

  CLI::App* trend = app.add_subcommand("trend", "trend slopes with robust intervals");
  add_data_options(trend, false);
  trend->add_option("--series", series_labels, "series labels (default: all)")
      ->delimiter(',');

  CLI::App* ratio = app.add_subcommand("ratio", "ratio estimates with Fieller sets");
  add_data_options(ratio, true);

  CLI::App* compare =
      app.add_subcommand("compare", "pairwise ratio differences with stars");
  add_data_options(compare, true);
  compare->add_option("--g-scale", g_scale, "slope-product presentation scale")
      ->capture_default_str();

  // simulate null | simulate power
  CLI::App* simulate = app.add_subcommand("simulate", "finite-sample experiments");
  simulate->require_subcommand(1);
  long T = 100;
  std::vector<double> ar_values;
  double corr = 0.0;
  std::vector<double> beta2 = {10.0};
  std::vector<double> theta2 = {1.0};
  double theta1 = 1.0;
  std::vector<std::string> bandwidths = {"a91"};
  long replications = 10000;
  auto add_sim_options = [&](CLI::App* cmd, bool with_theta2) {
    common.attach(cmd);
    cmd->add_option("--T", T, "sample size")->capture_default_str();
    cmd->add_option("--ar", ar_values,
                    "AR(1) coefficients (one shared or four: n1,d1,n2,d2)")
        ->delimiter(',');
    cmd->add_option("--corr", corr, "within-pair innovation correlation")
        ->capture_default_str();
    cmd->add_option("--beta2", beta2, "denominator slopes")->delimiter(',');
    cmd->add_option("--theta1", theta1, "ratio of the first pair")->capture_default_str();
    if (with_theta2)
      cmd->add_option("--theta2", theta2, "ratios of the second pair")->delimiter(',');
    cmd->add_option("--bandwidths", bandwidths, "a91 and/or fractions")->delimiter(',');
    cmd->add_option("--reps", replications, "replications (>= 1000)")
        ->capture_default_str();
  };
  CLI::App* sim_null =
      simulate->add_subcommand("null", "rejection frequencies under equal ratios");
  add_sim_options(sim_null, false);
  CLI::App* sim_power =
      simulate->add_subcommand("power", "rejection frequencies across alternatives");
  add_sim_options(sim_power, true);

  CLI::App* cv_cmd = app.add_subcommand("cv", "fixed-b critical value");
  double cv_b = 0.0;
  int cv_q = 1;
  int cv_steps = SimulationConfig{}.step_count;
  long cv_reps = SimulationConfig{}.replications;
  common.attach(cv_cmd);
  cv_cmd->add_option("--b", cv_b, "bandwidth fraction in (0, 1]")->required();
  cv_cmd->add_option("--q", cv_q, "number of restrictions")->capture_default_str();
  cv_cmd->add_option("--steps", cv_steps, "simulation grid steps")->capture_default_str();
  cv_cmd->add_option("--reps", cv_reps, "simulation replications")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const std::unique_ptr<CvCache> cache = common.make_cache();

    if (trend->parsed() || ratio->parsed() || compare->parsed()) {
      const IngestResult ingested = ingest_csv_file(data_file);
      for (const std::string& warning : ingested.warnings)
        std::cerr << "warning: " << warning << "\n";
      ReportSpec spec;
      spec.options = common.inference(cache.get());
      spec.slope_scale = slope_scale;
      spec.g_scale = g_scale;
      if (trend->parsed()) {
        if (series_labels.empty())
          for (const TrendSeries& s : ingested.data.series)
            spec.trend_series.push_back(s.label);
        else
          spec.trend_series = series_labels;
      } else {
        for (const std::string& text : ratio_specs)
          spec.ratios.push_back(parse_ratio(text));
      }
      const Report report = run_report(ingested.data, spec);
      emit_report(report, common, !report.ratios.empty(),
                  compare->parsed() && report.comparisons.size() > 0, std::cout);
      return 0;
    }

    if (sim_null->parsed() || sim_power->parsed()) {
      ExperimentSpec spec;
      spec.T = T;
      spec.ar = parse_ar(ar_values);
      spec.within_pair_corr = corr;
      spec.beta2 = beta2;
      spec.theta2 = theta2;
      spec.theta1 = theta1;
      spec.kernel = kernel_from_string(common.kernel);
      spec.level = common.level;
      spec.replications = replications;
      spec.seed = common.seed;
      spec.threads = common.threads;
      spec.cache = cache.get();
      spec.bandwidths.clear();
      for (const std::string& text : bandwidths)
        spec.bandwidths.push_back(parse_bandwidth(text));
      if (sim_null->parsed())
        emit_table(rejection_table(spec), common, "null", std::cout);
      else
        emit_table(power_curve(spec), common, "power", std::cout);
      return 0;
    }

    // cv
    SimulationConfig cfg;
    cfg.step_count = cv_steps;
    cfg.replications = cv_reps;
    cfg.seed = common.seed;
    cfg.threads = common.threads;
    const CriticalValue cv = critical_value(kernel_from_string(common.kernel), cv_b,
                                            common.level, cv_q, cfg, cache.get());
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g\n", cv.value);
    std::cout << buf;
    const char* source = cv.source == CvSource::Polynomial
                             ? "polynomial"
                             : (cv.source == CvSource::Cache ? "cache" : "simulated");
    std::cout << "# kernel=" << common.kernel << " b=" << cv_b << " level=" << common.level
              << " q=" << cv_q << " source=" << source << "\n";
    return 0;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> owned;
  owned.reserve(args.size() + 1);
  owned.push_back("trendratio");
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(owned.size());
  for (const std::string& arg : owned) argv.push_back(arg.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace trendratio

// montecarlo.cpp - DGP simulation and the size/power experiment harness.
#include "trendratio/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace trendratio {

namespace {

using nlohmann::json;

// Two-sided 5% check behind the data-dependent rows: only the Daniell
// polynomial can turn a per-replication fraction into a critical value.
void require_polynomial_support(const ExperimentSpec& spec) {
  for (const auto& rule : spec.bandwidths) {
    if (!rule.is_andrews()) continue;
    if (spec.kernel != Kernel::Daniell || std::abs(spec.level - 0.05) > 1e-9)
      throw std::invalid_argument(
          "data-dependent bandwidth rows need the Daniell kernel at the 5% level");
  }
}

double binomial_se(double p, long n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

void DgpSpec::validate() const {
  if (T < 4) throw std::invalid_argument("dgp needs T >= 4");
  for (double phi : ar)
    if (!(std::abs(phi) < 1.0))
      throw std::invalid_argument("AR coefficients must lie in (-1, 1)");
  if (!(std::abs(within_pair_corr) < 1.0))
    throw std::invalid_argument("within-pair correlation must lie in (-1, 1)");
}

PairSystem simulate_system(const DgpSpec& dgp, std::uint64_t seed) {
  dgp.validate();
  const Eigen::Index T = dgp.T;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);

  const double vp = dgp.within_pair_corr;
  const double vq = std::sqrt(1.0 - vp * vp);

  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(T, 4);
  std::array<double, 4> prev = {0.0, 0.0, 0.0, 0.0};  // zero initial conditions
  for (Eigen::Index t = 0; t < T; ++t) {
    const double z1 = nd(gen), z2 = nd(gen), z3 = nd(gen), z4 = nd(gen);
    const std::array<double, 4> eps = {z1, vp * z1 + vq * z2, z3, vp * z3 + vq * z4};
    for (int s = 0; s < 4; ++s) {
      const double value = dgp.ar[static_cast<std::size_t>(s)] * prev[static_cast<std::size_t>(s)] +
                           eps[static_cast<std::size_t>(s)];
      u(t, s) = value;
      prev[static_cast<std::size_t>(s)] = value;
    }
  }

  const char* labels[4] = {"n1", "d1", "n2", "d2"};
  PairSystem sys;
  sys.pairs.resize(2);
  for (int s = 0; s < 4; ++s) {
    TrendSeries series;
    series.label = labels[s];
    series.values.resize(T);
    for (Eigen::Index t = 0; t < T; ++t)
      series.values[t] = dgp.slopes[static_cast<std::size_t>(s)] * static_cast<double>(t + 1) +
                         u(t, s);
    TrendPair& pair = sys.pairs[static_cast<std::size_t>(s / 2)];
    (s % 2 == 0 ? pair.numerator : pair.denominator) = std::move(series);
  }
  return sys;
}

std::vector<PairedStats> paired_statistics(const PairSystem& sys, Kernel k,
                                           const std::vector<BandwidthRule>& rules,
                                           const std::vector<double>& fixed_cvs) {
  if (sys.pairs.size() != 2)
    throw std::invalid_argument("paired statistics need exactly two pairs");
  if (rules.size() != fixed_cvs.size())
    throw std::invalid_argument("one critical value per bandwidth rule required");
  for (const auto& rule : rules)
    if (rule.is_andrews() && k != Kernel::Daniell)
      throw std::invalid_argument(
          "data-dependent bandwidth rows need the Daniell kernel at the 5% level");

  const RatioFit fit = iv_system(sys);
  const Eigen::Index T = fit.T;
  const double sst = trend_sum_squares(T);

  // IV residual covariances for t_iv.
  const std::vector<Eigen::MatrixXd> gam_eps = autocovariances(fit.residuals);

  // Raw trend-residual covariances for t_prod, ordering
  // (num pair-1, num pair-2, den pair-1, den pair-2).  The variance of the
  // slope-product difference is the long-run variance of the scalar series
  // grad' U_t, so that combination drives both the bandwidth and the estimate.
  Eigen::MatrixXd U(T, 4);
  U.col(0) = fit.slopes[0].numerator.residuals;
  U.col(1) = fit.slopes[1].numerator.residuals;
  U.col(2) = fit.slopes[0].denominator.residuals;
  U.col(3) = fit.slopes[1].denominator.residuals;

  const double b11 = fit.slopes[0].numerator.slope;
  const double b12 = fit.slopes[1].numerator.slope;
  const double b21 = fit.slopes[0].denominator.slope;
  const double b22 = fit.slopes[1].denominator.slope;
  const double g = b11 * b22 - b12 * b21;
  const Eigen::Vector4d grad(b22, -b21, -b12, b11);
  const Eigen::MatrixXd v = U * grad;
  const std::vector<Eigen::MatrixXd> gam_v = autocovariances(v);

  const Eigen::Vector2d dinv = fit.denom_sums.head(2).cwiseInverse();
  const Eigen::RowVector2d contrast(1.0, -1.0);

  std::vector<PairedStats> out(rules.size());
  for (std::size_t r = 0; r < rules.size(); ++r) {
    PairedStats& ps = out[r];
    const double m_iv = rules[r].resolve(fit.residuals, k);
    const LrvEstimate om_eps = lrv_from_autocovariances(gam_eps, T, k, m_iv);
    const Eigen::Matrix2d V =
        sst * dinv.asDiagonal() * om_eps.omega * dinv.asDiagonal();
    const double var = (contrast * V * contrast.transpose()).value();
    const double diff = fit.theta[0] - fit.theta[1];
    ps.t_iv = var > 0.0 ? diff / std::sqrt(var)
                        : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    ps.b_iv = om_eps.b;

    const double m_prod = rules[r].resolve(v, k);
    const LrvEstimate om_u = lrv_from_autocovariances(gam_v, T, k, m_prod);
    const double lambda_sq = std::max(0.0, om_u.omega(0, 0));
    ps.t_prod = lambda_sq > 0.0
                    ? g * std::sqrt(sst / lambda_sq)
                    : (g == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    ps.b_prod = om_u.b;

    ps.cv_iv = rules[r].is_andrews() ? cv_daniell_0025(ps.b_iv) : fixed_cvs[r];
    ps.cv_prod = rules[r].is_andrews() ? cv_daniell_0025(ps.b_prod) : fixed_cvs[r];
    ps.reject_iv = std::abs(ps.t_iv) > ps.cv_iv;
    ps.reject_prod = std::abs(ps.t_prod) > ps.cv_prod;
  }
  return out;
}

namespace {

ExperimentTable run_experiment(const ExperimentSpec& spec) {
  if (spec.replications < 1000)
    throw std::invalid_argument("reported frequencies need at least 1000 replications");
  if (spec.beta2.empty() || spec.theta2.empty() || spec.bandwidths.empty())
    throw std::invalid_argument("experiment grid is empty");
  require_polynomial_support(spec);

  DgpSpec probe;
  probe.T = spec.T;
  probe.ar = spec.ar;
  probe.within_pair_corr = spec.within_pair_corr;
  probe.validate();

  // Fixed-fraction rules share one critical value across replications.
  std::vector<double> fixed_cvs(spec.bandwidths.size(),
                                std::numeric_limits<double>::quiet_NaN());
  for (std::size_t r = 0; r < spec.bandwidths.size(); ++r) {
    if (spec.bandwidths[r].is_andrews()) continue;
    // Nominal level one accepts nothing: the critical value degenerates to zero.
    fixed_cvs[r] = spec.level == 1.0
                       ? 0.0
                       : critical_value(spec.kernel, spec.bandwidths[r].fraction(),
                                        spec.level, 1, spec.sim, spec.cache)
                           .value;
  }

  ExperimentTable table;
  table.T = spec.T;
  table.ar = spec.ar;
  table.within_pair_corr = spec.within_pair_corr;
  table.theta1 = spec.theta1;
  table.kernel = spec.kernel;
  table.level = spec.level;
  table.replications = spec.replications;
  table.seed = spec.seed;
  for (const auto& rule : spec.bandwidths) table.rule_labels.push_back(rule.label());

  const std::size_t n_rules = spec.bandwidths.size();
  std::uint64_t cell_index = 0;
  for (double beta2 : spec.beta2) {
    for (double theta2 : spec.theta2) {
      DgpSpec dgp = probe;
      dgp.slopes = {spec.theta1 * beta2, beta2, theta2 * beta2, beta2};

      std::vector<std::atomic<long>> hits(2 * n_rules);
      for (auto& h : hits) h.store(0);

      detail::parallel_for(spec.replications, spec.threads, [&](long rep) {
        const PairSystem sys = simulate_system(
            dgp, detail::stream_seed(spec.seed, cell_index, static_cast<std::uint64_t>(rep)));
        const std::vector<PairedStats> stats =
            paired_statistics(sys, spec.kernel, spec.bandwidths, fixed_cvs);
        for (std::size_t r = 0; r < n_rules; ++r) {
          if (stats[r].reject_iv) hits[2 * r].fetch_add(1, std::memory_order_relaxed);
          if (stats[r].reject_prod)
            hits[2 * r + 1].fetch_add(1, std::memory_order_relaxed);
        }
      });

      ExperimentCell cell;
      cell.beta2 = beta2;
      cell.theta2 = theta2;
      for (std::size_t r = 0; r < n_rules; ++r) {
        const double p_iv =
            static_cast<double>(hits[2 * r].load()) / static_cast<double>(spec.replications);
        const double p_prod = static_cast<double>(hits[2 * r + 1].load()) /
                              static_cast<double>(spec.replications);
        cell.rate_iv.push_back(p_iv);
        cell.rate_prod.push_back(p_prod);
        cell.se_iv.push_back(binomial_se(p_iv, spec.replications));
        cell.se_prod.push_back(binomial_se(p_prod, spec.replications));
      }
      table.cells.push_back(std::move(cell));
      ++cell_index;
    }
  }
  return table;
}

}  // namespace

ExperimentTable rejection_table(const ExperimentSpec& spec) {
  ExperimentSpec null_spec = spec;
  null_spec.theta2 = {1.0};
  return run_experiment(null_spec);
}

ExperimentTable power_curve(const ExperimentSpec& spec) { return run_experiment(spec); }

void write_csv(const ExperimentTable& table, std::ostream& os) {
  os << "T,beta2,theta1,theta2,replications";
  for (const auto& label : table.rule_labels) os << ",t_iv_" << label << ",t_prod_" << label;
  for (const auto& label : table.rule_labels) os << ",se_iv_" << label << ",se_prod_" << label;
  os << "\n";
  char buf[64];
  for (const auto& cell : table.cells) {
    os << table.T << "," << cell.beta2 << "," << table.theta1 << "," << cell.theta2 << ","
       << table.replications;
    for (std::size_t r = 0; r < table.rule_labels.size(); ++r) {
      std::snprintf(buf, sizeof(buf), ",%.4f,%.4f", cell.rate_iv[r], cell.rate_prod[r]);
      os << buf;
    }
    for (std::size_t r = 0; r < table.rule_labels.size(); ++r) {
      std::snprintf(buf, sizeof(buf), ",%.5f,%.5f", cell.se_iv[r], cell.se_prod[r]);
      os << buf;
    }
    os << "\n";
  }
}

void write_json(const ExperimentTable& table, std::ostream& os) {
  json audit;
  audit["T"] = table.T;
  audit["ar"] = table.ar;
  audit["within_pair_corr"] = table.within_pair_corr;
  audit["theta1"] = table.theta1;
  audit["kernel"] = to_string(table.kernel);
  audit["level"] = table.level;
  audit["replications"] = table.replications;
  audit["seed"] = table.seed;
  audit["bandwidths"] = table.rule_labels;
  audit["cells"] = json::array();
  for (const auto& cell : table.cells) {
    json c;
    c["beta2"] = cell.beta2;
    c["theta2"] = cell.theta2;
    c["rate_iv"] = cell.rate_iv;
    c["rate_prod"] = cell.rate_prod;
    c["se_iv"] = cell.se_iv;
    c["se_prod"] = cell.se_prod;
    audit["cells"].push_back(std::move(c));
  }
  os << audit.dump(2) << "\n";
}

}  // namespace trendratio

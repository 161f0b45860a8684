// fixedb.cpp - discretized limit functional, spectral null simulator,
// critical values and their cache.
#include "trendratio/fixedb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "parallel.hpp"
#include "rng.hpp"

namespace trendratio {

namespace {

constexpr const char kVersionTag[] = "trendratio-cv-cache-v1";

void validate_fraction(double b) {
  if (!(b > 0.0) || b > 1.0)
    throw std::invalid_argument("bandwidth fraction b must lie in (0, 1]");
}

// Shift index for the ray terms: b expressed in grid steps.
Eigen::Index shift_steps(double b, Eigen::Index N) {
  const Eigen::Index ib = static_cast<Eigen::Index>(std::lround(b * static_cast<double>(N)));
  if (ib < 1)
    throw std::invalid_argument("step count too small to resolve bandwidth fraction b");
  return std::min(ib, N);
}

// Lagged cross-product sum C_d = sum_i Q_i Q_{i-d}' for one lag d >= 0.
Eigen::MatrixXd lag_products(const Eigen::MatrixXd& Q, Eigen::Index d) {
  const Eigen::Index N = Q.rows();
  return Q.bottomRows(N - d).transpose() * Q.topRows(N - d);
}

// Empirical quantile with linear interpolation between order statistics.
double quantile_type7(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= x.size()) return x.back();
  const double frac = h - static_cast<double>(lo);
  return x[lo] + frac * (x[lo + 1] - x[lo]);
}

std::string cache_key(Kernel k, double b, double level, int q, int step_count,
                      long replications, std::uint64_t seed) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s,%.6g,%.6g,%d,%d,%ld,%llu", to_string(k).c_str(), b,
                level, q, step_count, replications,
                static_cast<unsigned long long>(seed));
  return buf;
}

// Distinct deterministic stream id per simulator configuration.
std::uint64_t simulator_cell(Kernel k, double b, int step_count) {
  std::uint64_t cell = static_cast<std::uint64_t>(k) + 1;
  cell = detail::splitmix64(cell ^ static_cast<std::uint64_t>(std::llround(b * 1e9)));
  return detail::splitmix64(cell ^ static_cast<std::uint64_t>(step_count));
}

}  // namespace

double cv_daniell_0025(double b) {
  validate_fraction(b);
  // Quintic fit to the simulated null quantiles, evaluated by Horner.
  constexpr double c0 = 1.9659, c1 = 4.0603, c2 = 11.6626, c3 = 34.8269,
                   c4 = -13.9506, c5 = 3.2669;
  return c0 + b * (c1 + b * (c2 + b * (c3 + b * (c4 + b * c5))));
}

double CriticalValue::wald_value() const {
  return statistic == CvStatistic::AbsT ? value * value : value;
}

Eigen::MatrixXd pb_functional(const PathGrid& path, Kernel k, double b) {
  validate_fraction(b);
  const Eigen::Index N = path.steps();
  const Eigen::Index m = path.dims();
  if (N < 100) throw std::invalid_argument("path grid needs at least 100 steps");
  if (m < 1) throw std::invalid_argument("path grid has no columns");

  const Eigen::MatrixXd& Q = path.values;
  const double h = 1.0 / static_cast<double>(N);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);

  switch (fixedb_class(k)) {
    case FixedbClass::Type1:
    case FixedbClass::Type2: {
      // sum over lags of -k_b''(d h) times the lagged cross products; the
      // Type2 kernel vanishes outside |r - s| < b and adds an edge term.
      const bool compact = fixedb_class(k) == FixedbClass::Type2;
      const double scale = h * h / (b * b);
      P.noalias() += (-kernel_second_derivative(k, 0.0) * scale) * lag_products(Q, 0);
      for (Eigen::Index d = 1; d < N; ++d) {
        const double x = static_cast<double>(d) * h / b;
        if (compact && x >= 1.0) break;
        const double w = -kernel_second_derivative(k, x) * scale;
        if (w == 0.0) continue;
        const Eigen::MatrixXd C = lag_products(Q, d);
        P.noalias() += w * (C + C.transpose());
      }
      if (compact) {
        const double edge = kernel_left_derivative_at_one(k) / b * h;
        if (edge != 0.0) {
          const Eigen::Index ib = shift_steps(b, N);
          if (ib < N) {
            const Eigen::MatrixXd C = lag_products(Q, ib);
            P.noalias() += edge * (C + C.transpose());
          }
        }
      }
      break;
    }
    case FixedbClass::Bartlett: {
      const Eigen::Index ib = shift_steps(b, N);
      P.noalias() += (2.0 / b * h) * lag_products(Q, 0);
      if (ib < N) {
        const Eigen::MatrixXd C = lag_products(Q, ib);
        P.noalias() -= (1.0 / b * h) * (C + C.transpose());
      }
      break;
    }
  }
  return P;
}

Eigen::MatrixXd pb_quadratic_form_matrix(Kernel k, double b, Eigen::Index N) {
  validate_fraction(b);
  if (N < 100) throw std::invalid_argument("quadratic form needs at least 100 steps");
  const double h = 1.0 / static_cast<double>(N);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N, N);

  switch (fixedb_class(k)) {
    case FixedbClass::Type1:
    case FixedbClass::Type2: {
      const bool compact = fixedb_class(k) == FixedbClass::Type2;
      const double scale = h * h / (b * b);
      std::vector<double> w(static_cast<std::size_t>(N), 0.0);
      for (Eigen::Index d = 0; d < N; ++d) {
        const double x = static_cast<double>(d) * h / b;
        if (compact && x >= 1.0) break;
        w[static_cast<std::size_t>(d)] = -kernel_second_derivative(k, x) * scale;
      }
      for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j)
          K(i, j) = w[static_cast<std::size_t>(std::abs(i - j))];
      if (compact) {
        const double edge = kernel_left_derivative_at_one(k) / b * h;
        if (edge != 0.0) {
          const Eigen::Index ib = shift_steps(b, N);
          for (Eigen::Index i = 0; i + ib < N; ++i) {
            K(i + ib, i) += edge;
            K(i, i + ib) += edge;
          }
        }
      }
      break;
    }
    case FixedbClass::Bartlett: {
      const Eigen::Index ib = shift_steps(b, N);
      K.diagonal().setConstant(2.0 / b * h);
      for (Eigen::Index i = 0; i + ib < N; ++i) {
        K(i + ib, i) -= 1.0 / b * h;
        K(i, i + ib) -= 1.0 / b * h;
      }
      break;
    }
  }
  return K;
}

namespace {

// Map from iid step innovations z (scaled increments) to the bridge-like
// path at the grid points:
//   W~(r_i) = W(r_i) - r_i W(1) - 12 L(r_i) sum_k (s_k - 1/2) dW_k
// with L(r) = (r^2 - r)/2 and midpoint s_k = (k - 1/2)/N.
Eigen::MatrixXd bridge_matrix(Eigen::Index N) {
  const double h = 1.0 / static_cast<double>(N);
  const double root = std::sqrt(h);
  Eigen::MatrixXd B(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double r = static_cast<double>(i + 1) * h;
    const double L = 0.5 * (r * r - r);
    for (Eigen::Index kk = 0; kk < N; ++kk) {
      const double s = (static_cast<double>(kk) + 0.5) * h;
      const double step = (kk <= i ? 1.0 : 0.0) - r - 12.0 * L * (s - 0.5);
      B(i, kk) = step * root;
    }
  }
  return B;
}

// Instrument functional: Z* = sqrt(12) sum_k (s_k - 1/2) dW_k.
Eigen::VectorXd instrument_vector(Eigen::Index N) {
  const double h = 1.0 / static_cast<double>(N);
  const double root = std::sqrt(h);
  Eigen::VectorXd a(N);
  for (Eigen::Index kk = 0; kk < N; ++kk) {
    const double s = (static_cast<double>(kk) + 0.5) * h;
    a[kk] = std::sqrt(12.0) * (s - 0.5) * root;
  }
  return a;
}

}  // namespace

NullLimitSimulator::NullLimitSimulator(Kernel k, double b, int step_count) : N_(step_count) {
  if (step_count < 100)
    throw std::invalid_argument("null simulator needs at least 100 steps");
  validate_fraction(b);
  const Eigen::MatrixXd K = pb_quadratic_form_matrix(k, b, N_);
  const Eigen::MatrixXd B = bridge_matrix(N_);
  Eigen::MatrixXd S = B.transpose() * (K * B).eval();
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition of the limit form failed");
  lambda_ = es.eigenvalues();
  proj_ = es.eigenvectors().transpose() * instrument_vector(N_);
  cell_ = simulator_cell(k, b, N_);
}

NullLimitSimulator::Draw NullLimitSimulator::draw(std::uint64_t master_seed,
                                                  long replication, int q) const {
  if (q < 1) throw std::invalid_argument("q must be at least 1");
  auto gen = detail::make_engine(master_seed, cell_, static_cast<std::uint64_t>(replication));
  std::normal_distribution<double> nd(0.0, 1.0);

  Draw d;
  d.z.resize(q);
  Eigen::MatrixXd eta(N_, q);
  for (int p = 0; p < q; ++p)
    for (int i = 0; i < N_; ++i) eta(i, p) = nd(gen);
  d.z = eta.transpose() * proj_;
  d.pb = eta.transpose() * lambda_.asDiagonal() * eta;
  return d;
}

double NullLimitSimulator::abs_t_draw(std::uint64_t master_seed, long replication) const {
  const Draw d = draw(master_seed, replication, 1);
  const double pb = d.pb(0, 0);
  if (!(pb > 0.0)) return std::numeric_limits<double>::infinity();
  return std::abs(d.z[0]) / std::sqrt(pb);
}

double NullLimitSimulator::wald_draw(std::uint64_t master_seed, long replication,
                                     int q) const {
  const Draw d = draw(master_seed, replication, q);
  Eigen::LDLT<Eigen::MatrixXd> fac(d.pb);
  if (fac.info() != Eigen::Success || !fac.isPositive())
    return std::numeric_limits<double>::infinity();
  return d.z.dot(fac.solve(d.z));
}

PathGrid simulate_bridge_paths(int step_count, int dims, std::uint64_t seed) {
  if (step_count < 100)
    throw std::invalid_argument("path simulation needs at least 100 steps");
  if (dims < 1) throw std::invalid_argument("dims must be at least 1");
  const int N = step_count;
  const double h = 1.0 / N;
  const double root = std::sqrt(h);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);

  PathGrid grid;
  grid.values.resize(N, dims);
  Eigen::VectorXd w(N);
  for (int p = 0; p < dims; ++p) {
    double cum = 0.0;
    double integral = 0.0;  // sum (s_k - 1/2) dW_k, midpoint convention
    for (int i = 0; i < N; ++i) {
      const double dw = nd(gen) * root;
      cum += dw;
      w[i] = cum;
      const double s = (i + 0.5) * h;
      integral += (s - 0.5) * dw;
    }
    const double w1 = w[N - 1];
    for (int i = 0; i < N; ++i) {
      const double r = (i + 1) * h;
      const double L = 0.5 * (r * r - r);
      grid.values(i, p) = w[i] - r * w1 - 12.0 * L * integral;
    }
  }
  return grid;
}

CriticalValue simulate_null_cv(Kernel k, double b, double level, int q,
                               const SimulationConfig& cfg) {
  if (!(level > 0.0) || level >= 0.5)
    throw std::invalid_argument("level must lie in (0, 0.5)");
  if (cfg.replications < 100)
    throw std::invalid_argument("need at least 100 replications");
  if (q < 1) throw std::invalid_argument("q must be at least 1");

  const NullLimitSimulator sim(k, b, cfg.step_count);
  std::vector<double> draws(static_cast<std::size_t>(cfg.replications));
  detail::parallel_for(cfg.replications, cfg.threads, [&](long i) {
    draws[static_cast<std::size_t>(i)] =
        q == 1 ? sim.abs_t_draw(cfg.seed, i) : sim.wald_draw(cfg.seed, i, q);
  });

  CriticalValue cv;
  cv.value = quantile_type7(std::move(draws), 1.0 - level);
  cv.level = level;
  cv.b = b;
  cv.kernel = k;
  cv.q = q;
  cv.source = CvSource::Simulated;
  cv.statistic = q == 1 ? CvStatistic::AbsT : CvStatistic::Wald;
  cv.step_count = cfg.step_count;
  cv.replications = cfg.replications;
  cv.seed = cfg.seed;
  return cv;
}

CvCache::CvCache(const std::filesystem::path& file) : file_(file) {
  if (!std::filesystem::exists(file)) return;
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open critical-value cache: " + file.string());
  std::string line;
  if (!std::getline(in, line) || line != std::string("# ") + kVersionTag)
    throw std::runtime_error("unrecognized critical-value cache version in " + file.string());
  std::getline(in, line);  // column header
  long lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 8)
      throw std::runtime_error("malformed cache row at line " + std::to_string(lineno));
    try {
      CriticalValue cv;
      cv.kernel = kernel_from_string(fields[0]);
      cv.b = std::stod(fields[1]);
      cv.level = std::stod(fields[2]);
      cv.q = std::stoi(fields[3]);
      cv.step_count = std::stoi(fields[4]);
      cv.replications = std::stol(fields[5]);
      cv.seed = std::stoull(fields[6]);
      cv.value = std::stod(fields[7]);
      cv.source = CvSource::Cache;
      cv.statistic = cv.q == 1 ? CvStatistic::AbsT : CvStatistic::Wald;
      entries_[cache_key(cv.kernel, cv.b, cv.level, cv.q, cv.step_count,
                         cv.replications, cv.seed)] = cv;
    } catch (const std::exception&) {
      throw std::runtime_error("malformed cache row at line " + std::to_string(lineno));
    }
  }
}

std::optional<CriticalValue> CvCache::find(Kernel k, double b, double level, int q,
                                           const SimulationConfig& cfg) const {
  const auto it = entries_.find(
      cache_key(k, b, level, q, cfg.step_count, cfg.replications, cfg.seed));
  if (it == entries_.end()) return std::nullopt;
  CriticalValue cv = it->second;
  cv.source = CvSource::Cache;
  return cv;
}

void CvCache::store(const CriticalValue& cv) {
  entries_[cache_key(cv.kernel, cv.b, cv.level, cv.q, cv.step_count, cv.replications,
                     cv.seed)] = cv;
  if (!file_.empty()) save();
}

void CvCache::save() const {
  const std::filesystem::path tmp = file_.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write critical-value cache: " + tmp.string());
    out << "# " << kVersionTag << "\n";
    out << "kernel,b,level,q,step_count,replications,seed,cv\n";
    char buf[256];
    for (const auto& [key, cv] : entries_) {
      std::snprintf(buf, sizeof(buf), "%s,%.6g,%.6g,%d,%d,%ld,%llu,%.17g\n",
                    to_string(cv.kernel).c_str(), cv.b, cv.level, cv.q, cv.step_count,
                    cv.replications, static_cast<unsigned long long>(cv.seed), cv.value);
      out << buf;
    }
  }
  std::filesystem::rename(tmp, file_);
}

CriticalValue critical_value(Kernel k, double b, double level, int q,
                             const SimulationConfig& cfg, CvCache* cache) {
  validate_fraction(b);
  if (k == Kernel::Daniell && q == 1 && std::abs(level - 0.05) < 1e-9) {
    CriticalValue cv;
    cv.value = cv_daniell_0025(b);
    cv.level = level;
    cv.b = b;
    cv.kernel = k;
    cv.q = 1;
    cv.source = CvSource::Polynomial;
    cv.statistic = CvStatistic::AbsT;
    return cv;
  }
  if (cache) {
    if (auto hit = cache->find(k, b, level, q, cfg)) return *hit;
  }
  const CriticalValue cv = simulate_null_cv(k, b, level, q, cfg);
  if (cache) cache->store(cv);
  return cv;
}

}  // namespace trendratio

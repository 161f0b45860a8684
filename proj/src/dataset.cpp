// dataset.cpp - CSV ingestion with a drop-incomplete-columns policy.
#include "trendratio/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace trendratio {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream row(line);
  while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

// Empty cell -> nullopt; anything else must parse completely as a number.
std::optional<double> parse_cell(const std::string& cell, std::size_t row,
                                 const std::string& label) {
  if (cell.empty()) return std::nullopt;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size()) {
    std::ostringstream msg;
    msg << "cell '" << cell << "' in column '" << label << "', data row " << row + 1
        << " is not numeric";
    throw std::invalid_argument(msg.str());
  }
  return value;
}

}  // namespace

bool Dataset::has(const std::string& label) const {
  return std::any_of(series.begin(), series.end(),
                     [&](const TrendSeries& s) { return s.label == label; });
}

const TrendSeries& Dataset::at(const std::string& label) const {
  for (const TrendSeries& s : series)
    if (s.label == label) return s;
  throw std::invalid_argument("dataset '" + name + "' has no series '" + label + "'");
}

IngestResult ingest_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty input");
  const std::vector<std::string> header = split_row(line);
  if (header.size() < 2)
    throw std::invalid_argument("need a time column plus at least one series column");
  for (std::size_t a = 1; a < header.size(); ++a) {
    if (header[a].empty()) throw std::invalid_argument("blank series label in header");
    for (std::size_t b = a + 1; b < header.size(); ++b)
      if (header[a] == header[b])
        throw std::invalid_argument("duplicate series label '" + header[a] + "'");
  }

  const std::size_t n_cols = header.size();
  std::vector<double> times;
  std::vector<std::vector<double>> columns(n_cols - 1);
  std::vector<bool> incomplete(n_cols - 1, false);

  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_row(line);
    if (cells.size() != n_cols) {
      std::ostringstream msg;
      msg << "row " << times.size() + 1 << " has " << cells.size() << " cells, expected "
          << n_cols;
      throw std::invalid_argument(msg.str());
    }
    const auto time_cell = parse_cell(cells[0], times.size(), header[0]);
    if (!time_cell)
      throw std::invalid_argument("missing time value in data row " +
                                  std::to_string(times.size() + 1));
    times.push_back(*time_cell);
    for (std::size_t cidx = 1; cidx < n_cols; ++cidx) {
      const auto value = parse_cell(cells[cidx], times.size() - 1, header[cidx]);
      if (value)
        columns[cidx - 1].push_back(*value);
      else
        incomplete[cidx - 1] = true;
    }
  }

  if (times.size() < 2) throw std::invalid_argument("need at least two data rows");
  const double step = times[1] - times[0];
  if (step == 0.0) throw std::invalid_argument("time column does not advance");
  for (std::size_t row = 1; row < times.size(); ++row) {
    const double gap = times[row] - times[row - 1];
    if (std::abs(gap - step) > 1e-9 * std::max(1.0, std::abs(step))) {
      std::ostringstream msg;
      msg << "time column is not evenly spaced at data row " << row + 1 << " (step "
          << gap << ", expected " << step << ")";
      throw std::invalid_argument(msg.str());
    }
  }

  IngestResult out;
  out.data.name = name;
  out.data.start_time = times.front();
  out.data.time_step = step;
  for (std::size_t cidx = 0; cidx < columns.size(); ++cidx) {
    if (incomplete[cidx]) {
      out.warnings.push_back("dropped series '" + header[cidx + 1] +
                             "': missing values");
      continue;
    }
    TrendSeries s;
    s.label = header[cidx + 1];
    s.values = Eigen::Map<const Eigen::VectorXd>(
        columns[cidx].data(), static_cast<Eigen::Index>(columns[cidx].size()));
    out.data.series.push_back(std::move(s));
  }
  return out;
}

IngestResult ingest_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::string stem = path;
  if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
    stem = stem.substr(slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0)
    stem = stem.substr(0, dot);
  return ingest_csv(in, stem);
}

namespace {

// Shortest decimal form that parses back to the identical double.
void put_exact(std::ostream& out, double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void emit_csv(const Dataset& data, std::ostream& out, const std::string& time_label) {
  out << time_label;
  for (const TrendSeries& s : data.series) out << "," << s.label;
  out << "\n";
  for (Eigen::Index t = 0; t < data.length(); ++t) {
    put_exact(out, data.start_time + static_cast<double>(t) * data.time_step);
    for (const TrendSeries& s : data.series) {
      out << ",";
      put_exact(out, s.values[t]);
    }
    out << "\n";
  }
}

}  // namespace trendratio

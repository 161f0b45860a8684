// Column-oriented time-series container and CSV ingestion for the reporting
// pipeline.  A dataset holds one trend series per labeled column over a
// shared, evenly spaced time grid.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trendratio/series.hpp"

namespace trendratio {

struct Dataset {
  std::string name;                 // source tag, e.g. the file stem
  double start_time = 0.0;          // first time value (e.g. start year)
  double time_step = 1.0;           // spacing between rows (e.g. years)
  std::vector<TrendSeries> series;  // column order preserved; labels unique

  Eigen::Index length() const {
    return series.empty() ? 0 : series.front().values.size();
  }
  bool has(const std::string& label) const;
  // Throws std::invalid_argument naming the label when absent.
  const TrendSeries& at(const std::string& label) const;
};

struct IngestResult {
  Dataset data;
  // One human-readable line per dropped column, naming it.
  std::vector<std::string> warnings;
};

// CSV layout: header row with the time column first, then one column per
// series; numeric cells; an empty cell marks the value missing and drops that
// whole column (with a warning).  Throws std::invalid_argument on ragged
// rows, unparseable numbers, duplicate labels, a non-uniform time column, or
// fewer than two data rows.
IngestResult ingest_csv(std::istream& in, const std::string& name);
IngestResult ingest_csv_file(const std::string& path);

// Writes the dataset back out in the same layout ingest_csv reads.
void emit_csv(const Dataset& data, std::ostream& out,
              const std::string& time_label = "time");

}  // namespace trendratio

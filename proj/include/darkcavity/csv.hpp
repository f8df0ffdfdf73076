#pragma once

// CSV and line-delimited-record writers.  Every file starts with a versioned
// schema comment ("# darkcavity-csv v1 kind=<kind>"), doubles are printed
// with %.17g so reruns are byte-identical, and writes go through a
// write-then-rename so readers never observe a half-written file.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "darkcavity/mcwf.hpp"
#include "darkcavity/observables.hpp"
#include "darkcavity/scan.hpp"
#include "darkcavity/types.hpp"

namespace darkcavity {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw Error("write failed on '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

namespace detail {

inline std::string csv_header(const std::string& kind,
                              const std::vector<std::string>& columns) {
  std::string s = "# darkcavity-csv v1 kind=" + kind + "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) s += ',';
    s += columns[c];
  }
  s += '\n';
  return s;
}

}  // namespace detail

// Generic table writer; every cell is preformatted text.
inline void write_csv(const std::filesystem::path& path,
                      const std::string& kind,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string s = detail::csv_header(kind, columns);
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw DimensionError("write_csv: row width mismatch");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) s += ',';
      s += row[c];
    }
    s += '\n';
  }
  write_text_atomic(path, s);
}

// Long-format scan table.  Column order: one column per scan axis (axis 0
// first), then value, converged, residual.
inline void write_scan_csv(const std::filesystem::path& path,
                           const ScanResult& result) {
  std::vector<std::string> columns;
  for (const auto& ax : result.spec.axes) columns.push_back(ax.parameter);
  columns.push_back("value");
  columns.push_back("converged");
  columns.push_back("residual");

  const int n1 =
      result.shape.size() == 2 ? result.shape[1] : 1;
  std::vector<std::vector<std::string>> rows;
  rows.reserve(result.points.size());
  for (int k = 0; k < result.n_points(); ++k) {
    const int i = k / n1, j = k % n1;
    std::vector<std::string> row;
    row.push_back(
        format_double(result.spec.axes[0].grid[std::size_t(i)]));
    if (result.shape.size() == 2)
      row.push_back(
          format_double(result.spec.axes[1].grid[std::size_t(j)]));
    const ScanPoint& pt = result.at(k);
    row.push_back(format_double(pt.value));
    row.push_back(pt.converged ? "1" : "0");
    row.push_back(format_double(pt.residual));
    rows.push_back(std::move(row));
  }
  write_csv(path, "scan", columns, rows);
}

inline void write_curves_csv(const std::filesystem::path& path,
                             const EigenCurves& curves) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t b = 0; b < curves.delta12.size(); ++b)
    for (std::size_t k = 0; k < curves.delta23.size(); ++k)
      rows.push_back({std::to_string(b), format_double(curves.delta23[k]),
                      format_double(curves.delta12[b][k])});
  write_csv(path, "eigenenergy-curves", {"branch", "delta23", "delta12"},
            rows);
}

inline void write_correlation_csv(const std::filesystem::path& path,
                                  const CorrelationSeries& series) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < series.tau_grid.size(); ++k)
    rows.push_back(
        {format_double(series.tau_grid[k]), format_double(series.values[k])});
  write_csv(path, "g2-correlation", {"tau_us", "g2"}, rows);
}

// One trajectory per line: master-derived seed, photon count, terminal
// state, and the jump record (time in us, channel index).
inline void write_trajectories_jsonl(
    const std::filesystem::path& path,
    const std::vector<TrajectoryResult>& trajectories) {
  std::string s;
  for (const auto& t : trajectories) {
    nlohmann::json rec;
    rec["seed"] = t.seed;
    rec["photons"] = t.cavity_photon_count;
    rec["terminal"] = t.terminal_state;
    nlohmann::json jumps = nlohmann::json::array();
    for (const auto& j : t.jump_events)
      jumps.push_back({j.time, j.channel});
    rec["jumps"] = std::move(jumps);
    s += rec.dump();
    s += '\n';
  }
  write_text_atomic(path, s);
}

// Two-column numeric reader used for the optional experimental-overlay
// comparison.  Skips '#' comments and a non-numeric header row.
inline std::vector<std::array<double, 2>> read_xy_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::vector<std::array<double, 2>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    try {
      const double x = std::stod(line.substr(0, comma));
      const double y = std::stod(line.substr(comma + 1));
      out.push_back({x, y});
    } catch (const std::exception&) {
      continue;  // header row
    }
  }
  return out;
}

}  // namespace darkcavity

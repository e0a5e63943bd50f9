#pragma once

// CSV rows and plot-data tables for finished runs.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "cv2x/engine.hpp"

namespace cv2x::report {

inline constexpr const char* kCsvHeader = "run_id,seed,n_vehicles,mode,d,aoi_th,pdr_pct,aois_pct";

inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string cell(const std::optional<double>& v) { return v ? fixed(*v) : "NA"; }

inline std::string run_id(const RunReport& r) {
  return "n" + std::to_string(r.n_vehicles) + "-" + to_string(r.mode) + "-s" + std::to_string(r.seed);
}

inline std::string trim_number(double v) {
  std::string s = fixed(v, 3);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

/// One row per (d, aoi_th).
inline std::vector<std::string> csv_rows(const RunReport& r) {
  std::vector<std::string> rows;
  const auto& m = r.metrics;
  for (std::size_t d = 0; d < m.d_list.size(); ++d) {
    for (std::size_t t = 0; t < m.aoi_th_list.size(); ++t) {
      rows.push_back(run_id(r) + "," + std::to_string(r.seed) + "," + std::to_string(r.n_vehicles) + "," +
                     to_string(r.mode) + "," + trim_number(m.d_list[d]) + "," + std::to_string(m.aoi_th_list[t]) +
                     "," + cell(m.pdr_pct(d)) + "," + cell(m.aois_pct(d, t)));
    }
  }
  return rows;
}

/// Header plus all rows, ordered by (n, mode, seed) then grid order, independent of run order.
inline void write_csv(std::ostream& out, const std::vector<RunReport>& reports) {
  std::vector<const RunReport*> order;
  for (const auto& r : reports) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const RunReport* a, const RunReport* b) {
    return std::tie(a->n_vehicles, a->mode, a->seed) < std::tie(b->n_vehicles, b->mode, b->seed);
  });
  out << kCsvHeader << '\n';
  for (const auto* r : order)
    for (const auto& row : csv_rows(*r)) out << row << '\n';
}

namespace detail {
struct Mean {
  double sum = 0.0;
  int count = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++count;
    }
  }
  std::string str() const { return count == 0 ? "NA" : fixed(sum / count); }
};
}  // namespace detail

/// Seed-averaged PDR: columns n d standard enhanced.
inline void write_pdr_plot(std::ostream& out, const std::vector<RunReport>& reports) {
  std::map<std::tuple<int, double>, std::map<Mode, detail::Mean>> table;
  for (const auto& r : reports)
    for (std::size_t d = 0; d < r.metrics.d_list.size(); ++d)
      table[{r.n_vehicles, r.metrics.d_list[d]}][r.mode].add(r.metrics.pdr_pct(d));
  out << "# n d_m pdr_standard_pct pdr_enhanced_pct\n";
  for (auto& [key, modes] : table)
    out << std::get<0>(key) << ' ' << trim_number(std::get<1>(key)) << ' ' << modes[Mode::standard].str() << ' '
        << modes[Mode::enhanced].str() << '\n';
}

/// Seed-averaged AoIS: columns n d aoi_th standard enhanced.
inline void write_aois_plot(std::ostream& out, const std::vector<RunReport>& reports) {
  std::map<std::tuple<int, double, int>, std::map<Mode, detail::Mean>> table;
  for (const auto& r : reports)
    for (std::size_t d = 0; d < r.metrics.d_list.size(); ++d)
      for (std::size_t t = 0; t < r.metrics.aoi_th_list.size(); ++t)
        table[{r.n_vehicles, r.metrics.d_list[d], r.metrics.aoi_th_list[t]}][r.mode].add(r.metrics.aois_pct(d, t));
  out << "# n d_m aoi_th_ms aois_standard_pct aois_enhanced_pct\n";
  for (auto& [key, modes] : table)
    out << std::get<0>(key) << ' ' << trim_number(std::get<1>(key)) << ' ' << std::get<2>(key) << ' '
        << modes[Mode::standard].str() << ' ' << modes[Mode::enhanced].str() << '\n';
}

}  // namespace cv2x::report

#pragma once

// Packet delivery ratio within distance d, and the share of periodic freshness
// checks whose age of information exceeds a threshold.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cv2x/core.hpp"
#include "cv2x/phy.hpp"

namespace cv2x {

/// Generation time of the freshest packet each receiver holds from each sender.
class AoiTable {
 public:
  static constexpr AbsSubframe kNever = -1;

  explicit AoiTable(int n) : n_(n), gen_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), kNever) {}

  int size() const { return n_; }

  void update(int receiver, int sender, AbsSubframe generated_at) {
    auto& e = gen_[index(receiver, sender)];
    e = std::max(e, generated_at);
  }

  std::optional<AbsSubframe> freshest(int receiver, int sender) const {
    const auto e = gen_[index(receiver, sender)];
    return e == kNever ? std::nullopt : std::optional<AbsSubframe>(e);
  }

  /// Age in subframes (= ms); +inf before the first reception.
  double age(int receiver, int sender, AbsSubframe now) const {
    const auto e = gen_[index(receiver, sender)];
    return e == kNever ? std::numeric_limits<double>::infinity() : static_cast<double>(now - e);
  }

 private:
  std::size_t index(int r, int s) const {
    if (r < 0 || s < 0 || r >= n_ || s >= n_) throw std::out_of_range("AoiTable index out of range");
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(s);
  }

  int n_;
  std::vector<AbsSubframe> gen_;
};

/// One (sender, receiver) leg of a broadcast.
struct LinkObservation {
  double distance_m = 0.0;
  bool decoded = false;
};

struct MetricsReport {
  std::vector<double> d_list;
  std::vector<int> aoi_th_list;
  std::vector<std::uint64_t> pdr_success, pdr_total;  // per d
  std::vector<std::uint64_t> aois_exceed, aois_checks;  // per (d, th), th fastest

  std::optional<double> pdr_pct(std::size_t d) const {
    if (pdr_total[d] == 0) return std::nullopt;
    return 100.0 * static_cast<double>(pdr_success[d]) / static_cast<double>(pdr_total[d]);
  }

  std::optional<double> aois_pct(std::size_t d, std::size_t th) const {
    const auto k = d * aoi_th_list.size() + th;
    if (aois_checks[k] == 0) return std::nullopt;
    return 100.0 * static_cast<double>(aois_exceed[k]) / static_cast<double>(aois_checks[k]);
  }
};

class MetricsAccumulator {
 public:
  MetricsAccumulator(std::vector<double> d_list, std::vector<int> aoi_th_list) {
    if (d_list.empty() || aoi_th_list.empty()) throw std::invalid_argument("metric grids must be non-empty");
    r_.d_list = std::move(d_list);
    r_.aoi_th_list = std::move(aoi_th_list);
    r_.pdr_success.assign(r_.d_list.size(), 0);
    r_.pdr_total.assign(r_.d_list.size(), 0);
    r_.aois_exceed.assign(r_.d_list.size() * r_.aoi_th_list.size(), 0);
    r_.aois_checks.assign(r_.d_list.size() * r_.aoi_th_list.size(), 0);
  }

  /// Every receiver within d counts toward PDR(d); successes are decoded transport blocks.
  void record_transmission(std::span<const LinkObservation> legs) {
    for (const auto& leg : legs) {
      for (std::size_t k = 0; k < r_.d_list.size(); ++k) {
        if (leg.distance_m > r_.d_list[k]) continue;
        ++r_.pdr_total[k];
        if (leg.decoded) ++r_.pdr_success[k];
      }
    }
  }

  /// One freshness check: each receiver against every other vehicle within d.
  void aoi_check(const AoiTable& table, std::span<const Vec2> positions, AbsSubframe now) {
    const int n = table.size();
    if (positions.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("positions/table size mismatch");
    const auto nth = r_.aoi_th_list.size();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double d = distance(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(j)]);
        const double age = table.age(i, j, now);
        for (std::size_t k = 0; k < r_.d_list.size(); ++k) {
          if (d > r_.d_list[k]) continue;
          for (std::size_t t = 0; t < nth; ++t) {
            ++r_.aois_checks[k * nth + t];
            if (age > r_.aoi_th_list[t]) ++r_.aois_exceed[k * nth + t];
          }
        }
      }
    }
  }

  const MetricsReport& report() const { return r_; }

 private:
  MetricsReport r_;
};

}  // namespace cv2x

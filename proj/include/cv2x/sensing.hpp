#pragma once

// Per-vehicle sensing database: a ring of the most recent subframe records and
// the two average-RSSI rankings computed from it.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cv2x/core.hpp"
#include "cv2x/sci.hpp"
#include "cv2x/units.hpp"

namespace cv2x {

inline constexpr int kSensingWindow = 1000;

/// A-RSSI reported for a candidate with no contributing measurement.
inline constexpr double kRssiFloorDbm = -120.0;

struct DecodedSci {
  SsrCoord coord;
  AbsSubframe at = 0;
  sci::Message sci;
  double rsrp_dbm = 0.0;
};

struct SubframeRecord {
  AbsSubframe at = std::numeric_limits<AbsSubframe>::min();  // never written
  bool monitored = false;
  std::vector<std::optional<double>> rssi_dbm;  // per subchannel, empty when unmonitored
  std::vector<DecodedSci> decoded;
};

/// One entry of C_sen as seen by the scheduler.
struct DecodedReservation {
  SsrCoord coord;
  AbsSubframe at = 0;
  double rsrp_dbm = 0.0;
  int rri = 0;  // subframes
  int rc = 1;   // transmissions reserved from `coord` on, including it
};

class SensingDb {
 public:
  explicit SensingDb(int sc, int window = kSensingWindow) : sc_(sc), window_(window), ring_(window) {
    if (sc < 1) throw std::invalid_argument("SensingDb needs sc >= 1");
    if (window < 1) throw std::invalid_argument("SensingDb needs a positive window");
  }

  int sc() const { return sc_; }
  int window() const { return window_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  AbsSubframe latest() const { return latest_; }

  /// Appends the record for subframe `at`, evicting the record `window` subframes older.
  void record(AbsSubframe at, bool monitored, std::span<const std::optional<double>> rssi_dbm,
              std::span<const DecodedSci> decoded) {
    if (!monitored && (!rssi_dbm.empty() || !decoded.empty()))
      throw std::invalid_argument("unmonitored subframe cannot carry observations");
    if (monitored && rssi_dbm.size() != static_cast<std::size_t>(sc_))
      throw std::invalid_argument("monitored subframe needs one RSSI slot per subchannel");
    if (count_ > 0 && at <= latest_) throw std::invalid_argument("sensing records must advance in time");

    auto& slot = ring_[static_cast<std::size_t>(detail::pos_mod(at, window_))];
    slot.at = at;
    slot.monitored = monitored;
    slot.rssi_dbm.assign(rssi_dbm.begin(), rssi_dbm.end());
    slot.decoded.assign(decoded.begin(), decoded.end());
    latest_ = at;
    count_ = std::min<std::size_t>(count_ + 1, static_cast<std::size_t>(window_));
  }

  void record_unmonitored(AbsSubframe at) { record(at, false, {}, {}); }

  /// The record for subframe t, or null when t was never recorded or has been evicted.
  const SubframeRecord* find(AbsSubframe t) const {
    if (count_ == 0 || t > latest_ || t <= latest_ - window_) return nullptr;
    const auto& slot = ring_[static_cast<std::size_t>(detail::pos_mod(t, window_))];
    return slot.at == t ? &slot : nullptr;
  }

  /// Records in chronological order.
  template <class F>
  void for_each(F&& f) const {
    if (count_ == 0) return;
    for (AbsSubframe t = latest_ - window_ + 1; t <= latest_; ++t)
      if (const auto* r = find(t)) f(*r);
  }

 private:
  int sc_;
  int window_;
  std::vector<SubframeRecord> ring_;
  std::size_t count_ = 0;
  AbsSubframe latest_ = -1;
};

/// ceil(100 / rt): the remaining-RC guess for a reservation whose SCI carries no counter.
inline int estimated_rc(int rt) { return (100 + rt - 1) / rt; }

/// C_sen. Enhanced mode reads RC from the SCI; standard mode substitutes the estimate.
inline std::vector<DecodedReservation> decoded_reservations(const SensingDb& db, Mode mode, int rt) {
  std::vector<DecodedReservation> out;
  db.for_each([&](const SubframeRecord& r) {
    for (const auto& d : r.decoded) {
      const int rri = static_cast<int>(d.sci.rri_code) * 10;
      const int rc = mode == Mode::enhanced ? static_cast<int>(d.sci.rc) : estimated_rc(rt);
      if (rri <= 0 || rc < 1) continue;
      out.push_back({d.coord, d.at, d.rsrp_dbm, rri, rc});
    }
  });
  return out;
}

namespace detail {
struct PowerMean {
  double sum_mw = 0.0;
  int count = 0;
  void add(double dbm) {
    sum_mw += dbm_to_mw(dbm);
    ++count;
  }
  double dbm() const { return count == 0 ? kRssiFloorDbm : mw_to_dbm(sum_mw / count); }
};

inline void add_if_measured(PowerMean& acc, const SensingDb& db, AbsSubframe t, int subchannel) {
  const auto* rec = db.find(t);
  if (rec == nullptr || !rec->monitored) return;
  const auto& v = rec->rssi_dbm[static_cast<std::size_t>(subchannel)];
  if (v) acc.add(*v);
}
}  // namespace detail

/// Mean RSSI over the window subframes a positive multiple of 100 before the candidate.
inline double a_rssi_standard(const SensingDb& db, const SsrCoord& candidate, AbsSubframe now) {
  const AbsSubframe tc = resolve_not_before(now, candidate);
  const AbsSubframe lo = now - db.window();
  detail::PowerMean acc;
  for (AbsSubframe w = tc - 100; w >= lo; w -= 100)
    if (w < now) detail::add_if_measured(acc, db, w, candidate.subchannel);
  return acc.dbm();
}

/// Largest hop considered when relating a window cell to a candidate through CO.
inline int co_hop_bound(int rt, int window = kSensingWindow) {
  const int span = window + 100;
  return (span + rt - 1) / rt;
}

/// Mean RSSI over window cells w on the candidate's subchannel with CO^[i](w) == candidate, i >= 1.
inline double a_rssi_enhanced(const SensingDb& db, const SsrCoord& candidate, int rt, AbsSubframe now) {
  const AbsSubframe lo = now - db.window();
  const int hops = co_hop_bound(rt, db.window());
  detail::PowerMean acc;
  for (int i = 1; i <= hops; ++i) {
    const AbsSubframe w = resolve_not_after(now - 1, co_map_preimage(candidate, i, rt));
    if (w >= lo) detail::add_if_measured(acc, db, w, candidate.subchannel);
  }
  return acc.dbm();
}

}  // namespace cv2x

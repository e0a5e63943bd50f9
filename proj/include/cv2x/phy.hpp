#pragma once

// Threshold PHY: path loss, thermal noise, per-subchannel SINR, half-duplex.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cv2x/core.hpp"
#include "cv2x/random.hpp"
#include "cv2x/units.hpp"

namespace cv2x {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct LinkBudget {
  double tx_power_dbm = 23.0;
  double fc_ghz = 5.9;
  double bandwidth_hz = 9.0e6;  // occupied part of the 10 MHz channel
  double noise_figure_db = 9.0;
  double sinr_threshold_tb_db = 5.0;
  double sinr_threshold_sci_db = 2.0;
  double rsrp_offset_db = 0.0;
  bool shadowing = false;
  double shadowing_sigma_db = 3.0;

  void validate() const {
    for (double v : {tx_power_dbm, fc_ghz, bandwidth_hz, noise_figure_db, sinr_threshold_tb_db,
                     sinr_threshold_sci_db, rsrp_offset_db, shadowing_sigma_db})
      if (!std::isfinite(v)) throw std::invalid_argument("link budget fields must be finite");
    if (fc_ghz <= 0.0) throw std::invalid_argument("link.fc_ghz must be positive");
    if (bandwidth_hz <= 0.0) throw std::invalid_argument("link.bandwidth_hz must be positive");
    if (shadowing_sigma_db < 0.0) throw std::invalid_argument("link.shadowing_sigma_db must be >= 0");
  }
};

/// WINNER+ B1 LOS: 22.7 log10(d) + 41.0 + 20 log10(fc/5), d clamped to >= 10 m.
inline double path_loss(double d_m, double fc_ghz) {
  if (!(d_m > 0.0)) throw std::invalid_argument("path_loss needs a positive distance");
  const double d = std::max(d_m, 10.0);
  return 22.7 * std::log10(d) + 41.0 + 20.0 * std::log10(fc_ghz / 5.0);
}

inline double noise_power(double bandwidth_hz, double nf_db) {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("noise bandwidth must be positive");
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + nf_db;
}

/// Symmetric per-link log-normal shadowing, redrawn for each mobility epoch.
class Shadowing {
 public:
  Shadowing(std::uint64_t seed, double sigma_db) : seed_(seed), sigma_db_(sigma_db) {}

  void set_epoch(std::int64_t epoch) { epoch_ = epoch; }

  double db(int a, int b) const {
    if (a > b) std::swap(a, b);
    std::uint64_t h = splitmix64(seed_ ^ static_cast<std::uint64_t>(epoch_));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(a) << 32 | static_cast<std::uint32_t>(b)));
    const double u1 = std::max(unit_interval(h), 1e-300);
    const double u2 = unit_interval(splitmix64(h));
    return sigma_db_ * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t seed_;
  double sigma_db_;
  std::int64_t epoch_ = 0;
};

struct Transmission {
  int vehicle = 0;
  SsrCoord coord;
};

struct Reception {
  int tx_index = 0;  // into the transmission list
  int receiver = 0;
  double rsrp_dbm = 0.0;
  double sinr_db = 0.0;
  bool sci_ok = false;
  bool tb_ok = false;
};

struct SubframeOutcome {
  int sc = 0;
  std::vector<char> transmitting;  // per vehicle
  std::vector<double> rssi_dbm;    // per vehicle x subchannel; meaningful only for listeners
  std::vector<Reception> receptions;

  double rssi(int vehicle, int subchannel) const {
    return rssi_dbm[static_cast<std::size_t>(vehicle) * static_cast<std::size_t>(sc) +
                    static_cast<std::size_t>(subchannel)];
  }
};

/// Received power at every listener for one subframe. Fills `out`, reusing its storage.
inline void resolve_subframe(std::span<const Transmission> txs, std::span<const Vec2> positions, const LinkBudget& lb,
                             int sc, SubframeOutcome& out, const Shadowing* shadow = nullptr) {
  const auto n = positions.size();
  out.sc = sc;
  out.transmitting.assign(n, 0);
  out.receptions.clear();
  for (const auto& t : txs) {
    if (t.vehicle < 0 || static_cast<std::size_t>(t.vehicle) >= n)
      throw std::out_of_range("transmitter " + std::to_string(t.vehicle) + " has no position");
    if (t.coord.subchannel < 0 || t.coord.subchannel >= sc)
      throw std::out_of_range("transmission subchannel out of range");
    auto& flag = out.transmitting[static_cast<std::size_t>(t.vehicle)];
    if (flag) throw std::invalid_argument("vehicle " + std::to_string(t.vehicle) + " transmits twice in one subframe");
    flag = 1;
  }

  const double noise_mw = dbm_to_mw(noise_power(lb.bandwidth_hz, lb.noise_figure_db));
  out.rssi_dbm.assign(n * static_cast<std::size_t>(sc), mw_to_dbm(noise_mw));
  if (txs.empty()) return;

  std::vector<double> rx_dbm(txs.size());
  std::vector<double> rx_mw(txs.size());
  std::vector<double> total_mw(static_cast<std::size_t>(sc));
  for (std::size_t v = 0; v < n; ++v) {
    if (out.transmitting[v]) continue;
    std::fill(total_mw.begin(), total_mw.end(), 0.0);
    for (std::size_t k = 0; k < txs.size(); ++k) {
      const auto src = static_cast<std::size_t>(txs[k].vehicle);
      const double d = std::max(distance(positions[src], positions[v]), 1e-3);
      double p = lb.tx_power_dbm - path_loss(d, lb.fc_ghz);
      if (shadow != nullptr) p += shadow->db(static_cast<int>(src), static_cast<int>(v));
      rx_dbm[k] = p;
      rx_mw[k] = dbm_to_mw(p);
      total_mw[static_cast<std::size_t>(txs[k].coord.subchannel)] += rx_mw[k];
    }
    for (int z = 0; z < sc; ++z)
      out.rssi_dbm[v * static_cast<std::size_t>(sc) + static_cast<std::size_t>(z)] =
          mw_to_dbm(total_mw[static_cast<std::size_t>(z)] + noise_mw);
    for (std::size_t k = 0; k < txs.size(); ++k) {
      double interference_mw = 0.0;
      for (std::size_t j = 0; j < txs.size(); ++j)
        if (j != k && txs[j].coord.subchannel == txs[k].coord.subchannel) interference_mw += rx_mw[j];
      const double sinr = rx_dbm[k] - mw_to_dbm(interference_mw + noise_mw);
      out.receptions.push_back({static_cast<int>(k), static_cast<int>(v), rx_dbm[k] + lb.rsrp_offset_db, sinr,
                                sinr >= lb.sinr_threshold_sci_db, sinr >= lb.sinr_threshold_tb_db});
    }
  }
}

inline SubframeOutcome resolve_subframe(std::span<const Transmission> txs, std::span<const Vec2> positions,
                                        const LinkBudget& lb, int sc, const Shadowing* shadow = nullptr) {
  SubframeOutcome out;
  resolve_subframe(txs, positions, lb, sc, out, shadow);
  return out;
}

}  // namespace cv2x

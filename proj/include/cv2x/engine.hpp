#pragma once

// Subframe-granular simulation of one seeded scenario, and sweeps over many.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "cv2x/core.hpp"
#include "cv2x/metrics.hpp"
#include "cv2x/mobility.hpp"
#include "cv2x/phy.hpp"
#include "cv2x/random.hpp"
#include "cv2x/scheduler.hpp"
#include "cv2x/sci.hpp"
#include "cv2x/sensing.hpp"

namespace cv2x {

struct ScenarioConfig {
  int n_vehicles = 50;
  Mode mode = Mode::enhanced;
  double duration_s = 30.0;  // measured after the warm-up
  std::uint64_t seed = 1;
  int warmup_subframes = kSensingWindow;
  int message_size_bytes = 190;
  int mcs = 11;
  PoolConfig pool;
  LinkBudget link;
  mobility::MobilityConfig mobility;
  std::vector<double> d_list{100.0, 200.0, 300.0, 400.0, 500.0};
  std::vector<int> aoi_th_list{50, 100, 200};

  AbsSubframe duration_subframes() const { return static_cast<AbsSubframe>(std::llround(duration_s * 1000.0)); }
  AbsSubframe total_subframes() const { return warmup_subframes + duration_subframes(); }
  AbsSubframe metrics_start() const { return warmup_subframes + pool.rt; }

  void validate() const {
    if (n_vehicles < 1) throw std::invalid_argument("scenario.n_vehicles must be >= 1");
    if (!(duration_s > 0.0)) throw std::invalid_argument("scenario.duration_s must be positive");
    if (duration_subframes() <= pool.rt)
      throw std::invalid_argument("scenario.duration_s must exceed one packet period");
    if (warmup_subframes < kSensingWindow)
      throw std::invalid_argument("scenario.warmup_subframes must cover the 1000-subframe sensing window");
    if (message_size_bytes <= 0) throw std::invalid_argument("scenario.message_size_bytes must be positive");
    if (mcs < 0 || mcs > 31) throw std::invalid_argument("scenario.mcs must fit 5 bits");
    pool.validate();
    (void)sci::frl_bits(pool.sc);
    link.validate();
    mobility.validate();
    if (d_list.empty() || aoi_th_list.empty()) throw std::invalid_argument("d_list and aoi_th_list must be non-empty");
    if (!std::is_sorted(d_list.begin(), d_list.end()) ||
        std::adjacent_find(d_list.begin(), d_list.end()) != d_list.end() || d_list.front() <= 0.0)
      throw std::invalid_argument("d_list must be positive and strictly ascending");
    if (!std::is_sorted(aoi_th_list.begin(), aoi_th_list.end()) ||
        std::adjacent_find(aoi_th_list.begin(), aoi_th_list.end()) != aoi_th_list.end() || aoi_th_list.front() < 0)
      throw std::invalid_argument("aoi_th_list must be non-negative and strictly ascending");
  }
};

struct RunDiagnostics {
  std::uint64_t transmissions = 0;
  std::uint64_t selections = 0;
  std::uint64_t keeps = 0;
  std::uint64_t dropped_packets = 0;  // superseded before being sent
  std::uint64_t collisions = 0;       // same-cell transmissions in a subframe
  std::uint64_t mobility_gap_violations = 0;
  std::uint64_t mobility_emergency_stops = 0;
  std::uint64_t spacing_violations = 0;
};

struct RunReport {
  MetricsReport metrics;
  RunDiagnostics diagnostics;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  int n_vehicles = 0;
  Mode mode = Mode::standard;
  double wall_clock_s = 0.0;
};

/// Observer hooks for tracing. All are optional.
struct RunObserver {
  std::function<void(int vehicle, const SelectionTrace&)> on_selection;
  std::function<void(AbsSubframe t, int vehicle, const SsrCoord& where, std::uint32_t sci_word)> on_transmission;
};

namespace detail {
struct VehicleRuntime {
  SchedulerState sched;
  SensingDb db;
  Rng rng;
  int phase = 0;
  AbsSubframe freshest_gen = -1;
  bool freshest_sent = true;
};
}  // namespace detail

inline RunReport run(const ScenarioConfig& cfg, std::uint64_t config_hash = 0, const RunObserver* observer = nullptr) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  const auto& pool = cfg.pool;
  const int n = cfg.n_vehicles;
  const AbsSubframe warmup = cfg.warmup_subframes;
  const AbsSubframe end = cfg.total_subframes();
  const AbsSubframe metrics_start = cfg.metrics_start();
  const auto format = sci::format_for(cfg.mode == Mode::enhanced);

  mobility::World world(cfg.mobility, n, make_stream(cfg.seed, stream::mobility));
  std::vector<Vec2> positions = world.positions();
  Shadowing shadow(stream_seed(cfg.seed, stream::shadowing), cfg.link.shadowing_sigma_db);
  const Shadowing* shadow_ptr = cfg.link.shadowing ? &shadow : nullptr;

  std::vector<detail::VehicleRuntime> vs;
  vs.reserve(static_cast<std::size_t>(n));
  Rng phase_rng = make_stream(cfg.seed, stream::phases);
  for (int v = 0; v < n; ++v) {
    detail::VehicleRuntime rt{{}, SensingDb(pool.sc), make_stream(cfg.seed, stream::scheduler_base + v), 0, -1, true};
    rt.sched.mode = cfg.mode;
    rt.sched.p_th_dbm = pool.p_th_init_dbm;
    rt.phase = std::uniform_int_distribution<int>(0, pool.rt - 1)(phase_rng);
    vs.push_back(std::move(rt));
  }

  AoiTable aoi(n);
  MetricsAccumulator acc(cfg.d_list, cfg.aoi_th_list);
  RunDiagnostics diag;

  std::vector<Transmission> txs;
  std::vector<std::uint32_t> words;
  std::vector<AbsSubframe> tx_gen;
  SubframeOutcome outcome;
  std::vector<std::optional<double>> rssi(static_cast<std::size_t>(pool.sc));
  std::vector<DecodedSci> decoded;
  std::vector<LinkObservation> legs;
  std::vector<char> tb_ok(static_cast<std::size_t>(n));
  SelectionTrace trace;
  const bool tracing = observer != nullptr && observer->on_selection;

  for (AbsSubframe t = 0; t < end; ++t) {
    if (t > 0 && t % 100 == 0) {
      const auto st = world.step();
      diag.mobility_gap_violations += static_cast<std::uint64_t>(st.gap_violations);
      diag.mobility_emergency_stops += static_cast<std::uint64_t>(st.emergency_stops);
      diag.spacing_violations += static_cast<std::uint64_t>(world.spacing_violations());
      positions = world.positions();
      shadow.set_epoch(t / 100);
      if (t >= metrics_start) acc.aoi_check(aoi, positions, t);
    }

    // Packet generation; a vehicle without a reservation selects one now.
    if (t >= warmup) {
      for (int v = 0; v < n; ++v) {
        auto& rt = vs[static_cast<std::size_t>(v)];
        if ((t - warmup) % pool.rt != rt.phase) continue;
        if (!rt.freshest_sent) ++diag.dropped_packets;
        rt.freshest_gen = t;
        rt.freshest_sent = false;
        if (rt.sched.active) continue;
        if (rt.sched.rc == 0) rt.sched.rc = draw_rc(pool, rt.rng);
        const Candidate pick = select(rt.db, rt.sched, pool, t, rt.rng, tracing ? &trace : nullptr);
        adopt(rt.sched, pick);
        ++diag.selections;
        if (tracing) observer->on_selection(v, trace);
      }
    }

    // Reserved transmissions.
    txs.clear();
    words.clear();
    tx_gen.clear();
    for (int v = 0; v < n; ++v) {
      auto& rt = vs[static_cast<std::size_t>(v)];
      if (!rt.sched.active) continue;
      if (rt.sched.next_at < t) throw std::logic_error("reservation chain fell behind the clock");
      if (rt.sched.next_at != t) continue;
      const int rc_before = rt.sched.rc;
      const SsrCoord where = next_transmission(rt.sched, pool.rt);
      sci::Message m;
      m.rri_code = static_cast<std::uint32_t>(pool.rt / 10);
      m.frl = static_cast<std::uint32_t>(where.subchannel);
      m.mcs = static_cast<std::uint32_t>(cfg.mcs);
      if (format == sci::Format::proposed) m.rc = static_cast<std::uint32_t>(rc_before);
      const std::uint32_t word = sci::encode(m, pool.sc, format);
      txs.push_back({v, where});
      words.push_back(word);
      tx_gen.push_back(rt.freshest_gen);
      rt.freshest_sent = true;
      ++diag.transmissions;
      if (observer != nullptr && observer->on_transmission) observer->on_transmission(t, v, where, word);
      if (rt.sched.rc == 0 && on_rc_zero(rt.sched, pool, rt.rng).keep) ++diag.keeps;
    }
    for (std::size_t a = 0; a < txs.size(); ++a)
      for (std::size_t b = a + 1; b < txs.size(); ++b)
        if (txs[a].coord.subchannel == txs[b].coord.subchannel) ++diag.collisions;

    resolve_subframe(txs, positions, cfg.link, pool.sc, outcome, shadow_ptr);

    // Sensing and AoI. Receptions are grouped by receiver.
    std::size_t r = 0;
    for (int v = 0; v < n; ++v) {
      auto& rt = vs[static_cast<std::size_t>(v)];
      if (outcome.transmitting[static_cast<std::size_t>(v)]) {
        rt.db.record_unmonitored(t);
        continue;
      }
      for (int z = 0; z < pool.sc; ++z) rssi[static_cast<std::size_t>(z)] = outcome.rssi(v, z);
      decoded.clear();
      for (; r < outcome.receptions.size() && outcome.receptions[r].receiver == v; ++r) {
        const auto& rx = outcome.receptions[r];
        const auto k = static_cast<std::size_t>(rx.tx_index);
        if (rx.sci_ok) {
          const auto msg = sci::decode(words[k], pool.sc, format);
          decoded.push_back({coord_at(t, static_cast<int>(msg.frl)), t, msg, rx.rsrp_dbm});
        }
        if (rx.tb_ok) aoi.update(v, txs[k].vehicle, tx_gen[k]);
      }
      rt.db.record(t, true, rssi, decoded);
    }

    if (t >= metrics_start && !txs.empty()) {
      for (std::size_t k = 0; k < txs.size(); ++k) {
        std::fill(tb_ok.begin(), tb_ok.end(), 0);
        for (const auto& rx : outcome.receptions)
          if (rx.tx_index == static_cast<int>(k) && rx.tb_ok) tb_ok[static_cast<std::size_t>(rx.receiver)] = 1;
        legs.clear();
        const auto sender = static_cast<std::size_t>(txs[k].vehicle);
        for (std::size_t v = 0; v < static_cast<std::size_t>(n); ++v) {
          if (v == sender) continue;
          legs.push_back({distance(positions[sender], positions[v]), tb_ok[v] != 0});
        }
        acc.record_transmission(legs);
      }
    }
  }

  RunReport rep;
  rep.metrics = acc.report();
  rep.diagnostics = diag;
  rep.config_hash = config_hash;
  rep.seed = cfg.seed;
  rep.n_vehicles = n;
  rep.mode = cfg.mode;
  rep.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return rep;
}

struct SweepPoint {
  int n_vehicles = 0;
  Mode mode = Mode::standard;
  std::uint64_t seed = 0;

  friend auto operator<=>(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepResult {
  SweepPoint point;
  std::optional<RunReport> report;
  std::string error;
};

/// Cartesian product of runs; failures are reported per grid point and do not stop the rest.
/// Results come back ordered by (n, mode, seed) regardless of `jobs`.
inline std::vector<SweepResult> run_sweep(const ScenarioConfig& base, const std::vector<std::uint64_t>& seeds,
                                          const std::vector<Mode>& modes, const std::vector<int>& n_list,
                                          int jobs = 1,
                                          const std::function<std::uint64_t(const ScenarioConfig&)>& hasher = {}) {
  if (seeds.empty() || modes.empty() || n_list.empty()) throw std::invalid_argument("sweep lists must be non-empty");
  std::vector<SweepResult> results;
  for (int nv : n_list)
    for (Mode m : modes)
      for (auto s : seeds) results.push_back({{nv, m, s}, std::nullopt, {}});
  std::sort(results.begin(), results.end(),
            [](const SweepResult& a, const SweepResult& b) { return a.point < b.point; });

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < results.size(); k = next++) {
      auto& r = results[k];
      try {
        ScenarioConfig cfg = base;
        cfg.n_vehicles = r.point.n_vehicles;
        cfg.mode = r.point.mode;
        cfg.seed = r.point.seed;
        r.report = run(cfg, hasher ? hasher(cfg) : 0);
      } catch (const std::exception& e) {
        r.error = "n=" + std::to_string(r.point.n_vehicles) + " mode=" + to_string(r.point.mode) +
                  " seed=" + std::to_string(r.point.seed) + ": " + e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(results.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

}  // namespace cv2x

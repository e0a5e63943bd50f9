#pragma once

// Per-vehicle semi-persistent resource selection.
//
// Both procedures share one pipeline:
//   candidate pool -> drop half-duplex blind spots -> drop reserved resources
//   (RSRP above threshold, threshold raised 3 dB until >= 20% survive)
//   -> rank by average RSSI -> pick uniformly among the best 20%.
// Standard mode projects reservations at fixed period with an estimated RC and
// ranks with 100-subframe-spaced RSSI. Enhanced mode follows CO chains with the
// RC carried in the SCI.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "cv2x/core.hpp"
#include "cv2x/random.hpp"
#include "cv2x/sensing.hpp"

namespace cv2x {

inline constexpr double kThresholdStepDb = 3.0;
inline constexpr int kMaxSelectionIterations = 20;

struct Candidate {
  SsrCoord coord;
  AbsSubframe at = 0;

  friend auto operator<=>(const Candidate& a, const Candidate& b) {
    return std::tie(a.at, a.coord.subchannel) <=> std::tie(b.at, b.coord.subchannel);
  }
  friend bool operator==(const Candidate& a, const Candidate& b) {
    return a.at == b.at && a.coord.subchannel == b.coord.subchannel;
  }
};

struct CandidatePool {
  std::vector<Candidate> entries;
  int m_total = 0;
};

struct SchedulerState {
  Mode mode = Mode::standard;
  SsrCoord anchor{};
  AbsSubframe anchor_at = 0;
  int hop = 0;
  int rc = 0;
  double p_th_dbm = 0.0;
  bool active = false;  // a reservation chain is in force
  // grid position and absolute time of hop `hop`
  SsrCoord next_coord{};
  AbsSubframe next_at = 0;
};

class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// At least 20% of m_total, compared exactly (5k >= m).
constexpr bool meets_fifth(std::size_t k, int m_total) { return 5 * static_cast<long long>(k) >= m_total; }
constexpr std::size_t fifth_ceil(int m_total) { return static_cast<std::size_t>((m_total + 4) / 5); }

inline CandidatePool candidate_pool(AbsSubframe now, const PoolConfig& cfg) {
  CandidatePool pool;
  pool.m_total = cfg.selection_window() * cfg.sc;
  pool.entries.reserve(static_cast<std::size_t>(pool.m_total));
  for (AbsSubframe t = now + cfg.t1; t <= now + cfg.t2; ++t)
    for (int z = 0; z < cfg.sc; ++z) pool.entries.push_back({coord_at(t, z), t});
  return pool;
}

namespace detail {
inline bool unmonitored(const SensingDb& db, AbsSubframe t) {
  const auto* r = db.find(t);
  return r != nullptr && !r->monitored;
}

inline bool blind_standard(const SensingDb& db, const Candidate& c, AbsSubframe now) {
  for (AbsSubframe w = c.at - 100; w >= now - db.window(); w -= 100)
    if (w < now && unmonitored(db, w)) return true;
  return false;
}

// A vehicle hidden at window cell w on subchannel z would continue its CO chain;
// with its SCI lost, it is assumed to hold estimated_rc(rt) more hops.
inline bool blind_enhanced(const SensingDb& db, const Candidate& c, int rt, AbsSubframe now) {
  const int hops = estimated_rc(rt);
  for (int i = 1; i <= hops; ++i) {
    const AbsSubframe w = resolve_not_after(now - 1, co_map_preimage(c.coord, i, rt));
    if (w >= now - db.window() && unmonitored(db, w)) return true;
  }
  return false;
}
}  // namespace detail

inline CandidatePool exclude_unmonitored(CandidatePool pool, const SensingDb& db, Mode mode,
                                         const PoolConfig& cfg, AbsSubframe now) {
  std::erase_if(pool.entries, [&](const Candidate& c) {
    return mode == Mode::standard ? detail::blind_standard(db, c, now)
                                  : detail::blind_enhanced(db, c, cfg.rt, now);
  });
  return pool;
}

/// For each pool entry, the highest RSRP among reservations whose occupancy collides with it
/// (-inf when none). A candidate is excluded at threshold p iff its value exceeds p.
inline std::vector<double> blocking_rsrp(const CandidatePool& pool, std::span<const DecodedReservation> reservations,
                                         Mode mode, int own_rc, const PoolConfig& cfg) {
  constexpr double none = -std::numeric_limits<double>::infinity();
  std::vector<double> out(pool.entries.size(), none);
  if (pool.entries.empty() || reservations.empty()) return out;

  if (mode == Mode::standard) {
    AbsSubframe lo = pool.entries.front().at, hi = lo;
    for (const auto& c : pool.entries) {
      lo = std::min(lo, c.at);
      hi = std::max(hi, c.at);
    }
    const auto width = static_cast<std::size_t>(hi - lo + 1);
    std::vector<double> occ(width * static_cast<std::size_t>(cfg.sc), none);
    for (const auto& r : reservations) {
      for (int k = 1; k <= r.rc; ++k) {
        const AbsSubframe t = r.at + static_cast<AbsSubframe>(k) * r.rri;
        if (t < lo) continue;
        if (t > hi) break;
        auto& cell = occ[static_cast<std::size_t>(t - lo) * static_cast<std::size_t>(cfg.sc) +
                         static_cast<std::size_t>(r.coord.subchannel)];
        cell = std::max(cell, r.rsrp_dbm);
      }
    }
    for (std::size_t n = 0; n < pool.entries.size(); ++n) {
      const auto& c = pool.entries[n];
      out[n] = occ[static_cast<std::size_t>(c.at - lo) * static_cast<std::size_t>(cfg.sc) +
                   static_cast<std::size_t>(c.coord.subchannel)];
    }
    return out;
  }

  // Enhanced: C_V and C_V' intersect on the grid iff some cell of the candidate's chain
  // is covered by the reservation's chain.
  if (own_rc < 1) throw std::invalid_argument("enhanced exclusion needs the freshly drawn RC");
  const auto sc = static_cast<std::size_t>(cfg.sc);
  std::vector<double> occ(static_cast<std::size_t>(kSubframesPerCycle) * sc, none);
  auto cell_of = [sc](const SsrCoord& c) {
    return static_cast<std::size_t>(abs_index(c)) * sc + static_cast<std::size_t>(c.subchannel);
  };
  for (const auto& r : reservations) {
    for (int j = 0; j < r.rc; ++j) {
      auto& cell = occ[cell_of(co_map(r.coord, j, cfg.rt))];
      cell = std::max(cell, r.rsrp_dbm);
    }
  }
  for (std::size_t n = 0; n < pool.entries.size(); ++n) {
    double worst = none;
    for (int i = 0; i < own_rc; ++i) worst = std::max(worst, occ[cell_of(co_map(pool.entries[n].coord, i, cfg.rt))]);
    out[n] = worst;
  }
  return out;
}

inline CandidatePool exclude_reserved(CandidatePool pool, std::span<const DecodedReservation> reservations,
                                      const SchedulerState& state, const PoolConfig& cfg) {
  const auto blocking = blocking_rsrp(pool, reservations, state.mode, state.rc, cfg);
  CandidatePool out{{}, pool.m_total};
  for (std::size_t n = 0; n < pool.entries.size(); ++n)
    if (!(blocking[n] > state.p_th_dbm)) out.entries.push_back(pool.entries[n]);
  return out;
}

struct RankedCandidate {
  Candidate candidate;
  double a_rssi_dbm = 0.0;
};

/// Everything a selection saw, for conformance debugging.
struct SelectionTrace {
  AbsSubframe now = 0;
  Mode mode = Mode::standard;
  int rc = 0;
  int m_total = 0;
  std::vector<Candidate> blind;                          // removed as half-duplex blind spots
  std::vector<std::pair<Candidate, double>> reserved;    // removed at the final threshold, with blocking RSRP
  int iterations = 0;
  double p_th_dbm = 0.0;
  std::vector<RankedCandidate> s_b;
  Candidate pick;
};

/// Surviving S_A after the exclusion loop; updates state.p_th_dbm to the threshold that admitted it.
inline CandidatePool surviving_candidates(const SensingDb& db, SchedulerState& state, const PoolConfig& cfg,
                                          AbsSubframe now, SelectionTrace* trace = nullptr) {
  const CandidatePool pristine = candidate_pool(now, cfg);
  CandidatePool open = exclude_unmonitored(pristine, db, state.mode, cfg, now);
  if (trace != nullptr) {
    trace->blind.clear();
    std::set_difference(pristine.entries.begin(), pristine.entries.end(), open.entries.begin(), open.entries.end(),
                        std::back_inserter(trace->blind));
  }
  const auto reservations = decoded_reservations(db, state.mode, cfg.rt);
  const auto blocking = blocking_rsrp(open, reservations, state.mode, state.rc, cfg);

  state.p_th_dbm = cfg.p_th_init_dbm;
  for (int iteration = 1;; ++iteration) {
    CandidatePool survivors{{}, pristine.m_total};
    for (std::size_t n = 0; n < open.entries.size(); ++n)
      if (!(blocking[n] > state.p_th_dbm)) survivors.entries.push_back(open.entries[n]);
    if (meets_fifth(survivors.entries.size(), pristine.m_total)) {
      if (trace != nullptr) {
        trace->iterations = iteration;
        trace->p_th_dbm = state.p_th_dbm;
        trace->reserved.clear();
        for (std::size_t n = 0; n < open.entries.size(); ++n)
          if (blocking[n] > state.p_th_dbm) trace->reserved.emplace_back(open.entries[n], blocking[n]);
      }
      return survivors;
    }
    if (iteration == kMaxSelectionIterations)
      throw SelectionError("selection at subframe " + std::to_string(now) + " left " +
                           std::to_string(survivors.entries.size()) + " of " + std::to_string(pristine.m_total) +
                           " candidates after " + std::to_string(iteration) + " threshold raises");
    state.p_th_dbm += kThresholdStepDb;
  }
}

/// Survivors ordered by A-RSSI, ties by subframe then subchannel.
inline std::vector<RankedCandidate> rank_by_rssi(const CandidatePool& pool, const SensingDb& db, Mode mode,
                                                 const PoolConfig& cfg, AbsSubframe now) {
  std::vector<RankedCandidate> ranked;
  ranked.reserve(pool.entries.size());
  for (const auto& c : pool.entries) {
    const double a = mode == Mode::standard ? a_rssi_standard(db, c.coord, now)
                                            : a_rssi_enhanced(db, c.coord, cfg.rt, now);
    ranked.push_back({c, a});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.a_rssi_dbm != b.a_rssi_dbm) return a.a_rssi_dbm < b.a_rssi_dbm;
    return a.candidate < b.candidate;
  });
  return ranked;
}

inline Candidate select(const SensingDb& db, SchedulerState& state, const PoolConfig& cfg, AbsSubframe now, Rng& rng,
                        SelectionTrace* trace = nullptr) {
  if (state.rc < 1) throw std::logic_error("select needs a freshly drawn RC");
  const CandidatePool survivors = surviving_candidates(db, state, cfg, now, trace);
  auto ranked = rank_by_rssi(survivors, db, state.mode, cfg, now);
  ranked.resize(std::min(ranked.size(), fifth_ceil(survivors.m_total)));
  std::uniform_int_distribution<std::size_t> pick(0, ranked.size() - 1);
  const Candidate chosen = ranked[pick(rng)].candidate;
  if (trace != nullptr) {
    trace->now = now;
    trace->mode = state.mode;
    trace->rc = state.rc;
    trace->m_total = survivors.m_total;
    trace->s_b = ranked;
    trace->pick = chosen;
  }
  return chosen;
}

/// Starts a reservation chain at `pick`; hop 0 is the pick itself.
inline void adopt(SchedulerState& state, const Candidate& pick) {
  state.anchor = pick.coord;
  state.anchor_at = pick.at;
  state.hop = 0;
  state.next_coord = pick.coord;
  state.next_at = pick.at;
  state.active = true;
}

inline int draw_rc(const PoolConfig& cfg, Rng& rng) {
  return std::uniform_int_distribution<int>(cfg.rc_min, cfg.rc_max)(rng);
}

struct RcDecision {
  bool keep = false;
  int rc = 0;
};

/// Redraws RC, then keeps the current pattern with probability beta.
inline RcDecision on_rc_zero(SchedulerState& state, const PoolConfig& cfg, Rng& rng) {
  if (state.rc != 0) throw std::logic_error("on_rc_zero called with RC " + std::to_string(state.rc));
  RcDecision d;
  d.rc = draw_rc(cfg, rng);
  d.keep = unit_interval(rng()) < cfg.beta;
  state.rc = d.rc;
  if (!d.keep) state.active = false;
  return d;
}

/// Grid position of hop `hop` of the current chain.
inline SsrCoord chain_position(const SchedulerState& state, int hop, int rt) {
  if (state.mode == Mode::enhanced) return co_map(state.anchor, hop, rt);
  return coord_at(static_cast<AbsSubframe>(abs_index(state.anchor)) + static_cast<AbsSubframe>(hop) * rt,
                  state.anchor.subchannel);
}

/// Consumes one reserved transmission: returns its position, then advances hop and decrements RC.
inline SsrCoord next_transmission(SchedulerState& state, int rt) {
  if (state.rc <= 0) throw std::logic_error("next_transmission with RC 0; run on_rc_zero first");
  const SsrCoord here = chain_position(state, state.hop, rt);
  ++state.hop;
  --state.rc;
  const SsrCoord next = chain_position(state, state.hop, rt);
  state.next_at += cyclic_delta(here, next);
  state.next_coord = next;
  return here;
}

}  // namespace cv2x

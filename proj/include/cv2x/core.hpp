#pragma once

// Resource grid coordinates on the SFN cycle and the CO reservation mapping.

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cv2x {

/// Unbounded subframe counter (1 subframe = 1 ms). Coordinates are this value reduced mod 10240.
using AbsSubframe = std::int64_t;

inline constexpr int kFramesPerCycle = 1024;
inline constexpr int kSubframesPerFrame = 10;
inline constexpr int kSubframesPerCycle = kFramesPerCycle * kSubframesPerFrame;

enum class Mode { standard, enhanced };

inline const char* to_string(Mode m) { return m == Mode::standard ? "standard" : "enhanced"; }

inline Mode parse_mode(const std::string& s) {
  if (s == "standard") return Mode::standard;
  if (s == "enhanced") return Mode::enhanced;
  throw std::invalid_argument("unknown mode '" + s + "' (expected standard|enhanced)");
}

/// One single-subframe resource: (frame, subframe, subchannel).
struct SsrCoord {
  int frame = 0;
  int subframe = 0;
  int subchannel = 0;

  friend constexpr auto operator<=>(const SsrCoord&, const SsrCoord&) = default;
};

inline std::string to_string(const SsrCoord& c) {
  return "(" + std::to_string(c.frame) + "," + std::to_string(c.subframe) + "," +
         std::to_string(c.subchannel) + ")";
}

namespace detail {
constexpr std::int64_t pos_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}
}  // namespace detail

inline SsrCoord make_coord(int frame, int subframe, int subchannel, int sc) {
  if (sc < 1) throw std::invalid_argument("subchannel count must be >= 1");
  if (frame < 0 || frame >= kFramesPerCycle || subframe < 0 || subframe >= kSubframesPerFrame ||
      subchannel < 0 || subchannel >= sc) {
    throw std::out_of_range("SsrCoord out of range: (" + std::to_string(frame) + "," +
                            std::to_string(subframe) + "," + std::to_string(subchannel) + ")");
  }
  return {frame, subframe, subchannel};
}

constexpr int abs_index(const SsrCoord& c) { return c.frame * kSubframesPerFrame + c.subframe; }

/// Reduces an absolute subframe onto the SFN grid.
constexpr SsrCoord coord_at(AbsSubframe t, int subchannel) {
  const auto idx = static_cast<int>(detail::pos_mod(t, kSubframesPerCycle));
  return {idx / kSubframesPerFrame, idx % kSubframesPerFrame, subchannel};
}

/// Forward distance on the cycle from `from` to `to`, in [0, 10240).
constexpr int cyclic_delta(const SsrCoord& from, const SsrCoord& to) {
  return static_cast<int>(detail::pos_mod(abs_index(to) - abs_index(from), kSubframesPerCycle));
}

/// The earliest absolute subframe >= `not_before` whose grid position matches `c`.
constexpr AbsSubframe resolve_not_before(AbsSubframe not_before, const SsrCoord& c) {
  return not_before + detail::pos_mod(abs_index(c) - not_before, kSubframesPerCycle);
}

/// The latest absolute subframe <= `not_after` whose grid position matches `c`.
constexpr AbsSubframe resolve_not_after(AbsSubframe not_after, const SsrCoord& c) {
  return not_after - detail::pos_mod(not_after - abs_index(c), kSubframesPerCycle);
}

inline void require_rt(int rt) {
  if (rt <= 0 || rt % 10 != 0)
    throw std::invalid_argument("reservation period must be a positive multiple of 10 subframes, got " +
                                std::to_string(rt));
}

/// CO^[i]: ((x + i*rt/10) mod 1024, (y + i*z) mod 10, z). The subframe wrap does not carry into the frame.
inline SsrCoord co_map(const SsrCoord& c, std::int64_t i, int rt) {
  require_rt(rt);
  if (i < 0) throw std::invalid_argument("co_map hop index must be non-negative");
  return {static_cast<int>(detail::pos_mod(c.frame + i * (rt / 10), kFramesPerCycle)),
          static_cast<int>(detail::pos_mod(c.subframe + i * c.subchannel, kSubframesPerFrame)),
          c.subchannel};
}

/// The unique coordinate w with co_map(w, i, rt) == c (both components are modular translations).
inline SsrCoord co_map_preimage(const SsrCoord& c, std::int64_t i, int rt) {
  require_rt(rt);
  if (i < 0) throw std::invalid_argument("co_map hop index must be non-negative");
  return {static_cast<int>(detail::pos_mod(c.frame - i * (rt / 10), kFramesPerCycle)),
          static_cast<int>(detail::pos_mod(c.subframe - i * c.subchannel, kSubframesPerFrame)),
          c.subchannel};
}

/// [CO^0(c), ..., CO^{rc-1}(c)]
inline std::vector<SsrCoord> reserved_chain(const SsrCoord& c, int rc, int rt) {
  if (rc < 1) throw std::invalid_argument("reserved_chain needs rc >= 1");
  std::vector<SsrCoord> out;
  out.reserve(static_cast<std::size_t>(rc));
  for (int k = 0; k < rc; ++k) out.push_back(co_map(c, k, rt));
  return out;
}

/// Resource pool and SPS parameters.
struct PoolConfig {
  int sc = 3;                 // subchannels
  int rt = 20;                // packet period, subframes
  int t1 = 4;                 // selection window start offset
  int t2 = 20;                // selection window end offset
  int rc_min = 25;
  int rc_max = 75;
  double beta = 0.0;          // keep probability at RC expiry
  double p_th_init_dbm = -110.0;

  void validate() const {
    if (sc < 1) throw std::invalid_argument("pool.sc must be >= 1");
    require_rt(rt);
    if (t1 <= 0 || t1 > t2) throw std::invalid_argument("pool requires 0 < t1 <= t2");
    if (rc_min < 1 || rc_min > rc_max) throw std::invalid_argument("pool requires 1 <= rc_min <= rc_max");
    if (rc_max > 255) throw std::invalid_argument("pool.rc_max must fit the 8-bit SCI field");
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("pool.beta must lie in [0,1]");
    if (rt / 10 > 15) throw std::invalid_argument("pool.rt exceeds the 4-bit reservation field");
  }

  int selection_window() const { return t2 - t1 + 1; }
};

}  // namespace cv2x

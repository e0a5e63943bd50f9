#pragma once

// Seed expansion: one master seed fans out into independent, stable streams.

#include <cstdint>
#include <random>

namespace cv2x {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

namespace stream {
inline constexpr std::uint64_t mobility = 1;
inline constexpr std::uint64_t phases = 2;
inline constexpr std::uint64_t shadowing = 3;
inline constexpr std::uint64_t scheduler_base = 1000;  // + vehicle index
}  // namespace stream

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream_id) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream_id * 0xD1B54A32D192ED03ull));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t stream_id) {
  return Rng{stream_seed(master, stream_id)};
}

/// Uniform double in [0, 1) from a 64-bit value.
constexpr double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace cv2x

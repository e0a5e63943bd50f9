#pragma once

// 32-bit sidelink control information codec.
//
// Field order, most significant first:
//   reservation interval (4) | frequency resource location (F) | MCS (5) |
//   transmission format (1) | reserved (14 - F) | RC or priority/retx (8)
// with F = ceil(log2(sc(sc+1)/2)).

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

namespace cv2x::sci {

enum class Format { standard, proposed };

struct Message {
  std::uint32_t rri_code = 0;   // reservation interval / 10
  std::uint32_t frl = 0;        // starting subchannel (length is always one)
  std::uint32_t mcs = 0;
  std::uint32_t tx_format = 0;
  std::uint32_t rc = 0;         // proposed format only
  std::uint32_t prio_retx = 0;  // standard format only, opaque

  friend bool operator==(const Message&, const Message&) = default;
};

class FieldOverflow : public std::invalid_argument {
 public:
  FieldOverflow(std::string field, std::uint32_t value, std::uint32_t limit)
      : std::invalid_argument("SCI field '" + field + "' value " + std::to_string(value) +
                              " exceeds limit " + std::to_string(limit)),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class Malformed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kWordBits = 32;
inline constexpr int kRriBits = 4;
inline constexpr int kMcsBits = 5;
inline constexpr int kTxFormatBits = 1;
inline constexpr int kTailBits = 8;
inline constexpr int kFrlPlusReservedBits = 14;

/// Number of (start, length) subchannel allocations.
inline std::uint32_t frl_range(int sc) {
  if (sc < 1) throw std::invalid_argument("subchannel count must be >= 1");
  return static_cast<std::uint32_t>(sc) * static_cast<std::uint32_t>(sc + 1) / 2;
}

inline int frl_bits(int sc) {
  const std::uint32_t n = frl_range(sc);
  int bits = 0;
  while ((std::uint64_t{1} << bits) < n) ++bits;
  if (bits > kFrlPlusReservedBits)
    throw std::invalid_argument("subchannel count " + std::to_string(sc) + " does not fit the SCI layout");
  return bits;
}

namespace detail {
struct Layout {
  int frl_bits;
  int frl_shift;
  int mcs_shift;
  int tx_shift;
  int reserved_shift;
  int reserved_bits;
};

inline Layout layout(int sc) {
  Layout l{};
  l.frl_bits = frl_bits(sc);
  l.frl_shift = kWordBits - kRriBits - l.frl_bits;
  l.mcs_shift = l.frl_shift - kMcsBits;
  l.tx_shift = l.mcs_shift - kTxFormatBits;
  l.reserved_bits = kFrlPlusReservedBits - l.frl_bits;
  l.reserved_shift = kTailBits;
  return l;
}

constexpr std::uint32_t mask(int bits) { return bits >= 32 ? ~0u : ((1u << bits) - 1u); }

inline void check(const char* field, std::uint32_t v, int bits) {
  if (v > mask(bits)) throw FieldOverflow(field, v, mask(bits));
}
}  // namespace detail

inline std::uint32_t encode(const Message& m, int sc, Format format) {
  const auto l = detail::layout(sc);
  detail::check("rri_code", m.rri_code, kRriBits);
  if (m.frl >= frl_range(sc)) throw FieldOverflow("frl", m.frl, frl_range(sc) - 1);
  detail::check("mcs", m.mcs, kMcsBits);
  detail::check("tx_format", m.tx_format, kTxFormatBits);
  const std::uint32_t tail = format == Format::proposed ? m.rc : m.prio_retx;
  detail::check(format == Format::proposed ? "rc" : "prio_retx", tail, kTailBits);

  std::uint32_t w = m.rri_code << (kWordBits - kRriBits);
  if (l.frl_bits > 0) w |= m.frl << l.frl_shift;
  w |= m.mcs << l.mcs_shift;
  w |= m.tx_format << l.tx_shift;
  w |= tail;
  return w;
}

/// Reserved bits are ignored. The tail octet lands in `rc` or `prio_retx` per format.
inline Message decode(std::uint32_t w, int sc, Format format) {
  const auto l = detail::layout(sc);
  Message m;
  m.rri_code = (w >> (kWordBits - kRriBits)) & detail::mask(kRriBits);
  m.frl = l.frl_bits > 0 ? (w >> l.frl_shift) & detail::mask(l.frl_bits) : 0u;
  m.mcs = (w >> l.mcs_shift) & detail::mask(kMcsBits);
  m.tx_format = (w >> l.tx_shift) & detail::mask(kTxFormatBits);
  const std::uint32_t tail = w & detail::mask(kTailBits);
  if (format == Format::proposed)
    m.rc = tail;
  else
    m.prio_retx = tail;
  if (m.frl >= frl_range(sc))
    throw Malformed("SCI frequency resource location " + std::to_string(m.frl) + " >= " +
                    std::to_string(frl_range(sc)));
  return m;
}

inline std::string hexdump(std::uint32_t w) {
  char buf[11];
  std::snprintf(buf, sizeof buf, "0x%08X", w);
  return buf;
}

inline std::string describe(const Message& m, Format format) {
  std::string s = "rri=" + std::to_string(m.rri_code) + " frl=" + std::to_string(m.frl) +
                  " mcs=" + std::to_string(m.mcs) + " fmt=" + std::to_string(m.tx_format);
  s += format == Format::proposed ? " rc=" + std::to_string(m.rc) : " prio_retx=" + std::to_string(m.prio_retx);
  return s;
}

inline Format format_for(bool enhanced) { return enhanced ? Format::proposed : Format::standard; }

}  // namespace cv2x::sci

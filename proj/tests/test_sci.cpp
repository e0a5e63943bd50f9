#include <gtest/gtest.h>

#include <bitset>
#include <random>
#include <string>

#include "cv2x/sci.hpp"

using namespace cv2x::sci;

namespace {
// Independent packer: concatenate fixed-width binary strings most significant field first.
std::string bits(std::uint32_t v, int width) {
  std::string s;
  for (int b = width - 1; b >= 0; --b) s += ((v >> b) & 1u) ? '1' : '0';
  return s;
}

std::uint32_t hand_pack(const Message& m, int sc, Format f) {
  int frl_w = 0;
  while ((1 << frl_w) < sc * (sc + 1) / 2) ++frl_w;
  const std::string s = bits(m.rri_code, 4) + bits(m.frl, frl_w) + bits(m.mcs, 5) + bits(m.tx_format, 1) +
                        std::string(static_cast<std::size_t>(14 - frl_w), '0') +
                        bits(f == Format::proposed ? m.rc : m.prio_retx, 8);
  EXPECT_EQ(s.size(), 32u);
  return static_cast<std::uint32_t>(std::bitset<32>(s).to_ulong());
}
}  // namespace

TEST(FrlBits, Examples) {
  EXPECT_EQ(frl_bits(1), 0);
  EXPECT_EQ(frl_bits(3), 3);
  EXPECT_EQ(frl_bits(4), 4);
  EXPECT_THROW(frl_bits(0), std::invalid_argument);
}

TEST(FrlBits, WidthSumsTo32ForEverySc) {
  for (int sc = 1; sc <= 100; ++sc) EXPECT_EQ(4 + frl_bits(sc) + 5 + 1 + (14 - frl_bits(sc)) + 8, 32);
}

TEST(Encode, ZeroMessage) {
  EXPECT_EQ(encode(Message{}, 3, Format::proposed), 0u);
  EXPECT_EQ(decode(0u, 3, Format::proposed), Message{});
}

TEST(Encode, HandPackedExample) {
  Message m{2, 1, 7, 1, 25, 0};
  const auto w = encode(m, 3, Format::proposed);
  EXPECT_EQ(w, hand_pack(m, 3, Format::proposed));
  EXPECT_EQ(w, 0x22780019u);
  EXPECT_EQ(w & 0xFFu, 25u);
  const auto back = decode(w, 3, Format::proposed);
  EXPECT_EQ(back.rc, 25u);
  EXPECT_EQ(back.rri_code, 2u);
  EXPECT_EQ(back, m);
  EXPECT_EQ(hexdump(w), "0x22780019");
}

TEST(Encode, MatchesHandPackerAcrossSc) {
  std::mt19937_64 rng(11);
  for (int sc = 1; sc <= 12; ++sc) {
    for (int k = 0; k < 500; ++k) {
      Message m;
      m.rri_code = static_cast<std::uint32_t>(rng() % 16);
      m.frl = static_cast<std::uint32_t>(rng() % frl_range(sc));
      m.mcs = static_cast<std::uint32_t>(rng() % 32);
      m.tx_format = static_cast<std::uint32_t>(rng() % 2);
      const Format f = (k % 2) ? Format::proposed : Format::standard;
      (f == Format::proposed ? m.rc : m.prio_retx) = static_cast<std::uint32_t>(rng() % 256);
      ASSERT_EQ(encode(m, sc, f), hand_pack(m, sc, f));
      ASSERT_EQ(decode(encode(m, sc, f), sc, f), m);
    }
  }
}

TEST(Encode, OverflowNamesTheField) {
  auto expect_field = [](Message m, const std::string& field) {
    try {
      (void)encode(m, 3, Format::proposed);
      FAIL() << "no overflow for " << field;
    } catch (const FieldOverflow& e) {
      EXPECT_EQ(e.field(), field);
    }
  };
  expect_field({16, 0, 0, 0, 0, 0}, "rri_code");
  expect_field({0, 6, 0, 0, 0, 0}, "frl");
  expect_field({0, 0, 32, 0, 0, 0}, "mcs");
  expect_field({0, 0, 0, 2, 0, 0}, "tx_format");
  expect_field({0, 0, 0, 0, 256, 0}, "rc");
}

TEST(Decode, FrlSevenAtThreeSubchannelsIsMalformed) {
  const std::uint32_t w = 7u << 25;
  EXPECT_THROW(decode(w, 3, Format::proposed), Malformed);
}

TEST(Decode, ReservedBitsIgnored) {
  Message m{2, 1, 7, 1, 25, 0};
  const auto w = encode(m, 3, Format::proposed) | (0x7FFu << 8);
  EXPECT_EQ(decode(w, 3, Format::proposed), m);
}

TEST(Decode, StandardFormatCarriesOpaqueTail) {
  Message m{2, 4, 11, 0, 0, 0xA5};
  const auto w = encode(m, 3, Format::standard);
  EXPECT_EQ(w & 0xFFu, 0xA5u);
  const auto back = decode(w, 3, Format::standard);
  EXPECT_EQ(back.prio_retx, 0xA5u);
  EXPECT_EQ(back.rc, 0u);
}

TEST(Codec, RcFieldHoldsTheDrawRange) {
  for (std::uint32_t rc = 25; rc <= 75; ++rc) {
    Message m{2, 0, 0, 0, rc, 0};
    EXPECT_EQ(decode(encode(m, 3, Format::proposed), 3, Format::proposed).rc, rc);
  }
}

TEST(Describe, MentionsTail) {
  EXPECT_NE(describe({2, 1, 7, 1, 25, 0}, Format::proposed).find("rc=25"), std::string::npos);
  EXPECT_NE(describe({2, 1, 7, 1, 0, 9}, Format::standard).find("prio_retx=9"), std::string::npos);
}

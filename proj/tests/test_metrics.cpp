#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cv2x/metrics.hpp"

using namespace cv2x;

namespace {

MetricsAccumulator acc_for(std::vector<double> d, std::vector<int> th) { return MetricsAccumulator(std::move(d), std::move(th)); }

}  // namespace

TEST(Pdr, DecodedReceiverInsideBound) {
  auto acc = acc_for({100.0}, {100});
  const std::vector<LinkObservation> legs{{50.0, true}};
  acc.record_transmission(legs);
  EXPECT_EQ(acc.report().pdr_success[0], 1u);
  EXPECT_EQ(acc.report().pdr_total[0], 1u);
  EXPECT_DOUBLE_EQ(*acc.report().pdr_pct(0), 100.0);
}

TEST(Pdr, ReceiverOutsideBoundIgnored) {
  auto acc = acc_for({100.0}, {100});
  const std::vector<LinkObservation> legs{{150.0, true}};
  acc.record_transmission(legs);
  EXPECT_EQ(acc.report().pdr_total[0], 0u);
  EXPECT_FALSE(acc.report().pdr_pct(0).has_value());
}

TEST(Pdr, CumulativeInDistance) {
  auto acc = acc_for({100.0, 200.0}, {100});
  const std::vector<LinkObservation> legs{{150.0, false}};
  acc.record_transmission(legs);
  EXPECT_EQ(acc.report().pdr_total[0], 0u);
  EXPECT_EQ(acc.report().pdr_total[1], 1u);
  EXPECT_EQ(acc.report().pdr_success[1], 0u);
  EXPECT_DOUBLE_EQ(*acc.report().pdr_pct(1), 0.0);
}

TEST(Pdr, BoundaryDistanceCounts) {
  auto acc = acc_for({100.0}, {100});
  const std::vector<LinkObservation> legs{{100.0, true}};
  acc.record_transmission(legs);
  EXPECT_EQ(acc.report().pdr_total[0], 1u);
}

TEST(AoiTableTest, FirstReceptionSetsEntry) {
  AoiTable t(3);
  EXPECT_FALSE(t.freshest(0, 1).has_value());
  t.update(0, 1, 500);
  EXPECT_EQ(t.freshest(0, 1), 500);
  EXPECT_FALSE(t.freshest(1, 0).has_value());
}

TEST(AoiTableTest, OlderPacketLeavesEntry) {
  AoiTable t(2);
  t.update(0, 1, 500);
  t.update(0, 1, 400);
  EXPECT_EQ(t.freshest(0, 1), 500);
}

TEST(AoiTableTest, InOrderReceptionsAdvance) {
  AoiTable t(2);
  t.update(1, 0, 100);
  t.update(1, 0, 120);
  EXPECT_EQ(t.freshest(1, 0), 120);
  EXPECT_DOUBLE_EQ(t.age(1, 0, 150), 30.0);
}

TEST(AoiTableTest, NeverIsInfinite) {
  AoiTable t(2);
  EXPECT_TRUE(std::isinf(t.age(0, 1, 10)));
  EXPECT_THROW(t.update(2, 0, 1), std::out_of_range);
}

TEST(AoiCheck, FreshEntriesNeverExceed) {
  AoiTable t(2);
  t.update(0, 1, 1000);
  t.update(1, 0, 1000);
  auto acc = acc_for({100.0}, {0, 50});
  const std::vector<Vec2> pos{{0, 0}, {10, 0}};
  acc.aoi_check(t, pos, 1000);
  EXPECT_EQ(acc.report().aois_checks[0], 2u);
  EXPECT_EQ(acc.report().aois_exceed[0], 0u);
  EXPECT_EQ(acc.report().aois_exceed[1], 0u);
  EXPECT_DOUBLE_EQ(*acc.report().aois_pct(0, 0), 0.0);
}

TEST(AoiCheck, NeverPairExceedsEveryThreshold) {
  AoiTable t(2);
  auto acc = acc_for({100.0}, {50, 100, 200, 1000000});
  const std::vector<Vec2> pos{{0, 0}, {10, 0}};
  acc.aoi_check(t, pos, 5000);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(acc.report().aois_checks[k], 2u);
    EXPECT_EQ(acc.report().aois_exceed[k], 2u);
  }
}

TEST(AoiCheck, PairsBeyondBoundNotChecked) {
  AoiTable t(2);
  auto acc = acc_for({100.0, 300.0}, {50});
  const std::vector<Vec2> pos{{0, 0}, {200, 0}};
  acc.aoi_check(t, pos, 10);
  EXPECT_EQ(acc.report().aois_checks[0], 0u);
  EXPECT_FALSE(acc.report().aois_pct(0, 0).has_value());
  EXPECT_EQ(acc.report().aois_checks[1], 2u);
}

TEST(AoiCheck, StrictThresholdComparison) {
  AoiTable t(2);
  t.update(0, 1, 950);
  t.update(1, 0, 949);
  auto acc = acc_for({100.0}, {50});
  const std::vector<Vec2> pos{{0, 0}, {1, 0}};
  acc.aoi_check(t, pos, 1000);  // ages 50 and 51
  EXPECT_EQ(acc.report().aois_exceed[0], 1u);
}

TEST(AoiCheck, FiftyOfTwoHundredIsQuarter) {
  // Two vehicles, 100 checks: the first 25 with both entries stale, the rest fresh.
  AoiTable t(2);
  auto acc = acc_for({100.0}, {100});
  const std::vector<Vec2> pos{{0, 0}, {5, 0}};
  for (int k = 0; k < 100; ++k) {
    const AbsSubframe now = 1000 + 100 * k;
    if (k == 25) {
      t.update(0, 1, now);
      t.update(1, 0, now);
    }
    if (k > 25) {
      t.update(0, 1, now - 10);
      t.update(1, 0, now - 10);
    }
    acc.aoi_check(t, pos, now);
  }
  EXPECT_EQ(acc.report().aois_checks[0], 200u);
  EXPECT_EQ(acc.report().aois_exceed[0], 50u);
  EXPECT_DOUBLE_EQ(*acc.report().aois_pct(0, 0), 25.0);
}

TEST(MetricsReportTest, ManualCounters) {
  MetricsReport r;
  r.d_list = {100.0};
  r.aoi_th_list = {100};
  r.pdr_success = {7};
  r.pdr_total = {7};
  r.aois_exceed = {50};
  r.aois_checks = {200};
  EXPECT_DOUBLE_EQ(*r.pdr_pct(0), 100.0);
  EXPECT_DOUBLE_EQ(*r.aois_pct(0, 0), 25.0);
  r.aois_exceed = {0};
  EXPECT_DOUBLE_EQ(*r.aois_pct(0, 0), 0.0);
}

TEST(MetricsProperties, RandomisedMonotonicity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(0.0, 600.0);
  const std::vector<double> ds{50.0, 100.0, 200.0, 400.0, 800.0};
  const std::vector<int> ths{0, 20, 50, 100, 200, 500};
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 10);
    MetricsAccumulator acc(ds, ths);
    AoiTable table(n);
    std::vector<Vec2> pos(static_cast<std::size_t>(n));
    for (int step = 0; step < 20; ++step) {
      const AbsSubframe now = 1000 + 100 * step;
      for (auto& p : pos) p = {coord(rng), coord(rng)};
      std::vector<LinkObservation> legs;
      for (int k = 0; k < n; ++k) {
        legs.push_back({coord(rng), rng() % 3 != 0});
        const int r = static_cast<int>(rng() % n), s = static_cast<int>(rng() % n);
        if (r != s && rng() % 2) table.update(r, s, now - static_cast<AbsSubframe>(rng() % 300));
      }
      acc.record_transmission(legs);
      acc.aoi_check(table, pos, now);
    }
    const auto& rep = acc.report();
    for (std::size_t d = 0; d < ds.size(); ++d) {
      EXPECT_LE(rep.pdr_success[d], rep.pdr_total[d]);
      if (d > 0) {
        EXPECT_GE(rep.pdr_total[d], rep.pdr_total[d - 1]);
      }
      if (auto p = rep.pdr_pct(d)) {
        EXPECT_GE(*p, 0.0);
        EXPECT_LE(*p, 100.0);
      }
      for (std::size_t t = 0; t < ths.size(); ++t) {
        const auto k = d * ths.size() + t;
        EXPECT_LE(rep.aois_exceed[k], rep.aois_checks[k]);
        if (t > 0) {
          EXPECT_LE(rep.aois_exceed[k], rep.aois_exceed[k - 1]);
        }
      }
    }
  }
}

TEST(MetricsAccumulatorTest, EmptyGridsRejected) {
  EXPECT_THROW(MetricsAccumulator({}, {100}), std::invalid_argument);
  EXPECT_THROW(MetricsAccumulator({100.0}, {}), std::invalid_argument);
}

TEST(MetricsAccumulatorTest, PositionCountMismatch) {
  AoiTable t(3);
  auto acc = acc_for({100.0}, {100});
  const std::vector<Vec2> pos{{0, 0}};
  EXPECT_THROW(acc.aoi_check(t, pos, 0), std::invalid_argument);
}

/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include "herosim/rab.hpp"
#include "tlb_reference.hpp"

namespace hero {
namespace {

const VirtualAddress kVa{0x4000'0123};

TlbEntry entry(std::uint32_t vpn, std::uint32_t ppn, bool r = true, bool w = true) {
  return TlbEntry{vpn, ppn, r, w, true, 0, 0};
}

struct RabFixture : ::testing::Test {
  PlatformConfig p;
  CalibrationConfig c;
  Rab rab{p, c};
};

TEST_F(RabFixture, L1HitReadyNextCycle) {
  rab.preload(SlotCoord::l1(0), entry(kVa.page(), 0x777));
  const auto o = rab.translate(kVa, MasterId::pe(0, 0), false, 100);
  EXPECT_EQ(o.kind, OutcomeKind::l1_hit);
  EXPECT_EQ(o.ready, 101u);
  EXPECT_EQ(o.pa->value, 0x0077'7123u);
}

TEST_F(RabFixture, L2HitPaysOneSearch) {
  const auto vpn = kVa.page();
  rab.preload(SlotCoord::l2(rab.bank_of(vpn), rab.set_of(vpn), 5), entry(vpn, 0x10));
  const auto o = rab.translate(kVa, MasterId::pe(0, 0), false, 100);
  EXPECT_EQ(o.kind, OutcomeKind::l2_hit);
  // 32 ways searched 8 per cycle.
  EXPECT_EQ(o.ready, 105u);
}

TEST_F(RabFixture, HitUnderMiss) {
  rab.preload(SlotCoord::l1(0), entry(0x50000, 0x1));
  const auto miss = rab.translate(kVa, MasterId::pe(0, 0), false, 100);
  EXPECT_EQ(miss.kind, OutcomeKind::miss_enqueued);
  const auto hit = rab.translate(VirtualAddress{0x5000'0000}, MasterId::pe(0, 1), false, 101);
  EXPECT_EQ(hit.kind, OutcomeKind::l1_hit);
  EXPECT_EQ(hit.ready, 102u);
}

TEST_F(RabFixture, ConfigWriteVisibleAfterLatency) {
  EXPECT_EQ(rab.config_write(SlotCoord::l1(4), entry(kVa.page(), 9), 10), 12u);
  EXPECT_NE(rab.translate(kVa, MasterId::pe(0, 0), false, 11).kind, OutcomeKind::l1_hit);
  EXPECT_EQ(rab.translate(kVa, MasterId::pe(0, 0), false, 12).kind, OutcomeKind::l1_hit);
}

TEST_F(RabFixture, InvalidEntryNeverMatches) {
  auto e = entry(kVa.page(), 9);
  e.valid = false;
  rab.preload(SlotCoord::l1(0), e);
  EXPECT_EQ(rab.translate(kVa, MasterId::pe(0, 0), false, 5).kind, OutcomeKind::miss_enqueued);
}

TEST_F(RabFixture, SecondInstallOfPageReplacesFirst) {
  rab.preload(SlotCoord::l1(0), entry(kVa.page(), 1));
  rab.preload(SlotCoord::l1(3), entry(kVa.page(), 2));
  EXPECT_FALSE(rab.l1_entry(0).valid);
  EXPECT_EQ(*rab.find_l1(kVa.page(), 0), 3u);
  rab.preload(SlotCoord::l1(3), entry(0x1234, 3));
  EXPECT_FALSE(rab.find_l1(kVa.page(), 0));
}

TEST_F(RabFixture, MissQueueIsFifo) {
  for (std::uint32_t i = 0; i < 5; ++i)
    rab.translate(VirtualAddress{0x4000'0000 + (i << 12)}, MasterId::pe(0, i), false, i);
  for (std::uint32_t i = 0; i < 5; ++i) {
    const auto m = rab.pop_miss();
    ASSERT_TRUE(m);
    EXPECT_EQ(m->master, MasterId::pe(0, i));
  }
  EXPECT_FALSE(rab.pop_miss());
}

TEST_F(RabFixture, SeventeenthMissDropped) {
  for (std::uint32_t i = 0; i < 16; ++i)
    EXPECT_EQ(rab.translate(VirtualAddress{0x4000'0000 + (i << 12)}, MasterId::pe(0, 0), false, 0).kind,
              OutcomeKind::miss_enqueued);
  EXPECT_EQ(rab.translate(VirtualAddress{0x4100'0000}, MasterId::pe(0, 1), false, 0).kind, OutcomeKind::miss_dropped);
  EXPECT_EQ(rab.pending_misses(), 16u);
  EXPECT_EQ(rab.stats().dropped, 1u);
}

TEST_F(RabFixture, WriteToReadOnlyPageFaults) {
  rab.preload(SlotCoord::l1(0), entry(kVa.page(), 1, true, false));
  EXPECT_EQ(rab.translate(kVa, MasterId::pe(0, 0), false, 0).kind, OutcomeKind::l1_hit);
  const auto o = rab.translate(kVa, MasterId::pe(0, 0), true, 0);
  EXPECT_EQ(o.kind, OutcomeKind::permission_fault);
  EXPECT_FALSE(o.pa);
}

TEST_F(RabFixture, OneL2SearchAtATime) {
  const auto a = rab.translate(VirtualAddress{0x4000'0000}, MasterId::pe(0, 0), false, 10);
  const auto b = rab.translate(VirtualAddress{0x4000'1000}, MasterId::pe(0, 1), false, 10);
  EXPECT_EQ(a.ready, 15u);
  EXPECT_EQ(b.ready, 19u);
}

TEST_F(RabFixture, BadCoordinatesRejected) {
  EXPECT_THROW(rab.preload(SlotCoord::l1(32), entry(1, 1)), SimulationError);
  EXPECT_THROW(rab.preload(SlotCoord::l2(4, 0, 0), entry(4, 1)), SimulationError);
  // vpn 1 maps to bank 1.
  EXPECT_THROW(rab.preload(SlotCoord::l2(0, 0, 0), entry(1, 1)), SimulationError);
}

TEST(RabNoL2, MissResolvesNextCycle) {
  PlatformConfig p;
  p.rab_l2_entries = 0;
  Rab rab(p, CalibrationConfig{});
  const auto o = rab.translate(kVa, MasterId::pe(0, 0), false, 7);
  EXPECT_EQ(o.kind, OutcomeKind::miss_enqueued);
  EXPECT_EQ(o.ready, 8u);
}

TEST(RabOracle, DefaultGeometryMatchesReference) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    EXPECT_EQ(testing::compare_with_reference(PlatformConfig{}, CalibrationConfig{}, seed, 10000), "");
}

TEST(RabOracle, SmallGeometryExercisesEviction) {
  PlatformConfig p;
  p.rab_l1_slots = 8;
  p.rab_l2_entries = 32;
  p.rab_l2_assoc = 4;
  p.rab_l2_banks = 2;
  CalibrationConfig c;
  c.l2_ways_per_cycle = 3;
  c.miss_queue_depth = 4;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) EXPECT_EQ(testing::compare_with_reference(p, c, seed, 10000), "");
}

}  // namespace
}  // namespace hero

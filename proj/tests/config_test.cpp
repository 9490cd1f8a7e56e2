/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include <random>
#include <string>

#include "herosim/config.hpp"

namespace hero {
namespace {

bool has_error(const std::vector<Diagnostic>& d) {
  for (const auto& x : d)
    if (x.is_error()) return true;
  return false;
}

TEST(Config, EmptyDocumentGivesReferenceDefaults) {
  const auto c = parse_config("").config;
  const auto& p = c.platform;
  struct Row {
    const char* name;
    std::uint64_t got, want;
  };
  const Row rows[] = {
      {"n_clusters", p.n_clusters, 8},         {"pes_per_cluster", p.pes_per_cluster, 8},
      {"l1_spm_banks", p.l1_spm_banks, 16},    {"l1_spm_kib", p.l1_spm_kib, 256},
      {"l2_spm_kib", p.l2_spm_kib, 256},       {"icache_kib", p.icache_kib, 8},
      {"icache_banks", p.icache_banks, 8},     {"rab_l1_slots", p.rab_l1_slots, 32},
      {"rab_l2_entries", p.rab_l2_entries, 1024}, {"rab_l2_assoc", p.rab_l2_assoc, 32},
      {"rab_l2_banks", p.rab_l2_banks, 4},
  };
  for (const auto& r : rows) EXPECT_EQ(r.got, r.want) << r.name;
  EXPECT_EQ(p.interconnect, Interconnect::bus);
  EXPECT_EQ(p.fpu_mode, FpuMode::off);
  EXPECT_EQ(p.intdsp_mode, IntDspMode::private_);
  EXPECT_EQ(p.icache_design, ICacheDesign::single_ported);

  const auto& k = c.calibration;
  EXPECT_EQ(k.dram_base_latency, 8u);
  EXPECT_EQ(k.dram_beat_bytes, 8u);
  EXPECT_EQ(k.dram_beat_cycles, 1u);
  EXPECT_EQ(k.bus_bandwidth, 16u);
  EXPECT_EQ(k.host_copy_bytes_per_cycle, 1.0);
  EXPECT_EQ(k.l2_ways_per_cycle, 8u);
  EXPECT_EQ(k.miss_queue_depth, 16u);
  EXPECT_EQ(k.ptw_levels, 2u);
  EXPECT_EQ(k.wake_latency, 2u);
  EXPECT_EQ(k.rab_config_write_latency, 2u);
  EXPECT_EQ(k.clock_ratio, 1.0);
}

TEST(Config, DefaultValidatesClean) { EXPECT_TRUE(validate(SocConfig{}).empty()); }

TEST(Config, SingleClusterIsValid) {
  const auto r = parse_config("[platform]\nn_clusters = 1\n");
  EXPECT_EQ(r.config.platform.n_clusters, 1u);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Config, NonDivisibleL2IsError) {
  EXPECT_THROW(parse_config("[platform]\nrab_l2_entries = 100\nrab_l2_assoc = 32\nrab_l2_banks = 4\n"), ConfigError);
  SocConfig c;
  c.platform.rab_l2_entries = 100;
  EXPECT_TRUE(has_error(validate(c)));
}

TEST(Config, SixClustersWarns) {
  SocConfig c;
  c.platform.n_clusters = 6;
  const auto d = validate(c);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_FALSE(d[0].is_error());
  EXPECT_EQ(d[0].key, "n_clusters");
  EXPECT_NO_THROW(parse_config("[platform]\nn_clusters = 6\n"));
}

TEST(Config, OnePePerClusterIsError) {
  SocConfig c;
  c.platform.pes_per_cluster = 1;
  EXPECT_TRUE(has_error(validate(c)));
}

TEST(Config, MalformedDocuments) {
  EXPECT_THROW(parse_config("n_clusters = 2\n"), ConfigError);               // outside a section
  EXPECT_THROW(parse_config("[platform]\nbogus = 1\n"), ConfigError);        // unknown key
  EXPECT_THROW(parse_config("[platform]\nn_clusters = -1\n"), ConfigError);  // negative
  EXPECT_THROW(parse_config("[platform]\nn_clusters\n"), ConfigError);
  EXPECT_THROW(parse_config("[nowhere]\n"), ConfigError);
  EXPECT_THROW(parse_config("[platform]\nn_clusters = 2\nn_clusters = 4\n"), ConfigError);
  EXPECT_THROW(parse_config("[calibration]\nclock_ratio = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("[calibration]\nptw_levels = 0\n"), ConfigError);
}

TEST(Config, CommentsAndWhitespace) {
  const auto r = parse_config("# header\n[platform]  \n  n_clusters = 2   # two\n\n[calibration]\nclock_ratio = 2.5\n");
  EXPECT_EQ(r.config.platform.n_clusters, 2u);
  EXPECT_EQ(r.config.calibration.clock_ratio, 2.5);
}

TEST(Config, SerializeRoundTripRandom) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    SocConfig c;
    const std::uint64_t clusters[] = {1, 2, 4, 6, 8};
    c.platform.n_clusters = clusters[rng() % 5];
    c.platform.interconnect = rng() % 2 ? Interconnect::bus : Interconnect::noc;
    c.platform.pes_per_cluster = 2 + rng() % 7;
    c.platform.rab_l1_slots = 1 + rng() % 64;
    c.platform.rab_l2_assoc = 16u << (rng() % 3);
    c.platform.rab_l2_banks = 1u << (rng() % 4);
    c.platform.rab_l2_entries = c.platform.rab_l2_assoc * c.platform.rab_l2_banks * (rng() % 4);
    c.calibration.dram_base_latency = 1 + rng() % 20;
    c.calibration.host_copy_bytes_per_cycle = 0.25 * static_cast<double>(1 + rng() % 16);
    c.calibration.clock_ratio = static_cast<double>(1 + rng() % 1000) / 7.0;
    if (rng() % 2) c.calibration.vmm_handler_pe = rng() % c.platform.pes_per_cluster;
    c.calibration.victim_policy = static_cast<VictimPolicyKind>(rng() % 3);
    c.calibration.vmm_install_l2 = rng() % 2;
    const auto back = parse_config(serialize(c)).config;
    EXPECT_EQ(back, c) << serialize(c);
    EXPECT_EQ(config_hash(back), config_hash(c));
  }
}

TEST(Config, HashDistinguishesConfigs) {
  SocConfig a, b;
  b.platform.n_clusters = 4;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, WithSettingOverridesOneKey) {
  const auto c = with_setting(SocConfig{}, "n_clusters", "2");
  EXPECT_EQ(c.platform.n_clusters, 2u);
  const auto d = with_setting(SocConfig{}, "vmm_handler_pe", "3");
  EXPECT_EQ(d.calibration.vmm_handler_pe, 3u);
  EXPECT_THROW(with_setting(SocConfig{}, "nope", "1"), ConfigError);
  EXPECT_THROW(with_setting(SocConfig{}, "pes_per_cluster", "1"), ConfigError);
}

}  // namespace
}  // namespace hero

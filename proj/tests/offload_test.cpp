/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include "herosim/offload.hpp"

namespace hero {
namespace {

SocConfig one_cluster() {
  SocConfig c;
  c.platform.n_clusters = 1;
  return c;
}

// One argument of `bytes`; the kernel adds 1 to its first word through
// the device pointer.
Workload increment(std::uint64_t bytes, Direction dir = Direction::tofrom, std::uint64_t nodes = 0) {
  Workload w;
  w.name = "increment";
  w.setup = [=](HostMemory& m) {
    OffloadDescriptor d;
    d.kernel = "increment";
    DataArg a;
    a.name = "buf";
    a.bytes = bytes;
    a.dir = dir;
    a.nodes = nodes;
    a.node_bytes = nodes ? bytes / nodes : 0;
    if (bytes) {
      a.host_va = m.allocate(bytes).value;
      m.store<std::uint32_t>(VirtualAddress{a.host_va}, 41);
    }
    d.args.push_back(a);
    return d;
  };
  w.build = [=](HostMemory&, const PlatformConfig&, const ArgMap& map) {
    ProgramSet s(1, 8);
    if (bytes == 0) {
      s.at(0, 0) = {op::Compute{1}, op::End{}};
      return s;
    }
    const auto dev = map.device[0];
    s.at(0, 0) = {op::LoadVA{dev},
                  op::Exec{[dev](ExecContext& x) { x.store<std::uint32_t>(dev, x.load<std::uint32_t>(dev) + 1); }},
                  op::StoreVA{dev}, op::End{}};
    return s;
  };
  w.output = [](const HostMemory& m, const OffloadDescriptor& d) {
    std::vector<std::uint8_t> out;
    if (d.args[0].bytes) {
      const auto v = m.load<std::uint32_t>(VirtualAddress{d.args[0].host_va});
      for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    return out;
  };
  return w;
}

TEST(Offload, SvmSendsOnlyTheDescriptor) {
  Soc soc(one_cluster(), 1);
  const auto r = offload(soc, increment(3 * kPageSize), OffloadMode::svm);
  EXPECT_EQ(r.offload_cycles, soc.config().calibration.descriptor_cycles);
  EXPECT_EQ(r.preloaded_pages, 0u);
  EXPECT_EQ(r.rab.misses, 1u);
  EXPECT_EQ(r.output, (std::vector<std::uint8_t>{42, 0, 0, 0}));
  EXPECT_EQ(r.total_cycles, r.offload_cycles + r.kernel_cycles);
}

TEST(Offload, CopyMarshalsBothWays) {
  Soc soc(one_cluster(), 1);
  const std::uint64_t bytes = 3 * kPageSize;
  const auto r = offload(soc, increment(bytes), OffloadMode::copy);
  const auto& cal = soc.config().calibration;
  EXPECT_EQ(r.offload_cycles, cal.descriptor_cycles + 2 * bytes);
  EXPECT_EQ(r.preloaded_pages, 3u);
  EXPECT_EQ(r.rab.misses, 0u);
  EXPECT_EQ(r.output, (std::vector<std::uint8_t>{42, 0, 0, 0}));
}

TEST(Offload, CopyInOnlyDoesNotCopyBack) {
  Soc soc(one_cluster(), 1);
  const auto r = offload(soc, increment(kPageSize, Direction::to), OffloadMode::copy);
  EXPECT_EQ(r.offload_cycles, 500u + kPageSize);
  EXPECT_EQ(r.output, (std::vector<std::uint8_t>{41, 0, 0, 0}));
}

TEST(Offload, ZeroSizeArgumentIsFree) {
  for (auto mode : {OffloadMode::copy, OffloadMode::svm}) {
    Soc soc(one_cluster(), 1);
    const auto r = offload(soc, increment(0), mode);
    EXPECT_EQ(r.offload_cycles, 500u);
    EXPECT_EQ(r.preloaded_pages, 0u);
  }
}

TEST(Offload, LinkedStructureRewriteCost) {
  Soc soc(one_cluster(), 1);
  const std::uint64_t nodes = 1000, bytes = nodes * 16;
  const auto r = offload(soc, increment(bytes, Direction::to, nodes), OffloadMode::copy);
  EXPECT_EQ(r.offload_cycles, 500u + bytes + nodes * 20);
}

TEST(Offload, ApertureOverlapRejected) {
  DataArg a;
  a.name = "bad";
  a.host_va = layout::kPmcaApertureBase - 8;
  a.bytes = 64;
  EXPECT_EQ(reserve_va_overlap({a}).size(), 1u);
  a.host_va = layout::kPmcaApertureBase - 64;
  EXPECT_TRUE(reserve_va_overlap({a}).empty());
  a.bytes = 0;
  a.host_va = layout::kPmcaApertureBase;
  EXPECT_TRUE(reserve_va_overlap({a}).empty());

  Workload w = increment(64);
  w.setup = [](HostMemory&) {
    OffloadDescriptor d;
    DataArg x;
    x.name = "x";
    x.host_va = layout::kPmcaApertureBase + 4096;
    x.bytes = 64;
    d.args.push_back(x);
    return d;
  };
  Soc soc(one_cluster(), 1);
  EXPECT_THROW(offload(soc, w, OffloadMode::svm), SimulationError);
}

TEST(Offload, ModeNames) {
  EXPECT_EQ(parse_mode("copy"), OffloadMode::copy);
  EXPECT_EQ(parse_mode("svm"), OffloadMode::svm);
  EXPECT_FALSE(parse_mode("zero-copy"));
}

}  // namespace
}  // namespace hero

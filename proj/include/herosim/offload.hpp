/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "herosim/cluster.hpp"
#include "herosim/config.hpp"
#include "herosim/error.hpp"
#include "herosim/memory.hpp"
#include "herosim/soc.hpp"
#include "herosim/trace.hpp"

namespace hero {

enum class OffloadMode : std::uint8_t { copy, svm };
enum class Direction : std::uint8_t { to, from, tofrom };

inline const char* to_string(OffloadMode m) { return m == OffloadMode::copy ? "copy" : "svm"; }
inline std::optional<OffloadMode> parse_mode(std::string_view s) {
  if (s == "copy") return OffloadMode::copy;
  if (s == "svm") return OffloadMode::svm;
  return std::nullopt;
}

struct DataArg {
  std::string name;
  std::uint32_t host_va = 0;
  std::uint64_t bytes = 0;
  Direction dir = Direction::to;
  // Linked layout: `nodes` records whose embedded pointers must be rewritten
  // when the data moves. Zero means flat.
  std::uint64_t nodes = 0;
  std::uint64_t node_bytes = 0;

  bool linked() const { return nodes > 0; }
  bool copies_in() const { return dir != Direction::from; }
  bool copies_out() const { return dir != Direction::to; }
};

struct OffloadDescriptor {
  std::string kernel;
  std::vector<DataArg> args;
};

/// Address of every argument as seen by the host and by the kernel.
struct ArgMap {
  std::vector<std::uint32_t> host;
  std::vector<std::uint32_t> device;

  /// Map a host pointer into arg `i` to the corresponding device pointer.
  std::uint32_t relocate(std::size_t i, std::uint32_t host_ptr) const { return host_ptr - host[i] + device[i]; }
};

/// A benchmark as the offload runtime sees it.
struct Workload {
  std::string name;
  // Allocates and fills host data. Argument VAs are host addresses.
  std::function<OffloadDescriptor(HostMemory&)> setup;
  // Rewrites the embedded pointers inside the device copy of linked args.
  std::function<void(HostMemory&, const OffloadDescriptor&, const ArgMap&)> relocate;
  // Kernel programs for the given device addresses.
  std::function<ProgramSet(HostMemory&, const PlatformConfig&, const ArgMap&)> build;
  // Result bytes, read from host memory after the offload returns.
  std::function<std::vector<std::uint8_t>(const HostMemory&, const OffloadDescriptor&)> output;
};

struct RunReport {
  std::string benchmark;
  OffloadMode mode = OffloadMode::svm;
  std::uint64_t clusters = 0;
  Cycle offload_cycles = 0;
  Cycle kernel_cycles = 0;
  Cycle total_cycles = 0;
  RabStats rab;
  std::uint64_t preloaded_pages = 0;
  std::uint64_t trace_drains = 0;
  std::vector<std::uint8_t> output;
};

/// Argument ranges overlapping the accelerator's physical address map.
/// Such virtual addresses would be routed to the accelerator instead of
/// through the RAB.
inline std::vector<std::string> reserve_va_overlap(const std::vector<DataArg>& args,
                                                   std::uint32_t base = layout::kPmcaApertureBase,
                                                   std::uint32_t end = layout::kPmcaApertureEnd) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    if (a.bytes == 0) continue;
    const std::uint64_t lo = a.host_va, hi = lo + a.bytes;
    if (lo < end && hi > base) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "[0x%08llx, 0x%08llx)", static_cast<unsigned long long>(lo),
                    static_cast<unsigned long long>(hi));
      out.push_back("argument '" + a.name + "' " + buf + " overlaps the accelerator address map");
    }
  }
  return out;
}

namespace detail {

inline void copy_va(HostMemory& mem, std::uint32_t dst, std::uint32_t src, std::uint64_t bytes) {
  std::vector<std::uint8_t> buf(bytes);
  mem.read(VirtualAddress{src}, buf);
  mem.write(VirtualAddress{dst}, buf);
}

// Install translations for [va, va + bytes) before launch: L1 first, then
// the L2 set each page maps to.
inline std::uint64_t preload_region(Soc& soc, std::uint32_t va, std::uint64_t bytes, std::uint32_t& l1_next) {
  auto& rab = soc.rab();
  const auto& pt = soc.memory().page_table();
  std::uint64_t pages = 0;
  const std::uint32_t first = va >> kPageShift;
  const std::uint32_t last = static_cast<std::uint32_t>((va + bytes - 1) >> kPageShift);
  for (std::uint32_t vpn = first; vpn <= last; ++vpn, ++pages) {
    const auto pte = pt.lookup(vpn);
    if (!pte) throw SimulationError("copy region page is not mapped");
    const TlbEntry e{vpn, pte->ppn, pte->flags.read, pte->flags.write, true, 0, 0};
    if (l1_next < rab.l1_slots()) {
      rab.preload(SlotCoord::l1(l1_next++), e);
      continue;
    }
    std::optional<SlotCoord> slot;
    if (rab.has_l2()) {
      const auto b = rab.bank_of(vpn), s = rab.set_of(vpn);
      for (std::uint32_t w = 0; w < rab.l2_assoc() && !slot; ++w)
        if (!rab.l2_entry(b, s, w).valid) slot = SlotCoord::l2(b, s, w);
    }
    if (!slot)
      throw SimulationError("copy-mode data does not fit in the RAB (" + std::to_string(pages + 1) +
                            " pages needed so far)");
    rab.preload(*slot, e);
  }
  return pages;
}

}  // namespace detail

/**
 * Offload `w` on `soc`. Copy mode marshals every argument into the
 * contiguous section (and back), pre-installs its translations and runs
 * the kernel on the copies. SVM mode passes host pointers; the kernel
 * faults pages in through the VMM.
 */
inline RunReport offload(Soc& soc, const Workload& w, OffloadMode mode) {
  auto& mem = soc.memory();
  const auto& cal = soc.config().calibration;
  const auto desc = w.setup(mem);
  if (auto v = reserve_va_overlap(desc.args); !v.empty()) throw SimulationError("VA reservation violated: " + v[0]);
  for (const auto& a : desc.args)
    if (a.linked() && a.node_bytes == 0) throw SimulationError("linked argument '" + a.name + "' has no node size");

  RunReport r;
  r.benchmark = w.name;
  r.mode = mode;
  r.clusters = soc.config().platform.n_clusters;
  r.offload_cycles = cal.descriptor_cycles;

  ArgMap map;
  for (const auto& a : desc.args) {
    map.host.push_back(a.host_va);
    if (mode == OffloadMode::svm || a.bytes == 0) {
      map.device.push_back(a.host_va);
      continue;
    }
    const auto dev = mem.allocate_contiguous(a.bytes).value;
    map.device.push_back(dev);
    if (a.copies_in()) {
      detail::copy_va(mem, dev, a.host_va, a.bytes);
      r.offload_cycles += host_copy(a.bytes, a.nodes, cal);
    }
  }
  if (mode == OffloadMode::copy) {
    if (w.relocate) w.relocate(mem, desc, map);
    std::uint32_t l1_next = 0;
    for (std::size_t i = 0; i < desc.args.size(); ++i)
      if (desc.args[i].bytes > 0) r.preloaded_pages += detail::preload_region(soc, map.device[i], desc.args[i].bytes, l1_next);
  }

  const auto programs = w.build(mem, soc.config().platform, map);
  const auto exec = soc.run(programs);
  r.kernel_cycles = exec.kernel_cycles();

  if (mode == OffloadMode::copy) {
    for (std::size_t i = 0; i < desc.args.size(); ++i) {
      const auto& a = desc.args[i];
      if (a.bytes == 0 || !a.copies_out()) continue;
      detail::copy_va(mem, a.host_va, map.device[i], a.bytes);
      r.offload_cycles += host_copy(a.bytes, 0, cal);
    }
  }
  r.total_cycles = r.offload_cycles + r.kernel_cycles;
  r.rab = soc.rab().stats();
  r.trace_drains = soc.trace().drain_count();
  if (w.output) r.output = w.output(mem, desc);
  return r;
}

}  // namespace hero

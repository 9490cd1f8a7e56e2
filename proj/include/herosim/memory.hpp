/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "herosim/config.hpp"
#include "herosim/engine.hpp"
#include "herosim/error.hpp"

namespace hero {

inline constexpr std::uint32_t kPageShift = 12;
inline constexpr std::uint32_t kPageSize = 1u << kPageShift;

struct VirtualAddress {
  std::uint32_t value = 0;
  std::uint32_t page() const { return value >> kPageShift; }
  std::uint32_t offset() const { return value & (kPageSize - 1); }
  auto operator<=>(const VirtualAddress&) const = default;
};

struct PhysicalAddress {
  std::uint32_t value = 0;
  std::uint32_t page() const { return value >> kPageShift; }
  std::uint32_t offset() const { return value & (kPageSize - 1); }
  auto operator<=>(const PhysicalAddress&) const = default;
};

/// Fixed physical / virtual layout of the modeled SoC.
namespace layout {
inline constexpr std::uint32_t kDramBytes = 0x1000'0000;       // 256 MiB
inline constexpr std::uint32_t kPageTableBase = 0x0010'0000;   // walk addresses
inline constexpr std::uint32_t kHeapPhysBase = 0x0100'0000;
inline constexpr std::uint32_t kHeapPhysEnd = 0x0800'0000;
inline constexpr std::uint32_t kContigPhysBase = 0x0800'0000;  // uncached copy section
inline constexpr std::uint32_t kContigBytes = 0x0400'0000;
inline constexpr std::uint32_t kContigVirtBase = 0xA000'0000;
inline constexpr std::uint32_t kPmcaApertureBase = 0x1000'0000;  // SPMs, peripherals
inline constexpr std::uint32_t kPmcaApertureEnd = 0x2000'0000;
inline constexpr std::uint32_t kHeapVirtBase = 0x4000'0000;
}  // namespace layout

struct PageFlags {
  bool read = true;
  bool write = true;
  bool operator==(const PageFlags&) const = default;
};

struct PageTableEntry {
  std::uint32_t ppn = 0;
  PageFlags flags;
};

/// Host user-space page table. Only the mapping is stored; walk addresses
/// are synthesized per level so that traces can show them.
class PageTable {
 public:
  explicit PageTable(std::uint32_t levels = 2) : levels_(levels) {}

  std::uint32_t levels() const { return levels_; }

  void map(std::uint32_t vpn, std::uint32_t ppn, PageFlags flags = {}) { entries_[vpn] = {ppn, flags}; }
  void unmap(std::uint32_t vpn) { entries_.erase(vpn); }

  std::optional<PageTableEntry> lookup(std::uint32_t vpn) const {
    auto it = entries_.find(vpn);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return entries_.size(); }

  /// Physical address of the descriptor read at `level` while walking vpn.
  std::uint32_t walk_address(std::uint32_t vpn, std::uint32_t level) const {
    const std::uint32_t bits_per_level = 20 / levels_;
    const std::uint32_t shift = bits_per_level * (levels_ - 1 - level);
    return layout::kPageTableBase + level * 0x4'0000u + (((vpn >> shift) * 4u) & 0x3'FFFFu);
  }

 private:
  std::uint32_t levels_;
  std::unordered_map<std::uint32_t, PageTableEntry> entries_;
};

/**
 * Shared DRAM: timing plus a sparse byte-accurate backing store.
 *
 * An uncontended access of b bytes completes after
 * base_latency + ceil(b / beat_bytes) * beat_cycles; requests on the same
 * port serialize in arrival order.
 */
class DramModel {
 public:
  explicit DramModel(const CalibrationConfig& cal, std::uint32_t extent = layout::kDramBytes)
      : base_(cal.dram_base_latency), beat_bytes_(cal.dram_beat_bytes), beat_cycles_(cal.dram_beat_cycles),
        extent_(extent) {}

  Cycle uncontended_latency(std::uint64_t bytes) const {
    return base_ + (bytes + beat_bytes_ - 1) / beat_bytes_ * beat_cycles_;
  }

  Cycle access(PhysicalAddress pa, std::uint64_t bytes, bool is_write, Cycle t, std::uint32_t port = 0) {
    (void)is_write;
    check_range(pa.value, bytes);
    auto& busy = ports_[port];
    const Cycle start = std::max(t, busy);
    const Cycle done = start + uncontended_latency(bytes);
    busy = done;
    ++accesses_;
    return done;
  }

  void read(std::uint32_t pa, std::span<std::uint8_t> out) const {
    check_range(pa, out.size());
    std::size_t done = 0;
    while (done < out.size()) {
      const std::uint32_t a = pa + static_cast<std::uint32_t>(done);
      const std::size_t off = a & (kPageSize - 1);
      const std::size_t n = std::min<std::size_t>(kPageSize - off, out.size() - done);
      auto it = pages_.find(a >> kPageShift);
      if (it == pages_.end()) std::memset(out.data() + done, 0, n);
      else std::memcpy(out.data() + done, it->second->data() + off, n);
      done += n;
    }
  }

  void write(std::uint32_t pa, std::span<const std::uint8_t> in) {
    check_range(pa, in.size());
    std::size_t done = 0;
    while (done < in.size()) {
      const std::uint32_t a = pa + static_cast<std::uint32_t>(done);
      const std::size_t off = a & (kPageSize - 1);
      const std::size_t n = std::min<std::size_t>(kPageSize - off, in.size() - done);
      auto& page = pages_[a >> kPageShift];
      if (!page) page = std::make_unique<Page>(Page{});
      std::memcpy(page->data() + off, in.data() + done, n);
      done += n;
    }
  }

  std::uint32_t extent() const { return extent_; }
  std::uint64_t access_count() const { return accesses_; }

 private:
  using Page = std::array<std::uint8_t, kPageSize>;

  void check_range(std::uint64_t pa, std::uint64_t bytes) const {
    if (pa + bytes > extent_)
      throw SimulationError("physical access out of range: pa=" + std::to_string(pa) +
                            " bytes=" + std::to_string(bytes));
  }

  Cycle base_, beat_bytes_, beat_cycles_;
  std::uint32_t extent_;
  std::map<std::uint32_t, Cycle> ports_;
  std::unordered_map<std::uint32_t, std::unique_ptr<Page>> pages_;
  std::uint64_t accesses_ = 0;
};

struct WalkStep {
  std::uint32_t address;
  Cycle issue;
  Cycle complete;
};

struct WalkResult {
  std::optional<PageTableEntry> entry;  // empty on page fault
  Cycle completion = 0;
  std::vector<WalkStep> steps;

  bool faulted() const { return !entry.has_value(); }
  PhysicalAddress physical(VirtualAddress va) const {
    return PhysicalAddress{(entry->ppn << kPageShift) | va.offset()};
  }
};

/// Page-table walk: one 4-byte DRAM read per level, issued back to back.
/// A fault costs the same walk.
inline WalkResult pt_walk(const PageTable& pt, DramModel& dram, VirtualAddress va, Cycle t,
                          std::uint32_t port = 0) {
  WalkResult r;
  Cycle now = t;
  for (std::uint32_t level = 0; level < pt.levels(); ++level) {
    const auto addr = pt.walk_address(va.page(), level);
    const Cycle done = dram.access(PhysicalAddress{addr}, 4, false, now, port);
    r.steps.push_back({addr, now, done});
    now = done;
  }
  r.completion = now;
  r.entry = pt.lookup(va.page());
  return r;
}

/// Word-interleaved L1 scratchpad of one cluster: one access per bank per
/// cycle, conflict-free latency 1.
class SpmBanks {
 public:
  SpmBanks(std::uint64_t banks, std::uint64_t bytes) : busy_(banks, 0), data_(bytes, 0) {}

  std::size_t bank_count() const { return busy_.size(); }
  std::size_t size() const { return data_.size(); }

  Cycle access(std::uint64_t bank, Cycle t) {
    if (bank >= busy_.size()) throw SimulationError("SPM bank " + std::to_string(bank) + " out of range");
    const Cycle start = std::max(t, busy_[bank]);
    busy_[bank] = start + 1;
    return start + 1;
  }

  std::uint64_t bank_of(std::uint64_t offset) const { return (offset / 4) % busy_.size(); }

  std::span<std::uint8_t> bytes(std::uint64_t offset, std::uint64_t n) {
    if (offset + n > data_.size())
      throw SimulationError("SPM overflow: offset " + std::to_string(offset) + " + " + std::to_string(n));
    return {data_.data() + offset, n};
  }

 private:
  std::vector<Cycle> busy_;
  std::vector<std::uint8_t> data_;
};

/// Host cycles to marshal data into the uncached contiguous section:
/// bytes at the copy rate plus one pointer rewrite per linked node.
inline Cycle host_copy(std::uint64_t bytes, std::uint64_t lds_nodes, const CalibrationConfig& cal) {
  const auto copy = static_cast<Cycle>(std::ceil(static_cast<double>(bytes) / cal.host_copy_bytes_per_cycle));
  return copy + lds_nodes * cal.lds_rewrite_cycles_per_node;
}

/**
 * The host process view of memory: page table, physical page allocator
 * and functional virtual-address accessors. Heap pages are handed out in a
 * seeded random physical order, as a long-running host would.
 */
class HostMemory {
 public:
  HostMemory(const CalibrationConfig& cal, std::uint64_t seed)
      : dram_(cal), page_table_(static_cast<std::uint32_t>(cal.ptw_levels)) {
    for (std::uint32_t p = layout::kHeapPhysBase >> kPageShift; p < (layout::kHeapPhysEnd >> kPageShift); ++p)
      free_pages_.push_back(p);
    std::mt19937_64 rng(seed);
    std::shuffle(free_pages_.begin(), free_pages_.end(), rng);
    std::reverse(free_pages_.begin(), free_pages_.end());
  }

  DramModel& dram() { return dram_; }
  const DramModel& dram() const { return dram_; }
  PageTable& page_table() { return page_table_; }
  const PageTable& page_table() const { return page_table_; }

  /// Page-aligned heap allocation backed by scattered physical pages.
  VirtualAddress allocate(std::uint64_t bytes, PageFlags flags = {}) {
    const VirtualAddress va{next_heap_va_};
    allocate_at(va, bytes, flags);
    next_heap_va_ += static_cast<std::uint32_t>(pages_for(bytes) * kPageSize);
    return va;
  }

  /// Map fresh pages at a caller-chosen page-aligned virtual address.
  void allocate_at(VirtualAddress va, std::uint64_t bytes, PageFlags flags = {}) {
    const auto n = pages_for(bytes);
    for (std::uint64_t i = 0; i < n; ++i) {
      if (free_pages_.empty()) throw SimulationError("host heap exhausted");
      const auto ppn = free_pages_.back();
      free_pages_.pop_back();
      page_table_.map(va.page() + static_cast<std::uint32_t>(i), ppn, flags);
    }
  }

  /// Reserve `bytes` of the physically contiguous section, mapped at a
  /// matching contiguous virtual window. Returns the virtual base.
  VirtualAddress allocate_contiguous(std::uint64_t bytes) {
    const auto n = pages_for(bytes);
    if (contig_used_ + n * kPageSize > layout::kContigBytes)
      throw SimulationError("contiguous section exhausted");
    const std::uint32_t off = static_cast<std::uint32_t>(contig_used_);
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint32_t page_off = off + static_cast<std::uint32_t>(i * kPageSize);
      page_table_.map((layout::kContigVirtBase + page_off) >> kPageShift,
                      (layout::kContigPhysBase + page_off) >> kPageShift);
    }
    contig_used_ += n * kPageSize;
    return VirtualAddress{layout::kContigVirtBase + off};
  }

  std::uint32_t translate(VirtualAddress va) const {
    auto e = page_table_.lookup(va.page());
    if (!e) throw PageFault(va.value, 0xFFFFFFFFu, "host access to unmapped va " + std::to_string(va.value));
    return (e->ppn << kPageShift) | va.offset();
  }

  void read(VirtualAddress va, std::span<std::uint8_t> out) const {
    for_each_page(va, out.size(), [&](std::uint32_t pa, std::size_t done, std::size_t n) {
      dram_.read(pa, out.subspan(done, n));
    });
  }

  void write(VirtualAddress va, std::span<const std::uint8_t> in) {
    for_each_page(va, in.size(), [&](std::uint32_t pa, std::size_t done, std::size_t n) {
      dram_.write(pa, in.subspan(done, n));
    });
  }

  template <typename T>
  T load(VirtualAddress va) const {
    T v{};
    read(va, {reinterpret_cast<std::uint8_t*>(&v), sizeof v});
    return v;
  }

  template <typename T>
  void store(VirtualAddress va, const T& v) {
    write(va, {reinterpret_cast<const std::uint8_t*>(&v), sizeof v});
  }

  static std::uint64_t pages_for(std::uint64_t bytes) { return (bytes + kPageSize - 1) / kPageSize; }

 private:
  template <typename F>
  void for_each_page(VirtualAddress va, std::size_t bytes, F&& f) const {
    std::size_t done = 0;
    while (done < bytes) {
      const VirtualAddress cur{va.value + static_cast<std::uint32_t>(done)};
      const std::size_t n = std::min<std::size_t>(kPageSize - cur.offset(), bytes - done);
      f(translate(cur), done, n);
      done += n;
    }
  }

  DramModel dram_;
  PageTable page_table_;
  std::vector<std::uint32_t> free_pages_;
  std::uint32_t next_heap_va_ = layout::kHeapVirtBase;
  std::uint64_t contig_used_ = 0;
};

}  // namespace hero

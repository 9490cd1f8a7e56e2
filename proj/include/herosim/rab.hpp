/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "herosim/config.hpp"
#include "herosim/engine.hpp"
#include "herosim/error.hpp"
#include "herosim/memory.hpp"

namespace hero {

/// Identifies a bus master: a PE, a DMA channel, or the host.
/// Layout: cluster in the upper 16 bits, index in the lower 16 bits;
/// DMA channels use indices from kDmaBase.
struct MasterId {
  static constexpr std::uint32_t kDmaBase = 0x100;
  static constexpr std::uint32_t kHost = 0xFFFFFFFFu;

  std::uint32_t value = 0;

  static MasterId pe(std::uint32_t cluster, std::uint32_t pe) { return {(cluster << 16) | pe}; }
  static MasterId dma(std::uint32_t cluster, std::uint32_t channel) {
    return {(cluster << 16) | (kDmaBase + channel)};
  }
  static MasterId host() { return {kHost}; }

  std::uint32_t cluster() const { return value >> 16; }
  std::uint32_t index() const { return value & 0xFFFF; }
  bool is_dma() const { return value != kHost && index() >= kDmaBase; }

  auto operator<=>(const MasterId&) const = default;
  std::string str() const {
    if (value == kHost) return "host";
    if (is_dma()) return "c" + std::to_string(cluster()) + ".dma" + std::to_string(index() - kDmaBase);
    return "c" + std::to_string(cluster()) + ".pe" + std::to_string(index());
  }
};

struct TlbEntry {
  std::uint32_t vpn = 0;
  std::uint32_t ppn = 0;
  bool read = true;
  bool write = true;
  bool valid = false;
  std::uint64_t install_seq = 0;
  Cycle visible_from = 0;

  bool permits(bool is_write) const { return is_write ? write : read; }
};

enum class TlbLevel : std::uint8_t { l1, l2 };

/// Slot coordinates: L1 uses `slot`; L2 uses bank/set/way.
struct SlotCoord {
  TlbLevel level = TlbLevel::l1;
  std::uint32_t slot = 0;
  std::uint32_t bank = 0;
  std::uint32_t set = 0;
  std::uint32_t way = 0;

  static SlotCoord l1(std::uint32_t s) { return {TlbLevel::l1, s, 0, 0, 0}; }
  static SlotCoord l2(std::uint32_t bank, std::uint32_t set, std::uint32_t way) {
    return {TlbLevel::l2, 0, bank, set, way};
  }
  bool operator==(const SlotCoord&) const = default;
};

enum class OutcomeKind : std::uint8_t { l1_hit = 1, l2_hit = 2, miss_enqueued = 3, miss_dropped = 4, permission_fault = 5 };

inline const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::l1_hit: return "l1_hit";
    case OutcomeKind::l2_hit: return "l2_hit";
    case OutcomeKind::miss_enqueued: return "miss_enqueued";
    case OutcomeKind::miss_dropped: return "miss_dropped";
    case OutcomeKind::permission_fault: return "permission_fault";
  }
  return "?";
}

struct TranslationOutcome {
  OutcomeKind kind;
  std::optional<PhysicalAddress> pa;
  Cycle issue = 0;
  // Hits: translation available. Misses: cycle the miss is enqueued/dropped.
  Cycle ready = 0;

  bool hit() const { return kind == OutcomeKind::l1_hit || kind == OutcomeKind::l2_hit; }
};

struct MissRecord {
  VirtualAddress va;
  MasterId master;
  bool is_write = false;
  Cycle issue = 0;
  Cycle enqueued = 0;
};

struct RabStats {
  std::uint64_t l1_hits = 0;
  std::uint64_t l2_hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t dropped = 0;
  std::uint64_t permission_faults = 0;
};

/**
 * Remapping address block: a fully associative single-cycle L1 TLB in
 * front of a banked set-associative L2 TLB with one lookup unit, and a
 * bounded FIFO of unresolved misses.
 *
 * L2 geometry: bank = vpn mod banks, set = (vpn / banks) mod sets. A
 * search scans the selected set, l2_ways_per_cycle ways per cycle. L1 hits
 * never wait on the lookup unit.
 */
class Rab {
 public:
  Rab(const PlatformConfig& p, const CalibrationConfig& c)
      : l1_(p.rab_l1_slots),
        banks_(static_cast<std::uint32_t>(p.rab_l2_banks)),
        sets_(static_cast<std::uint32_t>(p.l2_sets())),
        assoc_(static_cast<std::uint32_t>(p.rab_l2_assoc)),
        l2_(p.rab_l2_entries),
        search_cycles_((p.rab_l2_assoc + c.l2_ways_per_cycle - 1) / c.l2_ways_per_cycle),
        queue_depth_(c.miss_queue_depth),
        config_latency_(c.rab_config_write_latency) {}

  bool has_l2() const { return !l2_.empty(); }
  std::uint32_t l1_slots() const { return static_cast<std::uint32_t>(l1_.size()); }
  std::uint32_t l2_banks() const { return banks_; }
  std::uint32_t l2_sets() const { return sets_; }
  std::uint32_t l2_assoc() const { return assoc_; }
  Cycle l2_search_cycles() const { return search_cycles_; }
  Cycle config_write_latency() const { return config_latency_; }

  std::uint32_t bank_of(std::uint32_t vpn) const { return vpn % banks_; }
  std::uint32_t set_of(std::uint32_t vpn) const { return (vpn / banks_) % sets_; }

  const TlbEntry& l1_entry(std::uint32_t slot) const { return l1_.at(slot); }
  const TlbEntry& l2_entry(std::uint32_t bank, std::uint32_t set, std::uint32_t way) const {
    return l2_.at(l2_index(bank, set, way));
  }
  const TlbEntry& entry(const SlotCoord& c) const {
    return c.level == TlbLevel::l1 ? l1_entry(c.slot) : l2_entry(c.bank, c.set, c.way);
  }

  /// Slot holding a valid, visible L1 entry for vpn at time t.
  std::optional<std::uint32_t> find_l1(std::uint32_t vpn, Cycle t) const {
    for (std::uint32_t s = 0; s < l1_.size(); ++s)
      if (visible(l1_[s], vpn, t)) return s;
    return std::nullopt;
  }

  std::optional<SlotCoord> find_l2(std::uint32_t vpn, Cycle t) const {
    if (!has_l2()) return std::nullopt;
    const auto b = bank_of(vpn), s = set_of(vpn);
    for (std::uint32_t w = 0; w < assoc_; ++w)
      if (visible(l2_[l2_index(b, s, w)], vpn, t)) return SlotCoord::l2(b, s, w);
    return std::nullopt;
  }

  TranslationOutcome translate(VirtualAddress va, MasterId master, bool is_write, Cycle t) {
    const auto vpn = va.page();
    auto physical = [&](const TlbEntry& e) { return PhysicalAddress{(e.ppn << kPageShift) | va.offset()}; };

    if (auto s = find_l1(vpn, t)) {
      const auto& e = l1_[*s];
      if (!e.permits(is_write)) {
        ++stats_.permission_faults;
        return {OutcomeKind::permission_fault, std::nullopt, t, t + 1};
      }
      ++stats_.l1_hits;
      return {OutcomeKind::l1_hit, physical(e), t, t + 1};
    }

    Cycle resolved = t + 1;
    if (has_l2()) {
      const Cycle start = std::max(t + 1, lookup_busy_until_);
      resolved = start + search_cycles_;
      lookup_busy_until_ = resolved;
      if (auto c = find_l2(vpn, t)) {
        const auto& e = entry(*c);
        if (!e.permits(is_write)) {
          ++stats_.permission_faults;
          return {OutcomeKind::permission_fault, std::nullopt, t, resolved};
        }
        ++stats_.l2_hits;
        return {OutcomeKind::l2_hit, physical(e), t, resolved};
      }
    }

    if (queue_.size() >= queue_depth_) {
      ++stats_.dropped;
      return {OutcomeKind::miss_dropped, std::nullopt, t, resolved};
    }
    ++stats_.misses;
    queue_.push_back({va, master, is_write, t, resolved});
    if (on_enqueue_) on_enqueue_(queue_.back());
    return {OutcomeKind::miss_enqueued, std::nullopt, t, resolved};
  }

  /// Install an entry; translations issued at or after the returned cycle
  /// observe it. An L1 write drops any other valid L1 entry for the page.
  Cycle config_write(const SlotCoord& c, TlbEntry e, Cycle t) {
    const Cycle visible_at = t + config_latency_;
    e.visible_from = visible_at;
    place(c, e);
    return visible_at;
  }

  /// Install an entry that is visible from cycle 0. Used when the host sets
  /// up translations before the accelerator starts.
  void preload(const SlotCoord& c, TlbEntry e) {
    e.visible_from = 0;
    place(c, e);
  }

  std::optional<MissRecord> pop_miss() {
    if (queue_.empty()) return std::nullopt;
    auto m = queue_.front();
    queue_.pop_front();
    return m;
  }

  std::size_t pending_misses() const { return queue_.size(); }
  const RabStats& stats() const { return stats_; }
  void on_enqueue(std::function<void(const MissRecord&)> f) { on_enqueue_ = std::move(f); }

  /// Cycle until which the L2 lookup unit is occupied.
  Cycle lookup_busy_until() const { return lookup_busy_until_; }

 private:
  void place(const SlotCoord& c, TlbEntry e) {
    e.install_seq = ++install_counter_;
    if (c.level == TlbLevel::l1) {
      if (c.slot >= l1_.size()) throw SimulationError("L1 slot " + std::to_string(c.slot) + " out of range");
      if (e.valid) {
        for (std::uint32_t s = 0; s < l1_.size(); ++s)
          if (s != c.slot && l1_[s].valid && l1_[s].vpn == e.vpn) l1_[s].valid = false;
      }
      l1_[c.slot] = e;
    } else {
      if (!has_l2()) throw SimulationError("L2 TLB is disabled");
      if (c.bank >= banks_ || c.set >= sets_ || c.way >= assoc_)
        throw SimulationError("L2 coordinates out of range");
      if (e.valid && (bank_of(e.vpn) != c.bank || set_of(e.vpn) != c.set))
        throw SimulationError("L2 entry for vpn " + std::to_string(e.vpn) + " placed in wrong bank/set");
      if (e.valid) {
        for (std::uint32_t w = 0; w < assoc_; ++w) {
          auto& other = l2_[l2_index(c.bank, c.set, w)];
          if (w != c.way && other.valid && other.vpn == e.vpn) other.valid = false;
        }
      }
      l2_[l2_index(c.bank, c.set, c.way)] = e;
    }
  }

  static bool visible(const TlbEntry& e, std::uint32_t vpn, Cycle t) {
    return e.valid && e.vpn == vpn && e.visible_from <= t;
  }
  std::size_t l2_index(std::uint32_t b, std::uint32_t s, std::uint32_t w) const {
    if (b >= banks_ || s >= sets_ || w >= assoc_) throw SimulationError("L2 coordinates out of range");
    return (static_cast<std::size_t>(b) * sets_ + s) * assoc_ + w;
  }

  std::vector<TlbEntry> l1_;
  std::uint32_t banks_, sets_, assoc_;
  std::vector<TlbEntry> l2_;
  Cycle search_cycles_;
  std::uint64_t queue_depth_;
  Cycle config_latency_;
  Cycle lookup_busy_until_ = 0;
  std::uint64_t install_counter_ = 0;
  std::deque<MissRecord> queue_;
  RabStats stats_;
  std::function<void(const MissRecord&)> on_enqueue_;
};

}  // namespace hero

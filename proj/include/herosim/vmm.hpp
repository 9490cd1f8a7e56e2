/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <unordered_map>
#include <optional>
#include <random>
#include <vector>

#include "herosim/config.hpp"
#include "herosim/engine.hpp"
#include "herosim/memory.hpp"
#include "herosim/rab.hpp"
#include "herosim/trace.hpp"

namespace hero {

/// Replacement choice for RAB reconfiguration. Invalid slots always win;
/// among valid slots the policy decides.
class VictimSelector {
 public:
  explicit VictimSelector(VictimPolicyKind kind = VictimPolicyKind::fifo, std::uint64_t seed = 1)
      : kind_(kind), rng_(seed) {}

  VictimPolicyKind kind() const { return kind_; }

  /// L1: any slot. L2: a way in the bank/set that `vpn` maps to.
  SlotCoord select(const Rab& rab, TlbLevel level, std::uint32_t vpn = 0) {
    if (level == TlbLevel::l1) {
      const auto n = rab.l1_slots();
      return SlotCoord::l1(pick(n, l1_rr_, [&](std::uint32_t s) -> const TlbEntry& { return rab.l1_entry(s); }));
    }
    const auto b = rab.bank_of(vpn), s = rab.set_of(vpn);
    auto& rr = l2_rr_[static_cast<std::uint64_t>(b) << 32 | s];
    const auto way =
        pick(rab.l2_assoc(), rr, [&](std::uint32_t w) -> const TlbEntry& { return rab.l2_entry(b, s, w); });
    return SlotCoord::l2(b, s, way);
  }

 private:
  template <typename Get>
  std::uint32_t pick(std::uint32_t n, std::uint32_t& rr, Get&& get) {
    for (std::uint32_t i = 0; i < n; ++i)
      if (!get(i).valid) return i;
    switch (kind_) {
      case VictimPolicyKind::fifo: {
        std::uint32_t best = 0;
        for (std::uint32_t i = 1; i < n; ++i)
          if (get(i).install_seq < get(best).install_seq) best = i;
        return best;
      }
      case VictimPolicyKind::round_robin: {
        const auto v = rr % n;
        rr = (v + 1) % n;
        return v;
      }
      case VictimPolicyKind::random:
        return static_cast<std::uint32_t>(std::uniform_int_distribution<std::uint32_t>(0, n - 1)(rng_));
    }
    return 0;
  }

  VictimPolicyKind kind_;
  std::mt19937_64 rng_;
  std::uint32_t l1_rr_ = 0;
  std::unordered_map<std::uint64_t, std::uint32_t> l2_rr_;
};

/// Timing of one serviced miss; phases sum to wake - enqueued.
struct MissEpisode {
  MissRecord miss;
  Cycle handler_start = 0;
  Cycle walk_done = 0;
  Cycle config_visible = 0;
  Cycle wake = 0;
  SlotCoord slot;
};

/**
 * Accelerator-side virtual memory manager. One handler PE dequeues RAB
 * misses in FIFO order, walks the host page table, reconfigures an L1
 * slot, and wakes the requester.
 */
class Vmm {
 public:
  using Waker = std::function<void(MasterId)>;

  Vmm(SimEngine& engine, DomainId pmca, Rab& rab, HostMemory& mem, TraceHub* trace, const CalibrationConfig& cal,
      MasterId handler, std::uint64_t seed)
      : engine_(engine), pmca_(pmca), rab_(rab), mem_(mem), trace_(trace), wake_latency_(cal.wake_latency),
        install_l2_(cal.vmm_install_l2), handler_(handler), victims_(cal.victim_policy, seed) {
    rab_.on_enqueue([this](const MissRecord& m) { on_enqueue(m); });
  }

  Vmm(const Vmm&) = delete;
  Vmm& operator=(const Vmm&) = delete;

  MasterId handler() const { return handler_; }
  void set_waker(Waker w) { waker_ = std::move(w); }
  VictimSelector& victims() { return victims_; }

  SlotCoord select_victim(TlbLevel level, std::uint32_t vpn = 0) { return victims_.select(rab_, level, vpn); }

  /// Walk + reconfigure without any sleep/wake; for explicit pre-mapping.
  /// The entry carries the page-table permissions intersected with `flags`.
  Cycle map_page(VirtualAddress va, PageFlags flags, Cycle t) {
    auto walk = pt_walk(mem_.page_table(), mem_.dram(), va, t, handler_.cluster());
    if (walk.faulted())
      throw PageFault(va.value, handler_.value, "map_page: va " + hex(va.value) + " is not mapped");
    PageTableEntry e = *walk.entry;
    e.flags.read = e.flags.read && flags.read;
    e.flags.write = e.flags.write && flags.write;
    return install(va, e, walk.completion).second;
  }

  /// Service one miss synchronously (no events, no wake callback).
  /// Returns the cycle at which the requester is woken.
  Cycle handle_miss(const MissRecord& miss, Cycle t) { return service(miss, t, false).wake; }

  const std::vector<MissEpisode>& episodes() const { return episodes_; }

 private:
  static std::string hex(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", v);
    return buf;
  }

  // Installs into L1 (and optionally L2). Reuses a slot that already maps
  // the page so the configuration stays idempotent.
  std::pair<SlotCoord, Cycle> install(VirtualAddress va, const PageTableEntry& pte, Cycle t) {
    const auto vpn = va.page();
    std::optional<SlotCoord> slot;
    for (std::uint32_t s = 0; s < rab_.l1_slots(); ++s)
      if (rab_.l1_entry(s).valid && rab_.l1_entry(s).vpn == vpn) slot = SlotCoord::l1(s);
    if (!slot) slot = victims_.select(rab_, TlbLevel::l1);
    TlbEntry e{vpn, pte.ppn, pte.flags.read, pte.flags.write, true, 0, 0};
    const Cycle visible = rab_.config_write(*slot, e, t);
    if (install_l2_ && rab_.has_l2()) {
      auto l2 = rab_.find_l2(vpn, ~Cycle{0});
      rab_.config_write(l2 ? *l2 : victims_.select(rab_, TlbLevel::l2, vpn), e, t);
    }
    return {*slot, visible};
  }

  static std::uint64_t entry_descriptor(const TlbEntry& e, const SlotCoord& c) {
    return (static_cast<std::uint64_t>(e.vpn) << 40) | (static_cast<std::uint64_t>(e.ppn) << 16) |
           (static_cast<std::uint64_t>(c.level == TlbLevel::l2) << 3) | (static_cast<std::uint64_t>(e.valid) << 2) |
           (static_cast<std::uint64_t>(e.write) << 1) | static_cast<std::uint64_t>(e.read);
  }

  MissEpisode service(const MissRecord& miss, Cycle t, bool with_events) {
    MissEpisode ep;
    ep.miss = miss;
    ep.handler_start = t;
    auto walk = pt_walk(mem_.page_table(), mem_.dram(), miss.va, t, handler_.cluster());
    if (walk.faulted())
      throw PageFault(miss.va.value, miss.master.value,
                      "page fault: va " + hex(miss.va.value) + " by " + miss.master.str() + " is not mapped");
    ep.walk_done = walk.completion;
    if (!with_events) {
      auto [slot, visible] = install(miss.va, *walk.entry, walk.completion);
      ep.slot = slot;
      ep.config_visible = visible;
      ep.wake = visible + wake_latency_;
      episodes_.push_back(ep);
      return ep;
    }
    for (const auto& step : walk.steps) {
      emit_at(step.issue, TracePoint::rab_read_req, RecordKind::read_req, record_flags::kPtw,
              handler_.value, request_payload(step.address, 0));
      emit_at(step.complete, TracePoint::rab_read_resp, RecordKind::read_resp, record_flags::kPtw,
              handler_.value, step.address);
    }
    const auto pte = *walk.entry;
    at(walk.completion, [this, ep, pte]() mutable {
      auto [slot, visible] = install(ep.miss.va, pte, engine_.local_now(pmca_));
      ep.slot = slot;
      ep.config_visible = visible;
      ep.wake = visible + wake_latency_;
      const auto desc = entry_descriptor(rab_.entry(slot), slot);
      at(visible, [this, desc] {
        if (trace_) trace_->emit(TracePoint::rab_config, RecordKind::config_write, 0, handler_.value, desc);
      });
      at(ep.wake, [this, ep] {
        episodes_.push_back(ep);
        const auto master = ep.miss.master;
        if (trace_) {
          const auto point = ep.miss.is_write ? TracePoint::rab_write_req : TracePoint::rab_read_req;
          trace_->emit(point, RecordKind::wake, 0, master.value, ep.miss.va.value);
        }
        if (waker_) waker_(master);
        busy_ = false;
        next();
      });
    });
    return ep;
  }

  void on_enqueue(const MissRecord& m) {
    if (busy_ || scheduled_) return;
    scheduled_ = true;
    at(std::max(m.enqueued, engine_.local_now(pmca_)), [this] {
      scheduled_ = false;
      next();
    });
  }

  void next() {
    if (busy_) return;
    auto m = rab_.pop_miss();
    if (!m) return;
    busy_ = true;
    service(*m, engine_.local_now(pmca_), true);
  }

  template <typename F>
  void at(Cycle when, F&& f) {
    const Cycle now = engine_.local_now(pmca_);
    engine_.schedule(pmca_, when > now ? when - now : 0, std::forward<F>(f));
  }

  void emit_at(Cycle when, TracePoint point, RecordKind kind, std::uint8_t flags, std::uint32_t master,
               std::uint64_t payload) {
    if (!trace_ || !trace_->watching(point)) return;
    at(when, [this, point, kind, flags, master, payload] { trace_->emit(point, kind, flags, master, payload); });
  }

  SimEngine& engine_;
  DomainId pmca_;
  Rab& rab_;
  HostMemory& mem_;
  TraceHub* trace_;
  Cycle wake_latency_;
  bool install_l2_;
  MasterId handler_;
  VictimSelector victims_;
  Waker waker_;
  bool busy_ = false;
  bool scheduled_ = false;
  std::vector<MissEpisode> episodes_;
};

}  // namespace hero

/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "herosim/error.hpp"

namespace hero {

using Cycle = std::uint64_t;
using DomainId = std::uint32_t;

struct ClockDomain {
  std::string name;
  bool gated = false;
  // global = local + offset while running
  Cycle offset = 0;
  Cycle frozen_local = 0;
  Cycle gated_since = 0;
};

struct EventHandle {
  std::uint64_t seq;
};

/// One fired event, for replay comparisons.
struct FiredEvent {
  Cycle global;
  DomainId domain;
  std::uint64_t seq;
  Cycle local;
  bool operator==(const FiredEvent&) const = default;
};

/**
 * Discrete-event core. A single queue holds the events of every clock
 * domain; each event remembers its domain-local due cycle, and its global
 * due time is derived from the domain's offset. Gating a domain parks its
 * events; ungating shifts the offset by the gated span so that every
 * domain-local delay is preserved exactly.
 *
 * Ordering is total: (global due, domain id, insertion sequence).
 */
class SimEngine {
 public:
  using Action = std::function<void()>;

  explicit SimEngine(std::uint64_t max_events = 2'000'000'000ULL) : max_events_(max_events) {}

  SimEngine(const SimEngine&) = delete;
  SimEngine& operator=(const SimEngine&) = delete;

  DomainId add_domain(std::string name) {
    domains_.push_back(ClockDomain{std::move(name)});
    domains_.back().offset = now_;
    return static_cast<DomainId>(domains_.size() - 1);
  }

  const ClockDomain& domain(DomainId d) const { return domains_.at(d); }
  std::size_t domain_count() const { return domains_.size(); }

  Cycle now() const { return now_; }

  Cycle local_now(DomainId d) const {
    const auto& dom = check(d);
    return dom.gated ? dom.frozen_local : now_ - dom.offset;
  }

  EventHandle schedule(DomainId d, Cycle delay, Action action) {
    const auto& dom = check(d);
    Event ev;
    ev.domain = d;
    ev.seq = next_seq_++;
    ev.due_local = local_now(d) + delay;
    ev.due_global = ev.due_local + dom.offset;
    ev.action = std::move(action);
    if (dom.gated) {
      parked_.push_back(std::move(ev));
    } else {
      queue_.push_back(std::move(ev));
      std::push_heap(queue_.begin(), queue_.end(), Later{});
    }
    return EventHandle{next_seq_ - 1};
  }

  void gate(DomainId d) {
    auto& dom = check(d);
    if (dom.gated) throw SimulationError("domain '" + dom.name + "' is already gated");
    dom.frozen_local = now_ - dom.offset;
    dom.gated = true;
    dom.gated_since = now_;
  }

  void ungate(DomainId d) {
    auto& dom = check(d);
    if (!dom.gated) throw SimulationError("domain '" + dom.name + "' is not gated");
    dom.offset += now_ - dom.gated_since;
    dom.gated = false;
    // Re-derive global due times of every event that belongs to d.
    for (auto& ev : queue_)
      if (ev.domain == d) ev.due_global = ev.due_local + dom.offset;
    for (auto& ev : parked_) {
      if (ev.domain == d) {
        ev.due_global = ev.due_local + dom.offset;
        queue_.push_back(std::move(ev));
        ev.domain = kMoved;
      }
    }
    std::erase_if(parked_, [](const Event& e) { return e.domain == kMoved; });
    std::make_heap(queue_.begin(), queue_.end(), Later{});
  }

  /// Fire events until none remain runnable. Returns the global time of
  /// the last fired event (0 if none fired).
  Cycle run_until_idle() {
    while (!queue_.empty()) {
      std::pop_heap(queue_.begin(), queue_.end(), Later{});
      Event ev = std::move(queue_.back());
      queue_.pop_back();
      if (domains_[ev.domain].gated) {
        parked_.push_back(std::move(ev));
        continue;
      }
      if (++fired_ > max_events_)
        throw SimulationError("event budget of " + std::to_string(max_events_) +
                              " exceeded (livelock?)");
      now_ = ev.due_global;
      last_fired_ = now_;
      if (record_log_) log_.push_back({now_, ev.domain, ev.seq, ev.due_local});
      ev.action();
    }
    return last_fired_;
  }

  /// Events still waiting (including those parked in gated domains).
  std::size_t pending() const { return queue_.size() + parked_.size(); }
  std::uint64_t fired_count() const { return fired_; }

  void set_max_events(std::uint64_t n) { max_events_ = n; }
  void enable_log(bool on) { record_log_ = on; }
  const std::vector<FiredEvent>& log() const { return log_; }

 private:
  static constexpr DomainId kMoved = 0xFFFFFFFFu;

  struct Event {
    Cycle due_global = 0;
    DomainId domain = 0;
    std::uint64_t seq = 0;
    Cycle due_local = 0;
    Action action;
  };

  // Max-heap comparator producing a min-heap on the ordering key.
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.due_global != b.due_global) return a.due_global > b.due_global;
      if (a.domain != b.domain) return a.domain > b.domain;
      return a.seq > b.seq;
    }
  };

  ClockDomain& check(DomainId d) {
    if (d >= domains_.size()) throw SimulationError("unknown clock domain " + std::to_string(d));
    return domains_[d];
  }
  const ClockDomain& check(DomainId d) const {
    if (d >= domains_.size()) throw SimulationError("unknown clock domain " + std::to_string(d));
    return domains_[d];
  }

  std::vector<ClockDomain> domains_;
  std::vector<Event> queue_;
  std::vector<Event> parked_;
  Cycle now_ = 0;
  Cycle last_fired_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t fired_ = 0;
  std::uint64_t max_events_;
  bool record_log_ = false;
  std::vector<FiredEvent> log_;
};

}  // namespace hero

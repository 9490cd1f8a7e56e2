/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "herosim/error.hpp"
#include "herosim/rab.hpp"
#include "herosim/trace.hpp"

namespace hero {

// ---------------------------------------------------------------------------
// Layer 1: generic events

/// Attachment point of each tracer id. Trace files do not carry it.
using TracerMap = std::vector<std::optional<TracePoint>>;

/// One tracer per point, attached in point order (what `run --trace`
/// produces).
inline TracerMap default_tracer_map() {
  TracerMap m;
  for (std::size_t i = 0; i < kTracePointCount; ++i) m.push_back(static_cast<TracePoint>(i));
  return m;
}

struct GenericEvent {
  TraceRecord record;
  std::size_t file_index = 0;
  std::optional<TracePoint> point;
};

struct ParsedTrace {
  TraceHeader header;
  std::vector<GenericEvent> events;
};

/// Sort by (timestamp, tracer id, file order) and resolve attachment
/// points. Drain markers sort with the rest.
inline ParsedTrace parse(const TraceFile& f, const TracerMap& map = default_tracer_map()) {
  ParsedTrace p;
  p.header = f.header;
  p.events.reserve(f.records.size());
  for (std::size_t i = 0; i < f.records.size(); ++i) {
    GenericEvent e{f.records[i], i, std::nullopt};
    const auto id = e.record.tracer_id;
    if (id != kHostTracerId && id < map.size()) e.point = map[id];
    p.events.push_back(e);
  }
  std::stable_sort(p.events.begin(), p.events.end(), [](const GenericEvent& a, const GenericEvent& b) {
    if (a.record.timestamp != b.record.timestamp) return a.record.timestamp < b.record.timestamp;
    if (a.record.tracer_id != b.record.tracer_id) return a.record.tracer_id < b.record.tracer_id;
    return a.file_index < b.file_index;
  });
  return p;
}

inline ParsedTrace parse_file(const std::string& path, const TracerMap& map = default_tracer_map()) {
  return parse(read_trace_file(path), map);
}

// ---------------------------------------------------------------------------
// Layer 2: typed events

struct MemoryAccess {
  std::uint32_t master = 0;
  std::uint32_t address = 0;
  bool is_write = false;
  bool dma = false;
  bool retry = false;
  OutcomeKind outcome = OutcomeKind::l1_hit;
  Cycle request_ts = 0;
  Cycle response_ts = 0;
  double latency = 0;      // response - request
  double translation = 0;  // RAB part of the latency
};

enum class TlbOutcome : std::uint8_t { l1_hit, l2_hit, miss, dropped };

inline const char* to_string(TlbOutcome o) {
  switch (o) {
    case TlbOutcome::l1_hit: return "l1_hit";
    case TlbOutcome::l2_hit: return "l2_hit";
    case TlbOutcome::miss: return "miss";
    case TlbOutcome::dropped: return "dropped";
  }
  return "unknown";
}

struct MissPhases {
  double queue = 0;
  double ptw = 0;
  double config = 0;
  double wake = 0;

  double total() const { return queue + ptw + config + wake; }
};

struct TlbEpisode {
  std::uint32_t master = 0;
  std::uint32_t va = 0;
  bool is_write = false;
  bool dma = false;
  TlbOutcome outcome = TlbOutcome::l1_hit;
  Cycle request_ts = 0;
  double translation = 0;  // lookup cycles as issued
  // Misses only.
  Cycle enqueue_ts = 0;
  Cycle walk_start = 0;
  Cycle walk_end = 0;
  Cycle config_ts = 0;
  Cycle wake_ts = 0;
  MissPhases phases;
  bool complete = false;
  std::optional<Cycle> retry_ts;
  std::optional<OutcomeKind> retry_outcome;
};

struct SyncEvent {
  Cycle ts = 0;
  bool global = false;
  std::uint32_t cluster = 0;
  std::uint32_t generation = 0;
  std::vector<std::uint32_t> cores;
};

struct BusTransfer {
  std::uint32_t master = 0;
  std::uint32_t pa = 0;
  std::uint32_t bytes = 0;
  bool is_write = false;
  Cycle start = 0;
  Cycle end = 0;
  double latency = 0;
};

struct DecodeIssue {
  std::size_t file_index = 0;
  Cycle ts = 0;
  std::string message;
};

struct Decoded {
  std::vector<MemoryAccess> accesses;
  std::vector<TlbEpisode> episodes;
  std::vector<SyncEvent> syncs;
  std::vector<BusTransfer> bus;
  std::vector<Cycle> drains;
  std::vector<DecodeIssue> diagnostics;
  std::size_t event_count = 0;
  std::size_t consumed = 0;       // events owned by a typed event
  std::size_t diagnosed = 0;      // events listed only as diagnostics
};

namespace detail {

inline bool is_request(RecordKind k) { return k == RecordKind::read_req || k == RecordKind::write_req; }
inline bool is_response(RecordKind k) { return k == RecordKind::read_resp || k == RecordKind::write_resp; }
inline bool is_write_kind(RecordKind k) { return k == RecordKind::write_req || k == RecordKind::write_resp; }

class Decoder {
 public:
  explicit Decoder(const std::vector<GenericEvent>& ev) : ev_(ev) {}

  Decoded run() {
    out_.event_count = ev_.size();
    for (std::size_t i = 0; i < ev_.size(); ++i) one(i);
    finish();
    return std::move(out_);
  }

 private:
  struct PtwGroup {
    std::optional<Cycle> first_req;
    std::optional<Cycle> last_resp;
    std::size_t outstanding = 0;
  };
  using Key = std::pair<std::uint32_t, bool>;  // master, write

  void consume() { ++out_.consumed; }
  void diagnose(std::size_t i, std::string msg) {
    ++out_.diagnosed;
    out_.diagnostics.push_back({ev_[i].file_index, ev_[i].record.timestamp, std::move(msg)});
  }

  void one(std::size_t i) {
    const auto& r = ev_[i].record;
    if (r.kind == RecordKind::drain_marker) {
      out_.drains.push_back(r.timestamp);
      consume();
      return;
    }
    if (!ev_[i].point) {
      diagnose(i, "record from tracer " + std::to_string(r.tracer_id) + " with no known attachment point");
      return;
    }
    switch (*ev_[i].point) {
      case TracePoint::bus: bus(i); return;
      case TracePoint::cluster_sync: sync(i); return;
      case TracePoint::rab_config: config(i); return;
      case TracePoint::rab_read_req:
      case TracePoint::rab_write_req: request_side(i); return;
      case TracePoint::rab_read_resp:
      case TracePoint::rab_write_resp: response_side(i); return;
    }
  }

  void bus(std::size_t i) {
    const auto& r = ev_[i].record;
    const Key k{r.master_id, is_write_kind(r.kind)};
    if (is_request(r.kind)) {
      bus_pending_[k].push_back(i);
      consume();
      return;
    }
    if (!is_response(r.kind)) return diagnose(i, std::string("unexpected ") + to_string(r.kind) + " at the bus");
    auto& q = bus_pending_[k];
    if (q.empty()) return diagnose(i, "bus response without request");
    const auto& req = ev_[q.front()].record;
    q.pop_front();
    BusTransfer b;
    b.master = r.master_id;
    b.pa = payload_address(req.payload);
    b.bytes = payload_high(req.payload);
    b.is_write = k.second;
    b.start = req.timestamp;
    b.end = r.timestamp;
    b.latency = static_cast<double>(b.end - b.start);
    out_.bus.push_back(b);
    consume();
  }

  void sync(std::size_t i) {
    const auto& r = ev_[i].record;
    if (r.kind != RecordKind::wake) return diagnose(i, std::string("unexpected ") + to_string(r.kind) + " at sync point");
    if (!out_.syncs.empty()) {
      auto& s = out_.syncs.back();
      if (s.ts == r.timestamp && sync_payload_ == r.payload) {
        s.cores.push_back(r.master_id);
        consume();
        return;
      }
    }
    SyncEvent s;
    s.ts = r.timestamp;
    s.global = (r.payload >> 63) != 0;
    s.cluster = static_cast<std::uint32_t>((r.payload >> 32) & 0x7FFFFFFFu);
    s.generation = static_cast<std::uint32_t>(r.payload);
    s.cores.push_back(r.master_id);
    sync_payload_ = r.payload;
    out_.syncs.push_back(s);
    consume();
  }

  void config(std::size_t i) {
    const auto& r = ev_[i].record;
    if (r.kind != RecordKind::config_write)
      return diagnose(i, std::string("unexpected ") + to_string(r.kind) + " at config point");
    configs_.push_back(i);  // later walks belong to the next episode
    consume();
  }

  PtwGroup& current_group() {
    if (groups_.size() <= configs_.size()) groups_.resize(configs_.size() + 1);
    return groups_[configs_.size()];
  }

  void request_side(std::size_t i) {
    const auto& r = ev_[i].record;
    const bool write = ev_[i].point == TracePoint::rab_write_req;
    switch (r.kind) {
      case RecordKind::read_req:
      case RecordKind::write_req: {
        if (r.flags & record_flags::kPtw) {
          auto& g = current_group();
          if (!g.first_req) g.first_req = r.timestamp;
          ++g.outstanding;
          ptw_pending_.push_back(configs_.size());
          consume();
          return;
        }
        const auto kind = static_cast<OutcomeKind>(r.flags & record_flags::kOutcomeMask);
        if (r.flags & record_flags::kRetry) note_retry(r.master_id, r.timestamp, kind);
        switch (kind) {
          case OutcomeKind::l1_hit:
          case OutcomeKind::l2_hit:
            hit_pending_[{r.master_id, write}].push_back(i);
            consume();
            return;
          case OutcomeKind::miss_enqueued:
          case OutcomeKind::miss_dropped:
            miss_req_[r.master_id] = i;
            consume();
            return;
          default:
            return diagnose(i, "request with outcome " + std::to_string(r.flags & record_flags::kOutcomeMask));
        }
      }
      case RecordKind::miss_enq: {
        TlbEpisode e = start_episode(i, write, TlbOutcome::miss);
        e.enqueue_ts = r.timestamp;
        open_[r.master_id] = out_.episodes.size();
        queue_order_.push_back(out_.episodes.size());
        out_.episodes.push_back(e);
        consume();
        return;
      }
      case RecordKind::sleep: {
        auto it = open_.find(r.master_id);
        if (it != open_.end() && out_.episodes[it->second].enqueue_ts == r.timestamp &&
            !slept_.count(it->second)) {
          slept_.insert(it->second);
          consume();
          return;
        }
        // No miss_enq: the queue was full and the request was dropped.
        TlbEpisode e = start_episode(i, write, TlbOutcome::dropped);
        e.enqueue_ts = r.timestamp;
        dropped_[r.master_id] = out_.episodes.size();
        out_.episodes.push_back(e);
        consume();
        return;
      }
      case RecordKind::wake: {
        auto it = open_.find(r.master_id);
        if (it == open_.end()) return diagnose(i, "wake without an open miss");
        auto& e = out_.episodes[it->second];
        e.wake_ts = r.timestamp;
        woken_[r.master_id] = it->second;
        open_.erase(it);
        consume();
        return;
      }
      default:
        return diagnose(i, std::string("unexpected ") + to_string(r.kind) + " at request point");
    }
  }

  TlbEpisode start_episode(std::size_t i, bool write, TlbOutcome o) {
    const auto& r = ev_[i].record;
    TlbEpisode e;
    e.master = r.master_id;
    e.va = static_cast<std::uint32_t>(r.payload);
    e.is_write = write;
    e.dma = (r.flags & record_flags::kDma) != 0;
    e.outcome = o;
    e.request_ts = r.timestamp;
    if (auto m = miss_req_.find(r.master_id); m != miss_req_.end()) {
      const auto& q = ev_[m->second].record;
      e.request_ts = q.timestamp;
      e.translation = payload_high(q.payload);
      miss_req_.erase(m);
    }
    return e;
  }

  void note_retry(std::uint32_t master, Cycle ts, OutcomeKind kind) {
    std::optional<std::size_t> idx;
    if (auto it = woken_.find(master); it != woken_.end()) {
      idx = it->second;
      woken_.erase(it);
    } else if (auto d = dropped_.find(master); d != dropped_.end()) {
      idx = d->second;
      dropped_.erase(d);
    }
    if (!idx) return;
    auto& e = out_.episodes[*idx];
    e.retry_ts = ts;
    e.retry_outcome = kind;
    if (e.outcome == TlbOutcome::dropped) {
      e.wake_ts = ts;
      e.phases.wake = static_cast<double>(ts - e.enqueue_ts);
      e.complete = true;
    }
  }

  void response_side(std::size_t i) {
    const auto& r = ev_[i].record;
    if (!is_response(r.kind))
      return diagnose(i, std::string("unexpected ") + to_string(r.kind) + " at response point");
    if (r.flags & record_flags::kPtw) {
      if (ptw_pending_.empty()) return diagnose(i, "walk response without request");
      const auto g = ptw_pending_.front();
      ptw_pending_.pop_front();
      auto& grp = groups_[g];
      grp.last_resp = r.timestamp;
      --grp.outstanding;
      consume();
      return;
    }
    const bool write = ev_[i].point == TracePoint::rab_write_resp;
    auto& q = hit_pending_[{r.master_id, write}];
    if (q.empty()) return diagnose(i, "response without request");
    const auto& req = ev_[q.front()].record;
    q.pop_front();
    MemoryAccess a;
    a.master = r.master_id;
    a.address = payload_address(req.payload);
    a.is_write = write;
    a.dma = (req.flags & record_flags::kDma) != 0;
    a.retry = (req.flags & record_flags::kRetry) != 0;
    a.outcome = static_cast<OutcomeKind>(req.flags & record_flags::kOutcomeMask);
    a.request_ts = req.timestamp;
    a.response_ts = r.timestamp;
    a.latency = static_cast<double>(r.timestamp - req.timestamp);
    a.translation = payload_high(req.payload);
    out_.accesses.push_back(a);

    TlbEpisode e;
    e.master = a.master;
    e.va = a.address;
    e.is_write = write;
    e.dma = a.dma;
    e.outcome = a.outcome == OutcomeKind::l1_hit ? TlbOutcome::l1_hit : TlbOutcome::l2_hit;
    e.request_ts = a.request_ts;
    e.translation = a.translation;
    e.complete = true;
    out_.episodes.push_back(e);
    consume();
  }

  void finish() {
    // The handler serves misses in queue order: the k-th miss owns the
    // k-th walk and the k-th configuration write.
    for (std::size_t k = 0; k < queue_order_.size(); ++k) {
      auto& e = out_.episodes[queue_order_[k]];
      if (k >= configs_.size() || k >= groups_.size() || !groups_[k].first_req || !groups_[k].last_resp ||
          e.wake_ts == 0) {
        e.complete = false;
        continue;
      }
      e.walk_start = *groups_[k].first_req;
      e.walk_end = *groups_[k].last_resp;
      e.config_ts = ev_[configs_[k]].record.timestamp;
      e.phases.queue = static_cast<double>(e.walk_start - e.enqueue_ts);
      e.phases.ptw = static_cast<double>(e.walk_end - e.walk_start);
      e.phases.config = static_cast<double>(e.config_ts - e.walk_end);
      e.phases.wake = static_cast<double>(e.wake_ts - e.config_ts);
      e.complete = true;
    }
    for (std::size_t k = queue_order_.size(); k < configs_.size(); ++k) {
      const auto i = configs_[k];
      out_.diagnostics.push_back({ev_[i].file_index, ev_[i].record.timestamp, "configuration write without a miss"});
    }
    for (const auto& [key, q] : hit_pending_)
      for (auto i : q)
        out_.diagnostics.push_back({ev_[i].file_index, ev_[i].record.timestamp, "request without response"});
    for (const auto& [key, q] : bus_pending_)
      for (auto i : q)
        out_.diagnostics.push_back({ev_[i].file_index, ev_[i].record.timestamp, "bus request without response"});
    std::stable_sort(out_.episodes.begin(), out_.episodes.end(),
              [](const TlbEpisode& a, const TlbEpisode& b) { return a.request_ts < b.request_ts; });
  }

  const std::vector<GenericEvent>& ev_;
  Decoded out_;
  std::map<Key, std::deque<std::size_t>> hit_pending_;
  std::map<Key, std::deque<std::size_t>> bus_pending_;
  std::map<std::uint32_t, std::size_t> miss_req_;
  std::map<std::uint32_t, std::size_t> open_;
  std::set<std::size_t> slept_;
  std::map<std::uint32_t, std::size_t> woken_;
  std::map<std::uint32_t, std::size_t> dropped_;
  std::vector<std::size_t> queue_order_;
  std::vector<std::size_t> configs_;
  std::vector<PtwGroup> groups_;
  std::deque<std::size_t> ptw_pending_;
  std::uint64_t sync_payload_ = 0;
};

}  // namespace detail

/// Pair requests with responses per (point, master) in FIFO order and
/// assemble miss episodes. Problems become diagnostics.
inline Decoded decode(const ParsedTrace& p) { return detail::Decoder(p.events).run(); }

// ---------------------------------------------------------------------------
// Layer 3: analyses and assertions

struct Counterexample {
  Cycle ts = 0;
  std::uint32_t master = 0;
  std::string detail;
};

struct AssertionResult {
  std::string name;
  bool pass = true;
  std::size_t checked = 0;
  std::optional<Counterexample> counterexample;
};

struct Assertion {
  std::string name;
  std::function<AssertionResult(const Decoded&)> eval;
};

/// Every episode passing `filter` satisfies `pred`.
inline Assertion for_all_episodes(std::string name, std::function<bool(const TlbEpisode&)> filter,
                                  std::function<bool(const TlbEpisode&)> pred) {
  return {name, [name, filter, pred](const Decoded& d) {
            AssertionResult r;
            r.name = name;
            for (const auto& e : d.episodes) {
              if (!filter(e)) continue;
              ++r.checked;
              if (!pred(e)) {
                r.pass = false;
                r.counterexample = Counterexample{e.request_ts, e.master, std::string(to_string(e.outcome)) + " episode"};
                return r;
              }
            }
            return r;
          }};
}

/// Windowed quantifier: for every `window` episode W, every `subject`
/// episode S from another master issued inside [W.request_ts,
/// W.request_ts + W.translation) satisfies pred(S, W).
inline Assertion within_windows(std::string name, std::function<bool(const TlbEpisode&)> window,
                                std::function<bool(const TlbEpisode&)> subject,
                                std::function<bool(const TlbEpisode&, const TlbEpisode&)> pred) {
  return {name, [name, window, subject, pred](const Decoded& d) {
            AssertionResult r;
            r.name = name;
            std::vector<const TlbEpisode*> subs;
            for (const auto& e : d.episodes)
              if (subject(e)) subs.push_back(&e);
            std::optional<Counterexample> first;
            for (const auto& w : d.episodes) {
              if (!window(w)) continue;
              const Cycle lo = w.request_ts;
              const auto hi = static_cast<double>(lo) + w.translation;
              auto it = std::lower_bound(subs.begin(), subs.end(), lo,
                                         [](const TlbEpisode* e, Cycle t) { return e->request_ts < t; });
              for (; it != subs.end() && static_cast<double>((*it)->request_ts) < hi; ++it) {
                const auto& s = **it;
                if (s.master == w.master) continue;
                ++r.checked;
                if (pred(s, w)) continue;
                if (!first || s.request_ts < first->ts) {
                  char buf[160];
                  std::snprintf(buf, sizeof buf, "%s by %s at %llu took %.6g cycles during the lookup by %s at %llu",
                                to_string(s.outcome), MasterId{s.master}.str().c_str(),
                                static_cast<unsigned long long>(s.request_ts), s.translation,
                                MasterId{w.master}.str().c_str(), static_cast<unsigned long long>(w.request_ts));
                  first = Counterexample{s.request_ts, s.master, buf};
                }
              }
            }
            if (first) {
              r.pass = false;
              r.counterexample = first;
            }
            return r;
          }};
}

/// L1 hits keep their single-cycle latency while another master's L2
/// search or miss is in progress.
inline Assertion hit_under_miss() {
  return within_windows(
      "hit_under_miss",
      [](const TlbEpisode& w) { return w.outcome != TlbOutcome::l1_hit && w.translation > 1; },
      [](const TlbEpisode& s) { return s.outcome == TlbOutcome::l1_hit; },
      [](const TlbEpisode& s, const TlbEpisode&) { return s.translation == 1; });
}

/// Complete miss episodes: phases add up to wake - enqueue.
inline Assertion phases_sum() {
  return for_all_episodes(
      "phases_sum", [](const TlbEpisode& e) { return e.outcome == TlbOutcome::miss && e.complete; },
      [](const TlbEpisode& e) { return e.phases.total() == static_cast<double>(e.wake_ts - e.enqueue_ts); });
}

/// Every memory access completes within `bound` cycles.
inline Assertion latency_le(double bound) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "latency_le:%g", bound);
  const std::string name = buf;
  return {name, [name, bound](const Decoded& d) {
            AssertionResult r;
            r.name = name;
            for (const auto& a : d.accesses) {
              ++r.checked;
              if (a.latency > bound) {
                r.pass = false;
                char msg[96];
                std::snprintf(msg, sizeof msg, "access to 0x%08x took %.6g cycles", a.address, a.latency);
                r.counterexample = Counterexample{a.request_ts, a.master, msg};
                return r;
              }
            }
            return r;
          }};
}

/// Built-in assertion by name: hit_under_miss, phases_sum, latency_le:N.
inline Assertion assertion_by_name(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "hit_under_miss") return hit_under_miss();
  if (s == "phases_sum") return phases_sum();
  if (s.rfind("latency_le:", 0) == 0) {
    const auto arg = s.substr(11);
    char* end = nullptr;
    const double v = std::strtod(arg.c_str(), &end);
    if (arg.empty() || *end != '\0' || !(v >= 0)) throw ConfigError("bad latency bound in assertion '" + s + "'");
    return latency_le(v);
  }
  throw ConfigError("unknown assertion '" + s + "'");
}

struct CoreStats {
  std::uint32_t master = 0;
  std::uint64_t count = 0;
  double mean_latency = 0;
  double min_latency = 0;
  double max_latency = 0;
  std::map<double, std::uint64_t> histogram;
};

struct TlbBreakdown {
  std::uint64_t l1_hits = 0;
  std::uint64_t l2_hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t dropped = 0;
  MissPhases mean_phases;  // over complete misses
};

struct BusBin {
  Cycle start = 0;
  double bytes = 0;
};

struct AnalysisReport {
  std::vector<CoreStats> cores;
  TlbBreakdown tlb;
  std::vector<BusBin> bus_timeline;
  double mean_dram_load_latency = 0;  // PE loads, translation excluded
  std::vector<AssertionResult> assertions;

  bool all_pass() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& a) { return a.pass; });
  }
};

inline AnalysisReport analyze(const Decoded& d, const std::vector<Assertion>& assertions = {},
                              Cycle bus_bin = 1000) {
  AnalysisReport rep;
  std::map<std::uint32_t, CoreStats> cores;
  double dram_sum = 0;
  std::uint64_t dram_n = 0;
  for (const auto& a : d.accesses) {
    auto& c = cores[a.master];
    c.master = a.master;
    if (c.count == 0 || a.latency < c.min_latency) c.min_latency = a.latency;
    c.max_latency = std::max(c.max_latency, a.latency);
    ++c.count;
    c.mean_latency += a.latency;
    ++c.histogram[a.latency];
    if (!a.dma && !a.is_write) {
      dram_sum += a.latency - a.translation;
      ++dram_n;
    }
  }
  for (auto& [m, c] : cores) {
    c.mean_latency /= static_cast<double>(c.count);
    rep.cores.push_back(c);
  }
  if (dram_n) rep.mean_dram_load_latency = dram_sum / static_cast<double>(dram_n);

  std::uint64_t complete = 0;
  for (const auto& e : d.episodes) {
    switch (e.outcome) {
      case TlbOutcome::l1_hit: ++rep.tlb.l1_hits; break;
      case TlbOutcome::l2_hit: ++rep.tlb.l2_hits; break;
      case TlbOutcome::miss:
        ++rep.tlb.misses;
        if (e.complete) {
          ++complete;
          rep.tlb.mean_phases.queue += e.phases.queue;
          rep.tlb.mean_phases.ptw += e.phases.ptw;
          rep.tlb.mean_phases.config += e.phases.config;
          rep.tlb.mean_phases.wake += e.phases.wake;
        }
        break;
      case TlbOutcome::dropped: ++rep.tlb.dropped; break;
    }
  }
  if (complete) {
    const auto n = static_cast<double>(complete);
    rep.tlb.mean_phases.queue /= n;
    rep.tlb.mean_phases.ptw /= n;
    rep.tlb.mean_phases.config /= n;
    rep.tlb.mean_phases.wake /= n;
  }

  // Bytes are spread evenly over each transfer's [start, end) span.
  if (bus_bin == 0) bus_bin = 1;
  std::map<Cycle, double> bins;
  for (const auto& b : d.bus) {
    const Cycle span = std::max<Cycle>(b.end - b.start, 1);
    const double rate = static_cast<double>(b.bytes) / static_cast<double>(span);
    for (Cycle t = b.start; t < b.start + span;) {
      const Cycle bin = t / bus_bin * bus_bin;
      const Cycle stop = std::min(bin + bus_bin, b.start + span);
      bins[bin] += rate * static_cast<double>(stop - t);
      t = stop;
    }
  }
  for (const auto& [start, bytes] : bins) rep.bus_timeline.push_back({start, bytes});

  for (const auto& a : assertions) rep.assertions.push_back(a.eval(d));
  return rep;
}

// ---------------------------------------------------------------------------
// Clock-ratio rescaling

/// Multiply every latency and phase duration by `ratio`. Timestamps are
/// unchanged.
inline Decoded rescale(const Decoded& d, double ratio) {
  if (!(ratio > 0)) throw ConfigError("rescale ratio must be positive");
  Decoded out = d;
  for (auto& a : out.accesses) {
    a.latency *= ratio;
    a.translation *= ratio;
  }
  for (auto& e : out.episodes) {
    e.translation *= ratio;
    e.phases.queue *= ratio;
    e.phases.ptw *= ratio;
    e.phases.config *= ratio;
    e.phases.wake *= ratio;
  }
  for (auto& b : out.bus) b.latency *= ratio;
  return out;
}

}  // namespace hero

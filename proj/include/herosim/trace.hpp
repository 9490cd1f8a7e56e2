/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "herosim/config.hpp"
#include "herosim/engine.hpp"
#include "herosim/error.hpp"

namespace hero {

enum class RecordKind : std::uint8_t {
  read_req = 0,
  read_resp = 1,
  write_req = 2,
  write_resp = 3,
  config_write = 4,
  miss_enq = 5,
  sleep = 6,
  wake = 7,
  drain_marker = 8,
};

inline const char* to_string(RecordKind k) {
  static constexpr const char* names[] = {"read_req", "read_resp", "write_req", "write_resp", "config_write",
                                          "miss_enq", "sleep",     "wake",      "drain_marker"};
  const auto i = static_cast<std::size_t>(k);
  return i < std::size(names) ? names[i] : "unknown";
}

/// Bit assignments of TraceRecord::flags.
namespace record_flags {
inline constexpr std::uint8_t kOutcomeMask = 0x07;  // OutcomeKind on request records
inline constexpr std::uint8_t kPtw = 0x08;          // page-table-walk access
inline constexpr std::uint8_t kDma = 0x10;          // issued by a DMA channel
inline constexpr std::uint8_t kSync = 0x20;         // barrier release
inline constexpr std::uint8_t kRetry = 0x40;        // re-issue after wake
}  // namespace record_flags

inline constexpr std::uint16_t kHostTracerId = 0xFFFF;

/// Fixed 24-byte event record. Timestamps count accelerator clock cycles.
struct TraceRecord {
  std::uint64_t timestamp = 0;
  std::uint16_t tracer_id = 0;
  RecordKind kind = RecordKind::read_req;
  std::uint8_t flags = 0;
  std::uint32_t master_id = 0;
  std::uint64_t payload = 0;

  bool operator==(const TraceRecord&) const = default;
};

/// Request payload: address in the low word, translation cycles in the
/// high word.
inline std::uint64_t request_payload(std::uint32_t address, std::uint32_t translate_cycles) {
  return (static_cast<std::uint64_t>(translate_cycles) << 32) | address;
}
inline std::uint32_t payload_address(std::uint64_t p) { return static_cast<std::uint32_t>(p); }
inline std::uint32_t payload_high(std::uint64_t p) { return static_cast<std::uint32_t>(p >> 32); }

inline constexpr std::size_t kTraceHeaderBytes = 32;
inline constexpr std::size_t kTraceRecordBytes = 24;
inline constexpr std::uint32_t kTraceVersion = 1;
inline constexpr std::array<char, 4> kTraceMagic = {'H', 'T', 'R', 'C'};

struct TraceHeader {
  std::uint32_t version = kTraceVersion;
  std::uint64_t platform_hash = 0;
  std::uint64_t record_count = 0;
  double clock_ratio = 1.0;
};

struct TraceFile {
  TraceHeader header;
  std::vector<TraceRecord> records;
};

namespace detail {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(const std::uint8_t* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(p[i]) << (8 * i));
  return v;
}

}  // namespace detail

/// Serialize to the on-disk layout (little-endian, 32-byte header).
inline std::vector<std::uint8_t> encode_trace(const TraceHeader& h, std::span<const TraceRecord> records) {
  using detail::put_le;
  std::vector<std::uint8_t> out;
  out.reserve(kTraceHeaderBytes + records.size() * kTraceRecordBytes);
  out.insert(out.end(), kTraceMagic.begin(), kTraceMagic.end());
  put_le<std::uint32_t>(out, h.version);
  put_le<std::uint64_t>(out, h.platform_hash);
  put_le<std::uint64_t>(out, records.size());
  put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(h.clock_ratio));
  for (const auto& r : records) {
    put_le<std::uint64_t>(out, r.timestamp);
    put_le<std::uint16_t>(out, r.tracer_id);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(r.kind));
    put_le<std::uint8_t>(out, r.flags);
    put_le<std::uint32_t>(out, r.master_id);
    put_le<std::uint64_t>(out, r.payload);
  }
  return out;
}

inline TraceFile decode_trace(std::span<const std::uint8_t> bytes) {
  using detail::get_le;
  if (bytes.size() < kTraceHeaderBytes) throw TraceFormatError("trace shorter than its header");
  if (std::memcmp(bytes.data(), kTraceMagic.data(), 4) != 0) throw TraceFormatError("bad trace magic");
  TraceFile f;
  const auto* p = bytes.data();
  f.header.version = get_le<std::uint32_t>(p + 4);
  if (f.header.version != kTraceVersion)
    throw TraceFormatError("unsupported trace version " + std::to_string(f.header.version));
  f.header.platform_hash = get_le<std::uint64_t>(p + 8);
  f.header.record_count = get_le<std::uint64_t>(p + 16);
  f.header.clock_ratio = std::bit_cast<double>(get_le<std::uint64_t>(p + 24));
  const auto body = bytes.size() - kTraceHeaderBytes;
  if (body % kTraceRecordBytes != 0 || body / kTraceRecordBytes != f.header.record_count)
    throw TraceFormatError("truncated trace: header announces " + std::to_string(f.header.record_count) +
                           " records, body holds " + std::to_string(body) + " bytes");
  f.records.reserve(f.header.record_count);
  for (std::size_t i = 0; i < f.header.record_count; ++i) {
    const auto* r = p + kTraceHeaderBytes + i * kTraceRecordBytes;
    TraceRecord rec;
    rec.timestamp = get_le<std::uint64_t>(r);
    rec.tracer_id = get_le<std::uint16_t>(r + 8);
    const auto kind = r[10];
    if (kind > static_cast<std::uint8_t>(RecordKind::drain_marker))
      throw TraceFormatError("record " + std::to_string(i) + " has unknown kind " + std::to_string(kind));
    rec.kind = static_cast<RecordKind>(kind);
    rec.flags = r[11];
    rec.master_id = get_le<std::uint32_t>(r + 12);
    rec.payload = get_le<std::uint64_t>(r + 16);
    f.records.push_back(rec);
  }
  return f;
}

inline void write_trace_file(const std::string& path, const TraceHeader& h, std::span<const TraceRecord> records) {
  const auto bytes = encode_trace(h, records);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open trace file " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error("failed writing trace file " + path);
}

inline TraceFile read_trace_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TraceFormatError("cannot open trace file " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_trace(bytes);
}

enum class TracePoint : std::uint8_t {
  rab_read_req,
  rab_read_resp,
  rab_write_req,
  rab_write_resp,
  rab_config,
  bus,
  cluster_sync,
};
inline constexpr std::size_t kTracePointCount = 7;

inline const char* to_string(TracePoint p) {
  static constexpr const char* names[] = {"rab_read_req", "rab_read_resp", "rab_write_req", "rab_write_resp",
                                          "rab_config",   "bus",           "cluster_sync"};
  return names[static_cast<std::size_t>(p)];
}

inline std::optional<TracePoint> parse_trace_point(std::string_view s) {
  for (std::size_t i = 0; i < kTracePointCount; ++i)
    if (s == to_string(static_cast<TracePoint>(i))) return static_cast<TracePoint>(i);
  return std::nullopt;
}

using TracePredicate = std::function<bool(const TraceRecord&)>;

inline TracePredicate always() {
  return [](const TraceRecord&) { return true; };
}
inline TracePredicate master_is(std::uint32_t id) {
  return [id](const TraceRecord& r) { return r.master_id == id; };
}

struct TracerBlock {
  std::uint16_t id = 0;
  TracePoint point = TracePoint::rab_read_req;
  TracePredicate predicate;
  std::size_t depth = 0;
  Cycle active_from = 0;
  std::vector<TraceRecord> buffer;
};

/**
 * Condition-triggered tracers with bounded local buffers.
 *
 * When a buffer fills, the accelerator clock domain is gated, every buffer
 * is copied to the host-side store in tracer-id order and cleared, a
 * drain marker is appended, and the domain is ungated after the host-side
 * copy time. Accelerator-domain timestamps are unaffected.
 */
class TraceHub {
 public:
  TraceHub(SimEngine& engine, DomainId pmca, DomainId host, const CalibrationConfig& cal)
      : engine_(engine), pmca_(pmca), host_(host), drain_base_(cal.trace_drain_base_cycles),
        drain_per_record_(cal.trace_drain_cycles_per_record) {}

  std::uint16_t attach(TracePoint point, TracePredicate predicate, std::size_t depth) {
    if (depth == 0) throw ConfigError("tracer depth must be positive");
    if (tracers_.size() >= kHostTracerId) throw ConfigError("too many tracers");
    TracerBlock t;
    t.id = static_cast<std::uint16_t>(tracers_.size());
    t.point = point;
    t.predicate = predicate ? std::move(predicate) : always();
    t.depth = depth;
    t.active_from = started_ ? engine_.local_now(pmca_) + 1 : 0;
    t.buffer.reserve(std::min<std::size_t>(depth, 4096));
    tracers_.push_back(std::move(t));
    attached_[static_cast<std::size_t>(point)] = true;
    return tracers_.back().id;
  }

  std::uint16_t attach(std::string_view point, TracePredicate predicate, std::size_t depth) {
    auto p = parse_trace_point(point);
    if (!p) throw ConfigError("unknown trace point '" + std::string(point) + "'");
    return attach(*p, std::move(predicate), depth);
  }

  /// Mark the start of simulated execution; later attachments start one
  /// cycle after attachment.
  void start() { started_ = true; }

  bool watching(TracePoint p) const { return attached_[static_cast<std::size_t>(p)]; }

  /// Offer a signal sample to every tracer at `point`. Timestamp is the
  /// current accelerator cycle.
  void emit(TracePoint point, RecordKind kind, std::uint8_t flags, std::uint32_t master, std::uint64_t payload) {
    if (!watching(point)) return;
    TraceRecord r;
    r.timestamp = engine_.local_now(pmca_);
    r.kind = kind;
    r.flags = flags;
    r.master_id = master;
    r.payload = payload;
    bool full = false;
    for (auto& t : tracers_) {
      if (t.point != point || r.timestamp < t.active_from) continue;
      r.tracer_id = t.id;
      if (!t.predicate(r)) continue;
      t.buffer.push_back(r);
      if (t.buffer.size() >= t.depth) full = true;
    }
    if (full) drain();
  }

  /// Flush remaining buffer contents after the run ends.
  void finish() {
    for (auto& t : tracers_) {
      store_.insert(store_.end(), t.buffer.begin(), t.buffer.end());
      t.buffer.clear();
    }
  }

  const std::vector<TraceRecord>& store() const { return store_; }
  const std::vector<TracerBlock>& tracers() const { return tracers_; }
  std::uint64_t drain_count() const { return drains_; }

 private:
  void drain() {
    std::uint64_t moved = 0;
    for (auto& t : tracers_) {
      moved += t.buffer.size();
      store_.insert(store_.end(), t.buffer.begin(), t.buffer.end());
      t.buffer.clear();
    }
    TraceRecord marker;
    marker.timestamp = engine_.local_now(pmca_);
    marker.tracer_id = kHostTracerId;
    marker.kind = RecordKind::drain_marker;
    marker.master_id = 0xFFFFFFFFu;
    marker.payload = drains_++;
    store_.push_back(marker);
    if (engine_.domain(pmca_).gated) return;
    engine_.gate(pmca_);
    engine_.schedule(host_, drain_base_ + moved * drain_per_record_, [this] { engine_.ungate(pmca_); });
  }

  SimEngine& engine_;
  DomainId pmca_;
  DomainId host_;
  Cycle drain_base_;
  Cycle drain_per_record_;
  bool started_ = false;
  std::array<bool, kTracePointCount> attached_{};
  std::vector<TracerBlock> tracers_;
  std::vector<TraceRecord> store_;
  std::uint64_t drains_ = 0;
};

}  // namespace hero

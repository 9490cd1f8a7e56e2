/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "herosim/config.hpp"
#include "herosim/engine.hpp"
#include "herosim/error.hpp"
#include "herosim/memory.hpp"
#include "herosim/rab.hpp"
#include "herosim/trace.hpp"
#include "herosim/vmm.hpp"

namespace hero {

class ExecContext;

namespace op {
struct Compute {
  Cycle cycles = 0;
};
struct LoadVA {
  std::uint32_t va = 0;
};
struct StoreVA {
  std::uint32_t va = 0;
};
struct LoadSpm {
  std::uint32_t bank = 0;
};
struct StoreSpm {
  std::uint32_t bank = 0;
};
enum class Dir : std::uint8_t { get, put };
/// get: memory -> SPM, put: SPM -> memory. `virt` selects whether `addr`
/// is translated through the RAB.
struct Dma {
  Dir dir = Dir::get;
  std::uint32_t addr = 0;
  bool virt = true;
  std::uint64_t spm_offset = 0;
  std::uint64_t bytes = 0;
  std::uint32_t tag = 0;
};
/// Blocks until every transfer of this cluster with `tag` has landed.
struct WaitDma {
  std::uint32_t tag = 0;
};
enum class Scope : std::uint8_t { cluster, global };
struct Barrier {
  Scope scope = Scope::cluster;
};
/// Zero-cycle functional action (the arithmetic a real PE would do).
struct Exec {
  std::function<void(ExecContext&)> fn;
};
struct End {};
}  // namespace op

using Op = std::variant<op::Compute, op::LoadVA, op::StoreVA, op::LoadSpm, op::StoreSpm, op::Dma, op::WaitDma,
                        op::Barrier, op::Exec, op::End>;
using KernelProgram = std::vector<Op>;

/// programs[cluster][pe]; missing or empty programs idle.
struct ProgramSet {
  std::vector<std::vector<KernelProgram>> programs;

  ProgramSet() = default;
  ProgramSet(std::size_t clusters, std::size_t pes) : programs(clusters, std::vector<KernelProgram>(pes)) {}

  KernelProgram& at(std::size_t cluster, std::size_t pe) { return programs.at(cluster).at(pe); }
  std::size_t op_count() const {
    std::size_t n = 0;
    for (const auto& c : programs)
      for (const auto& p : c) n += p.size();
    return n;
  }
};

/// What an Exec op may touch.
class ExecContext {
 public:
  ExecContext(std::uint32_t cluster, std::uint32_t pe, Cycle now, SpmBanks& spm, HostMemory& mem)
      : cluster_(cluster), pe_(pe), now_(now), spm_(spm), mem_(mem) {}

  std::uint32_t cluster() const { return cluster_; }
  std::uint32_t pe() const { return pe_; }
  Cycle now() const { return now_; }
  SpmBanks& spm() { return spm_; }
  HostMemory& memory() { return mem_; }

  template <typename T>
  T spm_load(std::uint64_t offset) {
    T v;
    std::memcpy(&v, spm_.bytes(offset, sizeof v).data(), sizeof v);
    return v;
  }
  template <typename T>
  void spm_store(std::uint64_t offset, const T& v) {
    std::memcpy(spm_.bytes(offset, sizeof v).data(), &v, sizeof v);
  }
  template <typename T>
  T load(std::uint32_t va) const {
    return mem_.load<T>(VirtualAddress{va});
  }
  template <typename T>
  void store(std::uint32_t va, const T& v) {
    mem_.store<T>(VirtualAddress{va}, v);
  }

 private:
  std::uint32_t cluster_, pe_;
  Cycle now_;
  SpmBanks& spm_;
  HostMemory& mem_;
};

struct ExecutionResult {
  Cycle start = 0;
  Cycle finish = 0;
  std::vector<Cycle> cluster_finish;
  std::uint64_t dma_bytes = 0;

  Cycle kernel_cycles() const { return finish - start; }
};

/**
 * The accelerator: clusters of PEs interpreting timed op streams, one DMA
 * engine per cluster, and the system interconnect to DRAM.
 *
 * Interconnect model. Pending DMA bytes are granted once per cycle: the bus
 * shares bus_bandwidth bytes among clusters round-robin at byte
 * granularity, the NoC gives every cluster its own noc_link_bandwidth. A
 * chunk whose last byte is granted at cycle c lands at c + 1 +
 * dram_base_latency.
 */
class Pmca {
 public:
  Pmca(SimEngine& engine, DomainId domain, const PlatformConfig& p, const CalibrationConfig& c, Rab& rab, Vmm& vmm,
       HostMemory& mem, TraceHub* trace)
      : engine_(engine), domain_(domain), platform_(p), cal_(c), rab_(rab), mem_(mem), trace_(trace) {
    for (std::uint64_t i = 0; i < p.n_clusters; ++i) spms_.emplace_back(p.l1_spm_banks, p.l1_spm_kib * 1024);
    clusters_.resize(p.n_clusters);
    for (auto& cl : clusters_) cl.channels.resize(c.dma_channels);
    vmm.set_waker([this](MasterId m) { wake(m); });
  }

  Pmca(const Pmca&) = delete;
  Pmca& operator=(const Pmca&) = delete;

  SpmBanks& spm(std::size_t cluster) { return spms_.at(cluster); }
  std::size_t cluster_count() const { return spms_.size(); }

  /// Runs `set` to completion starting at the current accelerator cycle.
  ExecutionResult execute(const ProgramSet& set) {
    validate(set);
    reset_run();
    const Cycle t0 = local();
    result_ = {};
    result_.start = t0;
    result_.cluster_finish.assign(clusters_.size(), t0);

    for (std::uint32_t c = 0; c < set.programs.size(); ++c) {
      for (std::uint32_t p = 0; p < set.programs[c].size(); ++p) {
        const auto& prog = set.programs[c][p];
        if (prog.empty()) continue;
        pes_.push_back(Pe{c, p, &prog});
        ++barrier_size_[{op::Scope::cluster, c}];
        ++barrier_size_[{op::Scope::global, 0}];
      }
    }
    for (std::size_t i = 0; i < pes_.size(); ++i) engine_.schedule(domain_, 0, [this, i] { step(i); });
    engine_.run_until_idle();

    std::string blocked;
    for (const auto& pe : pes_)
      if (pe.status != Status::done) blocked += " " + MasterId::pe(pe.cluster, pe.pe).str() + "(" + name(pe.status) + ")";
    if (!blocked.empty()) throw SimulationError("deadlock: PEs never finished:" + blocked);
    if (transfers_live_ != 0) throw SimulationError("deadlock: DMA transfers never completed");

    for (const auto& pe : pes_) {
      result_.cluster_finish[pe.cluster] = std::max(result_.cluster_finish[pe.cluster], pe.finish);
      result_.finish = std::max(result_.finish, pe.finish);
    }
    for (std::size_t c = 0; c < clusters_.size(); ++c) {
      result_.cluster_finish[c] = std::max(result_.cluster_finish[c], clusters_[c].last_dma);
      result_.finish = std::max(result_.finish, result_.cluster_finish[c]);
    }
    result_.finish = std::max(result_.finish, t0);
    return result_;
  }

 private:
  enum class Status { running, sleep_miss, sleep_dropped, wait_dma, wait_barrier, done };
  static const char* name(Status s) {
    switch (s) {
      case Status::running: return "running";
      case Status::sleep_miss: return "sleeping on miss";
      case Status::sleep_dropped: return "sleeping after dropped miss";
      case Status::wait_dma: return "waiting for DMA";
      case Status::wait_barrier: return "waiting at barrier";
      case Status::done: return "done";
    }
    return "?";
  }

  struct Pe {
    std::uint32_t cluster = 0, pe = 0;
    const KernelProgram* prog = nullptr;
    std::size_t pc = 0;
    Status status = Status::running;
    bool retry = false;
    std::uint32_t wait_tag = 0;
    Cycle finish = 0;
  };

  struct Chunk {
    std::uint32_t va = 0;
    std::uint32_t pa = 0;
    std::uint64_t spm_offset = 0;
    std::uint64_t bytes = 0;
    std::uint64_t left = 0;
    bool started = false;
  };

  struct Transfer {
    std::uint32_t cluster = 0, channel = 0;
    op::Dma op;
    std::vector<Chunk> chunks;
    std::size_t next_translate = 0;
    std::size_t remaining = 0;
    Status status = Status::running;
    bool retry = false;
  };

  struct ClusterState {
    std::vector<std::unique_ptr<Transfer>> channels;
    std::deque<std::unique_ptr<Transfer>> waiting;
    std::map<std::uint32_t, std::uint64_t> outstanding;  // tag -> live transfers
    std::deque<Chunk*> link;                             // eligible chunks, FIFO
    Cycle last_dma = 0;
  };

  struct BarrierState {
    std::vector<std::size_t> arrived;
    std::uint64_t generation = 0;
  };

  using BarrierKey = std::pair<op::Scope, std::uint32_t>;

  Cycle local() const { return engine_.local_now(domain_); }

  template <typename F>
  void at(Cycle when, F&& f) {
    const Cycle now = local();
    engine_.schedule(domain_, when > now ? when - now : 0, std::forward<F>(f));
  }

  void emit(TracePoint point, RecordKind kind, std::uint8_t flags, std::uint32_t master, std::uint64_t payload) {
    if (trace_) trace_->emit(point, kind, flags, master, payload);
  }
  bool watching(TracePoint p) const { return trace_ && trace_->watching(p); }

  void validate(const ProgramSet& set) const {
    if (set.programs.size() > platform_.n_clusters)
      throw SimulationError("program set uses " + std::to_string(set.programs.size()) + " clusters, platform has " +
                            std::to_string(platform_.n_clusters));
    const std::uint64_t spm_bytes = platform_.l1_spm_kib * 1024;
    for (std::size_t c = 0; c < set.programs.size(); ++c) {
      if (set.programs[c].size() > platform_.pes_per_cluster)
        throw SimulationError("cluster " + std::to_string(c) + " program set exceeds pes_per_cluster");
      for (std::size_t p = 0; p < set.programs[c].size(); ++p) {
        const auto& prog = set.programs[c][p];
        if (prog.empty()) continue;
        const std::string where = MasterId::pe(static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(p)).str();
        if (!std::holds_alternative<op::End>(prog.back()))
          throw SimulationError("malformed program on " + where + ": missing End");
        for (const auto& o : prog) {
          if (auto* l = std::get_if<op::LoadSpm>(&o); l && l->bank >= platform_.l1_spm_banks)
            throw SimulationError("malformed program on " + where + ": SPM bank out of range");
          if (auto* s = std::get_if<op::StoreSpm>(&o); s && s->bank >= platform_.l1_spm_banks)
            throw SimulationError("malformed program on " + where + ": SPM bank out of range");
          if (auto* d = std::get_if<op::Dma>(&o); d && d->spm_offset + d->bytes > spm_bytes)
            throw SimulationError("SPM overflow on " + where + ": offset " + std::to_string(d->spm_offset) +
                                  " + " + std::to_string(d->bytes) + " bytes");
        }
      }
    }
  }

  void reset_run() {
    pes_.clear();
    barrier_size_.clear();
    barriers_.clear();
  }

  // ---- PE interpreter --------------------------------------------------

  void step(std::size_t id) {
    auto& p = pes_[id];
    const Cycle t = local();
    while (true) {
      const Op& o = (*p.prog)[p.pc];
      if (auto* c = std::get_if<op::Compute>(&o)) {
        ++p.pc;
        if (c->cycles == 0) continue;
        engine_.schedule(domain_, c->cycles, [this, id] { step(id); });
        return;
      }
      if (auto* l = std::get_if<op::LoadVA>(&o)) return access(id, l->va, false, t);
      if (auto* s = std::get_if<op::StoreVA>(&o)) return access(id, s->va, true, t);
      if (auto* l = std::get_if<op::LoadSpm>(&o)) return spm_op(id, l->bank, t);
      if (auto* s = std::get_if<op::StoreSpm>(&o)) return spm_op(id, s->bank, t);
      if (auto* d = std::get_if<op::Dma>(&o)) {
        ++p.pc;
        issue_dma(p.cluster, *d, t);
        continue;
      }
      if (auto* w = std::get_if<op::WaitDma>(&o)) {
        ++p.pc;
        auto& out = clusters_[p.cluster].outstanding;
        auto it = out.find(w->tag);
        if (it == out.end() || it->second == 0) continue;
        p.status = Status::wait_dma;
        p.wait_tag = w->tag;
        return;
      }
      if (auto* b = std::get_if<op::Barrier>(&o)) {
        ++p.pc;
        arrive(id, b->scope, t);
        return;
      }
      if (auto* e = std::get_if<op::Exec>(&o)) {
        ++p.pc;
        ExecContext ctx(p.cluster, p.pe, t, spms_[p.cluster], mem_);
        if (e->fn) e->fn(ctx);
        continue;
      }
      // End
      p.status = Status::done;
      p.finish = t;
      return;
    }
  }

  void spm_op(std::size_t id, std::uint32_t bank, Cycle t) {
    auto& p = pes_[id];
    ++p.pc;
    const Cycle done = spms_[p.cluster].access(bank, t);
    at(done, [this, id] { step(id); });
  }

  void access(std::size_t id, std::uint32_t va_raw, bool is_write, Cycle t) {
    auto& p = pes_[id];
    const MasterId master = MasterId::pe(p.cluster, p.pe);
    const VirtualAddress va{va_raw};
    const auto out = rab_.translate(va, master, is_write, t);
    const auto req_point = is_write ? TracePoint::rab_write_req : TracePoint::rab_read_req;
    const auto flags = static_cast<std::uint8_t>(static_cast<std::uint8_t>(out.kind) |
                                                 (p.retry ? record_flags::kRetry : 0));
    emit(req_point, is_write ? RecordKind::write_req : RecordKind::read_req, flags, master.value,
         request_payload(va_raw, static_cast<std::uint32_t>(out.ready - t)));
    p.retry = false;

    switch (out.kind) {
      case OutcomeKind::l1_hit:
      case OutcomeKind::l2_hit: {
        ++p.pc;
        const Cycle done = mem_.dram().access(*out.pa, 4, is_write, out.ready, p.cluster);
        at(done, [this, id, is_write, master, va_raw] {
          emit(is_write ? TracePoint::rab_write_resp : TracePoint::rab_read_resp,
               is_write ? RecordKind::write_resp : RecordKind::read_resp, 0, master.value, va_raw);
          step(id);
        });
        return;
      }
      case OutcomeKind::miss_enqueued:
        p.status = Status::sleep_miss;
        at(out.ready, [this, req_point, master, va_raw] {
          emit(req_point, RecordKind::miss_enq, 0, master.value, va_raw);
          emit(req_point, RecordKind::sleep, 0, master.value, va_raw);
        });
        return;
      case OutcomeKind::miss_dropped:
        p.status = Status::sleep_dropped;
        at(out.ready, [this, req_point, master, va_raw] {
          emit(req_point, RecordKind::sleep, 0, master.value, va_raw);
        });
        return;
      case OutcomeKind::permission_fault:
        throw PageFault(va_raw, master.value,
                        "permission fault: " + std::string(is_write ? "write" : "read") + " of va " +
                            hex32(va_raw) + " by " + master.str());
    }
  }

  static std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", v);
    return buf;
  }

  void arrive(std::size_t id, op::Scope scope, Cycle t) {
    auto& p = pes_[id];
    const BarrierKey key{scope, scope == op::Scope::cluster ? p.cluster : 0u};
    auto& b = barriers_[key];
    p.status = Status::wait_barrier;
    b.arrived.push_back(id);
    if (b.arrived.size() < barrier_size_[key]) return;
    auto released = std::move(b.arrived);
    b.arrived.clear();
    const auto gen = b.generation++;
    const std::uint64_t payload = (static_cast<std::uint64_t>(scope == op::Scope::global) << 63) |
                                  (static_cast<std::uint64_t>(key.second) << 32) | (gen & 0xFFFFFFFFu);
    at(t + 1, [this, released, payload] {
      for (auto i : released) {
        pes_[i].status = Status::running;
        emit(TracePoint::cluster_sync, RecordKind::wake, record_flags::kSync,
             MasterId::pe(pes_[i].cluster, pes_[i].pe).value, payload);
      }
      for (auto i : released) step(i);
    });
  }

  // ---- wakeups from the VMM --------------------------------------------

  void wake(MasterId m) {
    if (m.is_dma()) {
      if (m.cluster() < clusters_.size()) {
        auto& ch = clusters_[m.cluster()].channels;
        const auto idx = m.index() - MasterId::kDmaBase;
        if (idx < ch.size() && ch[idx] && ch[idx]->status == Status::sleep_miss) resume_transfer(*ch[idx]);
      }
    } else {
      for (std::size_t i = 0; i < pes_.size(); ++i) {
        auto& p = pes_[i];
        if (p.status == Status::sleep_miss && p.cluster == m.cluster() && p.pe == m.index()) resume_pe(i);
      }
    }
    // Any wake frees a queue slot: everything that was turned away retries.
    for (std::size_t i = 0; i < pes_.size(); ++i)
      if (pes_[i].status == Status::sleep_dropped) resume_pe(i);
    for (auto& cl : clusters_)
      for (auto& tr : cl.channels)
        if (tr && tr->status == Status::sleep_dropped) resume_transfer(*tr);
  }

  void resume_pe(std::size_t i) {
    pes_[i].status = Status::running;
    pes_[i].retry = true;
    engine_.schedule(domain_, 0, [this, i] { step(i); });
  }

  void resume_transfer(Transfer& tr) {
    tr.status = Status::running;
    tr.retry = true;
    Transfer* p = &tr;
    engine_.schedule(domain_, 0, [this, p] { translate_next(*p); });
  }

  // ---- DMA engine ------------------------------------------------------

  void issue_dma(std::uint32_t cluster, const op::Dma& d, Cycle t) {
    if (d.bytes == 0) return;
    spms_[cluster].bytes(d.spm_offset, d.bytes);  // bounds check
    auto tr = std::make_unique<Transfer>();
    tr->cluster = cluster;
    tr->op = d;
    if (d.virt) {
      std::uint64_t done = 0;
      while (done < d.bytes) {
        const std::uint32_t va = d.addr + static_cast<std::uint32_t>(done);
        const std::uint64_t n = std::min<std::uint64_t>(kPageSize - (va & (kPageSize - 1)), d.bytes - done);
        tr->chunks.push_back(Chunk{va, 0, d.spm_offset + done, n, n, false});
        done += n;
      }
    } else {
      tr->chunks.push_back(Chunk{d.addr, d.addr, d.spm_offset, d.bytes, d.bytes, false});
    }
    tr->remaining = tr->chunks.size();
    auto& cl = clusters_[cluster];
    ++cl.outstanding[d.tag];
    ++transfers_live_;
    for (std::uint32_t ch = 0; ch < cl.channels.size(); ++ch) {
      if (!cl.channels[ch]) {
        tr->channel = ch;
        cl.channels[ch] = std::move(tr);
        start_transfer(*cl.channels[ch], t);
        return;
      }
    }
    cl.waiting.push_back(std::move(tr));
  }

  void start_transfer(Transfer& tr, Cycle t) {
    if (tr.op.virt) {
      translate_next(tr);
      return;
    }
    (void)t;
    make_eligible(tr.cluster, &tr.chunks[0]);
  }

  // Translate the next chunk; the following one is translated once this
  // translation is ready, so chunk translations pipeline with transfers.
  void translate_next(Transfer& tr) {
    if (tr.next_translate >= tr.chunks.size()) return;
    const Cycle t = local();
    Chunk& ch = tr.chunks[tr.next_translate];
    const MasterId master = MasterId::dma(tr.cluster, tr.channel);
    const bool is_write = tr.op.dir == op::Dir::put;
    const auto out = rab_.translate(VirtualAddress{ch.va}, master, is_write, t);
    const auto req_point = is_write ? TracePoint::rab_write_req : TracePoint::rab_read_req;
    const auto flags = static_cast<std::uint8_t>(static_cast<std::uint8_t>(out.kind) | record_flags::kDma |
                                                 (tr.retry ? record_flags::kRetry : 0));
    emit(req_point, is_write ? RecordKind::write_req : RecordKind::read_req, flags, master.value,
         request_payload(ch.va, static_cast<std::uint32_t>(out.ready - t)));
    tr.retry = false;
    Transfer* p = &tr;
    switch (out.kind) {
      case OutcomeKind::l1_hit:
      case OutcomeKind::l2_hit: {
        ch.pa = out.pa->value;
        ++tr.next_translate;
        Chunk* c = &ch;
        at(out.ready, [this, p, c] {
          make_eligible(p->cluster, c);
          translate_next(*p);
        });
        return;
      }
      case OutcomeKind::miss_enqueued:
        tr.status = Status::sleep_miss;
        at(out.ready, [this, req_point, master, va = ch.va] {
          emit(req_point, RecordKind::miss_enq, record_flags::kDma, master.value, va);
          emit(req_point, RecordKind::sleep, record_flags::kDma, master.value, va);
        });
        return;
      case OutcomeKind::miss_dropped:
        tr.status = Status::sleep_dropped;
        at(out.ready, [this, req_point, master, va = ch.va] {
          emit(req_point, RecordKind::sleep, record_flags::kDma, master.value, va);
        });
        return;
      case OutcomeKind::permission_fault:
        throw PageFault(ch.va, master.value,
                        "permission fault: DMA " + std::string(is_write ? "write" : "read") + " of va " +
                            hex32(ch.va) + " by " + master.str());
    }
  }

  void make_eligible(std::uint32_t cluster, Chunk* c) {
    clusters_[cluster].link.push_back(c);
    kick();
  }

  void kick() {
    if (tick_scheduled_) return;
    tick_scheduled_ = true;
    const Cycle now = local();
    const Cycle when = (has_ticked_ && last_tick_ >= now) ? last_tick_ + 1 : now;
    at(when, [this] { tick(); });
  }

  void tick() {
    tick_scheduled_ = false;
    const Cycle c = local();
    has_ticked_ = true;
    last_tick_ = c;

    const std::size_t n = clusters_.size();
    std::vector<std::uint64_t> demand(n, 0), grant(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto* ch : clusters_[i].link) demand[i] += ch->left;

    if (platform_.interconnect == Interconnect::noc) {
      for (std::size_t i = 0; i < n; ++i) grant[i] = std::min(demand[i], cal_.noc_link_bandwidth);
    } else {
      share_bus(demand, grant);
    }

    bool pending = false;
    for (std::size_t i = 0; i < n; ++i) {
      auto& cl = clusters_[i];
      std::uint64_t g = grant[i];
      while (g > 0 && !cl.link.empty()) {
        Chunk* ch = cl.link.front();
        if (!ch->started) {
          ch->started = true;
          on_chunk_start(i, *ch);
        }
        const auto take = std::min(g, ch->left);
        ch->left -= take;
        g -= take;
        result_.dma_bytes += take;
        if (ch->left == 0) {
          cl.link.pop_front();
          const Cycle land = c + 1 + cal_.dram_base_latency;
          at(land, [this, i, ch] { on_chunk_done(static_cast<std::uint32_t>(i), ch); });
        }
      }
      if (!cl.link.empty()) pending = true;
    }
    if (pending) {
      tick_scheduled_ = true;
      engine_.schedule(domain_, 1, [this] { tick(); });
    }
  }

  // Byte-granular round robin: each active cluster gets an equal share,
  // leftovers go one byte at a time starting from the rotating pointer.
  void share_bus(const std::vector<std::uint64_t>& demand, std::vector<std::uint64_t>& grant) {
    const std::size_t n = demand.size();
    std::uint64_t budget = cal_.bus_bandwidth;
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = (rr_ + k) % n;
      if (demand[i] > 0) active.push_back(i);
    }
    while (budget > 0 && !active.empty()) {
      const std::uint64_t share = budget / active.size();
      if (share == 0) {
        std::size_t last = active.front();
        for (std::size_t k = 0; k < budget; ++k) {
          grant[active[k]] += 1;
          last = active[k];
        }
        rr_ = (last + 1) % n;
        return;
      }
      std::vector<std::size_t> still;
      for (auto i : active) {
        const auto g = std::min(share, demand[i] - grant[i]);
        grant[i] += g;
        budget -= g;
        if (grant[i] < demand[i]) still.push_back(i);
      }
      active = std::move(still);
    }
  }

  void on_chunk_start(std::size_t cluster, const Chunk& ch) {
    if (!watching(TracePoint::bus)) return;
    const auto* tr = owner(cluster, &ch);
    const bool put = tr->op.dir == op::Dir::put;
    emit(TracePoint::bus, put ? RecordKind::write_req : RecordKind::read_req, record_flags::kDma,
         MasterId::dma(tr->cluster, tr->channel).value, request_payload(ch.pa, static_cast<std::uint32_t>(ch.bytes)));
  }

  Transfer* owner(std::size_t cluster, const Chunk* ch) {
    for (auto& tr : clusters_[cluster].channels)
      if (tr && !tr->chunks.empty() && ch >= tr->chunks.data() && ch < tr->chunks.data() + tr->chunks.size())
        return tr.get();
    throw SimulationError("internal: DMA chunk without an owning transfer");
  }

  void on_chunk_done(std::uint32_t cluster, Chunk* ch) {
    Transfer* tr = owner(cluster, ch);
    const bool put = tr->op.dir == op::Dir::put;
    auto spm = spms_[cluster].bytes(ch->spm_offset, ch->bytes);
    if (put) mem_.dram().write(ch->pa, spm);
    else mem_.dram().read(ch->pa, spm);

    const auto master = MasterId::dma(tr->cluster, tr->channel).value;
    emit(TracePoint::bus, put ? RecordKind::write_resp : RecordKind::read_resp, record_flags::kDma, master, ch->pa);
    if (tr->op.virt)
      emit(put ? TracePoint::rab_write_resp : TracePoint::rab_read_resp,
           put ? RecordKind::write_resp : RecordKind::read_resp, record_flags::kDma, master, ch->va);

    auto& cl = clusters_[cluster];
    cl.last_dma = std::max(cl.last_dma, local());
    if (--tr->remaining > 0) return;

    const auto tag = tr->op.tag;
    const auto channel = tr->channel;
    cl.channels[channel].reset();
    --transfers_live_;
    if (--cl.outstanding[tag] == 0) {
      for (std::size_t i = 0; i < pes_.size(); ++i) {
        auto& p = pes_[i];
        if (p.status == Status::wait_dma && p.cluster == cluster && p.wait_tag == tag) {
          p.status = Status::running;
          engine_.schedule(domain_, 0, [this, i] { step(i); });
        }
      }
    }
    if (!cl.waiting.empty()) {
      auto next = std::move(cl.waiting.front());
      cl.waiting.pop_front();
      next->channel = channel;
      cl.channels[channel] = std::move(next);
      start_transfer(*cl.channels[channel], local());
    }
  }

  SimEngine& engine_;
  DomainId domain_;
  PlatformConfig platform_;
  CalibrationConfig cal_;
  Rab& rab_;
  HostMemory& mem_;
  TraceHub* trace_;
  std::vector<SpmBanks> spms_;
  std::deque<ClusterState> clusters_;
  std::vector<Pe> pes_;
  std::map<BarrierKey, std::size_t> barrier_size_;
  std::map<BarrierKey, BarrierState> barriers_;
  std::uint64_t transfers_live_ = 0;
  bool tick_scheduled_ = false;
  bool has_ticked_ = false;
  Cycle last_tick_ = 0;
  std::size_t rr_ = 0;
  ExecutionResult result_;
};

}  // namespace hero

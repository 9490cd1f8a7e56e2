/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "herosim/cluster.hpp"
#include "herosim/config.hpp"
#include "herosim/error.hpp"
#include "herosim/memory.hpp"
#include "herosim/offload.hpp"

namespace hero::bench {

namespace detail {

inline std::uint64_t used_clusters(std::uint64_t requested, const PlatformConfig& p) {
  return requested == 0 ? p.n_clusters : std::min<std::uint64_t>(requested, p.n_clusters);
}

inline std::vector<std::uint8_t> read_arg(const HostMemory& mem, const DataArg& a) {
  std::vector<std::uint8_t> out(a.bytes);
  mem.read(VirtualAddress{a.host_va}, out);
  return out;
}

template <typename T>
void write_vec(HostMemory& mem, std::uint32_t va, const std::vector<T>& v) {
  mem.write(VirtualAddress{va}, {reinterpret_cast<const std::uint8_t*>(v.data()), v.size() * sizeof(T)});
}

inline op::Dma dma(op::Dir dir, std::uint32_t addr, std::uint64_t spm, std::uint64_t bytes, std::uint32_t tag) {
  return op::Dma{dir, addr, true, spm, bytes, tag};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrix multiplication

struct MatmulSpec {
  std::uint32_t n = 32;
  // C is computed in tile x tile blocks; a block needs `tile` rows of A and
  // `tile` columns of B.
  std::uint32_t tile = 8;
  std::uint64_t cycles_per_mac = 2;
  std::uint64_t clusters = 0;  // 0: all
  std::uint64_t seed = 7;
};

/// A row-major, B column-major, entries in [0, 16).
struct MatmulData {
  std::vector<std::uint32_t> a, b_colmajor;
};

inline MatmulData matmul_inputs(const MatmulSpec& s) {
  std::mt19937_64 rng(s.seed);
  std::uniform_int_distribution<std::uint32_t> d(0, 15);
  MatmulData m;
  m.a.resize(std::size_t{s.n} * s.n);
  m.b_colmajor.resize(std::size_t{s.n} * s.n);
  for (auto& x : m.a) x = d(rng);
  for (auto& x : m.b_colmajor) x = d(rng);
  return m;
}

/**
 * Tiles of C are dealt to clusters in contiguous runs. Within a cluster PE 0
 * drives the DMA engine with double buffering: the rows of A and columns of
 * B for tile i+1 stream in while all PEs compute tile i. C rows go back
 * with one small put per row.
 */
inline Workload matmul(const MatmulSpec& s) {
  if (s.n == 0 || s.tile == 0 || s.n % s.tile != 0)
    throw ConfigError("matmul: n must be a positive multiple of tile");
  Workload w;
  w.name = "matmul";
  w.setup = [s](HostMemory& mem) {
    const auto data = matmul_inputs(s);
    const std::uint64_t bytes = std::uint64_t{s.n} * s.n * 4;
    OffloadDescriptor d{"matmul", {}};
    const auto a = mem.allocate(bytes).value, b = mem.allocate(bytes).value, c = mem.allocate(bytes).value;
    detail::write_vec(mem, a, data.a);
    detail::write_vec(mem, b, data.b_colmajor);
    d.args.push_back({"A", a, bytes, Direction::to});
    d.args.push_back({"B", b, bytes, Direction::to});
    d.args.push_back({"C", c, bytes, Direction::from});
    return d;
  };
  w.build = [s](HostMemory&, const PlatformConfig& p, const ArgMap& map) {
    const std::uint32_t n = s.n, T = s.tile;
    const auto k = detail::used_clusters(s.clusters, p);
    const auto P = static_cast<std::uint32_t>(p.pes_per_cluster);
    const std::uint64_t panel = std::uint64_t{T} * n * 4, ctile = std::uint64_t{T} * T * 4;
    const std::uint64_t a_buf[2] = {0, panel}, b_buf[2] = {2 * panel, 3 * panel};
    const std::uint64_t c_buf[2] = {4 * panel, 4 * panel + ctile};
    if (4 * panel + 2 * ctile > p.l1_spm_kib * 1024) throw SimulationError("matmul: tile too large for SPM");

    const std::uint32_t per_row = n / T;
    const std::uint64_t tiles = std::uint64_t{per_row} * per_row;
    const std::uint32_t A = map.device[0], B = map.device[1], C = map.device[2];

    ProgramSet set(k, P);
    for (std::uint64_t c = 0; c < k; ++c) {
      const std::uint64_t first = c * tiles / k, last = (c + 1) * tiles / k;
      if (first == last) continue;
      auto get_tile = [&](KernelProgram& prog, std::uint64_t t, int b) {
        const std::uint32_t ti = static_cast<std::uint32_t>(t / per_row), tj = static_cast<std::uint32_t>(t % per_row);
        prog.push_back(detail::dma(op::Dir::get, A + ti * T * n * 4, a_buf[b], panel, static_cast<std::uint32_t>(b)));
        prog.push_back(detail::dma(op::Dir::get, B + tj * T * n * 4, b_buf[b], panel, static_cast<std::uint32_t>(b)));
      };
      auto& lead = set.at(c, 0);
      get_tile(lead, first, 0);
      for (std::uint64_t t = first; t < last; ++t) {
        const auto i = t - first;
        const int b = static_cast<int>(i % 2);
        if (t + 1 < last) get_tile(lead, t + 1, 1 - b);
        lead.push_back(op::WaitDma{static_cast<std::uint32_t>(b)});
        if (i >= 2) lead.push_back(op::WaitDma{2u + b});
        for (std::uint32_t pe = 0; pe < P; ++pe) set.at(c, pe).push_back(op::Barrier{op::Scope::cluster});
        for (std::uint32_t pe = 0; pe < P; ++pe) {
          std::vector<std::uint32_t> elems;
          for (std::uint32_t e = pe; e < T * T; e += P) elems.push_back(e);
          auto& prog = set.at(c, pe);
          if (!elems.empty()) {
            prog.push_back(op::Compute{elems.size() * n * s.cycles_per_mac});
            prog.push_back(op::Exec{[elems, n, T, ab = a_buf[b], bb = b_buf[b], cb = c_buf[b]](ExecContext& ctx) {
              auto spm = ctx.spm().bytes(0, cb + std::uint64_t{T} * T * 4);
              for (auto e : elems) {
                const std::uint32_t r = e / T, col = e % T;
                std::uint32_t acc = 0;
                for (std::uint32_t x = 0; x < n; ++x) {
                  std::uint32_t av, bv;
                  std::memcpy(&av, spm.data() + ab + (std::uint64_t{r} * n + x) * 4, 4);
                  std::memcpy(&bv, spm.data() + bb + (std::uint64_t{col} * n + x) * 4, 4);
                  acc += av * bv;
                }
                std::memcpy(spm.data() + cb + e * 4, &acc, 4);
              }
            }});
          }
          prog.push_back(op::Barrier{op::Scope::cluster});
        }
        const std::uint32_t ti = static_cast<std::uint32_t>(t / per_row), tj = static_cast<std::uint32_t>(t % per_row);
        for (std::uint32_t r = 0; r < T; ++r)
          lead.push_back(detail::dma(op::Dir::put, C + ((ti * T + r) * n + tj * T) * 4, c_buf[b] + r * T * 4, T * 4,
                                     2u + b));
      }
      lead.push_back(op::WaitDma{2});
      lead.push_back(op::WaitDma{3});
      for (std::uint32_t pe = 0; pe < P; ++pe) set.at(c, pe).push_back(op::End{});
    }
    return set;
  };
  w.output = [](const HostMemory& mem, const OffloadDescriptor& d) { return detail::read_arg(mem, d.args[2]); };
  return w;
}

// ---------------------------------------------------------------------------
// Memory copy

struct MemcopySpec {
  std::uint64_t bytes = 1 << 20;
  std::uint64_t block = 8192;
  std::uint64_t clusters = 0;
  std::uint64_t seed = 11;
};

/// Each cluster moves its share of the array through its SPM and back out
/// with two buffers in flight.
inline Workload memcopy(const MemcopySpec& s) {
  if (s.block == 0) throw ConfigError("memcopy: block must be positive");
  Workload w;
  w.name = "memcopy";
  w.setup = [s](HostMemory& mem) {
    OffloadDescriptor d{"memcopy", {}};
    const auto src = s.bytes ? mem.allocate(s.bytes).value : layout::kHeapVirtBase;
    const auto dst = s.bytes ? mem.allocate(s.bytes).value : layout::kHeapVirtBase;
    std::vector<std::uint8_t> data(s.bytes);
    std::mt19937_64 rng(s.seed);
    for (auto& x : data) x = static_cast<std::uint8_t>(rng());
    if (s.bytes) mem.write(VirtualAddress{src}, data);
    d.args.push_back({"src", src, s.bytes, Direction::to});
    d.args.push_back({"dst", dst, s.bytes, Direction::from});
    return d;
  };
  w.build = [s](HostMemory&, const PlatformConfig& p, const ArgMap& map) {
    const auto k = detail::used_clusters(s.clusters, p);
    if (2 * s.block > p.l1_spm_kib * 1024) throw SimulationError("memcopy: block too large for SPM");
    ProgramSet set(k, p.pes_per_cluster);
    const std::uint64_t blocks = (s.bytes + s.block - 1) / s.block;
    for (std::uint64_t c = 0; c < k; ++c) {
      const std::uint64_t first = c * blocks / k, last = (c + 1) * blocks / k;
      if (first == last) continue;
      auto& prog = set.at(c, 0);
      for (std::uint64_t blk = first; blk < last; ++blk) {
        const auto i = blk - first;
        const std::uint32_t b = static_cast<std::uint32_t>(i % 2);
        const std::uint64_t off = blk * s.block, len = std::min(s.block, s.bytes - off);
        if (i >= 2) prog.push_back(op::WaitDma{2 + b});
        prog.push_back(detail::dma(op::Dir::get, map.device[0] + static_cast<std::uint32_t>(off), b * s.block, len, b));
        prog.push_back(op::WaitDma{b});
        prog.push_back(detail::dma(op::Dir::put, map.device[1] + static_cast<std::uint32_t>(off), b * s.block, len, 2 + b));
      }
      prog.push_back(op::WaitDma{2});
      prog.push_back(op::WaitDma{3});
      prog.push_back(op::End{});
    }
    return set;
  };
  w.output = [](const HostMemory& mem, const OffloadDescriptor& d) { return detail::read_arg(mem, d.args[1]); };
  return w;
}

// ---------------------------------------------------------------------------
// PageRank over a linked graph

struct PagerankSpec {
  std::uint64_t nodes = 2048;
  std::uint64_t edges = 4;  // in-edges per node
  std::uint64_t node_bytes = 64;
  std::uint64_t iterations = 6;
  std::uint64_t cycles_per_edge = 2;
  std::uint64_t clusters = 0;
  std::uint64_t seed = 13;
};

inline constexpr std::uint32_t kRankOne = 1u << 24;

/// in[v] lists the sources of v's in-edges; in[v][0] = v - 1 (a ring keeps
/// the graph connected). `slot[v]` is v's position in the node array.
struct PagerankGraph {
  std::vector<std::vector<std::uint32_t>> in;
  std::vector<std::uint32_t> out_degree;
  std::vector<std::uint32_t> slot;
};

inline PagerankGraph pagerank_graph(const PagerankSpec& s) {
  PagerankGraph g;
  const auto n = static_cast<std::uint32_t>(s.nodes);
  g.in.resize(n);
  g.out_degree.assign(n, 0);
  std::mt19937_64 rng(s.seed);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (n < 2) break;
    g.in[v].push_back((v + n - 1) % n);
    for (std::uint64_t e = 1; e < s.edges; ++e) {
      std::uint32_t u = static_cast<std::uint32_t>(rng() % (n - 1));
      if (u >= v) ++u;
      g.in[v].push_back(u);
    }
  }
  for (const auto& srcs : g.in)
    for (auto u : srcs) ++g.out_degree[u];
  g.slot.resize(n);
  std::iota(g.slot.begin(), g.slot.end(), 0u);
  std::shuffle(g.slot.begin(), g.slot.end(), rng);
  return g;
}

/**
 * Node record: rank[2] (double-buffered across iterations), out-degree,
 * in-edge count, then in-edge pointers. Iteration `it` reads rank[it % 2]
 * of every in-neighbour and writes rank[(it + 1) % 2]. Ranks are 8.24
 * fixed point with damping 0.85.
 */
inline Workload pagerank(const PagerankSpec& s) {
  if (s.node_bytes < 16 + 4 * s.edges) throw ConfigError("pagerank: node_bytes too small for the edge list");
  Workload w;
  w.name = "pagerank";
  w.setup = [s](HostMemory& mem) {
    const auto g = pagerank_graph(s);
    const std::uint64_t bytes = s.nodes * s.node_bytes;
    OffloadDescriptor d{"pagerank", {}};
    const auto base = bytes ? mem.allocate(bytes).value : layout::kHeapVirtBase;
    const auto out = s.nodes ? mem.allocate(s.nodes * 4).value : layout::kHeapVirtBase;
    std::vector<std::uint32_t> rec(s.node_bytes / 4);
    for (std::uint32_t v = 0; v < s.nodes; ++v) {
      std::fill(rec.begin(), rec.end(), 0u);
      rec[0] = kRankOne / static_cast<std::uint32_t>(s.nodes);
      rec[2] = g.out_degree[v];
      rec[3] = static_cast<std::uint32_t>(g.in[v].size());
      for (std::size_t j = 0; j < g.in[v].size(); ++j)
        rec[4 + j] = base + g.slot[g.in[v][j]] * static_cast<std::uint32_t>(s.node_bytes);
      detail::write_vec(mem, base + g.slot[v] * static_cast<std::uint32_t>(s.node_bytes), rec);
    }
    d.args.push_back({"nodes", base, bytes, Direction::tofrom, s.nodes, s.node_bytes});
    d.args.push_back({"ranks", out, s.nodes * 4, Direction::from});
    return d;
  };
  w.relocate = [s](HostMemory& mem, const OffloadDescriptor& d, const ArgMap& map) {
    for (std::uint64_t i = 0; i < s.nodes; ++i) {
      const std::uint32_t rec = map.device[0] + static_cast<std::uint32_t>(i * s.node_bytes);
      const auto count = mem.load<std::uint32_t>(VirtualAddress{rec + 12});
      for (std::uint32_t j = 0; j < count; ++j) {
        const VirtualAddress p{rec + 16 + 4 * j};
        mem.store<std::uint32_t>(p, map.relocate(0, mem.load<std::uint32_t>(p)));
      }
    }
    (void)d;
  };
  w.build = [s](HostMemory& mem, const PlatformConfig& p, const ArgMap& map) {
    const auto k = detail::used_clusters(s.clusters, p);
    const auto P = p.pes_per_cluster;
    const auto g = pagerank_graph(s);
    const std::uint32_t base = map.device[0], out = map.device[1];
    const auto nb = static_cast<std::uint32_t>(s.node_bytes);
    const std::uint32_t teleport = static_cast<std::uint32_t>((std::uint64_t{kRankOne} * 15 / 100) / std::max<std::uint64_t>(s.nodes, 1));
    ProgramSet set(k, P);
    auto node_addr = [&](std::uint64_t v) { return base + g.slot[v] * nb; };
    for (std::uint64_t it = 0; it < s.iterations; ++it) {
      const std::uint32_t rd = static_cast<std::uint32_t>(4 * (it % 2)), wr = static_cast<std::uint32_t>(4 * ((it + 1) % 2));
      for (std::uint64_t v = 0; v < s.nodes; ++v) {
        const auto gpe = v % (k * P);
        auto& prog = set.at(gpe / P, gpe % P);
        const std::uint32_t a = node_addr(v);
        prog.push_back(op::LoadVA{a + 12});
        std::vector<std::uint32_t> srcs;
        for (std::uint32_t j = 0; j < g.in[v].size(); ++j) {
          const std::uint32_t u = mem.load<std::uint32_t>(VirtualAddress{a + 16 + 4 * j});
          srcs.push_back(u);
          prog.push_back(op::LoadVA{a + 16 + 4 * j});
          prog.push_back(op::LoadVA{u + rd});
          prog.push_back(op::LoadVA{u + 8});
        }
        prog.push_back(op::Compute{srcs.size() * s.cycles_per_edge});
        prog.push_back(op::Exec{[srcs, a, rd, wr, teleport](ExecContext& ctx) {
          std::uint64_t sum = 0;
          for (auto u : srcs) sum += ctx.load<std::uint32_t>(u + rd) / ctx.load<std::uint32_t>(u + 8);
          ctx.store<std::uint32_t>(a + wr, teleport + static_cast<std::uint32_t>(sum * 85 / 100));
        }});
        prog.push_back(op::StoreVA{a + wr});
      }
      for (std::uint64_t c = 0; c < k; ++c)
        for (std::uint64_t pe = 0; pe < P; ++pe) set.at(c, pe).push_back(op::Barrier{op::Scope::global});
    }
    const std::uint32_t fin = static_cast<std::uint32_t>(4 * (s.iterations % 2));
    for (std::uint64_t v = 0; v < s.nodes; ++v) {
      const auto gpe = v % (k * P);
      auto& prog = set.at(gpe / P, gpe % P);
      const std::uint32_t a = node_addr(v), o = out + static_cast<std::uint32_t>(4 * v);
      prog.push_back(op::LoadVA{a + fin});
      prog.push_back(op::Exec{[a, o, fin](ExecContext& ctx) { ctx.store<std::uint32_t>(o, ctx.load<std::uint32_t>(a + fin)); }});
      prog.push_back(op::StoreVA{o});
    }
    for (std::uint64_t c = 0; c < k; ++c)
      for (std::uint64_t pe = 0; pe < P; ++pe)
        if (!set.at(c, pe).empty()) set.at(c, pe).push_back(op::End{});
    return set;
  };
  w.output = [](const HostMemory& mem, const OffloadDescriptor& d) { return detail::read_arg(mem, d.args[1]); };
  return w;
}

// ---------------------------------------------------------------------------
// Random-forest classification

struct ForestSpec {
  std::uint64_t trees = 4;
  std::uint64_t depth = 16;  // levels, leaves included
  std::uint64_t node_bytes = 16;
  std::uint64_t inputs = 4;
  std::uint64_t features = 16;
  std::uint64_t classes = 4;
  std::uint64_t cycles_per_node = 4;
  std::uint64_t clusters = 0;
  std::uint64_t seed = 17;
};

/// Trees in implicit heap order (children of i at 2i+1, 2i+2). Node words:
/// feature, threshold, leaf class.
struct ForestData {
  std::uint64_t nodes_per_tree = 0;
  std::vector<std::uint32_t> feature, threshold, leaf;  // [tree * nodes_per_tree + i]
  std::vector<std::uint32_t> inputs;                    // [input * features + f]
};

inline ForestData forest_data(const ForestSpec& s) {
  ForestData f;
  f.nodes_per_tree = s.depth == 0 ? 0 : (std::uint64_t{1} << s.depth) - 1;
  const auto total = f.nodes_per_tree * s.trees;
  std::mt19937_64 rng(s.seed);
  f.feature.resize(total);
  f.threshold.resize(total);
  f.leaf.resize(total);
  for (std::uint64_t i = 0; i < total; ++i) {
    f.feature[i] = static_cast<std::uint32_t>(rng() % std::max<std::uint64_t>(s.features, 1));
    f.threshold[i] = static_cast<std::uint32_t>(rng() % 1000);
    f.leaf[i] = static_cast<std::uint32_t>(rng() % std::max<std::uint64_t>(s.classes, 1));
  }
  f.inputs.resize(s.inputs * s.features);
  for (auto& x : f.inputs) x = static_cast<std::uint32_t>(rng() % 1000);
  return f;
}

/**
 * One work unit per (input, tree): walk root to leaf, touching one node
 * per level. After a global barrier PE 0 of cluster 0 takes the majority
 * vote. Output words: per input, `trees` leaf classes then the vote.
 */
inline Workload forest(const ForestSpec& s) {
  if (s.node_bytes < 12) throw ConfigError("forest: node_bytes must be at least 12");
  if (s.depth == 0 || s.depth > 24) throw ConfigError("forest: depth must be in [1, 24]");
  if (s.features == 0 || s.classes == 0) throw ConfigError("forest: features and classes must be positive");
  Workload w;
  w.name = "forest";
  w.setup = [s](HostMemory& mem) {
    const auto f = forest_data(s);
    OffloadDescriptor d{"forest", {}};
    const std::uint64_t tree_bytes = f.nodes_per_tree * s.trees * s.node_bytes;
    const auto trees = mem.allocate(tree_bytes).value;
    std::vector<std::uint32_t> rec(s.node_bytes / 4, 0);
    std::vector<std::uint32_t> all;
    all.reserve(f.feature.size() * rec.size());
    for (std::size_t i = 0; i < f.feature.size(); ++i) {
      rec[0] = f.feature[i];
      rec[1] = f.threshold[i];
      rec[2] = f.leaf[i];
      all.insert(all.end(), rec.begin(), rec.end());
    }
    detail::write_vec(mem, trees, all);
    const std::uint64_t in_bytes = f.inputs.size() * 4, out_bytes = s.inputs * (s.trees + 1) * 4;
    const auto in = in_bytes ? mem.allocate(in_bytes).value : layout::kHeapVirtBase;
    const auto out = out_bytes ? mem.allocate(out_bytes).value : layout::kHeapVirtBase;
    if (in_bytes) detail::write_vec(mem, in, f.inputs);
    d.args.push_back({"trees", trees, tree_bytes, Direction::to});
    d.args.push_back({"inputs", in, in_bytes, Direction::to});
    d.args.push_back({"votes", out, out_bytes, Direction::from});
    return d;
  };
  w.build = [s](HostMemory& mem, const PlatformConfig& p, const ArgMap& map) {
    const auto k = detail::used_clusters(s.clusters, p);
    const auto P = p.pes_per_cluster;
    const std::uint32_t trees = map.device[0], in = map.device[1], out = map.device[2];
    const auto nb = static_cast<std::uint32_t>(s.node_bytes);
    const std::uint64_t npt = (std::uint64_t{1} << s.depth) - 1;
    const auto T = static_cast<std::uint32_t>(s.trees), F = static_cast<std::uint32_t>(s.features);
    const auto depth = static_cast<std::uint32_t>(s.depth);
    ProgramSet set(k, P);
    std::uint64_t unit = 0;
    for (std::uint32_t i = 0; i < s.inputs; ++i) {
      for (std::uint32_t t = 0; t < s.trees; ++t, ++unit) {
        const auto gpe = unit % (k * P);
        auto& prog = set.at(gpe / P, gpe % P);
        const std::uint32_t root = trees + static_cast<std::uint32_t>(t * npt) * nb;
        std::uint64_t idx = 0;
        for (std::uint32_t level = 0; level + 1 < depth; ++level) {
          const std::uint32_t node = root + static_cast<std::uint32_t>(idx) * nb;
          const auto feat = mem.load<std::uint32_t>(VirtualAddress{node});
          const auto thr = mem.load<std::uint32_t>(VirtualAddress{node + 4});
          const std::uint32_t x_addr = in + (i * F + feat) * 4;
          prog.push_back(op::LoadVA{node});
          prog.push_back(op::LoadVA{x_addr});
          prog.push_back(op::Compute{s.cycles_per_node});
          idx = mem.load<std::uint32_t>(VirtualAddress{x_addr}) <= thr ? 2 * idx + 1 : 2 * idx + 2;
        }
        const std::uint32_t leaf = root + static_cast<std::uint32_t>(idx) * nb;
        const std::uint32_t slot = out + (i * (T + 1) + t) * 4;
        prog.push_back(op::LoadVA{leaf + 8});
        prog.push_back(op::Exec{[root, nb, depth, in, i, F, slot](ExecContext& ctx) {
          std::uint32_t j = 0;
          for (std::uint32_t level = 0; level + 1 < depth; ++level) {
            const std::uint32_t node = root + j * nb;
            const auto x = ctx.load<std::uint32_t>(in + (i * F + ctx.load<std::uint32_t>(node)) * 4);
            j = x <= ctx.load<std::uint32_t>(node + 4) ? 2 * j + 1 : 2 * j + 2;
          }
          ctx.store<std::uint32_t>(slot, ctx.load<std::uint32_t>(root + j * nb + 8));
        }});
        prog.push_back(op::StoreVA{slot});
      }
    }
    for (std::uint64_t c = 0; c < k; ++c)
      for (std::uint64_t pe = 0; pe < P; ++pe) set.at(c, pe).push_back(op::Barrier{op::Scope::global});
    auto& lead = set.at(0, 0);
    const auto classes = static_cast<std::uint32_t>(s.classes);
    for (std::uint32_t i = 0; i < s.inputs; ++i) {
      const std::uint32_t row = out + i * (T + 1) * 4;
      for (std::uint32_t t = 0; t < T; ++t) lead.push_back(op::LoadVA{row + t * 4});
      lead.push_back(op::Compute{T});
      lead.push_back(op::Exec{[row, T, classes](ExecContext& ctx) {
        std::vector<std::uint32_t> votes(classes, 0);
        for (std::uint32_t t = 0; t < T; ++t) ++votes[ctx.load<std::uint32_t>(row + t * 4) % classes];
        const auto best = std::max_element(votes.begin(), votes.end()) - votes.begin();
        ctx.store<std::uint32_t>(row + T * 4, static_cast<std::uint32_t>(best));
      }});
      lead.push_back(op::StoreVA{row + T * 4});
    }
    for (std::uint64_t c = 0; c < k; ++c)
      for (std::uint64_t pe = 0; pe < P; ++pe) set.at(c, pe).push_back(op::End{});
    return set;
  };
  w.output = [](const HostMemory& mem, const OffloadDescriptor& d) { return detail::read_arg(mem, d.args[2]); };
  return w;
}

// ---------------------------------------------------------------------------
// Single miss: one PE touches one fresh page, then reads it again at
// `offset`. An offset past the page reads unmapped memory.

inline Workload single_miss(std::uint32_t offset = 128) {
  Workload w;
  w.name = "single_miss";
  w.setup = [](HostMemory& mem) {
    OffloadDescriptor d{"single_miss", {}};
    const auto a = mem.allocate(kPageSize).value;
    mem.store<std::uint32_t>(VirtualAddress{a}, 0x5eed);
    d.args.push_back({"data", a, kPageSize, Direction::tofrom});
    return d;
  };
  w.build = [offset](HostMemory&, const PlatformConfig& p, const ArgMap& map) {
    ProgramSet set(1, p.pes_per_cluster);
    set.at(0, 0) = {op::LoadVA{map.device[0] + 64}, op::Compute{4}, op::LoadVA{map.device[0] + offset}, op::End{}};
    return set;
  };
  w.output = [](const HostMemory& mem, const OffloadDescriptor& d) { return detail::read_arg(mem, d.args[0]); };
  return w;
}

inline const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = {"matmul", "memcopy", "pagerank", "forest", "single_miss"};
  return names;
}

}  // namespace hero::bench

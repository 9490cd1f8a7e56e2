/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "herosim/benchmarks.hpp"
#include "herosim/config.hpp"
#include "herosim/error.hpp"
#include "herosim/offload.hpp"
#include "herosim/soc.hpp"
#include "herosim/trace.hpp"

namespace hero {

using BenchParams = std::map<std::string, std::string>;

namespace detail {

class ParamReader {
 public:
  explicit ParamReader(const BenchParams& p) : params_(p) {}

  void get(const char* key, std::uint64_t& field) {
    used_.push_back(key);
    auto it = params_.find(key);
    if (it == params_.end()) return;
    auto v = parse_u64(it->second);
    if (!v) throw ConfigError("benchmark parameter " + std::string(key) + ": not an unsigned integer");
    field = *v;
  }
  void get(const char* key, std::uint32_t& field) {
    std::uint64_t v = field;
    get(key, v);
    if (v > 0xFFFFFFFFu) throw ConfigError("benchmark parameter " + std::string(key) + ": out of range");
    field = static_cast<std::uint32_t>(v);
  }
  void finish(const std::string& bench) const {
    for (const auto& [k, v] : params_)
      if (std::find(used_.begin(), used_.end(), k) == used_.end())
        throw ConfigError("unknown parameter '" + k + "' for benchmark " + bench);
  }

 private:
  const BenchParams& params_;
  std::vector<std::string> used_;
};

}  // namespace detail

/// Benchmark by name. `clusters` (0: all) limits how many clusters the
/// kernel spreads over.
inline Workload make_benchmark(const std::string& name, const BenchParams& params = {}, std::uint64_t clusters = 0) {
  detail::ParamReader r(params);
  Workload w;
  if (name == "matmul") {
    bench::MatmulSpec s;
    s.clusters = clusters;
    r.get("n", s.n);
    r.get("tile", s.tile);
    r.get("cycles_per_mac", s.cycles_per_mac);
    r.get("seed", s.seed);
    w = bench::matmul(s);
  } else if (name == "memcopy") {
    bench::MemcopySpec s;
    s.clusters = clusters;
    r.get("bytes", s.bytes);
    r.get("block", s.block);
    r.get("seed", s.seed);
    w = bench::memcopy(s);
  } else if (name == "pagerank") {
    bench::PagerankSpec s;
    s.clusters = clusters;
    r.get("nodes", s.nodes);
    r.get("edges", s.edges);
    r.get("node_bytes", s.node_bytes);
    r.get("iterations", s.iterations);
    r.get("cycles_per_edge", s.cycles_per_edge);
    r.get("seed", s.seed);
    w = bench::pagerank(s);
  } else if (name == "forest") {
    bench::ForestSpec s;
    s.clusters = clusters;
    r.get("trees", s.trees);
    r.get("depth", s.depth);
    r.get("node_bytes", s.node_bytes);
    r.get("inputs", s.inputs);
    r.get("features", s.features);
    r.get("classes", s.classes);
    r.get("cycles_per_node", s.cycles_per_node);
    r.get("seed", s.seed);
    w = bench::forest(s);
  } else if (name == "single_miss") {
    std::uint32_t offset = 128;
    r.get("offset", offset);
    w = bench::single_miss(offset);
  } else {
    throw ConfigError("unknown benchmark '" + name + "'");
  }
  r.finish(name);
  return w;
}

struct TraceOptions {
  bool enabled = false;
  std::size_t depth = 65536;
  std::vector<TracePoint> points = {TracePoint::rab_read_req,  TracePoint::rab_read_resp, TracePoint::rab_write_req,
                                    TracePoint::rab_write_resp, TracePoint::rab_config,    TracePoint::bus,
                                    TracePoint::cluster_sync};
};

struct Experiment {
  RunReport report;
  TraceHeader header;
  std::vector<TraceRecord> trace;
};

/// One offload on a fresh SoC instance.
inline Experiment run_experiment(const SocConfig& cfg, const Workload& w, OffloadMode mode, std::uint64_t seed,
                                 const TraceOptions& topt = {}) {
  Soc soc(cfg, seed);
  if (topt.enabled)
    for (auto p : topt.points) soc.trace().attach(p, always(), topt.depth);
  Experiment e;
  e.report = offload(soc, w, mode);
  e.header.platform_hash = config_hash(cfg);
  e.header.clock_ratio = cfg.calibration.clock_ratio;
  e.trace = soc.trace().store();
  e.header.record_count = e.trace.size();
  return e;
}

}  // namespace hero

/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "herosim/error.hpp"
#include "herosim/offload.hpp"

namespace hero {

struct ResultRow {
  std::uint64_t config_hash = 0;
  std::string benchmark;
  OffloadMode mode = OffloadMode::svm;
  std::uint64_t clusters = 0;
  std::uint64_t offload_cycles = 0;
  std::uint64_t kernel_cycles = 0;
  std::uint64_t total_cycles = 0;
  std::uint64_t l1_hits = 0;
  std::uint64_t l2_hits = 0;
  std::uint64_t misses = 0;
  double speedup_vs_baseline = 1.0;
};

inline constexpr const char* kResultsHeader =
    "config_hash,benchmark,mode,clusters,offload_cycles,kernel_cycles,total_cycles,l1_hits,l2_hits,misses,"
    "speedup_vs_baseline";

inline ResultRow make_row(std::uint64_t hash, const RunReport& r) {
  ResultRow row;
  row.config_hash = hash;
  row.benchmark = r.benchmark;
  row.mode = r.mode;
  row.clusters = r.clusters;
  row.offload_cycles = r.offload_cycles;
  row.kernel_cycles = r.kernel_cycles;
  row.total_cycles = r.total_cycles;
  row.l1_hits = r.rab.l1_hits;
  row.l2_hits = r.rab.l2_hits;
  row.misses = r.rab.misses;
  return row;
}

/// Speedup of every row against the first: baseline total / row total.
inline void fill_speedups(std::vector<ResultRow>& rows) {
  if (rows.empty()) return;
  const auto base = static_cast<double>(rows.front().total_cycles);
  for (auto& r : rows)
    r.speedup_vs_baseline = r.total_cycles == 0 ? 0.0 : base / static_cast<double>(r.total_cycles);
}

inline std::string format_row(const ResultRow& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", r.speedup_vs_baseline);
  return std::to_string(r.config_hash) + "," + r.benchmark + "," + to_string(r.mode) + "," +
         std::to_string(r.clusters) + "," + std::to_string(r.offload_cycles) + "," + std::to_string(r.kernel_cycles) +
         "," + std::to_string(r.total_cycles) + "," + std::to_string(r.l1_hits) + "," + std::to_string(r.l2_hits) +
         "," + std::to_string(r.misses) + "," + buf;
}

inline std::string format_results(const std::vector<ResultRow>& rows) {
  std::string s = std::string(kResultsHeader) + "\n";
  for (const auto& r : rows) s += format_row(r) + "\n";
  return s;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw Error("failed writing " + path);
}

}  // namespace hero

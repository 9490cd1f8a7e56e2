/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include <cstring>
#include <set>

#include "herosim/experiment.hpp"

namespace hero {
namespace {

std::vector<std::uint32_t> words(const std::vector<std::uint8_t>& b) {
  std::vector<std::uint32_t> w(b.size() / 4);
  std::memcpy(w.data(), b.data(), w.size() * 4);
  return w;
}

RunReport run(const std::string& name, const BenchParams& params, OffloadMode mode, std::uint64_t clusters = 8) {
  SocConfig cfg;
  cfg.platform.n_clusters = clusters;
  return run_experiment(cfg, make_benchmark(name, params), mode, 1).report;
}

TEST(Matmul, MatchesReferenceMultiply) {
  bench::MatmulSpec s;
  s.n = 16;
  s.tile = 4;
  const auto in = bench::matmul_inputs(s);
  std::vector<std::uint32_t> want(s.n * s.n, 0);
  for (std::uint32_t i = 0; i < s.n; ++i)
    for (std::uint32_t j = 0; j < s.n; ++j)
      for (std::uint32_t x = 0; x < s.n; ++x) want[i * s.n + j] += in.a[i * s.n + x] * in.b_colmajor[j * s.n + x];
  for (auto mode : {OffloadMode::copy, OffloadMode::svm})
    for (std::uint64_t k : {1, 3, 8})
      EXPECT_EQ(words(run("matmul", {{"n", "16"}, {"tile", "4"}}, mode, k).output), want)
          << to_string(mode) << " " << k;
}

TEST(Memcopy, DestinationIsByteIdentical) {
  const std::uint64_t bytes = 40000;
  std::mt19937_64 rng(11);
  std::vector<std::uint8_t> want(bytes);
  for (auto& x : want) x = static_cast<std::uint8_t>(rng());
  for (auto mode : {OffloadMode::copy, OffloadMode::svm})
    EXPECT_EQ(run("memcopy", {{"bytes", std::to_string(bytes)}, {"block", "4096"}}, mode, 2).output, want);
}

TEST(Pagerank, MatchesFixedPointReference) {
  bench::PagerankSpec s;
  s.nodes = 300;
  s.iterations = 3;
  const auto g = bench::pagerank_graph(s);
  const auto n = static_cast<std::uint32_t>(s.nodes);
  std::vector<std::uint32_t> rank(n, bench::kRankOne / n), next(n);
  const std::uint32_t teleport = static_cast<std::uint32_t>(std::uint64_t{bench::kRankOne} * 15 / 100 / n);
  for (std::uint64_t it = 0; it < s.iterations; ++it) {
    for (std::uint32_t v = 0; v < n; ++v) {
      std::uint64_t sum = 0;
      for (auto u : g.in[v]) sum += rank[u] / g.out_degree[u];
      next[v] = teleport + static_cast<std::uint32_t>(sum * 85 / 100);
    }
    rank = next;
  }
  const BenchParams p = {{"nodes", "300"}, {"iterations", "3"}};
  const auto svm = run("pagerank", p, OffloadMode::svm, 2);
  const auto copy = run("pagerank", p, OffloadMode::copy, 2);
  EXPECT_EQ(words(svm.output), rank);
  EXPECT_EQ(copy.output, svm.output);
}

struct ForestOracle {
  std::vector<std::uint32_t> output;
  // Sum over (input, tree) units of the distinct pages each touches (tree
  // path, input row, output slot), plus the pages the final vote reads.
  std::uint64_t touched_pages = 0;
};

ForestOracle forest_oracle(const bench::ForestSpec& s) {
  const auto f = bench::forest_data(s);
  ForestOracle o;
  for (std::uint64_t i = 0; i < s.inputs; ++i) {
    std::vector<std::uint32_t> counts(s.classes, 0);
    for (std::uint64_t t = 0; t < s.trees; ++t) {
      // (region, page): 0 trees, 1 inputs, 2 outputs
      std::set<std::pair<int, std::uint64_t>> pages;
      std::uint64_t j = 0;
      for (std::uint64_t level = 0; level + 1 < s.depth; ++level) {
        const auto node = t * f.nodes_per_tree + j;
        pages.insert({0, node * s.node_bytes / kPageSize});
        const auto xi = i * s.features + f.feature[node];
        pages.insert({1, xi * 4 / kPageSize});
        const auto x = f.inputs[xi];
        j = x <= f.threshold[node] ? 2 * j + 1 : 2 * j + 2;
      }
      const auto leaf = t * f.nodes_per_tree + j;
      pages.insert({0, (leaf * s.node_bytes + 8) / kPageSize});
      pages.insert({2, (i * (s.trees + 1) + t) * 4 / kPageSize});
      o.touched_pages += pages.size();
      o.output.push_back(f.leaf[leaf]);
      ++counts[f.leaf[leaf] % s.classes];
    }
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < s.classes; ++c)
      if (counts[c] > counts[best]) best = c;
    o.output.push_back(best);
  }
  o.touched_pages += (s.inputs * (s.trees + 1) * 4 + kPageSize - 1) / kPageSize;
  return o;
}

TEST(Forest, VotesMatchReferenceTraversal) {
  bench::ForestSpec s;
  s.depth = 10;
  s.inputs = 6;
  const auto want = forest_oracle(s).output;
  const BenchParams p = {{"depth", "10"}, {"inputs", "6"}};
  for (auto mode : {OffloadMode::copy, OffloadMode::svm}) EXPECT_EQ(words(run("forest", p, mode).output), want);
}

TEST(Forest, SvmMissesBoundedByTouchedPages) {
  const bench::ForestSpec s;  // defaults
  const auto o = forest_oracle(s);
  const auto r = run("forest", {}, OffloadMode::svm);
  const std::uint64_t tree_pages =
      (((std::uint64_t{1} << s.depth) - 1) * s.trees * s.node_bytes + kPageSize - 1) / kPageSize;
  EXPECT_EQ(tree_pages, 1024u);
  EXPECT_EQ(words(r.output), o.output);
  EXPECT_LE(r.rab.misses, o.touched_pages);
  EXPECT_LT(r.rab.misses * 4, tree_pages);
}

TEST(SingleMiss, OneMissOneHit) {
  const auto r = run("single_miss", {}, OffloadMode::svm, 1);
  EXPECT_EQ(r.rab.misses, 1u);
  EXPECT_EQ(r.rab.l1_hits, 2u);
}

TEST(Benchmarks, UnknownNameAndParameterRejected) {
  EXPECT_THROW(make_benchmark("fft"), ConfigError);
  EXPECT_THROW(make_benchmark("matmul", {{"size", "8"}}), ConfigError);
  EXPECT_THROW(make_benchmark("matmul", {{"n", "eight"}}), ConfigError);
}

}  // namespace
}  // namespace hero

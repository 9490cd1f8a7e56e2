/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "herosim/matrix.hpp"
#include "herosim/results.hpp"
#include "matrix_reference.hpp"

namespace hero {
namespace {

namespace fs = std::filesystem;

// ---- test-matrix expansion -------------------------------------------------

TEST(Matrix, FullCompatibilityIsCartesian) {
  const auto e = expand_matrix(parse_matrix("[platform]\njuno zc706\n[application]\nmatmul pagerank forest\n"));
  EXPECT_EQ(e.tuples.size(), 6u);
  EXPECT_EQ(e.tuples[0], (std::vector<std::string>{"juno", "matmul"}));
  EXPECT_EQ(e.tuples[5], (std::vector<std::string>{"zc706", "forest"}));
}

TEST(Matrix, OneRestrictedApplication) {
  const auto e = expand_matrix(
      parse_matrix("[platform]\njuno zc706\n[application]\nmatmul pagerank forest\ncompat: pagerank juno\n"));
  EXPECT_EQ(e.tuples.size(), 5u);
  for (const auto& t : e.tuples) EXPECT_FALSE(t[0] == "zc706" && t[1] == "pagerank");
}

TEST(Matrix, EmptyGraphGivesEmptyList) {
  EXPECT_TRUE(expand_matrix(parse_matrix("")).tuples.empty());
  EXPECT_TRUE(expand_matrix(parse_matrix("# only a comment\n")).tuples.empty());
}

TEST(Matrix, DeadEndReportedPerPath) {
  const auto e = expand_matrix(parse_matrix("[p]\nx y\n[a]\nm\ncompat: m x\n[b]\nq\n"));
  EXPECT_EQ(e.tuples.size(), 1u);
  ASSERT_EQ(e.diagnostics.size(), 1u);
  EXPECT_NE(e.diagnostics[0].find("path y"), std::string::npos);
}

TEST(Matrix, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto g = testing::random_graph(rng);
    EXPECT_EQ(expand_matrix(parse_matrix(g.text)).tuples, testing::brute_force(g)) << g.text;
  }
}

TEST(Matrix, MalformedGraphsRejected) {
  EXPECT_THROW(parse_matrix("juno\n"), ConfigError);
  EXPECT_THROW(parse_matrix("[a]\nx\n[a]\ny\n"), ConfigError);
  EXPECT_THROW(parse_matrix("[a]\nx x\n"), ConfigError);
  EXPECT_THROW(parse_matrix("[a]\n[b]\ny\n"), ConfigError);
  EXPECT_THROW(parse_matrix("[a]\nx\n[b]\ny\ncompat: x z\n"), ConfigError);
  EXPECT_THROW(parse_matrix("[a]\nx\n[b]\ny\n[c]\nz\ncompat: x z\n"), ConfigError);
  EXPECT_THROW(parse_matrix("[a]\nx\n[b]\ny\ncompat: x\n"), ConfigError);
  EXPECT_THROW(parse_matrix("[a\nx\n"), ConfigError);
}

// ---- results CSV -----------------------------------------------------------

TEST(Results, SchemaAndFormatting) {
  RunReport r;
  r.benchmark = "matmul";
  r.mode = OffloadMode::copy;
  r.clusters = 4;
  r.offload_cycles = 500;
  r.kernel_cycles = 1500;
  r.total_cycles = 2000;
  r.rab.l1_hits = 7;
  r.rab.l2_hits = 3;
  r.rab.misses = 1;
  std::vector<ResultRow> rows{make_row(42, r), make_row(43, r)};
  rows[1].total_cycles = 800;
  fill_speedups(rows);
  EXPECT_EQ(format_results(rows),
            "config_hash,benchmark,mode,clusters,offload_cycles,kernel_cycles,total_cycles,l1_hits,l2_hits,misses,"
            "speedup_vs_baseline\n"
            "42,matmul,copy,4,500,1500,2000,7,3,1,1.0000\n"
            "43,matmul,copy,4,500,1500,800,7,3,1,2.5000\n");
}

// ---- command line ------------------------------------------------------------

#ifndef HEROSIM_CLI
#define HEROSIM_CLI "herosim"
#endif

struct Cli : ::testing::Test {
  fs::path dir;

  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("herosim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  int cli(const std::string& args) const {
    const std::string cmd = std::string(HEROSIM_CLI) + " " + args + " >" + path("stdout.txt") + " 2>" +
                            path("stderr.txt");
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  static std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
  }
};

TEST_F(Cli, RunWritesOneRow) {
  ASSERT_EQ(cli("run --benchmark matmul --clusters 1 --param n=16 --param tile=4 --out " + path("r.csv")), 0);
  const auto l = lines(slurp(path("r.csv")));
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], kResultsHeader);
  EXPECT_NE(l[1].find(",matmul,svm,1,"), std::string::npos);
}

TEST_F(Cli, SingleMissGoldenRow) {
  ASSERT_EQ(cli("run --benchmark single_miss --clusters 1 --out " + path("r.csv")), 0);
  SocConfig cfg;
  cfg.platform.n_clusters = 1;
  // Miss resolved at 5 (1 + 4-cycle L2 search), walk 18, config 2, wake 2:
  // the retry issues at 27, hits at 28 and its load returns at 37. Compute
  // 4, then the second load hits at 42 and returns at 51.
  const auto want = std::to_string(config_hash(cfg)) + ",single_miss,svm,1,500,51,551,2,0,1,1.0000";
  EXPECT_EQ(lines(slurp(path("r.csv"))).at(1), want);
}

TEST_F(Cli, InvalidConfigExitsTwo) {
  write("bad.cfg", "[platform]\nrab_l2_entries = 100\n");
  EXPECT_EQ(cli("run --benchmark matmul --config " + path("bad.cfg") + " --out " + path("r.csv")), 2);
  EXPECT_FALSE(slurp(path("stderr.txt")).empty());
  EXPECT_EQ(cli("validate-config --config " + path("bad.cfg")), 2);
  write("good.cfg", "[platform]\nn_clusters = 6\n");
  EXPECT_EQ(cli("validate-config --config " + path("good.cfg")), 0);
  EXPECT_NE(slurp(path("stdout.txt")).find("warning"), std::string::npos);
  EXPECT_EQ(cli("run --benchmark nosuch --out " + path("r.csv")), 2);
  EXPECT_EQ(cli("run --benchmark matmul --mode zero --out " + path("r.csv")), 2);
}

TEST_F(Cli, PageFaultExitsThree) {
  EXPECT_EQ(cli("run --benchmark single_miss --param offset=8192 --out " + path("r.csv")), 3);
  EXPECT_NE(slurp(path("stderr.txt")).find("0x"), std::string::npos);
}

TEST_F(Cli, CorruptTraceExitsTwo) {
  write("bad.htrc", "not a trace at all, just text that is long enough");
  EXPECT_EQ(cli("analyze --trace " + path("bad.htrc")), 2);
  EXPECT_EQ(cli("analyze --trace " + path("missing.htrc")), 2);
}

TEST_F(Cli, AnalyzeAssertionsAndRatio) {
  ASSERT_EQ(cli("run --benchmark pagerank --clusters 2 --param nodes=128 --param iterations=1 --out " + path("r.csv") +
                " --trace " + path("t.htrc")),
            0);
  EXPECT_EQ(cli("analyze --trace " + path("t.htrc") + " --assert hit-under-miss --assert phases-sum --out " +
                path("a")),
            0);
  EXPECT_NE(slurp(path("a.report.txt")).find("hit_under_miss"), std::string::npos);
  EXPECT_EQ(cli("analyze --trace " + path("t.htrc") + " --assert latency-le:1 --out " + path("b")), 4);

  ASSERT_EQ(cli("analyze --trace " + path("t.htrc") + " --ratio 2.5 --out " + path("c")), 0);
  const auto plain = lines(slurp(path("a.accesses.csv")));
  const auto scaled = lines(slurp(path("c.accesses.csv")));
  ASSERT_EQ(plain.size(), scaled.size());
  ASSERT_GT(plain.size(), 1u);
  const auto latency = [](const std::string& row) {
    std::vector<std::string> f;
    std::stringstream ss(row);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    return std::stod(f.at(7));
  };
  for (std::size_t i = 1; i < plain.size(); ++i) EXPECT_DOUBLE_EQ(latency(scaled[i]), 2.5 * latency(plain[i]));
}

TEST_F(Cli, RepeatedRunsAreIdentical) {
  const std::string args = "run --benchmark forest --param depth=8 --seed 5";
  for (int i = 0; i < 3; ++i)
    ASSERT_EQ(cli(args + " --out " + path("r" + std::to_string(i) + ".csv") + " --trace " +
                  path("t" + std::to_string(i) + ".htrc")),
              0);
  for (int i = 1; i < 3; ++i) {
    EXPECT_EQ(slurp(path("r0.csv")), slurp(path("r" + std::to_string(i) + ".csv")));
    EXPECT_EQ(slurp(path("t0.htrc")), slurp(path("t" + std::to_string(i) + ".htrc")));
  }
}

TEST_F(Cli, SweepComputesSpeedups) {
  ASSERT_EQ(cli("sweep --benchmark matmul --param n=16 --param tile=4 --axis clusters=1,2 --axis mode=copy,svm --out " +
                path("s.csv")),
            0);
  const auto l = lines(slurp(path("s.csv")));
  ASSERT_EQ(l.size(), 5u);
  EXPECT_NE(l[1].find(",copy,1,"), std::string::npos);
  EXPECT_EQ(l[1].substr(l[1].size() - 7), ",1.0000");
  EXPECT_NE(l[4].find(",svm,2,"), std::string::npos);

  ASSERT_EQ(cli("sweep --benchmark single_miss --axis clusters=1 --out " + path("one.csv")), 0);
  const auto one = lines(slurp(path("one.csv")));
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[1].substr(one[1].size() - 7), ",1.0000");
}

TEST_F(Cli, ExpandMatrix) {
  write("g.txt", "[platform]\njuno zc706\n[application]\nmatmul pagerank forest\ncompat: pagerank juno\n");
  ASSERT_EQ(cli("expand-matrix --graph " + path("g.txt") + " --out " + path("m.csv")), 0);
  const auto l = lines(slurp(path("m.csv")));
  ASSERT_EQ(l.size(), 6u);
  EXPECT_EQ(l[0], "platform,application");
  write("bad.txt", "[a]\nx\ncompat: x y\n");
  EXPECT_EQ(cli("expand-matrix --graph " + path("bad.txt")), 2);
}

}  // namespace
}  // namespace hero

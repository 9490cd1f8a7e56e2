/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#include <atomic>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "herosim/herosim.hpp"

namespace {

using namespace hero;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFault = 3;
constexpr int kExitAssert = 4;

struct RunOptions {
  std::string config;
  std::string benchmark;
  std::string mode = "svm";
  std::optional<std::uint64_t> clusters;
  std::uint64_t seed = 1;
  std::vector<std::string> params;
  std::string out = "results.csv";
};

// One fully resolved simulation point.
struct Point {
  SocConfig cfg;
  std::string benchmark;
  OffloadMode mode = OffloadMode::svm;
  std::uint64_t seed = 1;
  BenchParams params;
};

SocConfig load_config(const std::string& path) {
  if (path.empty()) return SocConfig{};
  auto parsed = read_config_file(path);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w.str() << "\n";
  return parsed.config;
}

std::pair<std::string, std::string> split_kv(const std::string& s, const char* what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(std::string(what) + " '" + s + "' is not key=value");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

OffloadMode mode_of(const std::string& s) {
  auto m = parse_mode(s);
  if (!m) throw ConfigError("unknown mode '" + s + "' (expected copy or svm)");
  return *m;
}

Point base_point(const RunOptions& o) {
  Point p;
  p.cfg = load_config(o.config);
  if (o.clusters) p.cfg = with_setting(p.cfg, "n_clusters", std::to_string(*o.clusters));
  p.benchmark = o.benchmark;
  p.mode = mode_of(o.mode);
  p.seed = o.seed;
  for (const auto& kv : o.params) {
    auto [k, v] = split_kv(kv, "parameter");
    p.params[k] = v;
  }
  return p;
}

void apply_axis(Point& p, const std::string& name, const std::string& value) {
  if (name == "clusters") {
    p.cfg = with_setting(p.cfg, "n_clusters", value);
  } else if (name == "mode") {
    p.mode = mode_of(value);
  } else if (name == "benchmark") {
    p.benchmark = value;
  } else if (name == "seed") {
    auto v = detail::parse_u64(value);
    if (!v) throw ConfigError("seed '" + value + "' is not an unsigned integer");
    p.seed = *v;
  } else if (name.rfind("param.", 0) == 0) {
    p.params[name.substr(6)] = value;
  } else {
    p.cfg = with_setting(p.cfg, name, value);
  }
}

Experiment execute(const Point& p, const TraceOptions& topt = {}) {
  const auto w = make_benchmark(p.benchmark, p.params);
  return run_experiment(p.cfg, w, p.mode, p.seed, topt);
}

int cmd_run(const RunOptions& o, const std::string& trace_path, std::size_t depth) {
  const auto p = base_point(o);
  TraceOptions topt;
  topt.enabled = !trace_path.empty();
  topt.depth = depth;
  const auto e = execute(p, topt);
  std::vector<ResultRow> rows{make_row(config_hash(p.cfg), e.report)};
  fill_speedups(rows);
  write_text_file(o.out, format_results(rows));
  if (topt.enabled) write_trace_file(trace_path, e.header, e.trace);
  std::printf("%s %s: offload %llu + kernel %llu = %llu cycles\n", p.benchmark.c_str(), to_string(p.mode),
              static_cast<unsigned long long>(e.report.offload_cycles),
              static_cast<unsigned long long>(e.report.kernel_cycles),
              static_cast<unsigned long long>(e.report.total_cycles));
  return kExitOk;
}

int cmd_sweep(const RunOptions& o, const std::vector<std::string>& axes, unsigned jobs) {
  const auto base = base_point(o);
  std::vector<std::pair<std::string, std::vector<std::string>>> ax;
  for (const auto& a : axes) {
    auto [name, list] = split_kv(a, "axis");
    std::vector<std::string> values;
    std::size_t start = 0;
    while (start <= list.size()) {
      const auto comma = list.find(',', start);
      const auto v = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (v.empty()) throw ConfigError("empty value in axis '" + name + "'");
      values.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    ax.emplace_back(name, values);
  }

  // First axis outermost; the first point is the baseline.
  std::vector<Point> points{base};
  for (const auto& [name, values] : ax) {
    std::vector<Point> next;
    for (const auto& p : points)
      for (const auto& v : values) {
        Point q = p;
        apply_axis(q, name, v);
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }
  for (const auto& p : points) make_benchmark(p.benchmark, p.params);  // reject bad names before running

  std::vector<std::optional<ResultRow>> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
      try {
        rows[i] = make_row(config_hash(points[i].cfg), execute(points[i]).report);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < std::min<std::size_t>(jobs, points.size()); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ResultRow> out;
  for (auto& r : rows) out.push_back(*r);
  fill_speedups(out);
  write_text_file(o.out, format_results(out));
  std::printf("%zu points written to %s\n", out.size(), o.out.c_str());
  return kExitOk;
}

std::string fmt_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string accesses_csv(const Decoded& d) {
  std::string s = "request_ts,response_ts,master,address,is_write,dma,outcome,latency,translation\n";
  for (const auto& a : d.accesses) {
    char addr[16];
    std::snprintf(addr, sizeof addr, "0x%08x", a.address);
    s += std::to_string(a.request_ts) + "," + std::to_string(a.response_ts) + "," + MasterId{a.master}.str() + "," +
         addr + "," + (a.is_write ? "1" : "0") + "," + (a.dma ? "1" : "0") + "," + to_string(a.outcome) + "," +
         fmt_num(a.latency) + "," + fmt_num(a.translation) + "\n";
  }
  return s;
}

std::string episodes_csv(const Decoded& d) {
  std::string s = "request_ts,master,va,outcome,is_write,dma,translation,enqueue_ts,queue,ptw,config,wake,complete\n";
  for (const auto& e : d.episodes) {
    char va[16];
    std::snprintf(va, sizeof va, "0x%08x", e.va);
    s += std::to_string(e.request_ts) + "," + MasterId{e.master}.str() + "," + va + "," + to_string(e.outcome) + "," +
         (e.is_write ? "1" : "0") + "," + (e.dma ? "1" : "0") + "," + fmt_num(e.translation) + "," +
         std::to_string(e.enqueue_ts) + "," + fmt_num(e.phases.queue) + "," + fmt_num(e.phases.ptw) + "," +
         fmt_num(e.phases.config) + "," + fmt_num(e.phases.wake) + "," + (e.complete ? "1" : "0") + "\n";
  }
  return s;
}

std::string report_text(const std::string& path, const Decoded& d, const AnalysisReport& r,
                        std::optional<double> ratio) {
  std::string s = "trace: " + path + "\n";
  s += "records: " + std::to_string(d.event_count) + "  drains: " + std::to_string(d.drains.size()) +
       "  diagnostics: " + std::to_string(d.diagnostics.size()) + "\n";
  if (ratio) s += "latencies rescaled by " + fmt_num(*ratio) + "\n";
  s += "mean DRAM load latency: " + fmt_num(r.mean_dram_load_latency) + "\n";
  s += "tlb: l1_hits=" + std::to_string(r.tlb.l1_hits) + " l2_hits=" + std::to_string(r.tlb.l2_hits) +
       " misses=" + std::to_string(r.tlb.misses) + " dropped=" + std::to_string(r.tlb.dropped) + "\n";
  const auto& ph = r.tlb.mean_phases;
  s += "miss phases (mean): queue=" + fmt_num(ph.queue) + " ptw=" + fmt_num(ph.ptw) + " config=" +
       fmt_num(ph.config) + " wake=" + fmt_num(ph.wake) + "\n\n";
  s += "core,count,mean_latency,min_latency,max_latency\n";
  for (const auto& c : r.cores)
    s += MasterId{c.master}.str() + "," + std::to_string(c.count) + "," + fmt_num(c.mean_latency) + "," +
         fmt_num(c.min_latency) + "," + fmt_num(c.max_latency) + "\n";
  s += "\nbus_bin_start,bytes\n";
  for (const auto& b : r.bus_timeline) s += std::to_string(b.start) + "," + fmt_num(b.bytes) + "\n";
  for (const auto& dg : d.diagnostics)
    s += "diagnostic: record " + std::to_string(dg.file_index) + " @" + std::to_string(dg.ts) + ": " + dg.message + "\n";
  s += "\nassertions:\n";
  for (const auto& a : r.assertions) {
    s += std::string(a.pass ? "PASS " : "FAIL ") + a.name + " (" + std::to_string(a.checked) + " checked)";
    if (a.counterexample)
      s += " counterexample @" + std::to_string(a.counterexample->ts) + " " + MasterId{a.counterexample->master}.str() +
           ": " + a.counterexample->detail;
    s += "\n";
  }
  return s;
}

int cmd_analyze(const std::string& path, const std::vector<std::string>& asserts, std::optional<double> ratio,
                std::string prefix, Cycle bus_bin) {
  std::vector<Assertion> checks;
  for (const auto& a : asserts) checks.push_back(assertion_by_name(a));
  const auto parsed = parse_file(path);
  auto decoded = decode(parsed);
  if (ratio) decoded = rescale(decoded, *ratio);
  const auto report = analyze(decoded, checks, bus_bin);
  if (prefix.empty()) {
    prefix = path;
    if (const auto dot = prefix.rfind('.'); dot != std::string::npos && prefix.find('/', dot) == std::string::npos)
      prefix.erase(dot);
  }
  write_text_file(prefix + ".accesses.csv", accesses_csv(decoded));
  write_text_file(prefix + ".episodes.csv", episodes_csv(decoded));
  const auto text = report_text(path, decoded, report, ratio);
  write_text_file(prefix + ".report.txt", text);
  std::fputs(text.c_str(), stdout);
  return report.all_pass() ? kExitOk : kExitAssert;
}

int cmd_expand(const std::string& graph, const std::string& out) {
  const auto g = read_matrix_file(graph);
  const auto m = expand_matrix(g);
  std::string s;
  for (std::size_t i = 0; i < m.axes.size(); ++i) s += (i ? "," : "") + m.axes[i];
  if (!m.axes.empty()) s += "\n";
  for (const auto& t : m.tuples) {
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + t[i];
    s += "\n";
  }
  for (const auto& d : m.diagnostics) std::cerr << "note: " << d << "\n";
  if (out.empty() || out == "-") std::fputs(s.c_str(), stdout);
  else write_text_file(out, s);
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  const auto parsed = read_config_file(path);
  for (const auto& w : parsed.warnings) std::cout << "warning: " << w.str() << "\n";
  std::cout << "ok: config hash " << config_hash(parsed.config) << "\n";
  return kExitOk;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TraceFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PageFault& e) {
    std::cerr << "fault: " << e.what() << "\n";
    return kExitFault;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

void add_run_options(CLI::App* c, RunOptions& o) {
  c->add_option("--config", o.config, "Platform configuration file (defaults if omitted)");
  c->add_option("--benchmark", o.benchmark, "matmul, memcopy, pagerank, forest or single_miss");
  c->add_option("--mode", o.mode, "copy or svm");
  c->add_option("--clusters", o.clusters, "Override n_clusters");
  c->add_option("--seed", o.seed, "Simulation seed");
  c->add_option("--param", o.params, "Benchmark parameter key=value (repeatable)");
  c->add_option("--out", o.out, "Results CSV path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"herosim: heterogeneous SoC simulator"};
  app.require_subcommand(1);

  RunOptions run_opts;
  std::string trace_path;
  std::size_t trace_depth = 65536;
  auto* run = app.add_subcommand("run", "Run one offload experiment");
  add_run_options(run, run_opts);
  run->add_option("--trace", trace_path, "Write an event trace to this path");
  run->add_option("--trace-depth", trace_depth, "Tracer buffer depth in records")->check(CLI::PositiveNumber);

  RunOptions sweep_opts;
  std::vector<std::string> axes;
  unsigned jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "Run the Cartesian product of axis values");
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--axis", axes, "name=v1,v2,... (clusters, mode, benchmark, seed, param.<k> or a config key)");
  sweep->add_option("--jobs", jobs, "Parallel simulations (0: one per core)");

  std::string an_trace, an_out;
  std::vector<std::string> an_asserts;
  std::optional<double> an_ratio;
  Cycle bus_bin = 1000;
  auto* an = app.add_subcommand("analyze", "Decode a trace and evaluate assertions");
  an->add_option("--trace", an_trace, "Trace file")->required();
  an->add_option("--assert", an_asserts, "hit-under-miss, phases-sum or latency-le:<cycles> (repeatable)");
  an->add_option("--ratio", an_ratio, "Multiply latencies by this clock ratio");
  an->add_option("--out", an_out, "Output prefix (default: trace path without extension)");
  an->add_option("--bus-bin", bus_bin, "Bus timeline bin width in cycles")->check(CLI::PositiveNumber);

  std::string graph, graph_out;
  auto* ex = app.add_subcommand("expand-matrix", "Flatten a test-matrix graph");
  ex->add_option("--graph", graph, "Graph document")->required();
  ex->add_option("--out", graph_out, "Output CSV (default: stdout)");

  std::string val_config;
  auto* val = app.add_subcommand("validate-config", "Check a configuration file");
  val->add_option("--config", val_config, "Configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*run) {
    if (run_opts.benchmark.empty()) {
      std::cerr << "error: run needs --benchmark\n";
      return kExitConfig;
    }
    return guarded([&] { return cmd_run(run_opts, trace_path, trace_depth); });
  }
  if (*sweep) {
    if (sweep_opts.benchmark.empty()) sweep_opts.benchmark = "matmul";
    return guarded([&] { return cmd_sweep(sweep_opts, axes, jobs); });
  }
  if (*an) return guarded([&] { return cmd_analyze(an_trace, an_asserts, an_ratio, an_out, bus_bin); });
  if (*ex) return guarded([&] { return cmd_expand(graph, graph_out); });
  if (*val) return guarded([&] { return cmd_validate(val_config); });
  return kExitOk;
}

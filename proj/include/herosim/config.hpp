/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "herosim/error.hpp"

namespace hero {

enum class Interconnect { bus, noc };
enum class FpuMode { private_, shared, off };
enum class IntDspMode { private_, shared };
enum class ICacheDesign { single_ported, multi_ported };
enum class VictimPolicyKind { fifo, round_robin, random };

/// Architectural parameters of the accelerator. Defaults are the 8-cluster
/// reference implementation.
struct PlatformConfig {
  std::uint64_t n_clusters = 8;
  Interconnect interconnect = Interconnect::bus;
  std::uint64_t pes_per_cluster = 8;
  FpuMode fpu_mode = FpuMode::off;
  IntDspMode intdsp_mode = IntDspMode::private_;
  std::uint64_t l1_spm_banks = 16;
  std::uint64_t l1_spm_kib = 256;
  std::uint64_t l2_spm_kib = 256;
  ICacheDesign icache_design = ICacheDesign::single_ported;
  std::uint64_t icache_kib = 8;
  std::uint64_t icache_banks = 8;
  std::uint64_t rab_l1_slots = 32;
  std::uint64_t rab_l2_entries = 1024;
  std::uint64_t rab_l2_assoc = 32;
  std::uint64_t rab_l2_banks = 4;

  bool operator==(const PlatformConfig&) const = default;

  std::uint64_t l2_sets() const {
    return rab_l2_entries == 0 ? 0 : rab_l2_entries / (rab_l2_assoc * rab_l2_banks);
  }
};

/// Timing constants that a physical platform would provide implicitly.
struct CalibrationConfig {
  std::uint64_t dram_base_latency = 8;
  std::uint64_t dram_beat_bytes = 8;
  std::uint64_t dram_beat_cycles = 1;
  std::uint64_t bus_bandwidth = 16;
  std::uint64_t noc_link_bandwidth = 16;
  double host_copy_bytes_per_cycle = 1.0;
  std::uint64_t lds_rewrite_cycles_per_node = 20;
  std::uint64_t l2_ways_per_cycle = 8;
  std::uint64_t miss_queue_depth = 16;
  std::uint64_t ptw_levels = 2;
  std::uint64_t wake_latency = 2;
  std::uint64_t rab_config_write_latency = 2;
  double clock_ratio = 1.0;
  // Host cycles for building and posting an offload descriptor.
  std::uint64_t descriptor_cycles = 500;
  std::uint64_t dma_channels = 4;
  // Unset: last PE of cluster 0.
  std::optional<std::uint64_t> vmm_handler_pe;
  VictimPolicyKind victim_policy = VictimPolicyKind::fifo;
  bool vmm_install_l2 = true;
  std::uint64_t trace_drain_base_cycles = 256;
  std::uint64_t trace_drain_cycles_per_record = 1;

  bool operator==(const CalibrationConfig&) const = default;

  std::uint64_t handler_pe(const PlatformConfig& p) const {
    return vmm_handler_pe.value_or(p.pes_per_cluster - 1);
  }
};

struct Diagnostic {
  enum class Severity { warning, error };
  Severity severity;
  std::string key;
  std::string message;

  bool is_error() const { return severity == Severity::error; }
  std::string str() const {
    return std::string(is_error() ? "error: " : "warning: ") + key + ": " + message;
  }
};

struct SocConfig {
  PlatformConfig platform;
  CalibrationConfig calibration;
  bool operator==(const SocConfig&) const = default;
};

struct ParsedConfig {
  SocConfig config;
  std::vector<Diagnostic> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::optional<std::uint64_t> parse_u64(std::string_view v) {
  std::uint64_t out = 0;
  if (v.empty()) return std::nullopt;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) return std::nullopt;
  return out;
}

inline std::optional<double> parse_f64(std::string_view v) {
  if (v.empty()) return std::nullopt;
  std::string s(v);
  char* end = nullptr;
  double d = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(d)) return std::nullopt;
  return d;
}

inline std::string fmt_f64(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

inline constexpr EnumName<Interconnect> kInterconnectNames[] = {{Interconnect::bus, "bus"},
                                                                {Interconnect::noc, "noc"}};
inline constexpr EnumName<FpuMode> kFpuNames[] = {
    {FpuMode::private_, "private"}, {FpuMode::shared, "shared"}, {FpuMode::off, "off"}};
inline constexpr EnumName<IntDspMode> kIntDspNames[] = {{IntDspMode::private_, "private"},
                                                        {IntDspMode::shared, "shared"}};
inline constexpr EnumName<ICacheDesign> kICacheNames[] = {
    {ICacheDesign::single_ported, "single_ported"}, {ICacheDesign::multi_ported, "multi_ported"}};
inline constexpr EnumName<VictimPolicyKind> kVictimNames[] = {{VictimPolicyKind::fifo, "fifo"},
                                                              {VictimPolicyKind::round_robin, "round_robin"},
                                                              {VictimPolicyKind::random, "random"}};

template <typename E, std::size_t N>
const char* enum_name(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> enum_parse(const EnumName<E> (&table)[N], std::string_view s) {
  for (const auto& e : table)
    if (s == e.name) return e.value;
  return std::nullopt;
}

// One row of the architectural option table: a numeric field, its menu,
// and its structural minimum.
struct NumericField {
  const char* key;
  std::uint64_t PlatformConfig::*member;
  std::vector<std::uint64_t> menu;
  std::uint64_t minimum;
};

inline const std::vector<NumericField>& numeric_platform_fields() {
  static const std::vector<NumericField> fields = {
      {"n_clusters", &PlatformConfig::n_clusters, {1, 2, 4, 8}, 1},
      {"pes_per_cluster", &PlatformConfig::pes_per_cluster, {2, 4, 8}, 2},
      {"l1_spm_banks", &PlatformConfig::l1_spm_banks, {4, 8, 16}, 1},
      {"l1_spm_kib", &PlatformConfig::l1_spm_kib, {32, 64, 128, 256}, 1},
      {"l2_spm_kib", &PlatformConfig::l2_spm_kib, {32, 64, 128, 256}, 1},
      {"icache_kib", &PlatformConfig::icache_kib, {2, 4, 8}, 1},
      {"icache_banks", &PlatformConfig::icache_banks, {2, 4, 8}, 1},
      {"rab_l1_slots", &PlatformConfig::rab_l1_slots, {4, 8, 16, 32, 64}, 1},
      {"rab_l2_entries", &PlatformConfig::rab_l2_entries, {0, 256, 512, 1024, 2048}, 0},
      {"rab_l2_assoc", &PlatformConfig::rab_l2_assoc, {16, 32, 64}, 1},
      {"rab_l2_banks", &PlatformConfig::rab_l2_banks, {1, 2, 4, 8}, 1},
  };
  return fields;
}

struct CalibField {
  const char* key;
  std::uint64_t CalibrationConfig::*member;
};

inline const std::vector<CalibField>& integer_calibration_fields() {
  static const std::vector<CalibField> fields = {
      {"dram_base_latency", &CalibrationConfig::dram_base_latency},
      {"dram_beat_bytes", &CalibrationConfig::dram_beat_bytes},
      {"dram_beat_cycles", &CalibrationConfig::dram_beat_cycles},
      {"bus_bandwidth", &CalibrationConfig::bus_bandwidth},
      {"noc_link_bandwidth", &CalibrationConfig::noc_link_bandwidth},
      {"lds_rewrite_cycles_per_node", &CalibrationConfig::lds_rewrite_cycles_per_node},
      {"l2_ways_per_cycle", &CalibrationConfig::l2_ways_per_cycle},
      {"miss_queue_depth", &CalibrationConfig::miss_queue_depth},
      {"ptw_levels", &CalibrationConfig::ptw_levels},
      {"wake_latency", &CalibrationConfig::wake_latency},
      {"rab_config_write_latency", &CalibrationConfig::rab_config_write_latency},
      {"descriptor_cycles", &CalibrationConfig::descriptor_cycles},
      {"dma_channels", &CalibrationConfig::dma_channels},
      {"trace_drain_base_cycles", &CalibrationConfig::trace_drain_base_cycles},
      {"trace_drain_cycles_per_record", &CalibrationConfig::trace_drain_cycles_per_record},
  };
  return fields;
}

}  // namespace detail

/// Check a configuration. Returns an empty list iff every architectural
/// field is on the option menu and every calibration constant is sane.
inline std::vector<Diagnostic> validate(const SocConfig& cfg) {
  using Sev = Diagnostic::Severity;
  std::vector<Diagnostic> out;
  const auto& p = cfg.platform;
  const auto& c = cfg.calibration;

  for (const auto& f : detail::numeric_platform_fields()) {
    const auto v = p.*(f.member);
    if (v < f.minimum) {
      out.push_back({Sev::error, f.key, "value " + std::to_string(v) + " below minimum " +
                                            std::to_string(f.minimum)});
    } else if (std::find(f.menu.begin(), f.menu.end(), v) == f.menu.end()) {
      out.push_back({Sev::warning, f.key, "off-menu value " + std::to_string(v)});
    }
  }
  if (p.rab_l2_entries != 0 && p.rab_l2_assoc > 0 && p.rab_l2_banks > 0) {
    const auto ways = p.rab_l2_assoc * p.rab_l2_banks;
    if (p.rab_l2_entries % ways != 0) {
      out.push_back({Sev::error, "rab_l2_entries",
                     std::to_string(p.rab_l2_entries) + " not divisible by assoc x banks = " +
                         std::to_string(ways)});
    }
  }

  for (const auto& f : detail::integer_calibration_fields()) {
    if (c.*(f.member) == 0) out.push_back({Sev::error, f.key, "must be positive"});
  }
  if (!(c.host_copy_bytes_per_cycle > 0.0))
    out.push_back({Sev::error, "host_copy_bytes_per_cycle", "must be positive"});
  if (!(c.clock_ratio > 0.0)) out.push_back({Sev::error, "clock_ratio", "must be positive"});
  if (c.vmm_handler_pe && *c.vmm_handler_pe >= p.pes_per_cluster)
    out.push_back({Sev::error, "vmm_handler_pe", "handler PE index outside cluster"});
  return out;
}

/// Canonical text form. Every field is written, so parse(serialize(c)) == c.
inline std::string serialize(const SocConfig& cfg) {
  using namespace detail;
  const auto& p = cfg.platform;
  const auto& c = cfg.calibration;
  std::ostringstream os;
  os << "[platform]\n";
  os << "n_clusters = " << p.n_clusters << "\n";
  os << "interconnect = " << enum_name(kInterconnectNames, p.interconnect) << "\n";
  os << "pes_per_cluster = " << p.pes_per_cluster << "\n";
  os << "fpu_mode = " << enum_name(kFpuNames, p.fpu_mode) << "\n";
  os << "intdsp_mode = " << enum_name(kIntDspNames, p.intdsp_mode) << "\n";
  os << "l1_spm_banks = " << p.l1_spm_banks << "\n";
  os << "l1_spm_kib = " << p.l1_spm_kib << "\n";
  os << "l2_spm_kib = " << p.l2_spm_kib << "\n";
  os << "icache_design = " << enum_name(kICacheNames, p.icache_design) << "\n";
  os << "icache_kib = " << p.icache_kib << "\n";
  os << "icache_banks = " << p.icache_banks << "\n";
  os << "rab_l1_slots = " << p.rab_l1_slots << "\n";
  os << "rab_l2_entries = " << p.rab_l2_entries << "\n";
  os << "rab_l2_assoc = " << p.rab_l2_assoc << "\n";
  os << "rab_l2_banks = " << p.rab_l2_banks << "\n";
  os << "\n[calibration]\n";
  for (const auto& f : integer_calibration_fields()) os << f.key << " = " << c.*(f.member) << "\n";
  os << "host_copy_bytes_per_cycle = " << fmt_f64(c.host_copy_bytes_per_cycle) << "\n";
  os << "clock_ratio = " << fmt_f64(c.clock_ratio) << "\n";
  if (c.vmm_handler_pe) os << "vmm_handler_pe = " << *c.vmm_handler_pe << "\n";
  os << "victim_policy = " << enum_name(kVictimNames, c.victim_policy) << "\n";
  os << "vmm_install_l2 = " << (c.vmm_install_l2 ? 1 : 0) << "\n";
  return os.str();
}

/// FNV-1a over the canonical serialization.
inline std::uint64_t config_hash(const SocConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Parse a `[platform]` / `[calibration]` key=value document. Omitted keys
/// keep their defaults. Throws ConfigError listing every error found;
/// off-menu values come back as warnings.
inline ParsedConfig parse_config(std::string_view text) {
  using namespace detail;
  SocConfig cfg;
  std::vector<std::string> errors;
  enum class Section { none, platform, calibration } section = Section::none;
  std::set<std::string> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line == "[platform]") {
        section = Section::platform;
      } else if (line == "[calibration]") {
        section = Section::calibration;
      } else {
        errors.push_back(where + "unknown section " + std::string(line));
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back(where + "expected key = value");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (section == Section::none) {
      errors.push_back(where + "key '" + key + "' outside of a section");
      continue;
    }
    const std::string qualified = (section == Section::platform ? "platform." : "calibration.") + key;
    if (!seen.insert(qualified).second) {
      errors.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    auto bad_value = [&] { errors.push_back(where + "invalid value '" + std::string(value) + "' for " + key); };

    bool known = false;
    if (section == Section::platform) {
      for (const auto& f : numeric_platform_fields()) {
        if (key == f.key) {
          known = true;
          if (auto v = parse_u64(value)) cfg.platform.*(f.member) = *v; else bad_value();
        }
      }
      auto enum_field = [&](const auto& table, auto& member) {
        known = true;
        if (auto v = enum_parse(table, value)) member = *v; else bad_value();
      };
      if (key == "interconnect") enum_field(kInterconnectNames, cfg.platform.interconnect);
      if (key == "fpu_mode") enum_field(kFpuNames, cfg.platform.fpu_mode);
      if (key == "intdsp_mode") enum_field(kIntDspNames, cfg.platform.intdsp_mode);
      if (key == "icache_design") enum_field(kICacheNames, cfg.platform.icache_design);
    } else {
      for (const auto& f : integer_calibration_fields()) {
        if (key == f.key) {
          known = true;
          if (auto v = parse_u64(value)) cfg.calibration.*(f.member) = *v; else bad_value();
        }
      }
      if (key == "host_copy_bytes_per_cycle" || key == "clock_ratio") {
        known = true;
        auto& m = key == "clock_ratio" ? cfg.calibration.clock_ratio : cfg.calibration.host_copy_bytes_per_cycle;
        if (auto v = parse_f64(value)) m = *v; else bad_value();
      }
      if (key == "vmm_handler_pe") {
        known = true;
        if (auto v = parse_u64(value)) cfg.calibration.vmm_handler_pe = *v; else bad_value();
      }
      if (key == "victim_policy") {
        known = true;
        if (auto v = enum_parse(kVictimNames, value)) cfg.calibration.victim_policy = *v; else bad_value();
      }
      if (key == "vmm_install_l2") {
        known = true;
        if (value == "0" || value == "false") cfg.calibration.vmm_install_l2 = false;
        else if (value == "1" || value == "true") cfg.calibration.vmm_install_l2 = true;
        else bad_value();
      }
    }
    if (!known) errors.push_back(where + "unknown key '" + key + "'");
  }

  ParsedConfig out{cfg, {}};
  for (auto& d : validate(cfg)) {
    if (d.is_error()) errors.push_back(d.key + ": " + d.message);
    else out.warnings.push_back(std::move(d));
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return out;
}

inline ParsedConfig read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

/// Copy of `cfg` with one key changed, validated like a parsed document.
/// Unknown keys and invalid values throw ConfigError.
inline SocConfig with_setting(const SocConfig& cfg, std::string_view key, std::string_view value) {
  std::istringstream in(serialize(cfg));
  std::string out, line;
  bool found = false;
  const std::string prefix = std::string(key) + " = ";
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) {
      line = prefix + std::string(value);
      found = true;
    }
    out += line + "\n";
  }
  // Optional keys are absent from the serialization; the calibration
  // section comes last.
  if (!found) out += prefix + std::string(value) + "\n";
  return parse_config(out).config;
}

}  // namespace hero

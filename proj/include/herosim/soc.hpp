/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "herosim/cluster.hpp"
#include "herosim/config.hpp"
#include "herosim/engine.hpp"
#include "herosim/memory.hpp"
#include "herosim/rab.hpp"
#include "herosim/trace.hpp"
#include "herosim/vmm.hpp"

namespace hero {

/// One simulation instance: host and accelerator clock domains, shared
/// memory, the RAB with its miss handler, tracers and the clusters.
class Soc {
 public:
  Soc(const SocConfig& cfg, std::uint64_t seed)
      : cfg_(checked(cfg)),
        host_(engine_.add_domain("host")),
        pmca_(engine_.add_domain("pmca")),
        memory_(cfg.calibration, seed),
        rab_(cfg.platform, cfg.calibration),
        trace_(engine_, pmca_, host_, cfg.calibration),
        vmm_(engine_, pmca_, rab_, memory_, &trace_, cfg.calibration,
             MasterId::pe(0, static_cast<std::uint32_t>(cfg.calibration.handler_pe(cfg.platform))), seed),
        accel_(engine_, pmca_, cfg.platform, cfg.calibration, rab_, vmm_, memory_, &trace_) {}

  Soc(const Soc&) = delete;
  Soc& operator=(const Soc&) = delete;

  const SocConfig& config() const { return cfg_; }
  SimEngine& engine() { return engine_; }
  DomainId host_domain() const { return host_; }
  DomainId pmca_domain() const { return pmca_; }
  HostMemory& memory() { return memory_; }
  Rab& rab() { return rab_; }
  Vmm& vmm() { return vmm_; }
  TraceHub& trace() { return trace_; }
  Pmca& pmca() { return accel_; }

  ExecutionResult run(const ProgramSet& set) {
    trace_.start();
    auto r = accel_.execute(set);
    trace_.finish();
    return r;
  }

 private:
  static const SocConfig& checked(const SocConfig& cfg) {
    std::string msg;
    for (const auto& d : validate(cfg))
      if (d.is_error()) msg += (msg.empty() ? "" : "; ") + d.str();
    if (!msg.empty()) throw ConfigError(msg);
    return cfg;
  }

  SocConfig cfg_;
  SimEngine engine_;
  DomainId host_;
  DomainId pmca_;
  HostMemory memory_;
  Rab rab_;
  TraceHub trace_;
  Vmm vmm_;
  Pmca accel_;
};

}  // namespace hero

/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hero {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or structurally invalid configuration / input document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unmapped virtual page hit by a page-table walk.
class PageFault : public Error {
 public:
  PageFault(std::uint32_t va, std::uint32_t master, const std::string& what)
      : Error(what), va_(va), master_(master) {}
  std::uint32_t va() const noexcept { return va_; }
  std::uint32_t master() const noexcept { return master_; }

 private:
  std::uint32_t va_;
  std::uint32_t master_;
};

// Runtime fault inside a simulation: permission violation, deadlock,
// livelock guard, malformed kernel program.
class SimulationError : public Error {
 public:
  using Error::Error;
};

class TraceFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hero

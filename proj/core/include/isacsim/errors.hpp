// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace isacsim {

/// Malformed or out-of-range scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Geometrically impossible request (coincident points, empty grid, ...).
class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// The power-allocation problem has no solution under the given constraints.
class InfeasibleError : public std::runtime_error {
 public:
  enum class Reason { kInterferenceLimited, kPowerLimited };
  InfeasibleError(Reason reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

/// Voxel steering direction falls inside the nulled subspace of some AP.
class DegenerateVoxel : public std::runtime_error {
 public:
  DegenerateVoxel(int ap_index, const std::string& what)
      : std::runtime_error(what), ap_index_(ap_index) {}
  int ap_index() const { return ap_index_; }

 private:
  int ap_index_;
};

/// A caller violated an interface contract (power budget, argument shape, ...).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace isacsim

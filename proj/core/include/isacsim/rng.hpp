// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>

namespace isacsim {

/// Counter-based deterministic generator (SplitMix64 over key + counter).
///
/// Streams are derived, never shared: `fork(id)` mixes an id into the key so
/// that (experiment, voxel, trial) each get an independent substream. Output
/// is a pure function of (seed, fork path, draw index), so results do not
/// depend on evaluation order across streams or on worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Derive an independent substream keyed by `id`.
  Rng fork(std::uint64_t id) const;

  std::uint64_t next_u64();

  /// Uniform on (0, 1]; never returns 0 (safe for log()).
  double uniform();

  /// Standard normal via Box-Muller (pairs cached).
  double normal();

  /// Circularly-symmetric complex Gaussian CN(0, variance).
  std::complex<double> cnormal(double variance);

  /// Unit-modulus symbol with uniform phase.
  std::complex<double> unit_symbol();

 private:
  Rng(std::uint64_t key, bool) : key_(key) {}

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace isacsim

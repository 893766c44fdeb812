// SPDX-License-Identifier: Apache-2.0
#include "isacsim/rng.hpp"

#include <cmath>

namespace isacsim {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : key_(mix(seed ^ kGolden)) {}

Rng Rng::fork(std::uint64_t id) const {
  return Rng(mix(key_ ^ mix(id + kGolden)), true);
}

std::uint64_t Rng::next_u64() { return mix(key_ + kGolden * ++counter_); }

double Rng::uniform() {
  // 53-bit mantissa, shifted into (0, 1].
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

std::complex<double> Rng::cnormal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  return {s * r * std::cos(a), s * r * std::sin(a)};
}

std::complex<double> Rng::unit_symbol() {
  const double a = 2.0 * M_PI * uniform();
  return {std::cos(a), std::sin(a)};
}

}  // namespace isacsim

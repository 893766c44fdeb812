// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

// All powers are carried in milliwatts internally; dBm/dB appear only at the
// config and CSV boundaries.

namespace isacsim {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

}  // namespace isacsim

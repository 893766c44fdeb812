// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace isacsim {

/// One emitted curve row; the dB column is always 10*log10(linear).
struct CurveRecord {
  std::string experiment;
  std::string sweep_key;
  double sweep_value = 0.0;
  std::string metric;
  double linear = 0.0;
  double std_error = 0.0;
  std::string method;   // proposed | noncoord | -
  std::string dl_mask;  // on | off | -
  double gamma_req_db = 0.0;
  std::uint64_t seed = 0;
};

/// Serialize with the fixed header
/// experiment,sweep_key,sweep_value,metric,linear,db,stderr,method,dl_mask,gamma_req_db,seed.
std::string to_csv(const std::vector<CurveRecord>& records);

void write_csv(const std::string& path, const std::vector<CurveRecord>& records);

}  // namespace isacsim

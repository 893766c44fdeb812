// SPDX-License-Identifier: Apache-2.0
#include "isacsim/csv.hpp"

#include <cstdio>
#include <fstream>

#include "isacsim/errors.hpp"
#include "isacsim/units.hpp"

namespace isacsim {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<CurveRecord>& records) {
  std::string out =
      "experiment,sweep_key,sweep_value,metric,linear,db,stderr,method,dl_mask,gamma_req_db,seed\n";
  for (const CurveRecord& r : records) {
    out += r.experiment;
    out += ',';
    out += r.sweep_key;
    out += ',';
    out += fmt(r.sweep_value);
    out += ',';
    out += r.metric;
    out += ',';
    out += fmt(r.linear);
    out += ',';
    out += fmt(linear_to_db(r.linear));
    out += ',';
    out += fmt(r.std_error);
    out += ',';
    out += r.method;
    out += ',';
    out += r.dl_mask;
    out += ',';
    out += fmt(r.gamma_req_db);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<CurveRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << to_csv(records);
}

}  // namespace isacsim

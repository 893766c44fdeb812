// SPDX-License-Identifier: Apache-2.0
#include "isacsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "isacsim/errors.hpp"
#include "isacsim/units.hpp"

namespace isacsim {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  }
  if (trim(value.substr(used)) != "") {
    throw ConfigError("key '" + key + "': trailing characters in '" + value + "'");
  }
  return out;
}

long parse_long(const std::string& key, const std::string& value) {
  const double d = parse_double(key, value);
  if (d != std::floor(d)) throw ConfigError("key '" + key + "': expected an integer");
  return static_cast<long>(d);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError("key '" + key + "': expected on/off, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

std::array<double, 3> parse_vec3(const std::string& key, const std::string& value) {
  const std::vector<double> v = parse_list(key, value);
  if (v.size() != 3) throw ConfigError("key '" + key + "': expected x,y,z");
  return {v[0], v[1], v[2]};
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v[i]);
    if (i) out += ",";
    out += buf;
  }
  return out;
}

}  // namespace

void ScenarioConfig::set(const std::string& key, const std::string& value) {
  if (key == "m_v") m_v = static_cast<int>(parse_long(key, value));
  else if (key == "m_h") m_h = static_cast<int>(parse_long(key, value));
  else if (key == "fc_ghz") fc_ghz = parse_double(key, value);
  else if (key == "r_m") r_m = parse_double(key, value);
  else if (key == "num_illuminators") num_illuminators = static_cast<int>(parse_long(key, value));
  else if (key == "ap_height_m") ap_height_m = parse_double(key, value);
  else if (key == "rx_position_m") { rx_position_m = parse_vec3(key, value); rx_position_set = true; }
  else if (key == "ap_positions_m") {
    ap_positions_m.clear();
    std::stringstream ss(value);
    std::string group;
    while (std::getline(ss, group, ';')) {
      group = trim(group);
      if (!group.empty()) ap_positions_m.push_back(parse_vec3(key, group));
    }
  }
  else if (key == "volume_x_m") volume_x_m = parse_double(key, value);
  else if (key == "volume_y_m") volume_y_m = parse_double(key, value);
  else if (key == "volume_z_m") volume_z_m = parse_double(key, value);
  else if (key == "voxel_spacing_m") voxel_spacing_m = parse_double(key, value);
  else if (key == "z_m") z_m = parse_double(key, value);
  else if (key == "volume_center_x_m") volume_center_x_m = parse_double(key, value);
  else if (key == "volume_center_y_m") volume_center_y_m = parse_double(key, value);
  else if (key == "p_max_dbm") p_max_dbm = parse_double(key, value);
  else if (key == "gamma_req_db") gamma_req_db = parse_double(key, value);
  else if (key == "noise_dbm") noise_dbm = parse_double(key, value);
  else if (key == "beta_g_db") beta_g_db = parse_double(key, value);
  else if (key == "sigma_rcs_dbsm") sigma_rcs_dbsm = parse_double(key, value);
  else if (key == "ue_serving_distance_m") ue_serving_distance_m = parse_double(key, value);
  else if (key == "ue_interferer_distances_m") ue_interferer_distances_m = parse_list(key, value);
  else if (key == "rcs_model") rcs_model = value;
  else if (key == "weibull_shape") weibull_shape = parse_double(key, value);
  else if (key == "weibull_scale") weibull_scale = parse_double(key, value);
  else if (key == "precoder") precoder = value;
  else if (key == "dl_mask") dl_mask = parse_bool(key, value);
  else if (key == "sweep_start_dbm") sweep_start_dbm = parse_double(key, value);
  else if (key == "sweep_stop_dbm") sweep_stop_dbm = parse_double(key, value);
  else if (key == "sweep_step_db") sweep_step_db = parse_double(key, value);
  else if (key == "gamma_req_sweep_db") gamma_req_sweep_db = parse_list(key, value);
  else if (key == "z_levels_m") z_levels_m = parse_list(key, value);
  else if (key == "roc_p_max_dbm") roc_p_max_dbm = parse_list(key, value);
  else if (key == "trials") trials = parse_long(key, value);
  else if (key == "cdf_trials") cdf_trials = parse_long(key, value);
  else if (key == "roc_trials") roc_trials = parse_long(key, value);
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_long(key, value));
  else if (key == "exclude_endfire") exclude_endfire = parse_bool(key, value);
  else throw ConfigError("unknown key '" + key + "'");
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ScenarioConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

void ScenarioConfig::validate() const {
  if (m_v < 1) throw ConfigError("key 'm_v': must be >= 1");
  if (m_h < 1) throw ConfigError("key 'm_h': must be >= 1");
  if (m_v != m_h) throw ConfigError("key 'm_v'/'m_h': square panels required (m_v = m_h)");
  if (fc_ghz <= 0.0) throw ConfigError("key 'fc_ghz': must be positive");
  if (r_m <= 0.0) throw ConfigError("key 'r_m': must be positive");
  if (num_illuminators < 1 || num_illuminators > 6) {
    throw ConfigError("key 'num_illuminators': must be in [1, 6]");
  }
  if (volume_x_m <= 0.0) throw ConfigError("key 'volume_x_m': must be positive");
  if (volume_y_m <= 0.0) throw ConfigError("key 'volume_y_m': must be positive");
  if (volume_z_m <= 0.0) throw ConfigError("key 'volume_z_m': must be positive");
  if (voxel_spacing_m <= 0.0) throw ConfigError("key 'voxel_spacing_m': must be positive");
  if (z_m < 0.0) throw ConfigError("key 'z_m': must be non-negative");
  if (ue_serving_distance_m < 0.0) {
    throw ConfigError("key 'ue_serving_distance_m': must be non-negative");
  }
  for (double d : ue_interferer_distances_m) {
    if (d <= 0.0) throw ConfigError("key 'ue_interferer_distances_m': distances must be positive");
  }
  if (rcs_model != "sw2" && rcs_model != "weibull") {
    throw ConfigError("key 'rcs_model': expected sw2 or weibull");
  }
  if (weibull_shape <= 0.0) throw ConfigError("key 'weibull_shape': must be positive");
  if (weibull_scale < 0.0) throw ConfigError("key 'weibull_scale': must be non-negative");
  if (precoder != "proposed" && precoder != "noncoord" && precoder != "both") {
    throw ConfigError("key 'precoder': expected proposed, noncoord or both");
  }
  if (sweep_step_db <= 0.0) throw ConfigError("key 'sweep_step_db': must be positive");
  if (sweep_stop_dbm < sweep_start_dbm) {
    throw ConfigError("key 'sweep_stop_dbm': sweep range must be ordered");
  }
  if (trials < 1) throw ConfigError("key 'trials': must be >= 1");
  if (cdf_trials < 1) throw ConfigError("key 'cdf_trials': must be >= 1");
  if (roc_trials < 1) throw ConfigError("key 'roc_trials': must be >= 1");
  if (!ap_positions_m.empty() &&
      static_cast<int>(ap_positions_m.size()) != num_illuminators) {
    throw ConfigError("key 'ap_positions_m': expected one position per illuminator");
  }
  for (double g : gamma_req_sweep_db) {
    (void)g;  // any real dB value is physical
  }
}

std::string ScenarioConfig::echo() const {
  std::ostringstream out;
  const auto put = [&out](const char* key, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    out << key << " = " << buf << "\n";
  };
  out << "m_v = " << m_v << "\n";
  out << "m_h = " << m_h << "\n";
  put("fc_ghz", fc_ghz);
  put("r_m", r_m);
  out << "num_illuminators = " << num_illuminators << "\n";
  put("ap_height_m", ap_height_m);
  if (rx_position_set) {
    out << "rx_position_m = " << format_list({rx_position_m[0], rx_position_m[1],
                                              rx_position_m[2]}) << "\n";
  }
  if (!ap_positions_m.empty()) {
    out << "ap_positions_m = ";
    for (std::size_t i = 0; i < ap_positions_m.size(); ++i) {
      if (i) out << "; ";
      out << format_list({ap_positions_m[i][0], ap_positions_m[i][1], ap_positions_m[i][2]});
    }
    out << "\n";
  }
  put("volume_x_m", volume_x_m);
  put("volume_y_m", volume_y_m);
  put("volume_z_m", volume_z_m);
  put("voxel_spacing_m", voxel_spacing_m);
  put("z_m", z_m);
  put("volume_center_x_m", volume_center_x_m);
  put("volume_center_y_m", volume_center_y_m);
  put("p_max_dbm", p_max_dbm);
  put("gamma_req_db", gamma_req_db);
  put("noise_dbm", noise_dbm);
  put("beta_g_db", beta_g_db);
  put("sigma_rcs_dbsm", sigma_rcs_dbsm);
  put("ue_serving_distance_m", serving_distance_m());
  out << "ue_interferer_distances_m = " << format_list(interferer_distances_m()) << "\n";
  out << "rcs_model = " << rcs_model << "\n";
  put("weibull_shape", weibull_shape);
  put("weibull_scale", weibull_scale);
  out << "precoder = " << precoder << "\n";
  out << "dl_mask = " << (dl_mask ? "on" : "off") << "\n";
  put("sweep_start_dbm", sweep_start_dbm);
  put("sweep_stop_dbm", sweep_stop_dbm);
  put("sweep_step_db", sweep_step_db);
  out << "gamma_req_sweep_db = " << format_list(gamma_req_sweep_db) << "\n";
  out << "z_levels_m = " << format_list(z_levels_m) << "\n";
  out << "roc_p_max_dbm = " << format_list(roc_p_max_dbm) << "\n";
  out << "trials = " << trials << "\n";
  out << "cdf_trials = " << cdf_trials << "\n";
  out << "roc_trials = " << roc_trials << "\n";
  out << "seed = " << seed << "\n";
  out << "exclude_endfire = " << (exclude_endfire ? "on" : "off") << "\n";
  return out.str();
}

double ScenarioConfig::wavelength_m() const { return kSpeedOfLight / carrier_hz(); }
double ScenarioConfig::p_max_mw() const { return db_to_linear(p_max_dbm); }
double ScenarioConfig::noise_mw() const { return db_to_linear(noise_dbm); }
double ScenarioConfig::beta_g() const { return db_to_linear(beta_g_db); }
double ScenarioConfig::sigma_rcs2() const { return db_to_linear(sigma_rcs_dbsm); }
double ScenarioConfig::gamma_req_linear() const { return db_to_linear(gamma_req_db); }

double ScenarioConfig::serving_distance_m() const {
  return ue_serving_distance_m > 0.0 ? ue_serving_distance_m : 2.0 * r_m / std::sqrt(3.0);
}

std::vector<double> ScenarioConfig::interferer_distances_m() const {
  if (!ue_interferer_distances_m.empty()) return ue_interferer_distances_m;
  const double d = 4.0 * r_m / std::sqrt(3.0);
  return {d, d};
}

}  // namespace isacsim

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace isacsim {

/// Full scenario description; immutable after load. Every field has a
/// baseline default; a key-value file overrides individual keys.
struct ScenarioConfig {
  // Array
  int m_v = 12;
  int m_h = 12;

  // Carrier and layout
  double fc_ghz = 15.0;
  double r_m = 250.0;
  int num_illuminators = 3;
  double ap_height_m = 10.0;
  std::vector<std::array<double, 3>> ap_positions_m;  // empty = hexagonal default
  std::array<double, 3> rx_position_m{0.0, 0.0, 0.0};
  bool rx_position_set = false;

  // Surveillance volume
  double volume_x_m = 6.0;
  double volume_y_m = 2.0;
  double volume_z_m = 2.0;
  double voxel_spacing_m = 2.0;  // d
  double z_m = 10.0;             // grid altitude (center of the volume in z)
  double volume_center_x_m = -80.0;
  double volume_center_y_m = -200.0;

  // Powers and statistics
  double p_max_dbm = 30.0;
  double gamma_req_db = 3.0;
  double noise_dbm = -60.0;
  double beta_g_db = -90.0;
  double sigma_rcs_dbsm = -10.0;

  // UE model (0 / empty = hexagonal cell-edge defaults derived from r)
  double ue_serving_distance_m = 0.0;
  std::vector<double> ue_interferer_distances_m;

  // RCS model
  std::string rcs_model = "sw2";  // sw2 | weibull
  double weibull_shape = 2.0;
  double weibull_scale = 0.0;  // 0 = solve so E|alpha|^2 = sigma_rcs^2

  // Precoder selection
  std::string precoder = "both";  // proposed | noncoord | both
  bool dl_mask = true;

  // Experiment grids
  double sweep_start_dbm = -5.0;
  double sweep_stop_dbm = 30.0;
  double sweep_step_db = 0.5;
  std::vector<double> gamma_req_sweep_db{2.0, 3.0};
  std::vector<double> z_levels_m{1.0, 10.0};
  std::vector<double> roc_p_max_dbm{20.0, 25.0, 30.0};

  // Monte Carlo budgets and seeding
  long trials = 20000;
  long cdf_trials = 20000;
  long roc_trials = 1000000;
  std::uint64_t seed = 1;

  bool exclude_endfire = false;

  /// Parse a plain-text key = value file; unknown keys are rejected with the
  /// offending line number, invariant violations name the key.
  static ScenarioConfig load(const std::string& path);

  /// Apply one key = value override (same validation as load()).
  void set(const std::string& key, const std::string& value);

  void validate() const;

  /// Fully resolved key = value text, suitable for re-loading.
  std::string echo() const;

  // Derived quantities (all powers in mW internally)
  double carrier_hz() const { return fc_ghz * 1e9; }
  double wavelength_m() const;
  double p_max_mw() const;
  double noise_mw() const;
  double beta_g() const;
  double sigma_rcs2() const;
  double gamma_req_linear() const;
  double serving_distance_m() const;
  std::vector<double> interferer_distances_m() const;
};

}  // namespace isacsim

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <vector>

#include "isacsim/channel.hpp"
#include "isacsim/precoder.hpp"
#include "isacsim/rng.hpp"
#include "isacsim/scene.hpp"

namespace isacsim {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long trials = 0;
};

/// v_q = h_{q,rx} / sqrt(M); unit norm.
arma::cx_vec combining_vector(const Vec3& voxel, const ApNode& rx, const ArrayGeometry& geom);

/// Closed-form average sensing SINR without the direct link:
///   gamma' = sigma_rcs^2 |v^H H_q w_q|^2 / (beta_g sum_j rho_j + sigma_n^2).
double sensing_sinr_analytic(const Scene& scene, const ChannelSet& channels,
                             const PrecoderSolution& sol, int q);

/// Monte Carlo estimate of the average sensing SINR (ratio of sample means
/// over the RCS draw, symbols, clutter and noise); with include_direct the
/// direct-link term enters the denominator.
McEstimate sensing_sinr_mc(const Scene& scene, const ChannelSet& channels,
                           const PrecoderSolution& sol, int q, bool include_direct, long trials,
                           Rng rng);

/// User SINR with the sensing leakage neglected:
///   gamma_ue = rho beta_s / (rho sum_i beta_i + sigma_n^2).
double user_sinr(const UeScenario& ue, double rho_mw);

/// Diagnostic variant with the sensing leakage term sum_k beta_k ||w_k||^2
/// kept in the denominator. `ap_distances` are UE-to-AP distances for every
/// illuminator (serving first).
double user_sinr_full(const UeScenario& ue, double rho_mw,
                      const std::vector<double>& sensing_power_per_ap,
                      const std::vector<double>& ap_distances);

/// Arithmetic mean in the linear domain; degenerate voxels excluded.
double volume_average(const std::vector<double>& per_voxel,
                      const std::vector<bool>* degenerate = nullptr);

/// Per-realization SINR samples over the RCS draw (clutter+noise held at
/// expected power): gamma_inst = |alpha|^2 |v^H H_q w_q|^2 / xi.
std::vector<double> sinr_cdf_samples(const Scene& scene, const ChannelSet& channels,
                                     const PrecoderSolution& sol, int q, const RcsModel& rcs,
                                     long trials, Rng rng);

}  // namespace isacsim

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <complex>
#include <vector>

#include "isacsim/rng.hpp"
#include "isacsim/scene.hpp"

namespace isacsim {

/// Two-hop LOS channel AP_j -> voxel q -> receiver:
///   H = sqrt(beta) e^{-j 2 pi fc tau} h_arr h_dep^T,  beta = 1/(l_dep^2 l_arr^2).
/// Rank 1 by construction; Frobenius norm sqrt(beta) * M.
struct BistaticChannel {
  arma::cx_mat matrix;
  double gain = 0.0;   // beta_{j,q}
  double delay = 0.0;  // tau_{j,q} = (l_dep + l_arr) / c
  BistaticAngles angles{};
};

/// LOS channel AP_j -> receiver: H = sqrt(beta0) e^{-j 2 pi fc tau} a(th_d+pi,0) a(th_d,0)^T.
struct DirectChannel {
  arma::cx_mat matrix;
  double gain = 0.0;               // beta_{0,j} = 1/l^2
  double delay = 0.0;              // tau_{0,j}
  double departure_azimuth = 0.0;  // theta_{d,j}; arrival azimuth is theta_d + pi
};

/// Reflection-coefficient model: Swerling-2 (complex Gaussian) or Weibull
/// RCS power with uniform phase.
struct RcsModel {
  enum class Kind { kSwerling2, kWeibull };
  Kind kind = Kind::kSwerling2;
  double variance = 0.1;  // sigma_rcs^2, m^2 (E|alpha|^2 for either model)
  double shape = 2.0;     // Weibull k
  double scale = 0.0;     // Weibull lambda_w (of |alpha|^2)

  static RcsModel swerling2(double variance);
  /// Weibull with scale solved so E|alpha|^2 = mean_power.
  static RcsModel weibull_matched(double shape, double mean_power);
};

struct StochasticParams {
  double clutter_variance = 0.0;    // beta_{g,q}, dimensionless
  double noise_variance = 0.0;      // sigma_n^2, mW
  double ue_fading_variance = 0.0;  // beta_{j,ue} of the serving link
};

BistaticChannel sensing_channel(const ApNode& ap, const Vec3& voxel, const ApNode& rx,
                                double carrier_hz, const ArrayGeometry& geom);

DirectChannel direct_channel(const ApNode& ap, const ApNode& rx, double carrier_hz,
                             const ArrayGeometry& geom);

/// Per-path reflection coefficients, i.i.d. across entries.
arma::cx_vec draw_rcs(const RcsModel& model, int count, Rng& rng);

/// One reflection coefficient; shared by all J bistatic paths of a symbol
/// (the correlation under which Eq.-(10)-style averages reduce to the
/// closed-form SINR).
std::complex<double> draw_rcs_common(const RcsModel& model, Rng& rng);

/// Per-voxel deterministic channels plus the stochastic parameter set.
struct ChannelSet {
  std::vector<std::vector<BistaticChannel>> bistatic;  // [voxel][ap]
  std::vector<DirectChannel> direct;                   // [ap]
  StochasticParams noise;
  RcsModel rcs;
};

ChannelSet build_channel_set(const Scene& scene, const StochasticParams& noise,
                             const RcsModel& rcs);

struct TxInputs {
  std::complex<double> sensing_symbol;     // s[q], unit power
  arma::cx_vec ssb_symbols;                // c_j[q] per AP, unit power
  std::vector<arma::cx_vec> precoders;     // w_j
  arma::cx_vec ssb_precoder_conj;          // f*_q
  arma::vec ssb_power;                     // rho_j, mW
};

/// x_j = s w_j + sqrt(rho_j) c_j f*_q. Rejects per-AP budgets above p_max.
std::vector<arma::cx_vec> assemble_tx(const TxInputs& tx, double p_max_mw);

/// Received snapshot per Eq.-(8) structure: sensing echoes (common reflection
/// coefficient), SSB clutter echoes, optional direct link, noise. The clutter
/// vector G_j f*_q is drawn directly as CN(0, beta_g I) (exact for unit-norm
/// f*_q).
arma::cx_vec simulate_rx(const Scene& scene, const ChannelSet& channels, int q,
                         const TxInputs& tx, int eta, bool include_direct, Rng& rng);

}  // namespace isacsim

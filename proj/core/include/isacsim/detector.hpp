// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <vector>

#include "isacsim/channel.hpp"
#include "isacsim/precoder.hpp"
#include "isacsim/rng.hpp"
#include "isacsim/scene.hpp"

namespace isacsim {

/// Per-voxel binary hypothesis model:
///   H0: y = x_c + n ~ CN(0, sigma^2 I),      sigma^2 = sigma_n^2 + rho_q beta_g
///   H1: y = x_s + x_c + n ~ CN(0, C),        C = sigma^2 I + sigma_rcs^2 Phi
struct HypothesisModel {
  arma::cx_mat phi;        // sensing covariance shape, M x M Hermitian PSD
  double sigma2 = 0.0;     // total clutter+noise variance, mW
  double sigma2_rcs = 0.0;
  double phi_trace = 0.0;
  arma::cx_vec dominant;   // unit dominant eigenvector of Phi
  double eig_ratio = 0.0;  // lambda_1 / lambda_2
  bool rank1 = false;      // lambda_2 / lambda_1 < 1e-10

  /// Effective SNR of the rank-1 test: sigma_rcs^2 * tr(Phi) / sigma^2.
  double effective_snr() const;
};

/// Phi_q = sum_j H_{j,q} w_j w_j^H H_{j,q}^H.
HypothesisModel sensing_covariance(const Scene& scene, const ChannelSet& channels,
                                   const PrecoderSolution& sol, int q);

/// ln(sigma^{2M}/det C) + y^H (sigma^{-2} I - C^{-1}) y.
double llr(const arma::cx_vec& y, const HypothesisModel& model);

/// T(y) = y^H (sigma^{-2} I - C^{-1}) y; rank-1 downdate path when available.
double test_statistic(const arma::cx_vec& y, const HypothesisModel& model);

/// Dense-inverse evaluation, kept for cross-checking the rank-1 path (M <= 32).
double test_statistic_dense(const arma::cx_vec& y, const HypothesisModel& model);

/// Exact rank-1 ROC: Pd = Pfa^{1/(1+rbar)}. Throws for rank(Phi) > 1.
double roc_analytic_pd(double pfa, double effective_snr);

/// Threshold on the T scale giving false-alarm probability pfa (rank-1).
double roc_threshold_for_pfa(double pfa, const HypothesisModel& model);

struct RocPoint {
  double threshold = 0.0;
  double pfa = 0.0;
  double pd = 0.0;
  double pfa_lo = 0.0, pfa_hi = 0.0;  // Wilson 95% interval
  double pd_lo = 0.0, pd_hi = 0.0;
};

/// Monte Carlo ROC: y drawn under both hypotheses, T computed per trial,
/// thresholds swept as a post-pass. Direct link excluded by construction.
std::vector<RocPoint> roc_mc(const HypothesisModel& model, long trials,
                             const std::vector<double>& thresholds, Rng rng);

}  // namespace isacsim

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <string>
#include <vector>

#include "isacsim/channel.hpp"
#include "isacsim/scene.hpp"

namespace isacsim {

/// Cell-edge user model behind the SSB power allocation: one serving link and
/// the set of interfering APs, all Rayleigh with beta = 1/distance^2.
struct UeScenario {
  double serving_distance = 0.0;             // m
  std::vector<double> interferer_distances;  // m, the set U
  double gamma_req = 1.0;                    // linear
  double noise_variance = 0.0;               // mW

  double serving_beta() const { return 1.0 / (serving_distance * serving_distance); }
  double interferer_beta_sum() const;

  /// Hexagonal defaults: serving UE at the cell-edge circumradius 2r/sqrt(3),
  /// two interferers at 4r/sqrt(3).
  static UeScenario hex_default(double inner_radius, double gamma_req_linear,
                                double noise_variance);
};

enum class PrecoderMethod { kClosedForm, kSdr, kNonCoordinated };

struct PrecoderResiduals {
  double power_slack = 0.0;       // max_j | ||w_j||^2 + rho_j - P_max |
  double ssb_overlap = 0.0;       // max_j |w_j^H f*_q|
  double direct_overlap = 0.0;    // max_j |w_j^H h*_{0,j,d}|
  double reduced_form_gap = 0.0;  // non-coordinated: ||w_exact - w_reduced|| / ||w||
};

struct PrecoderSolution {
  std::vector<arma::cx_vec> w;  // per-AP sensing precoders
  arma::vec rho;                // per-AP SSB power, mW
  double objective = 0.0;       // t, linear SINR scale of Eq. (11)
  PrecoderResiduals residuals;
  bool dl_masked = false;
  PrecoderMethod method = PrecoderMethod::kClosedForm;
  bool pinv_fallback = false;  // non-coordinated U_j was rank-deficient

  double sensing_power(int j) const { return std::pow(arma::norm(w[j]), 2); }
};

/// Minimum equal SSB power meeting the user-SINR constraint with equality:
///   rho = gamma_req sigma_n^2 / (beta_s - gamma_req sum beta_i).
/// Throws InfeasibleError when interference- or power-limited.
double solve_power_allocation(const UeScenario& ue, double p_max_mw);

/// Closed-form solution of the joint design: per AP,
///   w_j = sqrt(P_max - rho_j) P_j^perp a_j / ||P_j^perp a_j||,
/// a_j = H_{j,q}^H v_q, with P_j^perp the projector onto the orthogonal
/// complement of span{f*_q, h*_{0,j,d}} (direct-link vector only when
/// dl_mask). Optimal for the rank-1 quadratic objective.
PrecoderSolution coordinated_precoder(const Scene& scene, const ChannelSet& channels, int q,
                                      double rho_mw, double p_max_mw, bool dl_mask);

/// Benchmark: w_j proportional to the projection of the (unconjugated)
/// departure steering vector onto the complement of [h*_{0,j,d}/sqrt(M), f*_q],
/// rotated by the per-AP wavelength phase offset relative to AP_1.
PrecoderSolution noncoordinated_precoder(const Scene& scene, const ChannelSet& channels, int q,
                                         double rho_mw, double p_max_mw);

struct SdrOptions {
  double t_bracket_low = 0.0;    // linear SINR
  double t_bracket_high = 0.0;   // 0 = Cauchy-Schwarz auto bracket
  double bisect_rel_tol = 1e-4;  // relative on t
  double residual_tol = 1e-7;
  int max_iterations = 5000;     // per feasibility check
  double relaxation = 1.8;       // over-relaxation of the affine projections
};

struct SdrSolution {
  arma::cx_mat W;          // JM x JM, PSD
  arma::vec rho;           // mW
  double objective = 0.0;  // best feasible t, same scale as PrecoderSolution
  double eig_ratio = 0.0;  // lambda_1 / lambda_2 of W
  double objective_residual = 0.0;
  double power_residual = 0.0;
  double psd_residual = 0.0;
  double orthogonality_residual = 0.0;
  int bisection_steps = 0;
  bool converged = false;
  std::string message;
};

/// Oracle: outer bisection on t; each feasibility problem solved by cyclic
/// projections (PSD cone via eigenvalue clipping / affine constraint set).
/// Intended for small instances (M <= 16, J <= 3).
SdrSolution sdr_bisection_solver(const Scene& scene, const ChannelSet& channels, int q,
                                 double rho_mw, double p_max_mw, bool dl_mask,
                                 const SdrOptions& opts = {});

/// w_{sol,j} = sqrt(P_max - rho_j) * (block j of the unit dominant eigenvector).
/// Phase tie-break: first nonzero entry of the stacked vector made real-positive.
std::vector<arma::cx_vec> extract_rank1(const arma::cx_mat& W, const arma::vec& rho,
                                        double p_max_mw);

}  // namespace isacsim

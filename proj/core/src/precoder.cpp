// SPDX-License-Identifier: Apache-2.0
#include "isacsim/precoder.hpp"

#include <atomic>
#include <cmath>
#include <iostream>

#include "isacsim/errors.hpp"
#include "isacsim/units.hpp"

namespace isacsim {

double UeScenario::interferer_beta_sum() const {
  double s = 0.0;
  for (double d : interferer_distances) s += 1.0 / (d * d);
  return s;
}

UeScenario UeScenario::hex_default(double inner_radius, double gamma_req_linear,
                                   double noise_variance) {
  UeScenario ue;
  ue.serving_distance = 2.0 * inner_radius / std::sqrt(3.0);
  ue.interferer_distances = {4.0 * inner_radius / std::sqrt(3.0),
                             4.0 * inner_radius / std::sqrt(3.0)};
  ue.gamma_req = gamma_req_linear;
  ue.noise_variance = noise_variance;
  return ue;
}

double solve_power_allocation(const UeScenario& ue, double p_max_mw) {
  const double beta_s = ue.serving_beta();
  const double beta_i = ue.interferer_beta_sum();
  const double denom = beta_s - ue.gamma_req * beta_i;
  if (denom <= 0.0) {
    throw InfeasibleError(InfeasibleError::Reason::kInterferenceLimited,
                          "power allocation infeasible: interference-limited (gamma_req >= "
                          "beta_s / sum beta_i)");
  }
  const double rho = ue.gamma_req * ue.noise_variance / denom;
  if (rho > p_max_mw) {
    throw InfeasibleError(InfeasibleError::Reason::kPowerLimited,
                          "power allocation infeasible: required SSB power " +
                              std::to_string(rho) + " mW exceeds P_max");
  }
  return rho;
}

namespace {

// Orthonormal basis of span(cols); rank-deficient columns dropped.
arma::cx_mat orthonormal_basis(const std::vector<arma::cx_vec>& cols) {
  arma::cx_mat a(cols.front().n_elem, cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) a.col(k) = cols[k];
  arma::cx_mat q, r;
  arma::qr_econ(q, r, a);
  arma::uvec keep = arma::find(arma::abs(r.diag()) > 1e-12 * arma::abs(r).max());
  return q.cols(keep);
}

arma::cx_vec project_out(const arma::cx_vec& x, const arma::cx_mat& basis) {
  if (basis.n_cols == 0) return x;
  return x - basis * (basis.t() * x);
}

double objective_from_terms(const std::complex<double>& combined, const ChannelSet& channels,
                            const arma::vec& rho) {
  const double xi = channels.noise.clutter_variance * arma::accu(rho) +
                    channels.noise.noise_variance;
  return channels.rcs.variance * std::norm(combined) / xi;
}

}  // namespace

PrecoderSolution coordinated_precoder(const Scene& scene, const ChannelSet& channels, int q,
                                      double rho_mw, double p_max_mw, bool dl_mask) {
  if (rho_mw > p_max_mw) {
    throw InfeasibleError(InfeasibleError::Reason::kPowerLimited,
                          "coordinated_precoder: rho exceeds P_max");
  }
  const int j_count = scene.illuminator_count();
  const int m = scene.geom.size();
  const double p_sense = p_max_mw - rho_mw;

  const BistaticAngles& arr = channels.bistatic[q][0].angles;
  const arma::cx_vec v =
      upa_steering(arr.theta_arr, arr.phi_arr, scene.geom) / std::sqrt(static_cast<double>(m));
  const arma::cx_vec f_conj = scene.ssb_precoder_conj(q);

  PrecoderSolution sol;
  sol.method = PrecoderMethod::kClosedForm;
  sol.dl_masked = dl_mask;
  sol.rho = arma::vec(j_count, arma::fill::value(rho_mw));
  sol.w.resize(j_count);

  std::complex<double> combined = 0.0;
  for (int j = 0; j < j_count; ++j) {
    const arma::cx_vec a_j = channels.bistatic[q][j].matrix.t() * v;
    std::vector<arma::cx_vec> null_dirs{f_conj};
    if (dl_mask) {
      null_dirs.push_back(
          arma::conj(upa_steering(channels.direct[j].departure_azimuth, 0.0, scene.geom)));
    }
    const arma::cx_mat basis = orthonormal_basis(null_dirs);
    const arma::cx_vec pa = project_out(a_j, basis);
    const double na = arma::norm(pa);
    if (na <= 1e-9 * arma::norm(a_j)) {
      throw DegenerateVoxel(j + 1, "coordinated_precoder: voxel " + std::to_string(q + 1) +
                                       " direction lies inside the nulled subspace of AP " +
                                       std::to_string(j + 1));
    }
    sol.w[j] = std::sqrt(p_sense) * pa / na;
    combined += arma::cdot(a_j, sol.w[j]);  // = sqrt(p_sense) * ||pa||, real >= 0

    sol.residuals.power_slack = std::max(
        sol.residuals.power_slack, std::abs(sol.sensing_power(j) + rho_mw - p_max_mw));
    sol.residuals.ssb_overlap =
        std::max(sol.residuals.ssb_overlap, std::abs(arma::cdot(sol.w[j], f_conj)));
    if (dl_mask) {
      const arma::cx_vec hd_conj =
          arma::conj(upa_steering(channels.direct[j].departure_azimuth, 0.0, scene.geom));
      sol.residuals.direct_overlap =
          std::max(sol.residuals.direct_overlap, std::abs(arma::cdot(sol.w[j], hd_conj)));
    }
  }
  sol.objective = objective_from_terms(combined, channels, sol.rho);
  return sol;
}

PrecoderSolution noncoordinated_precoder(const Scene& scene, const ChannelSet& channels, int q,
                                         double rho_mw, double p_max_mw) {
  if (rho_mw > p_max_mw) {
    throw InfeasibleError(InfeasibleError::Reason::kPowerLimited,
                          "noncoordinated_precoder: rho exceeds P_max");
  }
  const int j_count = scene.illuminator_count();
  const int m = scene.geom.size();
  const double p_sense = p_max_mw - rho_mw;  // identical rho_tilde for fairness
  const double lambda = kSpeedOfLight / scene.carrier_hz;

  const BistaticAngles& arr = channels.bistatic[q][0].angles;
  const arma::cx_vec v =
      upa_steering(arr.theta_arr, arr.phi_arr, scene.geom) / std::sqrt(static_cast<double>(m));
  const arma::cx_vec f_conj = scene.ssb_precoder_conj(q);

  PrecoderSolution sol;
  sol.method = PrecoderMethod::kNonCoordinated;
  sol.dl_masked = true;  // the null space always contains the direct-link vector
  sol.rho = arma::vec(j_count, arma::fill::value(rho_mw));
  sol.w.resize(j_count);

  const double l_ref = channels.bistatic[q][0].angles.range_dep;  // AP_1 reference
  std::complex<double> combined = 0.0;
  for (int j = 0; j < j_count; ++j) {
    const BistaticChannel& ch = channels.bistatic[q][j];
    const arma::cx_vec h_dep = upa_steering(ch.angles.theta_dep, ch.angles.phi_dep, scene.geom);
    const arma::cx_vec hd_conj =
        arma::conj(upa_steering(channels.direct[j].departure_azimuth, 0.0, scene.geom));

    arma::cx_mat u_mat(m, 2);
    u_mat.col(0) = hd_conj / std::sqrt(static_cast<double>(m));
    u_mat.col(1) = f_conj;

    const arma::cx_mat gram = u_mat.t() * u_mat;
    arma::cx_vec w_tilde;
    if (arma::rcond(gram) < 1e-12) {
      static std::atomic<unsigned> warned{0};
      const unsigned bit = 1u << (j & 31);
      if (!(warned.fetch_or(bit) & bit)) {
        std::cerr << "isacsim: noncoordinated_precoder: U_j rank-deficient at AP " << (j + 1)
                  << ", falling back to pseudo-inverse (warning repeated per AP only once)\n";
      }
      sol.pinv_fallback = true;
      w_tilde = h_dep - u_mat * (arma::pinv(gram) * (u_mat.t() * h_dep));
    } else {
      w_tilde = h_dep - u_mat * arma::solve(gram, u_mat.t() * h_dep);
    }
    const double n = arma::norm(w_tilde);
    if (n <= 1e-12 * arma::norm(h_dep)) {
      throw DegenerateVoxel(j + 1, "noncoordinated_precoder: projected steering vector vanished");
    }

    // Reduced form Eq.-(20) style (U treated as orthonormal); logged as a
    // diagnostic against the exact projector.
    const arma::cx_vec w_reduced = h_dep - u_mat * (u_mat.t() * h_dep);
    const double n_red = arma::norm(w_reduced);
    if (n_red > 0.0) {
      sol.residuals.reduced_form_gap = std::max(
          sol.residuals.reduced_form_gap, arma::norm(w_tilde / n - w_reduced / n_red));
    }

    const double phase_cycles = (ch.angles.range_dep - l_ref) / lambda;
    const std::complex<double> rot =
        std::exp(std::complex<double>(0.0, 2.0 * M_PI * phase_cycles));
    sol.w[j] = rot * std::sqrt(p_sense) * w_tilde / n;

    const arma::cx_vec a_j = ch.matrix.t() * v;
    combined += arma::cdot(a_j, sol.w[j]);

    sol.residuals.power_slack = std::max(
        sol.residuals.power_slack, std::abs(sol.sensing_power(j) + rho_mw - p_max_mw));
    sol.residuals.ssb_overlap =
        std::max(sol.residuals.ssb_overlap, std::abs(arma::cdot(sol.w[j], f_conj)));
    sol.residuals.direct_overlap =
        std::max(sol.residuals.direct_overlap, std::abs(arma::cdot(sol.w[j], hd_conj)));
  }
  sol.objective = objective_from_terms(combined, channels, sol.rho);
  return sol;
}

std::vector<arma::cx_vec> extract_rank1(const arma::cx_mat& W, const arma::vec& rho,
                                        double p_max_mw) {
  const int j_count = static_cast<int>(rho.n_elem);
  const int m = static_cast<int>(W.n_rows) / j_count;
  if (arma::norm(W, "fro") < 1e-300) {
    throw ContractError("extract_rank1: W is numerically zero (degenerate solution)");
  }
  arma::vec eigval;
  arma::cx_mat eigvec;
  if (!arma::eig_sym(eigval, eigvec, arma::cx_mat(0.5 * (W + W.t())))) {
    throw ContractError("extract_rank1: eigendecomposition failed");
  }
  arma::cx_vec z = eigvec.col(eigvec.n_cols - 1);  // dominant (ascending order)

  // Deterministic output: first nonzero entry made real-positive.
  for (arma::uword i = 0; i < z.n_elem; ++i) {
    if (std::abs(z(i)) > 1e-12) {
      z *= std::conj(z(i)) / std::abs(z(i));
      break;
    }
  }

  std::vector<arma::cx_vec> w(j_count);
  for (int j = 0; j < j_count; ++j) {
    w[j] = std::sqrt(p_max_mw - rho(j)) * z.subvec(j * m, (j + 1) * m - 1);
  }
  return w;
}

}  // namespace isacsim

// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "isacsim/errors.hpp"
#include "isacsim/precoder.hpp"

namespace isacsim {
namespace {

struct ReducedProblem {
  arma::cx_vec a_hat;           // stacked B_j^H a_j
  std::vector<arma::cx_mat> basis;  // B_j, M x d_j
  std::vector<int> offset;      // block offsets in the reduced space
  std::vector<int> dim;         // d_j
  int total = 0;
  double p_sense = 0.0;
  double xi = 0.0;
  double sigma_rcs2 = 0.0;
};

// Feasibility of (15b)-(15f) at objective level tau = t*xi/sigma_rcs^2 via
// cyclic projections: objective hyperplane, per-AP power halfspaces, PSD cone
// (eigenvalue clipping). Orthogonality constraints hold by construction in
// the reduced coordinates.
bool feasibility_probe(const ReducedProblem& prob, double tau, const SdrOptions& opts,
                       arma::cx_mat& W, double& obj_resid, double& pow_resid) {
  const int d = prob.total;
  const double a4 = std::pow(arma::norm(prob.a_hat), 4);
  const double tol_obj = opts.residual_tol * std::max(tau, 1e-30);
  const double tol_pow = opts.residual_tol * std::max(prob.p_sense, 1e-30);

  arma::cx_mat prev = W;
  const int check_every = 25;
  const double relax = opts.relaxation;
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    // objective hyperplane Re(a^H W a) >= tau (over-relaxed)
    const double c = std::real(arma::cdot(prob.a_hat, W * prob.a_hat));
    if (c < tau && a4 > 0.0) {
      W += relax * ((tau - c) / a4) * (prob.a_hat * prob.a_hat.t());
    }
    // per-AP trace halfspaces (over-relaxed)
    for (std::size_t j = 0; j < prob.dim.size(); ++j) {
      const int o = prob.offset[j];
      const int dj = prob.dim[j];
      double tr = 0.0;
      for (int i = 0; i < dj; ++i) tr += std::real(W(o + i, o + i));
      if (tr > prob.p_sense) {
        const double shift = relax * (tr - prob.p_sense) / dj;
        for (int i = 0; i < dj; ++i) W(o + i, o + i) -= shift;
      }
    }
    // PSD cone
    arma::vec ev;
    arma::cx_mat evec;
    arma::eig_sym(ev, evec, arma::cx_mat(0.5 * (W + W.t())));
    arma::vec clipped = arma::clamp(ev, 0.0, arma::datum::inf);
    W = evec * arma::diagmat(clipped) * evec.t();

    if (iter % check_every == 0 || iter == opts.max_iterations) {
      const double c2 = std::real(arma::cdot(prob.a_hat, W * prob.a_hat));
      obj_resid = std::max(0.0, tau - c2);
      pow_resid = 0.0;
      for (std::size_t j = 0; j < prob.dim.size(); ++j) {
        const int o = prob.offset[j];
        double tr = 0.0;
        for (int i = 0; i < prob.dim[j]; ++i) tr += std::real(W(o + i, o + i));
        pow_resid = std::max(pow_resid, tr - prob.p_sense);
      }
      if (obj_resid <= tol_obj && pow_resid <= tol_pow) return true;
      // Stalled displacement with residuals still open: treat as infeasible.
      const double step = arma::norm(W - prev, "fro");
      if (step < 1e-14 * std::max(1.0, arma::norm(W, "fro"))) return false;
      prev = W;
    }
  }
  (void)d;
  return false;
}

}  // namespace

SdrSolution sdr_bisection_solver(const Scene& scene, const ChannelSet& channels, int q,
                                 double rho_mw, double p_max_mw, bool dl_mask,
                                 const SdrOptions& opts) {
  if (rho_mw > p_max_mw) {
    throw InfeasibleError(InfeasibleError::Reason::kPowerLimited,
                          "sdr_bisection_solver: rho exceeds P_max");
  }
  const int j_count = scene.illuminator_count();
  const int m = scene.geom.size();

  ReducedProblem prob;
  prob.p_sense = p_max_mw - rho_mw;
  prob.sigma_rcs2 = channels.rcs.variance;
  prob.xi = channels.noise.clutter_variance * j_count * rho_mw + channels.noise.noise_variance;

  const BistaticAngles& arr = channels.bistatic[q][0].angles;
  const arma::cx_vec v =
      upa_steering(arr.theta_arr, arr.phi_arr, scene.geom) / std::sqrt(static_cast<double>(m));
  const arma::cx_vec f_conj = scene.ssb_precoder_conj(q);

  std::vector<arma::cx_vec> a_blocks(j_count);
  double a_norm_sum = 0.0;
  for (int j = 0; j < j_count; ++j) {
    a_blocks[j] = channels.bistatic[q][j].matrix.t() * v;
    a_norm_sum += arma::norm(a_blocks[j]);

    arma::cx_mat null_mat(m, dl_mask ? 2 : 1);
    null_mat.col(0) = f_conj;
    if (dl_mask) {
      null_mat.col(1) =
          arma::conj(upa_steering(channels.direct[j].departure_azimuth, 0.0, scene.geom));
    }
    arma::cx_mat qd, rd;
    arma::qr_econ(qd, rd, null_mat);
    const arma::uvec keep = arma::find(arma::abs(rd.diag()) > 1e-12 * arma::abs(rd).max());
    const arma::cx_mat null_basis = qd.cols(keep);

    // Complement basis: eigenvectors of (I - N N^H) with unit eigenvalue.
    arma::cx_mat proj = arma::eye<arma::cx_mat>(m, m) - null_basis * null_basis.t();
    arma::vec ev;
    arma::cx_mat evec;
    arma::eig_sym(ev, evec, arma::cx_mat(0.5 * (proj + proj.t())));
    const arma::uvec keep2 = arma::find(ev > 0.5);
    prob.basis.push_back(evec.cols(keep2));
    prob.offset.push_back(prob.total);
    prob.dim.push_back(static_cast<int>(keep2.n_elem));
    prob.total += static_cast<int>(keep2.n_elem);
  }
  prob.a_hat.set_size(prob.total);
  for (int j = 0; j < j_count; ++j) {
    prob.a_hat.subvec(prob.offset[j], prob.offset[j] + prob.dim[j] - 1) =
        prob.basis[j].t() * a_blocks[j];
  }

  SdrSolution sol;
  sol.rho = arma::vec(j_count, arma::fill::value(rho_mw));

  // Cauchy-Schwarz bracket: |a^H w|^2 <= (sum_j ||a_j|| sqrt(P_s))^2.
  double t_hi = opts.t_bracket_high > 0.0
                    ? opts.t_bracket_high
                    : prob.sigma_rcs2 * std::pow(a_norm_sum, 2) * prob.p_sense / prob.xi * 1.0001;
  double t_lo = std::max(0.0, opts.t_bracket_low);
  if (t_hi <= t_lo) {
    throw ContractError("sdr_bisection_solver: invalid bisection bracket");
  }

  arma::cx_mat W_work(prob.total, prob.total, arma::fill::zeros);
  arma::cx_mat W_best = W_work;
  bool any_feasible = false;
  double best_obj_resid = 0.0;
  double best_pow_resid = 0.0;

  const auto tau_of = [&](double t) { return t * prob.xi / prob.sigma_rcs2; };

  // t = t_lo (typically 0) is trivially feasible with W = 0.
  {
    double obj_r = 0.0, pow_r = 0.0;
    if (feasibility_probe(prob, tau_of(t_lo), opts, W_work, obj_r, pow_r)) {
      any_feasible = true;
      W_best = W_work;
      best_obj_resid = obj_r;
      best_pow_resid = pow_r;
    }
  }

  int steps = 0;
  while (t_hi - t_lo > opts.bisect_rel_tol * std::max(t_hi, 1e-30) && steps < 80) {
    const double t_mid = 0.5 * (t_lo + t_hi);
    arma::cx_mat W_probe = W_best;  // warm start from the last feasible point
    double obj_r = 0.0, pow_r = 0.0;
    if (feasibility_probe(prob, tau_of(t_mid), opts, W_probe, obj_r, pow_r)) {
      t_lo = t_mid;
      W_best = W_probe;
      any_feasible = true;
      best_obj_resid = obj_r;
      best_pow_resid = pow_r;
    } else {
      t_hi = t_mid;
    }
    ++steps;
  }

  sol.bisection_steps = steps;
  sol.converged = any_feasible && steps > 0;
  sol.objective = t_lo;
  sol.message = any_feasible ? "ok" : "feasibility solver failed at every probed level";

  // Lift back to the full space: W = B W_hat B^H, blockwise.
  sol.W.set_size(j_count * m, j_count * m);
  sol.W.zeros();
  for (int j = 0; j < j_count; ++j) {
    for (int k = 0; k < j_count; ++k) {
      sol.W.submat(j * m, k * m, (j + 1) * m - 1, (k + 1) * m - 1) =
          prob.basis[j] *
          W_best.submat(prob.offset[j], prob.offset[k], prob.offset[j] + prob.dim[j] - 1,
                        prob.offset[k] + prob.dim[k] - 1) *
          prob.basis[k].t();
    }
  }

  sol.objective_residual = best_obj_resid;
  sol.power_residual = best_pow_resid;

  arma::vec ev;
  arma::eig_sym(ev, arma::cx_mat(0.5 * (sol.W + sol.W.t())));
  sol.psd_residual = std::max(0.0, -ev.min());
  const double e1 = ev(ev.n_elem - 1);
  const double e2 = ev.n_elem > 1 ? std::max(ev(ev.n_elem - 2), 0.0) : 0.0;
  sol.eig_ratio = e2 > 0.0 ? e1 / e2 : std::numeric_limits<double>::infinity();

  double ortho = 0.0;
  for (int j = 0; j < j_count; ++j) {
    const arma::cx_mat w_jj =
        sol.W.submat(j * m, j * m, (j + 1) * m - 1, (j + 1) * m - 1);
    ortho = std::max(ortho, std::abs(arma::cdot(f_conj, w_jj * f_conj)));
    if (dl_mask) {
      const arma::cx_vec hd_conj =
          arma::conj(upa_steering(channels.direct[j].departure_azimuth, 0.0, scene.geom));
      ortho = std::max(ortho, std::abs(arma::cdot(hd_conj, w_jj * hd_conj)));
    }
  }
  sol.orthogonality_residual = ortho;
  return sol;
}

}  // namespace isacsim

// SPDX-License-Identifier: Apache-2.0
#include "isacsim/detector.hpp"

#include <cmath>
#include <limits>

#include "isacsim/errors.hpp"

namespace isacsim {

double HypothesisModel::effective_snr() const {
  if (!rank1) throw ContractError("effective_snr: Phi is not rank 1");
  return sigma2_rcs * phi_trace / sigma2;
}

HypothesisModel sensing_covariance(const Scene& scene, const ChannelSet& channels,
                                   const PrecoderSolution& sol, int q) {
  const int m = scene.geom.size();
  HypothesisModel model;
  model.phi.set_size(m, m);
  model.phi.zeros();
  for (int j = 0; j < scene.illuminator_count(); ++j) {
    const arma::cx_vec hw = channels.bistatic[q][j].matrix * sol.w[j];
    model.phi += hw * hw.t();
  }
  model.sigma2 = channels.noise.noise_variance +
                 channels.noise.clutter_variance * arma::accu(sol.rho);
  model.sigma2_rcs = channels.rcs.variance;
  model.phi_trace = std::real(arma::trace(model.phi));

  arma::vec ev;
  arma::cx_mat evec;
  arma::eig_sym(ev, evec, arma::cx_mat(0.5 * (model.phi + model.phi.t())));
  const double e1 = std::max(ev(ev.n_elem - 1), 0.0);
  const double e2 = ev.n_elem > 1 ? std::max(ev(ev.n_elem - 2), 0.0) : 0.0;
  model.dominant = evec.col(evec.n_cols - 1);
  for (arma::uword i = 0; i < model.dominant.n_elem; ++i) {
    if (std::abs(model.dominant(i)) > 1e-12) {
      model.dominant *= std::conj(model.dominant(i)) / std::abs(model.dominant(i));
      break;
    }
  }
  model.eig_ratio = e2 > 0.0 ? e1 / e2 : std::numeric_limits<double>::infinity();
  model.rank1 = e1 == 0.0 || e2 / std::max(e1, 1e-300) < 1e-10;
  return model;
}

namespace {

// ln(sigma^{2M} / det C) = -ln det(I + (sigma_rcs^2/sigma^2) Phi).
double log_det_ratio(const HypothesisModel& model) {
  if (model.rank1) {
    return -std::log1p(model.sigma2_rcs * model.phi_trace / model.sigma2);
  }
  const arma::uword m = model.phi.n_rows;
  const arma::cx_mat a =
      arma::eye<arma::cx_mat>(m, m) + (model.sigma2_rcs / model.sigma2) * model.phi;
  const std::complex<double> ld = arma::log_det(a);
  return -std::real(ld);
}

}  // namespace

double llr(const arma::cx_vec& y, const HypothesisModel& model) {
  return log_det_ratio(model) + test_statistic(y, model);
}

double test_statistic(const arma::cx_vec& y, const HypothesisModel& model) {
  if (model.phi_trace == 0.0) return 0.0;
  if (model.rank1) {
    // Sherman-Morrison on C = sigma^2 I + b u u^H with b = sigma_rcs^2 tr(Phi):
    // sigma^{-2} I - C^{-1} = [b / (sigma^2 (sigma^2 + b))] u u^H.
    const double b = model.sigma2_rcs * model.phi_trace;
    const double kappa = b / (model.sigma2 * (model.sigma2 + b));
    return kappa * std::norm(arma::cdot(model.dominant, y));
  }
  return test_statistic_dense(y, model);
}

double test_statistic_dense(const arma::cx_vec& y, const HypothesisModel& model) {
  const arma::uword m = model.phi.n_rows;
  const arma::cx_mat c =
      model.sigma2 * arma::eye<arma::cx_mat>(m, m) + model.sigma2_rcs * model.phi;
  const arma::cx_vec ci_y = arma::solve(c, y, arma::solve_opts::likely_sympd);
  return std::real(arma::cdot(y, y)) / model.sigma2 - std::real(arma::cdot(y, ci_y));
}

double roc_analytic_pd(double pfa, double effective_snr) {
  if (pfa <= 0.0 || pfa > 1.0) throw ContractError("roc_analytic_pd: pfa outside (0, 1]");
  if (effective_snr < 0.0) throw ContractError("roc_analytic_pd: negative effective SNR");
  return std::pow(pfa, 1.0 / (1.0 + effective_snr));
}

double roc_threshold_for_pfa(double pfa, const HypothesisModel& model) {
  // Under H0, |u^H y|^2 ~ Exp(mean sigma^2), so T = kappa |u^H y|^2 gives
  // Pfa = exp(-gamma / (kappa sigma^2)).
  const double b = model.sigma2_rcs * model.phi_trace;
  if (!(model.rank1) || b <= 0.0) {
    throw ContractError("roc_threshold_for_pfa: requires a rank-1 model with Phi != 0");
  }
  const double kappa = b / (model.sigma2 * (model.sigma2 + b));
  return -kappa * model.sigma2 * std::log(pfa);
}

namespace {

void wilson(double k, double n, double& lo, double& hi) {
  const double z = 1.959963984540054;  // 95%
  const double p = k / n;
  const double z2n = z * z / n;
  const double center = (p + z2n / 2.0) / (1.0 + z2n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / (1.0 + z2n);
  lo = std::max(0.0, center - half);
  hi = std::min(1.0, center + half);
}

}  // namespace

std::vector<RocPoint> roc_mc(const HypothesisModel& model, long trials,
                             const std::vector<double>& thresholds, Rng rng) {
  const arma::uword m = model.phi.n_rows;
  const double b = model.sigma2_rcs * model.phi_trace;

  // Shaping factors of x_s ~ CN(0, sigma_rcs^2 Phi), precomputed once.
  arma::vec shape_var;
  arma::cx_mat shape_vec;
  if (!model.rank1) {
    arma::eig_sym(shape_var, shape_vec, arma::cx_mat(0.5 * (model.phi + model.phi.t())));
    shape_var = arma::clamp(shape_var, 0.0, arma::datum::inf) * model.sigma2_rcs;
  }

  std::vector<double> t0(trials), t1(trials);
  Rng rng_h0 = rng.fork(0);
  Rng rng_h1 = rng.fork(1);
  arma::cx_vec y(m);
  for (long i = 0; i < trials; ++i) {
    Rng tr = rng_h0.fork(static_cast<std::uint64_t>(i));
    for (arma::uword k = 0; k < m; ++k) y(k) = tr.cnormal(model.sigma2);
    t0[i] = test_statistic(y, model);
  }
  for (long i = 0; i < trials; ++i) {
    Rng tr = rng_h1.fork(static_cast<std::uint64_t>(i));
    for (arma::uword k = 0; k < m; ++k) y(k) = tr.cnormal(model.sigma2);
    if (model.rank1) {
      y += model.dominant * tr.cnormal(b);
    } else {
      for (arma::uword k = 0; k < m; ++k) {
        if (shape_var(k) > 0.0) y += shape_vec.col(k) * tr.cnormal(shape_var(k));
      }
    }
    t1[i] = test_statistic(y, model);
  }

  std::vector<RocPoint> out;
  out.reserve(thresholds.size());
  const double n = static_cast<double>(trials);
  for (double th : thresholds) {
    RocPoint pt;
    pt.threshold = th;
    long k_fa = 0, k_d = 0;
    for (long i = 0; i < trials; ++i) {
      if (t0[i] > th) ++k_fa;
      if (t1[i] > th) ++k_d;
    }
    pt.pfa = k_fa / n;
    pt.pd = k_d / n;
    wilson(static_cast<double>(k_fa), n, pt.pfa_lo, pt.pfa_hi);
    wilson(static_cast<double>(k_d), n, pt.pd_lo, pt.pd_hi);
    out.push_back(pt);
  }
  return out;
}

}  // namespace isacsim

// SPDX-License-Identifier: Apache-2.0
#include "isacsim/metrics.hpp"

#include <cmath>

#include "isacsim/errors.hpp"

namespace isacsim {

arma::cx_vec combining_vector(const Vec3& voxel, const ApNode& rx, const ArrayGeometry& geom) {
  const Vec3 d = rx.position - voxel;
  const double l = arma::norm(d);
  if (l < 1e-9) throw GeometryError("combining_vector: voxel coincides with the receiver");
  const double theta = std::atan2(d(1), d(0));
  const double phi = std::asin(d(2) / l);
  return upa_steering(theta, phi, geom) / std::sqrt(static_cast<double>(geom.size()));
}

namespace {

// Per-AP combined scalars of one symbol: m_j = v^H H_{j,q} w_j plus the
// direct-link couplings v^H H_{0,j} w_j and v^H H_{0,j} f*_q.
struct CombinedScalars {
  arma::cx_vec m;         // J
  arma::cx_vec direct_w;  // J
  arma::cx_vec direct_f;  // J
  double xi = 0.0;        // beta_g sum rho + sigma_n^2
};

CombinedScalars combine(const Scene& scene, const ChannelSet& channels,
                        const PrecoderSolution& sol, int q) {
  const int j_count = scene.illuminator_count();
  const arma::cx_vec v =
      combining_vector(scene.grid.centers[q], scene.receiver, scene.geom);
  const arma::cx_vec f_conj = scene.ssb_precoder_conj(q);
  CombinedScalars out;
  out.m.set_size(j_count);
  out.direct_w.set_size(j_count);
  out.direct_f.set_size(j_count);
  for (int j = 0; j < j_count; ++j) {
    out.m(j) = arma::cdot(v, channels.bistatic[q][j].matrix * sol.w[j]);
    out.direct_w(j) = arma::cdot(v, channels.direct[j].matrix * sol.w[j]);
    out.direct_f(j) = arma::cdot(v, channels.direct[j].matrix * f_conj);
  }
  out.xi = channels.noise.clutter_variance * arma::accu(sol.rho) +
           channels.noise.noise_variance;
  return out;
}

}  // namespace

double sensing_sinr_analytic(const Scene& scene, const ChannelSet& channels,
                             const PrecoderSolution& sol, int q) {
  const CombinedScalars s = combine(scene, channels, sol, q);
  return channels.rcs.variance * std::norm(arma::accu(s.m)) / s.xi;
}

McEstimate sensing_sinr_mc(const Scene& scene, const ChannelSet& channels,
                           const PrecoderSolution& sol, int q, bool include_direct, long trials,
                           Rng rng) {
  const CombinedScalars s = combine(scene, channels, sol, q);
  const int j_count = scene.illuminator_count();
  const std::complex<double> m_total = arma::accu(s.m);

  double sum_n = 0.0, sum_d = 0.0;
  double ss_n = 0.0, ss_d = 0.0, ss_nd = 0.0;
  for (long i = 0; i < trials; ++i) {
    Rng tr = rng.fork(static_cast<std::uint64_t>(i));
    const std::complex<double> alpha = draw_rcs_common(channels.rcs, tr);
    const std::complex<double> sym = tr.unit_symbol();

    const double num = std::norm(sym * alpha * m_total);

    std::complex<double> den_amp = 0.0;
    for (int j = 0; j < j_count; ++j) {
      const std::complex<double> c = tr.unit_symbol();
      // v^H G_j f*_q ~ CN(0, beta_g) for unit-norm v and f*_q.
      const std::complex<double> g = tr.cnormal(channels.noise.clutter_variance);
      den_amp += std::sqrt(sol.rho(j)) * c * g;
      if (include_direct) {
        den_amp += sym * s.direct_w(j) + std::sqrt(sol.rho(j)) * c * s.direct_f(j);
      }
    }
    den_amp += tr.cnormal(channels.noise.noise_variance);
    const double den = std::norm(den_amp);

    sum_n += num;
    sum_d += den;
    ss_n += num * num;
    ss_d += den * den;
    ss_nd += num * den;
  }

  const double n = static_cast<double>(trials);
  const double mean_n = sum_n / n;
  const double mean_d = sum_d / n;
  McEstimate est;
  est.trials = trials;
  est.value = mean_n / mean_d;
  // Delta method for the ratio of sample means, covariance included.
  const double var_n = std::max(0.0, ss_n / n - mean_n * mean_n);
  const double var_d = std::max(0.0, ss_d / n - mean_d * mean_d);
  const double cov = ss_nd / n - mean_n * mean_d;
  const double rel_var = var_n / (mean_n * mean_n) + var_d / (mean_d * mean_d) -
                         2.0 * cov / (mean_n * mean_d);
  est.std_error = std::abs(est.value) * std::sqrt(std::max(0.0, rel_var) / n);
  return est;
}

double user_sinr(const UeScenario& ue, double rho_mw) {
  const double den = rho_mw * ue.interferer_beta_sum() + ue.noise_variance;
  if (den <= 0.0) {
    throw ContractError("user_sinr: zero denominator (no interferers and no noise)");
  }
  return rho_mw * ue.serving_beta() / den;
}

double user_sinr_full(const UeScenario& ue, double rho_mw,
                      const std::vector<double>& sensing_power_per_ap,
                      const std::vector<double>& ap_distances) {
  if (sensing_power_per_ap.size() != ap_distances.size()) {
    throw ContractError("user_sinr_full: per-AP power/distance size mismatch");
  }
  double leakage = 0.0;
  for (std::size_t k = 0; k < ap_distances.size(); ++k) {
    leakage += sensing_power_per_ap[k] / (ap_distances[k] * ap_distances[k]);
  }
  const double den = rho_mw * ue.interferer_beta_sum() + leakage + ue.noise_variance;
  if (den <= 0.0) {
    throw ContractError("user_sinr_full: zero denominator");
  }
  return rho_mw * ue.serving_beta() / den;
}

double volume_average(const std::vector<double>& per_voxel, const std::vector<bool>* degenerate) {
  double sum = 0.0;
  long count = 0;
  for (std::size_t q = 0; q < per_voxel.size(); ++q) {
    if (degenerate != nullptr && q < degenerate->size() && (*degenerate)[q]) continue;
    sum += per_voxel[q];
    ++count;
  }
  if (count == 0) throw ContractError("volume_average: every voxel is degenerate");
  return sum / count;
}

std::vector<double> sinr_cdf_samples(const Scene& scene, const ChannelSet& channels,
                                     const PrecoderSolution& sol, int q, const RcsModel& rcs,
                                     long trials, Rng rng) {
  const CombinedScalars s = combine(scene, channels, sol, q);
  const double kernel = std::norm(arma::accu(s.m)) / s.xi;
  std::vector<double> samples;
  samples.reserve(trials);
  for (long i = 0; i < trials; ++i) {
    Rng tr = rng.fork(static_cast<std::uint64_t>(i));
    const std::complex<double> alpha = draw_rcs_common(rcs, tr);
    samples.push_back(std::norm(alpha) * kernel);
  }
  return samples;
}

}  // namespace isacsim

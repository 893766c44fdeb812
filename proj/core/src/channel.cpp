// SPDX-License-Identifier: Apache-2.0
#include "isacsim/channel.hpp"

#include <cmath>

#include "isacsim/errors.hpp"
#include "isacsim/units.hpp"

namespace isacsim {

RcsModel RcsModel::swerling2(double variance) {
  RcsModel m;
  m.kind = Kind::kSwerling2;
  m.variance = variance;
  return m;
}

RcsModel RcsModel::weibull_matched(double shape, double mean_power) {
  if (shape <= 0.0) throw ConfigError("weibull rcs: shape must be positive");
  RcsModel m;
  m.kind = Kind::kWeibull;
  m.variance = mean_power;
  m.shape = shape;
  // E[Weibull(k, lambda)] = lambda * Gamma(1 + 1/k)
  m.scale = mean_power / std::tgamma(1.0 + 1.0 / shape);
  return m;
}

BistaticChannel sensing_channel(const ApNode& ap, const Vec3& voxel, const ApNode& rx,
                                double carrier_hz, const ArrayGeometry& geom) {
  BistaticChannel ch;
  ch.angles = bistatic_angles(ap.position, voxel, rx.position);
  const double l_dep = ch.angles.range_dep;
  const double l_arr = ch.angles.range_arr;
  ch.gain = 1.0 / (l_dep * l_dep * l_arr * l_arr);
  ch.delay = (l_dep + l_arr) / kSpeedOfLight;
  const arma::cx_vec h_dep = upa_steering(ch.angles.theta_dep, ch.angles.phi_dep, geom);
  const arma::cx_vec h_arr = upa_steering(ch.angles.theta_arr, ch.angles.phi_arr, geom);
  const std::complex<double> phase =
      std::exp(std::complex<double>(0.0, -2.0 * M_PI * carrier_hz * ch.delay));
  ch.matrix = std::sqrt(ch.gain) * phase * (h_arr * h_dep.st());
  return ch;
}

DirectChannel direct_channel(const ApNode& ap, const ApNode& rx, double carrier_hz,
                             const ArrayGeometry& geom) {
  const Vec3 d = rx.position - ap.position;
  const double l = arma::norm(d);
  if (l < 1e-9) throw GeometryError("direct_channel: AP coincides with the receiver");
  DirectChannel ch;
  ch.departure_azimuth = std::atan2(d(1), d(0));
  ch.gain = 1.0 / (l * l);
  ch.delay = l / kSpeedOfLight;
  const arma::cx_vec h_d = upa_steering(ch.departure_azimuth, 0.0, geom);
  const arma::cx_vec h_a = upa_steering(ch.departure_azimuth + M_PI, 0.0, geom);
  const std::complex<double> phase =
      std::exp(std::complex<double>(0.0, -2.0 * M_PI * carrier_hz * ch.delay));
  ch.matrix = std::sqrt(ch.gain) * phase * (h_a * h_d.st());
  return ch;
}

arma::cx_vec draw_rcs(const RcsModel& model, int count, Rng& rng) {
  arma::cx_vec alpha(count);
  for (int j = 0; j < count; ++j) alpha(j) = draw_rcs_common(model, rng);
  return alpha;
}

std::complex<double> draw_rcs_common(const RcsModel& model, Rng& rng) {
  switch (model.kind) {
    case RcsModel::Kind::kSwerling2:
      return rng.cnormal(model.variance);
    case RcsModel::Kind::kWeibull: {
      // |alpha|^2 ~ Weibull(shape, scale), phase uniform.
      const double power = model.scale * std::pow(-std::log(rng.uniform()), 1.0 / model.shape);
      return std::sqrt(power) * rng.unit_symbol();
    }
  }
  return {};
}

ChannelSet build_channel_set(const Scene& scene, const StochasticParams& noise,
                             const RcsModel& rcs) {
  ChannelSet set;
  set.noise = noise;
  set.rcs = rcs;
  set.bistatic.resize(scene.grid.count());
  for (int q = 0; q < scene.grid.count(); ++q) {
    set.bistatic[q].reserve(scene.illuminator_count());
    for (const ApNode& ap : scene.illuminators) {
      set.bistatic[q].push_back(
          sensing_channel(ap, scene.grid.centers[q], scene.receiver, scene.carrier_hz, scene.geom));
    }
  }
  set.direct.reserve(scene.illuminator_count());
  for (const ApNode& ap : scene.illuminators) {
    set.direct.push_back(direct_channel(ap, scene.receiver, scene.carrier_hz, scene.geom));
  }
  return set;
}

std::vector<arma::cx_vec> assemble_tx(const TxInputs& tx, double p_max_mw) {
  const int j_count = static_cast<int>(tx.precoders.size());
  std::vector<arma::cx_vec> x;
  x.reserve(j_count);
  for (int j = 0; j < j_count; ++j) {
    const double used = std::pow(arma::norm(tx.precoders[j]), 2) + tx.ssb_power(j);
    if (used > p_max_mw + 1e-9) {
      throw ContractError("assemble_tx: AP " + std::to_string(j + 1) +
                          " exceeds the power budget");
    }
    x.push_back(tx.sensing_symbol * tx.precoders[j] +
                std::sqrt(tx.ssb_power(j)) * tx.ssb_symbols(j) * tx.ssb_precoder_conj);
  }
  return x;
}

arma::cx_vec simulate_rx(const Scene& scene, const ChannelSet& channels, int q,
                         const TxInputs& tx, int eta, bool include_direct, Rng& rng) {
  const int m = scene.geom.size();
  const int j_count = scene.illuminator_count();
  arma::cx_vec y(m, arma::fill::zeros);

  // Sensing echoes: one reflection coefficient per symbol, shared across paths.
  if (eta != 0) {
    const std::complex<double> alpha = draw_rcs_common(channels.rcs, rng);
    for (int j = 0; j < j_count; ++j) {
      y += alpha * tx.sensing_symbol * (channels.bistatic[q][j].matrix * tx.precoders[j]);
    }
  }

  // SSB ground-clutter echoes: G_j f*_q ~ CN(0, beta_g I).
  if (channels.noise.clutter_variance > 0.0) {
    for (int j = 0; j < j_count; ++j) {
      arma::cx_vec g(m);
      for (int i = 0; i < m; ++i) g(i) = rng.cnormal(channels.noise.clutter_variance);
      y += std::sqrt(tx.ssb_power(j)) * tx.ssb_symbols(j) * g;
    }
  }

  if (include_direct) {
    for (int j = 0; j < j_count; ++j) {
      y += channels.direct[j].matrix *
           (tx.sensing_symbol * tx.precoders[j] +
            std::sqrt(tx.ssb_power(j)) * tx.ssb_symbols(j) * tx.ssb_precoder_conj);
    }
  }

  if (channels.noise.noise_variance > 0.0) {
    for (int i = 0; i < m; ++i) y(i) += rng.cnormal(channels.noise.noise_variance);
  }
  return y;
}

}  // namespace isacsim

// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isacsim/detector.hpp"
#include "isacsim/errors.hpp"
#include "isacsim/experiments.hpp"
#include "isacsim/metrics.hpp"
#include "isacsim/rng.hpp"
#include "isacsim/units.hpp"

using namespace isacsim;

namespace {

struct Fixture {
  ScenarioConfig cfg;
  Scene scene;
  ChannelSet channels;
  PrecoderSolution sol;
  HypothesisModel model;

  explicit Fixture(double p_dbm = 30.0) {
    scene = build_scene(cfg);
    channels = build_channels(scene, cfg);
    const double p = db_to_linear(p_dbm);
    const double rho = solve_power_allocation(build_ue(cfg, cfg.gamma_req_db), p);
    sol = coordinated_precoder(scene, channels, 0, rho, p, true);
    model = sensing_covariance(scene, channels, sol, 0);
  }
};

HypothesisModel dense_random_model(int m, Rng& rng) {
  // rank-3 PSD shape; forces the dense statistic path
  arma::cx_mat b(m, 3);
  for (auto& x : b) x = rng.cnormal(1.0);
  HypothesisModel model;
  model.phi = b * b.t();
  model.sigma2 = 0.7;
  model.sigma2_rcs = 0.3;
  model.phi_trace = std::real(arma::trace(model.phi));
  arma::vec ev;
  arma::cx_mat evec;
  arma::eig_sym(ev, evec, model.phi);
  model.dominant = evec.col(m - 1);
  model.eig_ratio = ev(m - 1) / ev(m - 2);
  model.rank1 = false;
  return model;
}

}  // namespace

TEST_CASE("sensing covariance structure") {
  const Fixture f;

  SUBCASE("zero precoders give a zero covariance") {
    PrecoderSolution zero = f.sol;
    for (auto& w : zero.w) w.zeros();
    const HypothesisModel m0 = sensing_covariance(f.scene, f.channels, zero, 0);
    CHECK(m0.phi_trace == 0.0);
    arma::cx_vec y(f.scene.geom.size(), arma::fill::ones);
    CHECK(test_statistic(y, m0) == 0.0);
  }

  SUBCASE("rank one with the receive-steering eigenvector") {
    CHECK(f.model.rank1);
    CHECK(f.model.eig_ratio > 1e10);
    const arma::cx_vec v =
        combining_vector(f.scene.grid.centers[0], f.scene.receiver, f.scene.geom);
    CHECK(std::abs(std::abs(arma::cdot(f.model.dominant, v)) - 1.0) < 1e-9);
  }

  SUBCASE("single-AP trace formula") {
    ScenarioConfig c1 = f.cfg;
    c1.num_illuminators = 1;
    const Scene s1 = build_scene(c1);
    const ChannelSet ch1 = build_channels(s1, c1);
    const double p = 1000.0, rho = 70.0;
    const PrecoderSolution sol1 = coordinated_precoder(s1, ch1, 0, rho, p, true);
    const HypothesisModel m1 = sensing_covariance(s1, ch1, sol1, 0);
    const BistaticChannel& ch = ch1.bistatic[0][0];
    const arma::cx_vec h_dep = upa_steering(ch.angles.theta_dep, ch.angles.phi_dep, s1.geom);
    const std::complex<double> htw = arma::accu(h_dep % sol1.w[0]);  // h^T w
    CHECK(m1.phi_trace ==
          doctest::Approx(ch.gain * s1.geom.size() * std::norm(htw)).epsilon(1e-9));
  }
}

TEST_CASE("log-likelihood ratio and test statistic") {
  const Fixture f;
  Rng rng(77);
  const int m = f.scene.geom.size();

  SUBCASE("zero covariance gives zero LLR for every snapshot") {
    PrecoderSolution zero = f.sol;
    for (auto& w : zero.w) w.zeros();
    const HypothesisModel m0 = sensing_covariance(f.scene, f.channels, zero, 0);
    for (int k = 0; k < 5; ++k) {
      arma::cx_vec y(m);
      for (auto& x : y) x = rng.cnormal(1.0);
      CHECK(llr(y, m0) == 0.0);
    }
  }

  SUBCASE("LLR minus the constant equals the test statistic") {
    const double c = -std::log1p(f.model.effective_snr());
    for (int k = 0; k < 10; ++k) {
      arma::cx_vec y(m);
      for (auto& x : y) x = rng.cnormal(f.model.sigma2);
      CHECK(std::abs(llr(y, f.model) - c - test_statistic(y, f.model)) <
            1e-10 * std::max(1.0, std::abs(test_statistic(y, f.model))));
    }
  }

  SUBCASE("zero snapshot gives a negative constant when Phi is nonzero") {
    const arma::cx_vec y(m, arma::fill::zeros);
    CHECK(llr(y, f.model) < 0.0);
    CHECK(llr(y, f.model) == doctest::Approx(-std::log1p(f.model.effective_snr())));
  }

  SUBCASE("statistic is non-negative and vanishes orthogonally to the dominant direction") {
    arma::cx_vec y(m);
    for (auto& x : y) x = rng.cnormal(1.0);
    CHECK(test_statistic(y, f.model) >= 0.0);
    // project out the dominant direction
    arma::cx_vec y_perp = y - f.model.dominant * arma::cdot(f.model.dominant, y);
    CHECK(test_statistic(y_perp, f.model) < 1e-16 * std::max(1.0, test_statistic(y, f.model)));
  }

  SUBCASE("invariant under a unit-modulus rotation of the snapshot") {
    arma::cx_vec y(m);
    for (auto& x : y) x = rng.cnormal(1.0);
    const std::complex<double> rot = std::polar(1.0, 1.234);
    CHECK(test_statistic(rot * y, f.model) ==
          doctest::Approx(test_statistic(y, f.model)).epsilon(1e-12));
  }
}

TEST_CASE("rank-1 downdate agrees with the dense inverse at M=16") {
  ScenarioConfig cfg;
  cfg.m_v = cfg.m_h = 4;
  cfg.volume_center_x_m = -120.0;
  cfg.volume_center_y_m = -200.0;
  const Scene scene = build_scene(cfg);
  const ChannelSet channels = build_channels(scene, cfg);
  const double p = 1000.0, rho = 70.0;
  const PrecoderSolution sol = coordinated_precoder(scene, channels, 0, rho, p, true);
  const HypothesisModel model = sensing_covariance(scene, channels, sol, 0);
  REQUIRE(model.rank1);

  Rng rng(81);
  for (int k = 0; k < 20; ++k) {
    arma::cx_vec y(16);
    for (auto& x : y) x = rng.cnormal(model.sigma2);
    const double fast = test_statistic(y, model);
    const double dense = test_statistic_dense(y, model);
    CHECK(fast == doctest::Approx(dense).epsilon(1e-10));
  }
}

TEST_CASE("dense-path LLR matches a direct evaluation on a rank-3 model") {
  Rng rng(83);
  const int m = 8;
  const HypothesisModel model = dense_random_model(m, rng);
  const arma::cx_mat c_mat =
      model.sigma2 * arma::eye<arma::cx_mat>(m, m) + model.sigma2_rcs * model.phi;
  for (int k = 0; k < 5; ++k) {
    arma::cx_vec y(m);
    for (auto& x : y) x = rng.cnormal(1.0);
    const double t_direct =
        std::real(arma::cdot(y, y)) / model.sigma2 -
        std::real(arma::cdot(y, arma::cx_vec(arma::inv(c_mat) * y)));
    CHECK(test_statistic(y, model) == doctest::Approx(t_direct).epsilon(1e-10));
    const double llr_direct =
        std::real(arma::log_det(arma::cx_mat(model.sigma2 * arma::inv(c_mat)))) + t_direct;
    CHECK(llr(y, model) == doctest::Approx(llr_direct).epsilon(1e-8));
  }
}

TEST_CASE("analytic ROC formula") {
  SUBCASE("no signal means Pd equals Pfa") {
    for (double pfa : {1e-4, 1e-2, 0.3, 1.0}) {
      CHECK(roc_analytic_pd(pfa, 0.0) == doctest::Approx(pfa).epsilon(1e-12));
    }
  }
  SUBCASE("reference point at rbar = 9") {
    CHECK(roc_analytic_pd(1e-3, 9.0) == doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-12));
    CHECK(roc_analytic_pd(1e-3, 9.0) == doctest::Approx(0.501).epsilon(1e-3));
  }
  SUBCASE("out-of-range arguments rejected") {
    CHECK_THROWS_AS(roc_analytic_pd(0.0, 1.0), ContractError);
    CHECK_THROWS_AS(roc_analytic_pd(0.5, -1.0), ContractError);
  }
}

TEST_CASE("analytic ROC verified against a brute-force Monte Carlo oracle") {
  // Independent oracle: simulate the hypothesis test from raw Gaussian draws
  // (no detector code in the loop) at rbar in {1, 10}.
  Rng rng(91);
  const long n = 1000000;
  const double sigma2 = 0.37;
  for (double rbar : {1.0, 10.0}) {
    const double b = rbar * sigma2;  // sigma_rcs^2 * trace(Phi)
    // |u^H y|^2 under H0 ~ Exp(sigma2); under H1 ~ Exp(sigma2 + b)
    for (double pfa : {1e-3, 1e-2, 0.1}) {
      const double gamma_th = -sigma2 * std::log(pfa);
      long fa = 0, det = 0;
      Rng r0 = rng.fork(static_cast<std::uint64_t>(rbar * 100));
      for (long i = 0; i < n; ++i) {
        Rng tr = r0.fork(i);
        if (std::norm(tr.cnormal(sigma2)) > gamma_th) ++fa;
        if (std::norm(tr.cnormal(sigma2 + b)) > gamma_th) ++det;
      }
      const double pd_mc = static_cast<double>(det) / n;
      CHECK(std::abs(static_cast<double>(fa) / n - pfa) < 0.01);
      CHECK(std::abs(pd_mc - roc_analytic_pd(pfa, rbar)) < 0.01);
    }
  }
}

TEST_CASE("ROC Monte Carlo behavior") {
  SUBCASE("zero covariance: detection curve equals the false-alarm curve") {
    const Fixture f;
    PrecoderSolution zero = f.sol;
    for (auto& w : zero.w) w.zeros();
    const HypothesisModel m0 = sensing_covariance(f.scene, f.channels, zero, 0);
    const auto pts = roc_mc(m0, 2000, {-1.0, 0.0, 1.0}, Rng(4));
    for (const auto& p : pts) CHECK(p.pd == p.pfa);
  }

  SUBCASE("H0 statistic is exponential (Kolmogorov-Smirnov at the 1% level)") {
    ScenarioConfig cfg;
    cfg.m_v = cfg.m_h = 4;
    cfg.volume_center_x_m = -120.0;
    cfg.volume_center_y_m = -200.0;
    const Scene scene = build_scene(cfg);
    const ChannelSet channels = build_channels(scene, cfg);
    const double p = 1000.0, rho = 70.0;
    const PrecoderSolution sol = coordinated_precoder(scene, channels, 0, rho, p, true);
    const HypothesisModel model = sensing_covariance(scene, channels, sol, 0);

    const long n = 100000;
    std::vector<double> u2(n);
    Rng rng(7);
    arma::cx_vec y(scene.geom.size());
    for (long i = 0; i < n; ++i) {
      Rng tr = rng.fork(i);
      for (auto& x : y) x = tr.cnormal(model.sigma2);
      u2[i] = std::norm(arma::cdot(model.dominant, y)) / model.sigma2;
    }
    std::sort(u2.begin(), u2.end());
    double ks = 0.0;
    for (long i = 0; i < n; ++i) {
      const double f_th = 1.0 - std::exp(-u2[i]);
      const double f_lo = static_cast<double>(i) / n;
      const double f_hi = static_cast<double>(i + 1) / n;
      ks = std::max(ks, std::max(std::abs(f_th - f_lo), std::abs(f_th - f_hi)));
    }
    CHECK(ks < 1.62762 / std::sqrt(static_cast<double>(n)));  // 1% critical value
  }

  SUBCASE("detection dominates false alarm at positive SNR") {
    const Fixture f(25.0);
    std::vector<double> thresholds;
    for (double pfa : {1e-3, 1e-2, 0.1, 0.5}) {
      thresholds.push_back(roc_threshold_for_pfa(pfa, f.model));
    }
    const auto pts = roc_mc(f.model, 20000, thresholds, Rng(8));
    for (const auto& p : pts) CHECK(p.pd >= p.pfa - (p.pfa_hi - p.pfa_lo));
  }

  SUBCASE("LLR and T induce the same ranking of snapshots") {
    const Fixture f(25.0);
    Rng rng(19);
    const int m = f.scene.geom.size();
    std::vector<double> ts, ls;
    for (int i = 0; i < 200; ++i) {
      arma::cx_vec y(m);
      for (auto& x : y) x = rng.cnormal(f.model.sigma2);
      ts.push_back(test_statistic(y, f.model));
      ls.push_back(llr(y, f.model));
    }
    std::vector<std::size_t> it(ts.size()), il(ts.size());
    std::iota(it.begin(), it.end(), 0);
    std::iota(il.begin(), il.end(), 0);
    std::sort(it.begin(), it.end(), [&](auto a, auto b) { return ts[a] < ts[b]; });
    std::sort(il.begin(), il.end(), [&](auto a, auto b) { return ls[a] < ls[b]; });
    CHECK(it == il);
  }
}

TEST_CASE("effective SNR is rejected for a non-rank-1 covariance") {
  Rng rng(97);
  const HypothesisModel model = dense_random_model(6, rng);
  CHECK_THROWS_AS(model.effective_snr(), ContractError);
}

// SPDX-License-Identifier: Apache-2.0
#include "isacsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "isacsim/detector.hpp"
#include "isacsim/errors.hpp"
#include "isacsim/metrics.hpp"
#include "isacsim/rng.hpp"
#include "isacsim/units.hpp"

namespace isacsim {
namespace {

enum StreamId : std::uint64_t {
  kStreamPowerSweep = 1,
  kStreamAltitudeSweep = 2,
  kStreamCdf = 3,
  kStreamRoc = 4,
  kStreamValidate = 5,
};

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

Scene build_scene(const ScenarioConfig& cfg) {
  cfg.validate();
  Scene scene;
  scene.geom = {cfg.m_v, cfg.m_h};
  scene.carrier_hz = cfg.carrier_hz();
  scene.non_paper_layout = cfg.num_illuminators != 3;

  std::vector<ApNode> nodes = hex_layout(cfg.r_m, cfg.num_illuminators, cfg.ap_height_m);
  if (cfg.rx_position_set) {
    nodes[0].position = {cfg.rx_position_m[0], cfg.rx_position_m[1], cfg.rx_position_m[2]};
  }
  if (!cfg.ap_positions_m.empty()) {
    for (int j = 0; j < cfg.num_illuminators; ++j) {
      nodes[j + 1].position = {cfg.ap_positions_m[j][0], cfg.ap_positions_m[j][1],
                               cfg.ap_positions_m[j][2]};
      nodes[j + 1].boresight_sign = nodes[j + 1].position(0) <= 0.0 ? +1 : -1;
    }
  }
  scene.receiver = nodes[0];
  scene.illuminators.assign(nodes.begin() + 1, nodes.end());

  scene.grid = make_voxel_grid({cfg.volume_center_x_m, cfg.volume_center_y_m, cfg.z_m},
                               {cfg.volume_x_m, cfg.volume_y_m, cfg.volume_z_m},
                               cfg.voxel_spacing_m);
  scene.codebook = build_codebook(scene.geom, cfg.exclude_endfire);
  scene.schedule = make_symbol_schedule(scene.grid, scene.codebook);
  return scene;
}

ChannelSet build_channels(const Scene& scene, const ScenarioConfig& cfg) {
  StochasticParams noise;
  noise.clutter_variance = cfg.beta_g();
  noise.noise_variance = cfg.noise_mw();
  const double d_serving = cfg.serving_distance_m();
  noise.ue_fading_variance = 1.0 / (d_serving * d_serving);
  return build_channel_set(scene, noise, build_rcs(cfg, cfg.rcs_model));
}

UeScenario build_ue(const ScenarioConfig& cfg, double gamma_req_db) {
  UeScenario ue;
  ue.serving_distance = cfg.serving_distance_m();
  ue.interferer_distances = cfg.interferer_distances_m();
  ue.gamma_req = db_to_linear(gamma_req_db);
  ue.noise_variance = cfg.noise_mw();
  return ue;
}

RcsModel build_rcs(const ScenarioConfig& cfg, const std::string& kind) {
  if (kind == "weibull") {
    if (cfg.weibull_scale > 0.0) {
      RcsModel m;
      m.kind = RcsModel::Kind::kWeibull;
      m.shape = cfg.weibull_shape;
      m.scale = cfg.weibull_scale;
      m.variance = cfg.weibull_scale * std::tgamma(1.0 + 1.0 / cfg.weibull_shape);
      return m;
    }
    return RcsModel::weibull_matched(cfg.weibull_shape, cfg.sigma_rcs2());
  }
  return RcsModel::swerling2(cfg.sigma_rcs2());
}

namespace {

struct CurveSpec {
  std::string method;   // proposed | noncoord
  bool dl_mask = true;
  double gamma_req_db = 3.0;
  std::string metric_suffix;  // e.g. "_z1" for altitude curves
};

std::optional<PrecoderSolution> solve_voxel(const Scene& scene, const ChannelSet& channels,
                                            int q, const CurveSpec& spec, double rho_mw,
                                            double p_max_mw) {
  try {
    if (spec.method == "noncoord") {
      return noncoordinated_precoder(scene, channels, q, rho_mw, p_max_mw);
    }
    return coordinated_precoder(scene, channels, q, rho_mw, p_max_mw, spec.dl_mask);
  } catch (const DegenerateVoxel&) {
    return std::nullopt;
  }
}

// Shared sweep engine for the power/altitude experiments.
void sweep_curve(const ScenarioConfig& cfg, const Scene& scene, const ChannelSet& channels,
                 const std::string& experiment, std::uint64_t exp_stream,
                 std::uint64_t curve_stream, const CurveSpec& spec,
                 std::vector<CurveRecord>& records) {
  const UeScenario ue = build_ue(cfg, spec.gamma_req_db);
  const Rng curve_rng = Rng(cfg.seed).fork(exp_stream).fork(curve_stream);

  // Regular grid plus the exact feasibility onset, matching the source
  // curves which start at the onset abscissa.
  std::vector<double> grid;
  for (double p = cfg.sweep_start_dbm; p <= cfg.sweep_stop_dbm + 1e-9; p += cfg.sweep_step_db) {
    grid.push_back(p);
  }
  try {
    UeScenario probe = ue;
    const double rho = solve_power_allocation(probe, 1e300);
    const double onset_dbm = linear_to_db(rho);
    if (onset_dbm >= cfg.sweep_start_dbm && onset_dbm <= cfg.sweep_stop_dbm) {
      bool present = false;
      for (double p : grid) {
        if (std::abs(p - onset_dbm) < 1e-9) present = true;
      }
      if (!present) grid.push_back(onset_dbm);
    }
  } catch (const InfeasibleError&) {
    // interference-limited at every power: the regular grid stands
  }
  std::sort(grid.begin(), grid.end());

  const std::string mask_str = spec.method == "noncoord" ? "on" : (spec.dl_mask ? "on" : "off");
  for (std::size_t pi = 0; pi < grid.size(); ++pi) {
    const double p_dbm = grid[pi];
    const double p_mw = db_to_linear(p_dbm);
    const auto emit = [&](const std::string& metric, double linear, double stderr_val) {
      records.push_back({experiment, "p_max_dbm", p_dbm, metric + spec.metric_suffix, linear,
                         stderr_val, spec.method, mask_str, spec.gamma_req_db, cfg.seed});
    };

    double rho = 0.0;
    bool feasible = true;
    try {
      rho = solve_power_allocation(ue, p_mw);
    } catch (const InfeasibleError&) {
      feasible = false;
    }
    if (!feasible) {
      emit("feasible", 0.0, 0.0);
      emit("ssb_power_mw", 0.0, 0.0);
      emit("gamma_sen_analytic", 0.0, 0.0);
      emit("gamma_sen_mc", 0.0, 0.0);
      continue;
    }

    std::vector<double> analytic;
    std::vector<double> mc_val;
    double mc_var = 0.0;
    int degenerate = 0;
    const Rng point_rng = curve_rng.fork(pi);
    for (int q = 0; q < scene.grid.count(); ++q) {
      const auto sol = solve_voxel(scene, channels, q, spec, rho, p_mw);
      if (!sol) {
        ++degenerate;
        continue;
      }
      analytic.push_back(sensing_sinr_analytic(scene, channels, *sol, q));
      const McEstimate mc = sensing_sinr_mc(scene, channels, *sol, q, /*include_direct=*/true,
                                            cfg.trials, point_rng.fork(q));
      mc_val.push_back(mc.value);
      mc_var += mc.std_error * mc.std_error;
    }

    emit("feasible", 1.0, 0.0);
    emit("ssb_power_mw", rho, 0.0);
    emit("gamma_ue", user_sinr(ue, rho), 0.0);
    if (analytic.empty()) {
      emit("degenerate_voxels", degenerate, 0.0);
      emit("gamma_sen_analytic", 0.0, 0.0);
      emit("gamma_sen_mc", 0.0, 0.0);
      continue;
    }
    emit("gamma_sen_analytic", volume_average(analytic), 0.0);
    emit("gamma_sen_mc", volume_average(mc_val),
         std::sqrt(mc_var) / static_cast<double>(mc_val.size()));
    if (degenerate > 0) emit("degenerate_voxels", degenerate, 0.0);
  }
}

}  // namespace

std::vector<CurveRecord> run_power_sweep(const ScenarioConfig& cfg) {
  const Scene scene = build_scene(cfg);
  const ChannelSet channels = build_channels(scene, cfg);

  std::vector<std::string> methods;
  if (cfg.precoder == "both") {
    methods = {"proposed", "noncoord"};
  } else {
    methods = {cfg.precoder};
  }

  std::vector<CurveRecord> records;
  std::uint64_t curve_id = 0;
  for (const std::string& method : methods) {
    for (double gamma_db : cfg.gamma_req_sweep_db) {
      CurveSpec spec;
      spec.method = method;
      spec.dl_mask = cfg.dl_mask;
      spec.gamma_req_db = gamma_db;
      sweep_curve(cfg, scene, channels, "sweep-power", kStreamPowerSweep, curve_id++, spec,
                  records);
    }
  }
  return records;
}

std::vector<CurveRecord> run_altitude_sweep(const ScenarioConfig& cfg) {
  std::vector<CurveRecord> records;
  std::uint64_t curve_id = 0;
  for (double z : cfg.z_levels_m) {
    ScenarioConfig level = cfg;
    level.z_m = z;
    const Scene scene = build_scene(level);
    const ChannelSet channels = build_channels(scene, level);
    for (bool mask : {true, false}) {
      CurveSpec spec;
      spec.method = "proposed";
      spec.dl_mask = mask;
      spec.gamma_req_db = cfg.gamma_req_db;
      spec.metric_suffix = "_z" + fmt_g(z);
      sweep_curve(level, scene, channels, "sweep-altitude", kStreamAltitudeSweep, curve_id++,
                  spec, records);
    }
  }
  return records;
}

std::vector<CurveRecord> run_cdf(const ScenarioConfig& cfg) {
  const Scene scene = build_scene(cfg);
  const ChannelSet channels = build_channels(scene, cfg);
  const UeScenario ue = build_ue(cfg, cfg.gamma_req_db);
  const double p_mw = cfg.p_max_mw();
  const double rho = solve_power_allocation(ue, p_mw);

  const int q = 0;  // single-voxel study
  const PrecoderSolution sol =
      cfg.precoder == "noncoord"
          ? noncoordinated_precoder(scene, channels, q, rho, p_mw)
          : coordinated_precoder(scene, channels, q, rho, p_mw, cfg.dl_mask);

  const Rng root = Rng(cfg.seed).fork(kStreamCdf);
  std::vector<CurveRecord> records;
  const std::string mask_str = cfg.dl_mask ? "on" : "off";
  const std::string method = cfg.precoder == "noncoord" ? "noncoord" : "proposed";

  struct Variant {
    const char* metric;
    RcsModel model;
  };
  const Variant variants[2] = {
      {"gamma_inst_sw2", RcsModel::swerling2(cfg.sigma_rcs2())},
      {"gamma_inst_wb", build_rcs(cfg, "weibull")},
  };
  for (int vi = 0; vi < 2; ++vi) {
    std::vector<double> samples = sinr_cdf_samples(scene, channels, sol, q, variants[vi].model,
                                                   cfg.cdf_trials, root.fork(vi));
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      records.push_back({"cdf", "quantile", (static_cast<double>(i) + 1.0) / n,
                         variants[vi].metric, samples[i], 0.0, method, mask_str,
                         cfg.gamma_req_db, cfg.seed});
      sum += samples[i];
      sum_sq += samples[i] * samples[i];
    }
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
    records.push_back({"cdf", "summary", 0.0, std::string(variants[vi].metric) + "_mean", mean,
                       se, method, mask_str, cfg.gamma_req_db, cfg.seed});
  }
  return records;
}

std::vector<CurveRecord> run_roc(const ScenarioConfig& cfg) {
  const Scene scene = build_scene(cfg);
  const ChannelSet channels = build_channels(scene, cfg);
  const UeScenario ue = build_ue(cfg, cfg.gamma_req_db);
  const int q = 0;  // single voxel, first symbol

  // Pfa grid: 10 points per decade down to 1e-5, plus the 2e-5 anchor.
  std::vector<double> pfa_grid;
  for (int i = 0; i <= 50; ++i) pfa_grid.push_back(std::pow(10.0, -5.0 + 0.1 * i));
  pfa_grid.push_back(2e-5);
  std::sort(pfa_grid.begin(), pfa_grid.end());

  const Rng root = Rng(cfg.seed).fork(kStreamRoc);
  std::vector<CurveRecord> records;
  const std::string mask_str = cfg.dl_mask ? "on" : "off";
  for (std::size_t pi = 0; pi < cfg.roc_p_max_dbm.size(); ++pi) {
    const double p_dbm = cfg.roc_p_max_dbm[pi];
    const double p_mw = db_to_linear(p_dbm);
    const std::string suffix = "_p" + fmt_g(p_dbm);
    const auto emit = [&](const std::string& metric, double pfa, double linear, double se) {
      records.push_back({"roc", "pfa", pfa, metric + suffix, linear, se, "proposed", mask_str,
                         cfg.gamma_req_db, cfg.seed});
    };

    double rho = 0.0;
    try {
      rho = solve_power_allocation(ue, p_mw);
    } catch (const InfeasibleError&) {
      emit("feasible", 0.0, 0.0, 0.0);
      continue;
    }
    const PrecoderSolution sol =
        coordinated_precoder(scene, channels, q, rho, p_mw, cfg.dl_mask);
    const HypothesisModel model = sensing_covariance(scene, channels, sol, q);
    const double rbar = model.effective_snr();
    emit("effective_snr", 0.0, rbar, 0.0);

    std::vector<double> thresholds;
    thresholds.reserve(pfa_grid.size());
    for (double pfa : pfa_grid) thresholds.push_back(roc_threshold_for_pfa(pfa, model));
    const std::vector<RocPoint> curve =
        roc_mc(model, cfg.roc_trials, thresholds, root.fork(pi));
    for (std::size_t i = 0; i < pfa_grid.size(); ++i) {
      emit("pd_analytic", pfa_grid[i], roc_analytic_pd(pfa_grid[i], rbar), 0.0);
      emit("pd_mc", pfa_grid[i], curve[i].pd, 0.5 * (curve[i].pd_hi - curve[i].pd_lo));
      emit("pfa_mc", pfa_grid[i], curve[i].pfa, 0.5 * (curve[i].pfa_hi - curve[i].pfa_lo));
    }
  }
  return records;
}

namespace {

ScenarioConfig random_small_config(Rng& rng, int side, int j_count) {
  ScenarioConfig cfg;
  cfg.m_v = cfg.m_h = side;
  cfg.num_illuminators = j_count;
  cfg.r_m = 100.0 + 300.0 * rng.uniform();
  cfg.ap_height_m = 10.0;
  cfg.volume_center_x_m = -(0.2 + 1.3 * rng.uniform()) * cfg.r_m;
  cfg.volume_center_y_m = -(0.1 + 1.1 * rng.uniform()) * cfg.r_m;
  cfg.z_m = 5.0 + 25.0 * rng.uniform();
  cfg.volume_x_m = cfg.volume_y_m = cfg.volume_z_m = 2.0;
  cfg.voxel_spacing_m = 2.0;  // Q = 1
  return cfg;
}

}  // namespace

ValidationReport run_validate(const ScenarioConfig& cfg) {
  ValidationReport report;
  Rng root = Rng(cfg.seed).fork(kStreamValidate);

  // 1. Onset-power formula against the published sweep onsets.
  {
    const bool default_ue = cfg.ue_serving_distance_m == 0.0 &&
                            cfg.ue_interferer_distances_m.empty() && cfg.r_m == 250.0 &&
                            cfg.noise_dbm == -60.0;
    const struct {
      double gamma_db;
      double expected_dbm;
      const char* name;
    } onsets[2] = {{2.0, -1.96311106027476, "onset_power_gamma2"},
                   {3.0, 18.462825648618, "onset_power_gamma3"}};
    for (const auto& c : onsets) {
      ValidationReport::Check check;
      check.name = c.name;
      try {
        const double rho = solve_power_allocation(build_ue(cfg, c.gamma_db), 1e300);
        check.value = linear_to_db(rho) - c.expected_dbm;
        check.pass = std::abs(check.value) <= 0.01;
        check.detail = "deviation " + std::to_string(check.value) + " dB";
      } catch (const InfeasibleError& e) {
        check.pass = false;
        check.detail = e.what();
      }
      if (!default_ue) {
        check.informational = true;
        check.detail += " (non-default UE geometry: informational)";
      }
      report.checks.push_back(check);
    }
  }

  // 2. Closed form vs SDR relaxation at toy scale.
  {
    ValidationReport::Check check;
    check.name = "sdr_cross_check";
    check.pass = true;
    Rng rng = root.fork(2);
    const struct {
      int side;
      int j;
    } combos[3] = {{2, 2}, {3, 2}, {4, 3}};
    double worst = 0.0;
    int done = 0;
    for (int ci = 0; ci < 3 && check.pass; ++ci) {
      for (int k = 0; k < 5 && check.pass; ++k) {
        Rng inst = rng.fork(ci * 16 + k);
        const ScenarioConfig small = random_small_config(inst, combos[ci].side, combos[ci].j);
        const Scene scene = build_scene(small);
        const ChannelSet channels = build_channels(scene, small);
        const double p_mw = 1000.0;
        const double rho = (0.05 + 0.45 * inst.uniform()) * p_mw;
        const bool mask = k % 2 == 0;
        try {
          const PrecoderSolution cf = coordinated_precoder(scene, channels, 0, rho, p_mw, mask);
          const SdrSolution sdr = sdr_bisection_solver(scene, channels, 0, rho, p_mw, mask);
          const double rel = (sdr.objective - cf.objective) / std::max(sdr.objective, 1e-300);
          worst = std::max(worst, rel);
          const double scale = std::sqrt(scene.geom.size() * p_mw);
          if (rel > 0.01 || cf.residuals.ssb_overlap > 1e-9 * scale ||
              cf.residuals.power_slack > 1e-9 * p_mw) {
            check.pass = false;
            check.detail = "instance (side=" + std::to_string(combos[ci].side) +
                           ", j=" + std::to_string(combos[ci].j) + ", k=" + std::to_string(k) +
                           ") rel gap " + std::to_string(rel);
          }
          ++done;
        } catch (const DegenerateVoxel&) {
          continue;  // resampled geometry landed in a null subspace; skip
        }
      }
    }
    check.value = worst;
    if (check.pass) {
      check.detail = std::to_string(done) + " instances, worst SDR-over-closed-form gap " +
                     std::to_string(worst);
    }
    report.checks.push_back(check);
  }

  // 3. Monte Carlo vs analytic sensing SINR.
  {
    ValidationReport::Check check;
    check.name = "sinr_mc_consistency";
    check.pass = true;
    Rng rng = root.fork(3);
    double worst = 0.0;
    for (int k = 0; k < 3 && check.pass; ++k) {
      Rng inst = rng.fork(k);
      const ScenarioConfig small = random_small_config(inst, 3, 3);
      const Scene scene = build_scene(small);
      const ChannelSet channels = build_channels(scene, small);
      const double p_mw = 1000.0;
      const double rho = 100.0;
      try {
        const PrecoderSolution sol = coordinated_precoder(scene, channels, 0, rho, p_mw, true);
        const double analytic = sensing_sinr_analytic(scene, channels, sol, 0);
        const McEstimate mc =
            sensing_sinr_mc(scene, channels, sol, 0, /*include_direct=*/false, 20000,
                            inst.fork(99));
        const double sigmas = std::abs(mc.value - analytic) / mc.std_error;
        worst = std::max(worst, sigmas);
        if (sigmas > 3.0) {
          check.pass = false;
          check.detail = "scene " + std::to_string(k) + ": " + std::to_string(sigmas) +
                         " standard errors";
        }
      } catch (const DegenerateVoxel&) {
        continue;
      }
    }
    check.value = worst;
    if (check.pass) check.detail = "worst deviation " + std::to_string(worst) + " sigma";
    report.checks.push_back(check);
  }

  // 4. Monte Carlo vs analytic ROC at the default scene.
  {
    ValidationReport::Check check;
    check.name = "roc_mc_consistency";
    try {
      ScenarioConfig roc_cfg = cfg;
      const Scene scene = build_scene(roc_cfg);
      const ChannelSet channels = build_channels(scene, roc_cfg);
      const UeScenario ue = build_ue(roc_cfg, roc_cfg.gamma_req_db);
      const double p_mw = db_to_linear(25.0);
      const double rho = solve_power_allocation(ue, p_mw);
      const PrecoderSolution sol =
          coordinated_precoder(scene, channels, 0, rho, p_mw, roc_cfg.dl_mask);
      const HypothesisModel model = sensing_covariance(scene, channels, sol, 0);
      const double rbar = model.effective_snr();
      std::vector<double> pfa_grid;
      for (int i = 0; i <= 20; ++i) pfa_grid.push_back(std::pow(10.0, -2.0 + 0.1 * i));
      std::vector<double> thresholds;
      for (double pfa : pfa_grid) thresholds.push_back(roc_threshold_for_pfa(pfa, model));
      const std::vector<RocPoint> curve = roc_mc(model, 100000, thresholds, root.fork(4));
      double worst = 0.0;
      for (std::size_t i = 0; i < pfa_grid.size(); ++i) {
        worst = std::max(worst, std::abs(curve[i].pd - roc_analytic_pd(pfa_grid[i], rbar)));
      }
      check.value = worst;
      check.pass = worst < 0.015;
      check.detail = "max |dPd| " + std::to_string(worst) + " at N=1e5 (pfa >= 1e-2)";
    } catch (const std::exception& e) {
      check.pass = false;
      check.detail = e.what();
    }
    report.checks.push_back(check);
  }

  // 5. Seed determinism: identical config+seed must give byte-identical CSV.
  {
    ValidationReport::Check check;
    check.name = "seed_determinism";
    ScenarioConfig tiny = cfg;
    tiny.sweep_start_dbm = 25.0;
    tiny.sweep_stop_dbm = 26.0;
    tiny.sweep_step_db = 0.5;
    tiny.trials = 200;
    tiny.precoder = "proposed";
    tiny.gamma_req_sweep_db = {2.0};
    try {
      const std::string once = to_csv(run_power_sweep(tiny));
      const std::string twice = to_csv(run_power_sweep(tiny));
      check.pass = once == twice;
      check.detail = check.pass ? "byte-identical" : "outputs differ between identical runs";
    } catch (const std::exception& e) {
      check.pass = false;
      check.detail = e.what();
    }
    report.checks.push_back(check);
  }

  return report;
}

}  // namespace isacsim

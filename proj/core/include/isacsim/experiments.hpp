// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "isacsim/channel.hpp"
#include "isacsim/config.hpp"
#include "isacsim/csv.hpp"
#include "isacsim/precoder.hpp"
#include "isacsim/scene.hpp"

namespace isacsim {

inline constexpr const char* kVersion = "0.1.0";

Scene build_scene(const ScenarioConfig& cfg);
ChannelSet build_channels(const Scene& scene, const ScenarioConfig& cfg);
UeScenario build_ue(const ScenarioConfig& cfg, double gamma_req_db);
RcsModel build_rcs(const ScenarioConfig& cfg, const std::string& kind);

/// Fig.-4 style reproduction: sensing SINR vs P_max per (method, gamma_req)
/// curve; the feasibility onset is inserted into the sweep grid and
/// infeasible points are emitted as explicit zero records.
std::vector<CurveRecord> run_power_sweep(const ScenarioConfig& cfg);

/// Fig.-6 style reproduction: DL-masked vs non-masked curves per grid
/// altitude, proposed precoder.
std::vector<CurveRecord> run_altitude_sweep(const ScenarioConfig& cfg);

/// Fig.-5 style reproduction: empirical CDF samples of the per-realization
/// sensing SINR for Swerling-2 and mean-matched Weibull RCS.
std::vector<CurveRecord> run_cdf(const ScenarioConfig& cfg);

/// Fig.-7 style reproduction: Monte Carlo and analytic ROC per P_max level.
std::vector<CurveRecord> run_roc(const ScenarioConfig& cfg);

struct ValidationReport {
  struct Check {
    std::string name;
    bool pass = false;
    bool informational = false;
    double value = 0.0;
    std::string detail;
  };
  std::vector<Check> checks;

  bool all_pass() const {
    for (const Check& c : checks) {
      if (!c.pass && !c.informational) return false;
    }
    return true;
  }
};

/// Oracle suite: onset-power formula, closed form vs SDR at toy scale,
/// Monte Carlo vs analytic SINR, Monte Carlo vs analytic ROC, seed
/// determinism. Fast variants; the acceptance suite runs the full budgets.
ValidationReport run_validate(const ScenarioConfig& cfg);

}  // namespace isacsim

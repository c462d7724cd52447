#pragma once

#include "sbr/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sbr {

/// Raw scenario file contents, still in config units (hours, m^3/h, 1/d,
/// g/m^3 for the half-saturation constants). Converted to SI by
/// build_scenario.
struct ScenarioConfig {
  // [geometry]
  double depth_m = 3.0;
  double area_m2 = 400.0;
  double min_depth_m = 0.5;
  std::optional<double> initial_surface_m;  // inferred from the profile if absent

  // [constitutive]
  ConstitutiveParams constitutive;

  // [kinetics] in table units
  double Y_A = 0.24, Y_H = 0.67, f_P = 0.08, i_XB = 0.086, i_XP = 0.06;
  double mu_H_per_d = 6.0, b_H_per_d = 0.62, mu_A_per_d = 0.8, b_A_per_d = 0.15;
  double k_h_per_d = 3.0, k_a_m3_per_g_d = 0.08;
  double K_S_gpm3 = 20.0, K_OH_gpm3 = 0.2, K_NO_gpm3 = 0.5, K_X = 0.03;
  double K_NH_gpm3 = 1.0, K_NH_bar_gpm3 = 0.05, K_OA_gpm3 = 0.4;
  double eta_g = 0.8, eta_h = 0.4;
  double growth_cutoff_rel = 0.05;  // epsilon as a fraction of X_hat

  // [feed]
  Vec6 pf_weights = Vec6::Zero();  // normalized to the feed percentages
  Vec6 Sf_kgpm3 = Vec6::Zero();

  // [initial]
  double clear_above_m = 0.0;
  Vec6 C0_kgpm3 = Vec6::Zero();
  Vec6 S0_kgpm3 = Vec6::Zero();

  // [numerics]
  NumericsDefaults numerics;

  // [stages] rows: t_start_h, t_end_h, model, Qf_m3ph, Qu_m3ph, Qe_m3ph, Xf_kgpm3
  struct StageRow {
    double t_start_h = 0.0, t_end_h = 0.0;
    std::string model = "pde";
    double Qf_m3ph = 0.0, Qu_m3ph = 0.0, Qe_m3ph = 0.0;
    double Xf_kgpm3 = 0.0;
  };
  std::vector<StageRow> stage_rows;
};

ScenarioConfig parse_scenario(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin);
std::string serialize_scenario(const ScenarioConfig& cfg);

/// Unit conversion plus full validation against the module invariants.
Scenario build_scenario(const ScenarioConfig& cfg, int bound_samples = 100000);

}  // namespace sbr

#pragma once

// Shared scenario builders for the test suites.

#include "sbr/scenario.hpp"

#include <vector>

namespace sbr::test {

inline ConstitutiveParams default_constitutive() { return ConstitutiveParams{}; }

inline Vec6 feed_weights() {
  Vec6 w;
  w << 0.04, 0.16 - 0.01828, 0.096, 1e-6, 0.0, 0.01828;
  return w;
}

inline Vec6 feed_substrates() {
  Vec6 s;
  s << 0.04, 0.064, 0.0, 0.001, 0.0125, 0.0101;
  return s;
}

inline Vec6 initial_particulates() {
  Vec6 c;
  c << 0.8889, 0.0295, 1.4503, 0.0904, 0.7371, 0.0025;
  return c;
}

inline Vec6 initial_substrates() {
  Vec6 s;
  s << 0.04, 0.0026, 0.0, 0.0333, 0.0004, 0.0009;
  return s;
}

struct ScenarioTweaks {
  bool zero_kinetics = false;
  double sigma0 = 0.2;
  double clear_above = 2.0;
  double z_bar0 = -1.0;  // < 0: use clear_above
  int bound_samples = 2000;
};

/// Stage rows in hours and m^3/h, mirroring the config format.
struct StageSpecH {
  double t0_h, t1_h;
  StageModel model = StageModel::pde;
  double Qf = 0.0, Qu = 0.0, Qe = 0.0;
  double Xf = 0.0;
};

inline Scenario make_scenario_h(const std::vector<StageSpecH>& rows,
                                const ScenarioTweaks& tweaks = {}) {
  TankGeometry geom;
  geom.B = 3.0;
  geom.A = 400.0;
  geom.B_c = 0.25;
  geom.z_bar0 = tweaks.z_bar0 >= 0.0 ? tweaks.z_bar0 : tweaks.clear_above;

  std::vector<Stage> stages;
  for (const StageSpecH& r : rows) {
    Stage s;
    s.t_start = r.t0_h * kSecondsPerHour;
    s.t_end = r.t1_h * kSecondsPerHour;
    s.model = r.model;
    s.Q_f = r.Qf / kSecondsPerHour;
    s.Q_u = r.Qu / kSecondsPerHour;
    s.Q_e = r.Qe / kSecondsPerHour;
    s.X_f = r.Xf;
    stages.push_back(s);
  }

  FeedSpec feed;
  feed.p_f = feed_weights() / feed_weights().sum();
  feed.S_f = feed_substrates();

  InitialProfile init;
  init.clear_above = tweaks.clear_above;
  init.C0 = initial_particulates();
  init.S0 = initial_substrates();

  ConstitutiveParams con = default_constitutive();
  con.sigma0 = tweaks.sigma0;

  Asm1Params kin;
  if (tweaks.zero_kinetics) {
    kin.mu_H = kin.b_H = kin.mu_A = kin.b_A = kin.k_h = kin.k_a = 0.0;
  }
  kin.eps_cutoff = 0.05 * derive_x_hat(con);

  return make_scenario(geom, stages, feed, init, con, kin, NumericsDefaults{},
                       tweaks.bound_samples);
}

/// The five-stage demonstration cycle.
inline Scenario example1_scenario(const ScenarioTweaks& tweaks = {}) {
  return make_scenario_h({{0.0, 1.0, StageModel::pde, 790, 0, 0, 5},
                          {1.0, 3.0, StageModel::ode_mixing, 0, 0, 0, 0},
                          {3.0, 5.0, StageModel::pde, 0, 0, 0, 0},
                          {5.0, 5.5, StageModel::pde, 0, 0, 1570, 0},
                          {5.5, 6.0, StageModel::pde, 0, 10, 0, 0}},
                         tweaks);
}

/// The short error-study cycle.
inline Scenario example2_scenario(const ScenarioTweaks& tweaks = {}) {
  return make_scenario_h({{0.0, 0.3, StageModel::pde, 2660, 0, 0, 5},
                          {0.3, 0.85, StageModel::pde, 0, 0, 0, 0},
                          {0.85, 0.95, StageModel::pde, 0, 0, 6000, 0},
                          {0.95, 1.0, StageModel::pde, 0, 100, 0, 0}},
                         tweaks);
}

/// Closed settling (no flows) over the given duration.
inline Scenario settling_scenario(double hours, const ScenarioTweaks& tweaks = {}) {
  return make_scenario_h({{0.0, hours, StageModel::pde, 0, 0, 0, 0}}, tweaks);
}

}  // namespace sbr::test

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sbr/mixing.hpp"
#include "sbr/validation.hpp"

#include "support.hpp"

using namespace sbr;

TEST_CASE("average then reallocate is the identity on uniform states") {
  const Scenario sc = test::example1_scenario();
  const Grid g(16);
  GridState st = GridState::zero(g);
  Vec6 p = sc.feed.p_f;
  for (int i = 0; i < g.num_cells(); ++i) st.P.row(i) = p.transpose();
  for (int j = 0; j <= g.N; ++j) {
    st.X[g.idx(j)] = 2.399;
    st.S.row(g.idx(j)) = test::initial_substrates().transpose();
  }
  const MixedState m = average_profile(st, g, sc.feed.p_f);
  CHECK(m.X == doctest::Approx(2.399).epsilon(1e-14));
  GridState back = GridState::zero(g);
  for (int i = 0; i < g.num_cells(); ++i) back.P.row(i) = p.transpose();
  reallocate(m, g, back);
  for (int j = 0; j <= g.N; ++j) {
    CHECK(back.X[g.idx(j)] == doctest::Approx(2.399).epsilon(1e-14));
    for (int k = 0; k < 6; ++k)
      CHECK(back.S(g.idx(j), k) ==
            doctest::Approx(test::initial_substrates()[k]).epsilon(1e-14));
  }
  CHECK(back.X[g.idx(-1)] == 0.0);
  CHECK(back.X[g.idx(g.N + 1)] == 0.0);
}

TEST_CASE("empty profile falls back to the feed percentages") {
  const Scenario sc = test::example1_scenario();
  const Grid g(8);
  const GridState st = GridState::zero(g);
  const MixedState m = average_profile(st, g, sc.feed.p_f);
  CHECK(m.X == 0.0);
  CHECK((m.p - sc.feed.p_f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("nonuniform profiles average mass-consistently") {
  const Scenario sc = test::example1_scenario();
  const Grid g(32);
  const GridState st = random_omega_state(sc, g, 2718);
  const MixedState m = average_profile(st, g, sc.feed.p_f);

  double mass = 0.0;
  Vec6 pmass = Vec6::Zero();
  for (int j = 0; j <= g.N; ++j) {
    const double w = (j == 0 ? 0.5 : 1.0) * g.delta_xi;
    mass += w * st.X[g.idx(j)];
    pmass += w * st.X[g.idx(j)] * st.P.row(g.idx(j)).transpose();
  }
  CHECK(m.X == doctest::Approx(mass).epsilon(1e-14));
  // mass weighting keeps the component masses of the average exact
  for (int k = 0; k < 6; ++k)
    CHECK(m.p[k] * m.X == doctest::Approx(pmass[k]).epsilon(1e-13));
  CHECK(m.p.sum() == doctest::Approx(1.0).epsilon(1e-13));

  // two-cell toy profile by hand: N = 4, X = (4, 1, 0, 0, 0)
  const Grid g4(4);
  GridState toy = GridState::zero(g4);
  for (int i = 0; i < g4.num_cells(); ++i) toy.P.row(i) = sc.feed.p_f.transpose();
  toy.X[g4.idx(0)] = 4.0;
  toy.X[g4.idx(1)] = 1.0;
  const MixedState mt = average_profile(toy, g4, sc.feed.p_f);
  CHECK(mt.X == doctest::Approx((0.5 * 4.0 + 1.0) / 4.5).epsilon(1e-14));
}

TEST_CASE("no flows and no reactions: the mixed state is a fixed point") {
  test::ScenarioTweaks tweaks;
  tweaks.zero_kinetics = true;
  const Scenario sc = test::make_scenario_h(
      {{0.0, 2.0, StageModel::ode_mixing, 0, 0, 0, 0}}, tweaks);
  MixedState m;
  m.X = 2.399;
  m.p = sc.feed.p_f;
  m.S = test::initial_substrates();
  const MixedState before = m;
  const StageCoeffs c = stage_coeffs(sc, 100.0);
  for (int n = 0; n < 100; ++n)
    euler_mix_step(m, c, *sc.biokinetics, sc.constitutive->X_hat(), 10.0);
  CHECK(m.X == before.X);
  CHECK((m.S - before.S).cwiseAbs().maxCoeff() == 0.0);
  // percentages are recovered as (pX)/X each step, exact up to round-off
  CHECK((m.p - before.p).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("matched feed leaves the composition alone") {
  test::ScenarioTweaks tweaks;
  tweaks.zero_kinetics = true;
  const Scenario sc =
      test::make_scenario_h({{0.0, 1.0, StageModel::ode_mixing, 500, 0, 0, 2.399}}, tweaks);
  MixedState m;
  m.X = 2.399;  // X_f = X, p_f = p, S_f = S: dilution terms cancel
  m.p = sc.feed.p_f;
  m.S = sc.feed.S_f;
  const StageCoeffs c = stage_coeffs(sc, 100.0);
  for (int n = 0; n < 200; ++n)
    euler_mix_step(m, c, *sc.biokinetics, sc.constitutive->X_hat(), 5.0);
  CHECK(m.X == doctest::Approx(2.399).epsilon(1e-13));
  for (int k = 0; k < 6; ++k) {
    CHECK(m.p[k] == doctest::Approx(sc.feed.p_f[k]).epsilon(1e-12));
    CHECK(m.S[k] == doctest::Approx(sc.feed.S_f[k]).epsilon(1e-12));
  }
}

TEST_CASE("react stage against a ten-times finer Euler integration") {
  const Scenario sc = test::example1_scenario();
  const StageCoeffs c = stage_coeffs(sc, 2.0 * 3600);  // mid react stage

  const auto integrate = [&](double tau, double T) {
    MixedState m;
    m.X = 0.75 * test::initial_particulates().sum();
    m.p = 0.75 * test::initial_particulates() / m.X;
    m.S = test::initial_substrates();
    const long n = long(T / tau);
    for (long i = 0; i < n; ++i)
      euler_mix_step(m, c, *sc.biokinetics, sc.constitutive->X_hat(), tau);
    return m;
  };
  const double T = 2.0 * 3600;
  const MixedState coarse = integrate(72.0, T);
  const MixedState fine = integrate(7.2, T);
  CHECK(coarse.X == doctest::Approx(fine.X).epsilon(1e-3));
  for (int k = 0; k < 6; ++k) {
    CHECK(coarse.S[k] == doctest::Approx(fine.S[k]).epsilon(1e-3).scale(0.01));
    CHECK(coarse.p[k] == doctest::Approx(fine.p[k]).epsilon(1e-3).scale(0.01));
  }
}

TEST_CASE("mixed-stage mass balance with flows closes") {
  // a filling mixed stage: d(V X)/dt = Q_f X_f + V R exactly in the limit
  const Scenario sc =
      test::make_scenario_h({{0.0, 1.0, StageModel::ode_mixing, 500, 0, 0, 4.0}});
  MixedState m;
  m.X = 0.75 * test::initial_particulates().sum();
  m.p = 0.75 * test::initial_particulates() / m.X;
  m.S = test::initial_substrates();

  const double tau = 3600.0 / 800000;
  double inflow = 0.0, reacted = 0.0;
  const double V0 = sc.trajectory.volume(0.0);
  const double M0 = V0 * m.X;
  for (int i = 0; i < 800000; ++i) {
    const StageCoeffs c = stage_coeffs(sc, m.t);
    const double V = sc.trajectory.volume(m.t);
    const Vec6 C = m.p * m.X / 0.75;
    reacted += tau * V * sc.biokinetics->total_reaction(C, m.S, m.X);
    inflow += tau * (500.0 / kSecondsPerHour) * 4.0;
    euler_mix_step(m, c, *sc.biokinetics, sc.constitutive->X_hat(), tau);
  }
  const double M1 = sc.trajectory.volume(m.t) * m.X;
  CHECK(M1 - M0 == doctest::Approx(inflow + reacted).epsilon(1e-6));
}

TEST_CASE("admissibility guard trips on oversized ODE steps") {
  test::ScenarioTweaks tweaks;
  tweaks.zero_kinetics = true;
  // clear-water fill dilutes at rate beta q_f; tau beyond 1/(beta q_f)
  // would drive the concentration negative
  const Scenario sc =
      test::make_scenario_h({{0.0, 0.5, StageModel::ode_mixing, 790, 0, 0, 0}}, tweaks);
  MixedState m;
  m.X = 2.0;
  m.p = sc.feed.p_f;
  m.S = test::initial_substrates();
  const StageCoeffs c = stage_coeffs(sc, 10.0);
  CHECK_THROWS_AS(
      euler_mix_step(m, c, *sc.biokinetics, sc.constitutive->X_hat(), 4000.0),
      step_error);
}

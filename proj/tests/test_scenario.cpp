#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sbr/fluxes.hpp"
#include "sbr/scenario.hpp"

#include "support.hpp"

using namespace sbr;

TEST_CASE("surface trajectory reproduces the demonstration cycle") {
  const Scenario sc = test::example1_scenario();
  const BoundaryTrajectory& tr = sc.trajectory;
  CHECK(tr.z_bar(0.0) == 2.0);
  // fill at 790 m^3/h for one hour: dz = -790/400
  CHECK(tr.z_bar(3600.0) == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(tr.volume(3600.0) == doctest::Approx(1190.0).epsilon(1e-12));
  // react + settle leave the surface alone
  CHECK(tr.z_bar(5.0 * 3600) == doctest::Approx(0.025).epsilon(1e-12));
  // draw at 1570 m^3/h for half an hour: dz = +1.9625
  CHECK(tr.z_bar(5.5 * 3600) == doctest::Approx(0.025 + 1.9625).epsilon(1e-12));
  // idle underflow at 10 m^3/h for half an hour
  CHECK(tr.z_bar(6.0 * 3600) == doctest::Approx(1.9875 + 0.0125).epsilon(1e-12));
  CHECK(tr.zeta_effective() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("all-zero flows freeze the surface") {
  const Scenario sc = test::settling_scenario(2.0);
  CHECK(sc.trajectory.z_bar(0.0) == sc.trajectory.z_bar(7200.0));
  CHECK(sc.trajectory.z_bar_prime(1000.0) == 0.0);
}

TEST_CASE("schedules that breach the depth bounds are rejected") {
  // drawing far more than the tank holds pushes z_bar past B - B_c
  CHECK_THROWS_AS(test::make_scenario_h({{0.0, 1.0, StageModel::pde, 0, 0, 3000, 0}}),
                  config_error);
  // overfilling pushes the surface above the rim
  CHECK_THROWS_AS(test::make_scenario_h({{0.0, 2.0, StageModel::pde, 790, 0, 0, 5},
                                         {2.0, 4.0, StageModel::pde, 790, 0, 0, 5}}),
                  config_error);
  // simultaneous fill and extraction violates the activity windows
  CHECK_THROWS_AS(test::make_scenario_h({{0.0, 1.0, StageModel::pde, 100, 0, 100, 5}}),
                  config_error);
  // non-contiguous stage table
  CHECK_THROWS_AS(test::make_scenario_h({{0.0, 1.0, StageModel::pde, 0, 0, 0, 0},
                                         {1.5, 2.0, StageModel::pde, 0, 0, 0, 0}}),
                  config_error);
}

TEST_CASE("coordinate transform: endpoints, round trips, pipe branch") {
  const Scenario sc = test::example1_scenario();
  const BoundaryTrajectory& tr = sc.trajectory;
  for (double t : {0.0, 1800.0, 3600.0, 5.25 * 3600}) {
    CHECK(tr.xi_of_z(tr.z_bar(t), t) == 0.0);
    CHECK(tr.xi_of_z(3.0, t) == doctest::Approx(1.0).epsilon(1e-15));
    for (double z : {0.11, 0.9, 1.7, 2.3, 2.9}) {
      CHECK(tr.z_of_xi(tr.xi_of_z(z, t), t) == doctest::Approx(z).epsilon(1e-14));
    }
    // pipe: x measured upward from the surface
    const double depth = 3.0 - tr.z_bar(t);
    CHECK(tr.xi_of_pipe_x(depth, t) == doctest::Approx(-1.0).epsilon(1e-14));
  }
}

TEST_CASE("transformation coefficients alpha and beta") {
  const Scenario sc = test::example1_scenario();
  const BoundaryTrajectory& tr = sc.trajectory;
  // alpha vanishes at the bottom and whenever the surface is fixed
  CHECK(tr.alpha(1.0, 1800.0) == 0.0);
  CHECK(tr.alpha(0.3, 4.0 * 3600) == 0.0);
  // mid-fill composition check: alpha(0, t) = -z_bar' * beta
  const double t = 1800.0;
  const double zb = 2.0 - 1.975 * 0.5;  // hand arithmetic
  const double expect = (1.975 / 3600.0) / (3.0 - zb);
  CHECK(tr.z_bar(t) == doctest::Approx(zb).epsilon(1e-13));
  CHECK(tr.alpha(0.0, t) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(tr.beta(t) == doctest::Approx(1.0 / (3.0 - zb)).epsilon(1e-13));
}

TEST_CASE("redefined bulk velocity by stage and face") {
  const Scenario sc = test::example1_scenario();
  {
    // settle: no flows anywhere
    const StageCoeffs c = stage_coeffs(sc, 4.0 * 3600);
    for (double xi : {-0.3, -0.01, 0.2, 0.7, 1.0})
      CHECK(c.q_tilde(xi) == 0.0);
  }
  {
    // idle: bottom face advects at beta q_u
    const StageCoeffs c = stage_coeffs(sc, 5.75 * 3600);
    CHECK(c.q_tilde(1.0) == doctest::Approx(c.beta * c.q_u).epsilon(1e-13));
  }
  {
    // draw: pipe faces move upward at -beta (xi q_out + q_e)
    const StageCoeffs c = stage_coeffs(sc, 5.25 * 3600);
    const double xi = -0.005;
    CHECK(c.q_tilde(xi) ==
          doctest::Approx(-c.beta * (xi * (c.q_u + c.q_e) + c.q_e)).epsilon(1e-13));
    CHECK(c.q_tilde(xi) < 0.0);
  }
}

TEST_CASE("volume bookkeeping is exact for piecewise-constant flows") {
  const Scenario sc = test::example1_scenario();
  for (const Stage& s : sc.stages) {
    const double dV = sc.trajectory.volume(s.t_end) - sc.trajectory.volume(s.t_start);
    const double Q_bar = s.extraction() ? -s.Q_e : s.Q_f;
    CHECK(dV == doctest::Approx((Q_bar - s.Q_u) * (s.t_end - s.t_start)).epsilon(1e-12));
  }
}

TEST_CASE("surface speed bound and effective zeta") {
  const Scenario sc = test::example1_scenario();
  for (const Stage& s : sc.stages) {
    const double zp = sc.trajectory.z_bar_prime(0.5 * (s.t_start + s.t_end));
    CHECK(zp >= -s.Q_f / sc.geometry.A - 1e-18);
    CHECK(zp <= (s.Q_u + s.Q_e) / sc.geometry.A + 1e-18);
    for (double f : {0.0, 0.5, 1.0}) {
      const double t = s.t_start + f * (s.t_end - s.t_start);
      CHECK(sc.trajectory.beta(t) <= sc.trajectory.zeta_effective() + 1e-14);
    }
  }
}

TEST_CASE("feed solids above the packing limit are rejected") {
  CHECK_THROWS_AS(test::make_scenario_h({{0.0, 1.0, StageModel::pde, 790, 0, 0, 40.0}}),
                  config_error);
}

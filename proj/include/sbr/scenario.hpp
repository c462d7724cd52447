#pragma once

#include "sbr/biokinetics.hpp"
#include "sbr/constitutive.hpp"
#include "sbr/types.hpp"

#include <memory>
#include <vector>

namespace sbr {

enum class StageModel { pde, ode_mixing };

/// One stage of the cycle with piecewise-constant flows (SI units).
struct Stage {
  double t_start = 0.0;  // s
  double t_end = 0.0;    // s
  StageModel model = StageModel::pde;
  double Q_f = 0.0;  // m^3/s
  double Q_u = 0.0;  // m^3/s
  double Q_e = 0.0;  // m^3/s
  double X_f = 0.0;  // kg/m^3

  bool extraction() const { return Q_e > 0.0; }
};

struct TankGeometry {
  double B = 3.0;         // depth, m
  double A = 400.0;       // cross-section, m^2
  double B_c = 0.5;       // minimum mixture depth, m
  double z_bar0 = 0.0;    // initial surface position, m
};

struct FeedSpec {
  Vec6 p_f = Vec6::Zero();  // feed percentages, sum to 1
  Vec6 S_f = Vec6::Zero();  // kg/m^3
};

/// Piecewise-constant initial condition in physical depth z.
struct InitialProfile {
  double clear_above = 0.0;  // C = S = 0 for z < clear_above
  Vec6 C0 = Vec6::Zero();
  Vec6 S0 = Vec6::Zero();

  Vec6 C_at(double z) const { return z >= clear_above ? C0 : Vec6::Zero(); }
  Vec6 S_at(double z) const { return z >= clear_above ? S0 : Vec6::Zero(); }
};

struct NumericsDefaults {
  int cells = 100;
  SchemeKind scheme = SchemeKind::semi_implicit;
  FluxKind flux = FluxKind::engquist_osher;
  double newton_epsilon = 1e-8;
  int newton_max_iter = 200;
  double cfl_safety = 0.95;
  double snapshot_s = 60.0;
};

/// Closed-form piecewise-affine surface trajectory induced by the flows,
/// plus the transformation coefficients alpha and beta.
class BoundaryTrajectory {
public:
  BoundaryTrajectory() = default;
  BoundaryTrajectory(const std::vector<Stage>& stages, const TankGeometry& geom);

  double z_bar(double t) const;
  double z_bar_prime(double t) const;  // stage-constant slope
  double beta(double t) const { return 1.0 / (geom_.B - z_bar(t)); }
  double volume(double t) const { return geom_.A * (geom_.B - z_bar(t)); }
  double alpha(double xi, double t) const {
    return -z_bar_prime(t) * (1.0 - xi) * beta(t);
  }

  double xi_of_z(double z, double t) const {
    return (z - z_bar(t)) / (geom_.B - z_bar(t));
  }
  double z_of_xi(double xi, double t) const {
    return (geom_.B - z_bar(t)) * xi + z_bar(t);
  }
  double xi_of_pipe_x(double x, double t) const { return -x / (geom_.B - z_bar(t)); }

  /// max_t beta(t) over the schedule (attained at a stage endpoint).
  double zeta_effective() const { return zeta_; }
  double total_time() const { return knots_t_.back(); }

private:
  TankGeometry geom_;
  std::vector<double> knots_t_;   // stage boundaries, size n+1
  std::vector<double> knots_z_;   // z_bar at boundaries
  std::vector<double> slopes_;    // z_bar' per stage
  double zeta_ = 0.0;
};

/// Fully resolved simulation scenario; immutable after construction.
struct Scenario {
  TankGeometry geometry;
  std::vector<Stage> stages;
  FeedSpec feed;
  InitialProfile initial;
  NumericsDefaults numerics;

  std::shared_ptr<const Constitutive> constitutive;
  Asm1Params kinetics;
  std::shared_ptr<const Biokinetics> biokinetics;
  BoundaryTrajectory trajectory;
  ReactionBounds reaction_bounds;

  const Stage& stage_at(double t) const;
  double total_time() const { return stages.back().t_end; }
};

/// Validates stage table and geometry, builds trajectory, kinetics and the
/// sampled reaction bounds. Throws config_error with the offending detail.
Scenario make_scenario(TankGeometry geometry, std::vector<Stage> stages, FeedSpec feed,
                       InitialProfile initial, ConstitutiveParams constitutive,
                       Asm1Params kinetics, NumericsDefaults numerics = {},
                       int bound_samples = 100000);

}  // namespace sbr

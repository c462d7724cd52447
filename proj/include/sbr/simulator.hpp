#pragma once

#include "sbr/mixing.hpp"
#include "sbr/semi_implicit.hpp"

#include <vector>

namespace sbr {

struct RunOptions {
  int cells = 100;
  SchemeKind scheme = SchemeKind::semi_implicit;
  FluxKind flux = FluxKind::engquist_osher;
  NewtonConfig newton;
  double cfl_safety = 0.95;
  double snapshot_s = 60.0;
  std::vector<double> hard_times;  // times the stepper must land on exactly

  static RunOptions from(const NumericsDefaults& d) {
    RunOptions o;
    o.cells = d.cells;
    o.scheme = d.scheme;
    o.flux = d.flux;
    o.newton.epsilon = d.newton_epsilon;
    o.newton.max_iter = d.newton_max_iter;
    o.cfl_safety = d.cfl_safety;
    o.snapshot_s = d.snapshot_s;
    return o;
  }
};

/// Profile snapshot in both coordinates: z per cell plus X, C = pX/c, S.
struct Snapshot {
  double t = 0.0;
  double z_bar = 0.0;
  ArrayXd z;  // physical position of every cell center
  ArrayXd X;
  MatX6 C;
  MatX6 S;
};

struct OutletRecord {
  double t = 0.0;
  double X_e = 0.0, X_u = 0.0;
  Vec6 C_e = Vec6::Zero(), S_e = Vec6::Zero();
  Vec6 C_u = Vec6::Zero(), S_u = Vec6::Zero();
};

struct RunDiagnostics {
  long steps = 0;
  long newton_iterations = 0;
  long newton_steps = 0;  // semi-implicit PDE steps
  OmegaDefects omega;
  double max_rowsum_defect = 0.0;
  long flux_clamps = 0;
  double wall_seconds = 0.0;  // time loop only

  double mean_newton_iterations() const {
    return newton_steps > 0 ? double(newton_iterations) / double(newton_steps) : 0.0;
  }
};

/// Conserved-quantity audit in the computational coordinate. The ledgers are
/// the step formulas' own boundary/source/stretch terms, so a residual above
/// round-off indicates an implementation inconsistency.
struct MassAuditReport {
  double initial_x = 0.0, final_x = 0.0;
  MassLedger x;
  Vec6 initial_s = Vec6::Zero(), final_s = Vec6::Zero();
  std::array<MassLedger, 6> s;

  static double residual(double initial, double final_mass, const MassLedger& l);
  static double scale(double initial, const MassLedger& l);
  double x_residual_rel() const;
  double max_s_residual_rel() const;
};

struct SimulationOutput {
  int N = 0;
  double delta_xi = 0.0;
  double B = 0.0;
  SchemeKind scheme = SchemeKind::semi_implicit;
  FluxKind flux = FluxKind::engquist_osher;
  std::vector<Snapshot> snapshots;
  std::vector<OutletRecord> outlets;
  RunDiagnostics diag;
  MassAuditReport audit;

  const Snapshot* snapshot_at(double t, double tol = 1e-6) const;
};

/// Outlet record per the extraction/underflow activity windows.
OutletRecord outlet_concentrations(const GridState& state, const Grid& grid,
                                   const StageCoeffs& c, double c_conv);

/// Physical-coordinate view of the current state.
Snapshot snapshot_to_z(const GridState& state, const Grid& grid, const Scenario& sc);

/// Full time-loop driver: stage switching between the PDE schemes and the
/// mixed-tank ODE model, per-stage CFL steps, snapshots and outlet series.
SimulationOutput run(const Scenario& sc, const RunOptions& opt);

}  // namespace sbr

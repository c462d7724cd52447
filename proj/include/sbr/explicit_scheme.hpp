#pragma once

#include "sbr/fluxes.hpp"
#include "sbr/state.hpp"

#include <array>

namespace sbr {

/// Exact per-run bookkeeping of one conserved quantity in the computational
/// coordinate (full-weight cell sums over the tank cells j = 0..N).
struct MassLedger {
  double inflow = 0.0;
  double outflow_top = 0.0;
  double outflow_bottom = 0.0;
  double reaction = 0.0;
  double stretch = 0.0;  // coordinate-change volume bookkeeping (kappa terms)
  double handoff = 0.0;  // PDE <-> mixed-stage representation changes
};

struct StepAudit {
  MassLedger x;
  std::array<MassLedger, 6> s;
};

struct StepDiagnostics {
  OmegaDefects omega;
  double rowsum_defect = 0.0;  // |sum_k (pX)_k - X^{n+1}| / X^{n+1}, pre-projection
  int flux_clamps = 0;
  int newton_iterations = 0;
  double newton_residual = 0.0;
};

/// Reaction terms of every tank cell at the current state.
struct ReactionField {
  ArrayXd R;  // total, c * sum R_C
  MatX6 R_C;
  MatX6 R_S;
};

ReactionField evaluate_reactions(const GridState& state, const Grid& grid,
                                 const Biokinetics& bio);

/// Checks that the grid resolves the stage's boundary flow directions
/// (all fluxes at the open ends point out of the tank).
void validate_stage_resolution(const Grid& grid, const StageCoeffs& c);

/// One explicit Euler step of (X, P, S), including the outlet layers
/// j = -1 and N+1 and their zero-rules. Advances state.t by tau.
StepDiagnostics explicit_step(GridState& state, const Grid& grid, const Scenario& sc,
                              const StageCoeffs& c, double tau, FluxKind flux,
                              StepAudit* audit = nullptr);

/// The three sub-updates, exposed for targeted tests. step_x returns the new
/// totals; step_p/step_s return the new matrices given those totals.
ArrayXd step_x(const GridState& state, const Grid& grid, const FluxSet& fs,
               const ArrayXd& kappa, const ReactionField& rf, const StageCoeffs& c,
               double tau);
MatX6 step_p(const GridState& state, const Grid& grid, const FluxSet& fs,
             const ArrayXd& kappa, const ReactionField& rf, const StageCoeffs& c,
             const ArrayXd& X_new, double tau, double c_conv,
             double* rowsum_defect = nullptr);
MatX6 step_s(const GridState& state, const Grid& grid, const FluxSet& fs,
             const ArrayXd& kappa, const ReactionField& rf, const StageCoeffs& c,
             double tau, double rho_X);

}  // namespace sbr

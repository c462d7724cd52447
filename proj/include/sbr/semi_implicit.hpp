#pragma once

#include "sbr/explicit_scheme.hpp"
#include "sbr/tridiagonal.hpp"

namespace sbr {

struct NewtonConfig {
  double epsilon = 1e-8;  // relative l1 termination tolerance on the update
  int max_iter = 200;
};

struct NewtonResult {
  ArrayXd x;
  int iterations = 0;
  double last_step_rel = 0.0;
  double residual_l1 = 0.0;  // ||phi(x)||_1 after acceptance
};

/// Explicit predictor: the X-update without the degenerate-diffusion term.
/// Boundary layers j = -1 and N+1 are already final.
ArrayXd predictor_x(const GridState& state, const Grid& grid, const FluxSet& fs_adv,
                    const ArrayXd& kappa, const ReactionField& rf, const StageCoeffs& c,
                    double tau);

/// Newton-Raphson solve of u + beta^2 mu T 𝒟(u) = X_tilde on the interior
/// cells j = 0..N; u starts from the previous accepted totals. Each iteration
/// factors and solves one tridiagonal system.
NewtonResult newton_solve(const ArrayXd& X_tilde_interior, const ArrayXd& u0,
                          double beta, double mu, const Constitutive& con,
                          const NewtonConfig& cfg, double t_for_errors);

/// Linearly-implicit percentage update: one factorization of the tridiagonal
/// system per contiguous block of cells with X^{n+1} > 0, six right-hand
/// sides. Cells with vanishing totals keep their previous percentages.
MatX6 step_p_implicit(const GridState& state, const Grid& grid, const ArrayXd& phi_mixed,
                      const ArrayXd& kappa, const ReactionField& rf, const StageCoeffs& c,
                      const ArrayXd& X_new, double tau, double c_conv,
                      double* rowsum_defect = nullptr);

/// Linearly-implicit substrate update (one factorization, six right-hand sides).
MatX6 step_s_implicit(const GridState& state, const Grid& grid, const FluxSet& fs_adv,
                      const ArrayXd& J_new, const ArrayXd& kappa, const ReactionField& rf,
                      const StageCoeffs& c, const ArrayXd& X_new, double tau, double rho_X,
                      Vec6* outflow_top = nullptr, Vec6* outflow_bottom = nullptr);

/// One semi-implicit step: predictor, Newton solve for X, implicit solves
/// for P and S. Advances state.t by tau.
StepDiagnostics semi_implicit_step(GridState& state, const Grid& grid, const Scenario& sc,
                                   const StageCoeffs& c, double tau, FluxKind flux,
                                   const NewtonConfig& cfg, StepAudit* audit = nullptr);

}  // namespace sbr

#pragma once

#include "sbr/grid.hpp"
#include "sbr/scenario.hpp"
#include "sbr/types.hpp"

namespace sbr {

/// Cell-averaged totals X, percentage matrix P and substrate matrix S over
/// cells j = -1..N+1 (row/index i = j+1), plus the current time.
struct GridState {
  double t = 0.0;
  ArrayXd X;
  MatX6 P;
  MatX6 S;

  static GridState zero(const Grid& grid) {
    GridState s;
    s.X = ArrayXd::Zero(grid.num_cells());
    s.P = MatX6::Zero(grid.num_cells(), 6);
    s.S = MatX6::Zero(grid.num_cells(), 6);
    return s;
  }
};

/// Admissible-set projection budget. Violations within `slack` are clamped
/// silently; anything larger aborts the step. The row-sum cap is widened for
/// loose Newton tolerances, where the percentage identity only holds up to
/// the nonlinear-solve residual.
struct OmegaLimits {
  double X_hat = 0.0;
  double slack = 1e-10;
  double rowsum_cap = 1e-10;
};

struct OmegaDefects {
  double x_out = 0.0;   // distance outside [0, X_hat]
  double p_neg = 0.0;   // most negative percentage
  double p_sum = 0.0;   // |sum p - 1| before renormalization
  double s_neg = 0.0;   // most negative substrate

  double max_defect() const { return std::max({x_out, p_neg, p_sum, s_neg}); }
  void merge(const OmegaDefects& o) {
    x_out = std::max(x_out, o.x_out);
    p_neg = std::max(p_neg, o.p_neg);
    p_sum = std::max(p_sum, o.p_sum);
    s_neg = std::max(s_neg, o.s_neg);
  }
};

/// Clamps round-off exits from the invariant region and renormalizes the
/// percentage rows. Throws step_error if any defect exceeds its cap.
OmegaDefects omega_project(GridState& state, const OmegaLimits& lim);

/// Membership test with absolute tolerance (no modification).
bool in_omega(const GridState& state, double X_hat, double tol = 1e-10);

/// Builds the initial state from the scenario's physical-depth profile,
/// transformed through xi at t = 0. Percentage rows of empty cells are set
/// to the feed percentages.
GridState initial_state(const Scenario& sc, const Grid& grid);

}  // namespace sbr

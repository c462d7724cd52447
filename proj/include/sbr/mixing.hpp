#pragma once

#include "sbr/explicit_scheme.hpp"

namespace sbr {

/// Spatially homogeneous state used during fully mixed (react) stages.
struct MixedState {
  double t = 0.0;
  double X = 0.0;
  Vec6 p = Vec6::Zero();
  Vec6 S = Vec6::Zero();
};

/// Tank averages with the half-weight straddling feed cell; percentages are
/// mass-weighted (falls back to `fallback_p` when the tank is empty).
MixedState average_profile(const GridState& state, const Grid& grid,
                           const Vec6& fallback_p);

/// One Euler step of the mixed-tank balance for (X, pX, S).
void euler_mix_step(MixedState& mixed, const StageCoeffs& c, const Biokinetics& bio,
                    double X_hat, double tau, StepAudit* audit = nullptr);

/// Distributes the mixed values uniformly over the tank cells;
/// the outlet layers are zeroed.
void reallocate(const MixedState& mixed, const Grid& grid, GridState& state);

}  // namespace sbr

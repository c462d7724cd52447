#pragma once

#include "sbr/constitutive.hpp"
#include "sbr/grid.hpp"
#include "sbr/scenario.hpp"
#include "sbr/types.hpp"

namespace sbr {

/// Upw(a; b, c) = a+ b + a- c.
inline double upwind(double a, double b, double c) {
  return std::max(a, 0.0) * b + std::min(a, 0.0) * c;
}

/// Everything the flux formulas need about the current stage at time t.
struct StageCoeffs {
  double t = 0.0;
  double beta = 0.0;
  double z_bar_prime = 0.0;
  double q_f = 0.0, q_u = 0.0, q_e = 0.0;  // bulk velocities, m/s
  double X_f = 0.0;
  Vec6 p_f = Vec6::Zero();
  Vec6 S_f = Vec6::Zero();
  bool extraction = false;
  StageModel model = StageModel::pde;

  double alpha(double xi) const { return -z_bar_prime * (1.0 - xi) * beta; }

  /// Redefined bulk velocity at an interface; pipe faces sit at xi < 0.
  double q_tilde(double xi_face) const {
    if (xi_face < 0.0) {
      if (!extraction) return 0.0;
      return -beta * (xi_face * (q_u + q_e) + q_e);
    }
    return alpha(xi_face) + beta * q_u;
  }
};

StageCoeffs stage_coeffs(const Scenario& sc, double t);

/// Engquist-Osher flux for the unimodal batch flux, scaled by the face gamma.
/// Inputs outside [0, X_hat + 1e-9] are clamped (counted when a counter is given).
double engquist_osher(double u, double v, double gamma_face, const Constitutive& con,
                      int* clamp_count = nullptr);

/// Two-point Godunov flux (min over [u,v] when u <= v, max over [v,u] otherwise).
double godunov(double u, double v, double gamma_face, const Constitutive& con,
               int* clamp_count = nullptr);

/// Per-interface fluxes for one time level; arrays are indexed by face i.
struct FluxSet {
  ArrayXd q_tilde;    // bulk velocity at faces
  ArrayXd eo;         // ℰ: gamma-scaled Engquist-Osher (or Godunov) part
  ArrayXd bulk;       // ℬ: upwinded bulk transport
  ArrayXd convective; // ℱ = ℬ + beta ℰ, boundary cases folded in
  ArrayXd diffusive;  // 𝒥: gamma beta^2/dxi * (𝒟(X_{j+1}) - 𝒟(X_j))
  ArrayXd total;      // Φ = ℱ - 𝒥
  int clamp_count = 0;
};

/// Assembles all interface fluxes. The advective part uses X_adv, the
/// degenerate-diffusion part uses X_diff (pass the same array for a fully
/// explicit evaluation, the new iterate for the mixed Φ^{n,n+1}).
FluxSet assemble_fluxes(const ArrayXd& X_adv, const ArrayXd& X_diff, const Grid& grid,
                        const StageCoeffs& c, const Constitutive& con, FluxKind flux,
                        bool with_diffusion = true);

/// kappa_j coefficients of the update formulas, one per cell index.
ArrayXd kappa_coefficients(const Grid& grid, const StageCoeffs& c, double tau);

/// Constants feeding both CFL conditions (per stage).
struct CflConstants {
  double zeta = 0.0;
  double M_q1 = 0.0;
  double M_q2 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double f_prime_sup = 0.0;
  double a_sup = 0.0;
  double M_R = 0.0, M_C = 0.0, M_S = 0.0;
  double rho_X = 0.0;
  double X_hat = 0.0;
};

CflConstants cfl_constants(const Scenario& sc, const Stage& stage);

/// Largest admissible time step for the requested scheme times the safety
/// factor. The semi-implicit bound is the explicit one with the C2 terms
/// dropped. Throws config_error if the result is not positive.
double cfl_tau(const CflConstants& k, double delta_xi, SchemeKind scheme,
               double safety = 0.95);

}  // namespace sbr

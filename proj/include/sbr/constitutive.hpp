#pragma once

#include "sbr/types.hpp"

#include <vector>

namespace sbr {

/// Hindered-settling and effective-stress parameters, SI units throughout.
struct ConstitutiveParams {
  double v0 = 1.76e-3;       // m/s
  double X_breve = 3.87;     // kg/m^3
  double eta = 3.58;         // -
  double X_c = 5.0;          // kg/m^3, critical (gel) concentration
  double sigma0 = 0.2;       // m^2/s^2, effective-stress slope above X_c
  double rho_X = 1050.0;     // kg/m^3
  double rho_L = 998.0;      // kg/m^3
  double g = 9.81;           // m/s^2
  double X_tangent = 25.0;   // kg/m^3, onset of the tangent extension
  double c_conv = 0.75;      // kg/(kg COD)

  double delta_rho() const { return rho_X - rho_L; }
  void validate() const;  // throws config_error
};

/// Quantities derived once from the parameters and cached.
struct DerivedConstitutive {
  double X_hat = 0.0;         // maximum packing concentration (tangent root)
  double X_star = 0.0;        // maximizer of the batch flux f
  double f_max = 0.0;         // f(X_star)
  double f_prime_sup = 0.0;   // sup |f'| on [0, X_hat], inflated 5%
  double a_sup = 0.0;         // sup a on [0, X_hat], inflated 5%
};

/// Sedimentation-consolidation constitutive laws. Immutable after
/// construction; all evaluations are pure and thread-safe.
///
/// v_hs uses the base law v0/(1+(X/X_breve)^eta) up to X_tangent and its
/// tangent beyond, clamped to zero above the tangent root X_hat. The
/// integrated diffusion 𝒟(X) = ∫_{X_c}^X a(s) ds is served from a dense
/// monotone table with monotone cubic interpolation.
class Constitutive {
public:
  explicit Constitutive(const ConstitutiveParams& params);

  double hindered_settling_velocity(double X) const;  // v_hs; X<0 -> domain_error
  double hindered_settling_slope(double X) const;     // v_hs'
  double effective_stress(double X) const;            // sigma_e
  double effective_stress_derivative(double X) const;
  double diffusion_d(double X) const;                 // d
  double diffusion_a(double X) const;                 // a = X d
  double integrated_diffusion(double X) const;        // 𝒟, clamped to [0, X_hat]
  double batch_flux(double X) const;                  // f = v_hs X

  const ConstitutiveParams& params() const { return params_; }
  const DerivedConstitutive& derived() const { return derived_; }
  double X_hat() const { return derived_.X_hat; }
  double X_star() const { return derived_.X_star; }

private:
  void build_diffusion_table();
  void derive_extrema();

  ConstitutiveParams params_;
  DerivedConstitutive derived_;
  double tangent_slope_ = 0.0;  // v_hs'(X_tangent) < 0
  double a_factor_ = 0.0;       // rho_X sigma0 / (g delta_rho)

  // monotone cubic table of 𝒟 on [X_c, X_hat]
  std::vector<double> tab_x_, tab_d_, tab_m_;
};

/// Tangent root X_hat = X_t - v_hs(X_t)/v_hs'(X_t) for the base law.
/// Exposed separately so the derivation is testable on its own.
double derive_x_hat(const ConstitutiveParams& params);

}  // namespace sbr

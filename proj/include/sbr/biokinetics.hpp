#pragma once

#include "sbr/types.hpp"

#include <array>
#include <cstdint>

namespace sbr {

/// Kinetic and stoichiometric constants of the modified ASM1 network.
/// Rates are stored in 1/s (the ammonification rate k_a in m^3/(kg s));
/// half-saturation constants in kg/m^3 except the dimensionless K_X.
struct Asm1Params {
  double Y_A = 0.24;
  double Y_H = 0.67;
  double f_P = 0.08;
  double i_XB = 0.086;
  double i_XP = 0.06;

  double mu_H = 6.0 / kSecondsPerDay;
  double b_H = 0.62 / kSecondsPerDay;
  double mu_A = 0.8 / kSecondsPerDay;
  double b_A = 0.15 / kSecondsPerDay;
  double k_h = 3.0 / kSecondsPerDay;
  double k_a = 0.08 * 1e3 / kSecondsPerDay;  // table value is m^3/(g COD d)

  double K_S = 20.0e-3;
  double K_OH = 0.2e-3;
  double K_NO = 0.5e-3;
  double K_X = 0.03;
  double K_NH = 1.0e-3;
  double K_NH_bar = 0.05e-3;
  double K_OA = 0.4e-3;

  double eta_g = 0.8;
  double eta_h = 0.4;

  double eps_cutoff = 0.0;  // growth-cutoff width near X_hat, kg/m^3

  void validate() const;
};

/// Stoichiometric matrices of the modified ASM1 (nitrogen carried in
/// X_S-ND = X_S - X_ND so that the particulates sum to X/c).
struct StoichiometricModel {
  Mat6x8 sigma_C;
  Mat6x8 sigma_S;
  double c_conv = 0.75;

  static StoichiometricModel build(const Asm1Params& p, double c_conv);
};

/// Sampled Lipschitz bounds of the reaction terms over the admissible box,
/// inflated by a safety factor; they feed both CFL conditions.
struct ReactionBounds {
  double M_R = 0.0;
  double M_C = 0.0;
  double M_S = 0.0;
};

/// Per-cell reaction evaluation (one rate vector shared by all three updates).
struct CellReactions {
  Vec6 R_C = Vec6::Zero();  // particulate source, growth cutoff applied
  Vec6 R_S = Vec6::Zero();  // soluble source
  double R = 0.0;           // c * sum_k R_C^(k)
};

/// Modified ASM1 reaction model. Pure functions over immutable parameters.
class Biokinetics {
public:
  Biokinetics(const Asm1Params& params, double c_conv, double X_hat);

  /// Eight nonnegative process rates; negative inputs are clamped to zero
  /// before evaluation, non-finite inputs raise numerical_error.
  Vec8 reaction_rates(const Vec6& C, const Vec6& S) const;

  /// sigma_C * r scaled by the linear growth cutoff chi(X).
  Vec6 particulate_reactions(const Vec6& C, const Vec6& S, double X) const;
  Vec6 soluble_reactions(const Vec6& C, const Vec6& S) const;
  double total_reaction(const Vec6& C, const Vec6& S, double X) const;
  CellReactions evaluate(const Vec6& C, const Vec6& S, double X) const;

  /// chi(X) = clamp((X_hat - X)/eps, 0, 1).
  double growth_cutoff(double X) const;

  /// Analytic Jacobian of the rate vector at clamped (C, S).
  void rate_jacobian(const Vec6& C, const Vec6& S, Mat8x6& dr_dC, Mat8x6& dr_dS) const;

  /// max_k sum over negative-stoichiometry processes of |sigma| * (r_l / C_k),
  /// evaluated in factored form (finite as C_k -> 0). For the soluble bound,
  /// components whose admissible box is degenerate at zero never lose
  /// positivity and are excluded via `active`.
  double particulate_decay_bound(const Vec6& C, const Vec6& S) const;
  double soluble_decay_bound(const Vec6& C, const Vec6& S,
                             const std::array<bool, 6>& active = {true, true, true, true,
                                                                  true, true}) const;

  /// (1/c) |dR/dC_k| maximized over k, growth cutoff included.
  double total_reaction_gradient_bound(const Vec6& C, const Vec6& S, double X) const;

  const Asm1Params& params() const { return params_; }
  const StoichiometricModel& stoichiometry() const { return stoich_; }
  double X_hat() const { return X_hat_; }
  double c_conv() const { return stoich_.c_conv; }

private:
  Asm1Params params_;
  StoichiometricModel stoich_;
  double X_hat_;
};

/// Latin-hypercube estimate of M_R, M_C, M_S over the box
/// {0 <= X <= X_hat, p on the simplex, 0 <= S_k <= S_box_k}.
ReactionBounds derivative_bounds(const Biokinetics& bio, const Vec6& S_box,
                                 int samples = 100000, double inflation = 1.5,
                                 std::uint64_t seed = 0x5b5u);

}  // namespace sbr

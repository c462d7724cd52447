#include "sbr/mixing.hpp"

#include <cmath>

namespace sbr {

MixedState average_profile(const GridState& state, const Grid& grid,
                           const Vec6& fallback_p) {
  MixedState m;
  m.t = state.t;
  double mass = 0.0;
  Vec6 pmass = Vec6::Zero();
  for (int j = 0; j <= grid.N; ++j) {
    const int i = grid.idx(j);
    const double w = (j == 0 ? 0.5 : 1.0) * grid.delta_xi;
    m.X += w * state.X[i];
    m.S += w * state.S.row(i).transpose();
    mass += w * state.X[i];
    pmass += w * state.X[i] * state.P.row(i).transpose();
  }
  m.p = mass > 0.0 ? Vec6(pmass / mass) : fallback_p;
  return m;
}

void euler_mix_step(MixedState& mixed, const StageCoeffs& c, const Biokinetics& bio,
                    double X_hat, double tau, StepAudit* audit) {
  const double cc = bio.c_conv();
  const Vec6 C = mixed.X > 0.0 ? Vec6(mixed.p * mixed.X / cc) : Vec6::Zero();
  const CellReactions r = bio.evaluate(C, mixed.S, mixed.X);

  const double drain = c.beta * (c.q_u + c.q_e);  // bulk outflows at tank concentration
  const double grow = c.beta * c.z_bar_prime;

  const double X_old = mixed.X;
  const Vec6 S_old = mixed.S;
  const Vec6 pX_old = mixed.p * mixed.X;

  mixed.X = X_old + tau * (grow * X_old - drain * X_old + c.beta * c.q_f * c.X_f + r.R);
  const Vec6 pX_new = pX_old + tau * (grow * pX_old - drain * pX_old +
                                      c.beta * c.q_f * c.X_f * c.p_f + cc * r.R_C);
  mixed.S = S_old + tau * (grow * S_old - drain * S_old +
                           Vec6(c.beta * c.q_f * c.S_f) + r.R_S);
  if (mixed.X > 0.0) mixed.p = pX_new / mixed.X;
  mixed.t += tau;

  if (audit) {
    audit->x.stretch += tau * grow * X_old;
    audit->x.inflow += tau * c.beta * c.q_f * c.X_f;
    audit->x.outflow_top += tau * c.beta * c.q_e * X_old;
    audit->x.outflow_bottom += tau * c.beta * c.q_u * X_old;
    audit->x.reaction += tau * r.R;
    for (int k = 0; k < 6; ++k) {
      audit->s[k].stretch += tau * grow * S_old[k];
      audit->s[k].inflow += tau * c.beta * c.q_f * c.S_f[k];
      audit->s[k].outflow_top += tau * c.beta * c.q_e * S_old[k];
      audit->s[k].outflow_bottom += tau * c.beta * c.q_u * S_old[k];
      audit->s[k].reaction += tau * r.R_S[k];
    }
  }

  // admissibility with round-off slack
  const double slack = 1e-10;
  if (mixed.X < -slack || mixed.X > X_hat + slack || (mixed.S.array() < -slack).any() ||
      (mixed.p.array() < -slack).any())
    throw step_error("mixed stage left the invariant region", mixed.t);
  mixed.X = std::clamp(mixed.X, 0.0, X_hat);
  mixed.S = mixed.S.cwiseMax(0.0);
  mixed.p = mixed.p.cwiseMax(0.0);
  const double psum = mixed.p.sum();
  if (psum > 0.0) {
    if (std::abs(psum - 1.0) > slack)
      throw step_error("mixed stage percentages lost normalization", mixed.t);
    mixed.p /= psum;
  }
}

void reallocate(const MixedState& mixed, const Grid& grid, GridState& state) {
  state.t = mixed.t;
  state.X.setZero();
  state.S.setZero();
  for (int j = 0; j <= grid.N; ++j) {
    const int i = grid.idx(j);
    state.X[i] = mixed.X;
    state.P.row(i) = mixed.p.transpose();
    state.S.row(i) = mixed.S.transpose();
  }
}

}  // namespace sbr

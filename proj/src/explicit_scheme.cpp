#include "sbr/explicit_scheme.hpp"

#include <cmath>

namespace sbr {

ReactionField evaluate_reactions(const GridState& state, const Grid& grid,
                                 const Biokinetics& bio) {
  ReactionField rf;
  const int nc = grid.num_cells();
  rf.R = ArrayXd::Zero(nc);
  rf.R_C = MatX6::Zero(nc, 6);
  rf.R_S = MatX6::Zero(nc, 6);
  const double c = bio.c_conv();
  for (int j = 0; j <= grid.N; ++j) {
    const int i = grid.idx(j);
    const Vec6 C = (state.P.row(i).transpose() * state.X[i]) / c;
    const CellReactions r = bio.evaluate(C, state.S.row(i).transpose(), state.X[i]);
    rf.R_C.row(i) = r.R_C.transpose();
    rf.R_S.row(i) = r.R_S.transpose();
    rf.R[i] = r.R;
  }
  return rf;
}

void validate_stage_resolution(const Grid& grid, const StageCoeffs& c) {
  if (c.extraction) {
    // Pipe-face velocities must point out of the tank: q_e >= 1.5 dxi q_out.
    if (c.q_e < 1.5 * grid.delta_xi * (c.q_u + c.q_e))
      throw config_error("extraction flows are under-resolved at this grid; increase the "
                         "cell count so the top boundary fluxes point out of the tank");
  }
  if (c.q_u > 0.0 && c.q_tilde(grid.xi_face(grid.N + 3)) < 0.0)
    throw config_error("underflow face velocity points into the tank; increase the cell "
                       "count or reduce the feed-to-underflow ratio");
}

ArrayXd step_x(const GridState& state, const Grid& grid, const FluxSet& fs,
               const ArrayXd& kappa, const ReactionField& rf, const StageCoeffs& c,
               double tau) {
  const double lambda = tau / grid.delta_xi;
  ArrayXd Xn(grid.num_cells());
  for (int j = -1; j <= grid.N + 1; ++j) {
    const int i = grid.idx(j);
    if ((j == -1 && !c.extraction) || (j == grid.N + 1 && c.q_u <= 0.0)) {
      Xn[i] = 0.0;
      continue;
    }
    double v = kappa[i] * state.X[i] - lambda * (fs.total[i + 1] - fs.total[i]) +
               tau * grid.gamma_cell(j) * rf.R[i];
    if (j == 0) v += lambda * c.beta * c.q_f * c.X_f;
    Xn[i] = v;
  }
  return Xn;
}

MatX6 step_p(const GridState& state, const Grid& grid, const FluxSet& fs,
             const ArrayXd& kappa, const ReactionField& rf, const StageCoeffs& c,
             const ArrayXd& X_new, double tau, double c_conv, double* rowsum_defect) {
  const double lambda = tau / grid.delta_xi;
  const int nc = grid.num_cells(), nf = grid.num_faces();

  // Upwinded percentage fluxes; the outermost faces only move mass out of the
  // domain, so the missing ghost neighbors never enter.
  MatX6 phi_p(nf, 6);
  for (int i = 0; i < nf; ++i) {
    const double pos = std::max(fs.total[i], 0.0), neg = std::min(fs.total[i], 0.0);
    const auto up = state.P.row(std::max(i - 1, 0));
    const auto dn = state.P.row(std::min(i, nc - 1));
    phi_p.row(i) = pos * up + neg * dn;
  }

  MatX6 Pn = state.P;
  double defect = 0.0;
  for (int j = -1; j <= grid.N + 1; ++j) {
    const int i = grid.idx(j);
    if ((j == -1 && !c.extraction) || (j == grid.N + 1 && c.q_u <= 0.0)) {
      // zero-rule cells: percentages kept from the previous step
      continue;
    }
    Eigen::Matrix<double, 1, 6> q = kappa[i] * state.X[i] * state.P.row(i) -
                                    lambda * (phi_p.row(i + 1) - phi_p.row(i)) +
                                    tau * grid.gamma_cell(j) * c_conv * rf.R_C.row(i);
    if (j == 0) q += lambda * c.beta * c.q_f * c.X_f * c.p_f.transpose();

    if (X_new[i] == 0.0) continue;  // value irrelevant, keep previous percentages
    const double qsum = q.sum();
    defect = std::max(defect, std::abs(qsum - X_new[i]));
    if (qsum > 0.0)
      Pn.row(i) = q / qsum;
    else
      Pn.row(i) = state.P.row(i);
  }
  // summed percentage masses must reproduce the totals update; report the
  // worst absolute mismatch relative to the profile scale
  if (rowsum_defect)
    *rowsum_defect = defect / std::max(X_new.maxCoeff(), 1e-300);
  return Pn;
}

MatX6 step_s(const GridState& state, const Grid& grid, const FluxSet& fs,
             const ArrayXd& kappa, const ReactionField& rf, const StageCoeffs& c,
             double tau, double rho_X) {
  const double lambda = tau / grid.delta_xi;
  const int nc = grid.num_cells(), nf = grid.num_faces();

  ArrayXd ratio_den(nc);
  for (int i = 0; i < nc; ++i) {
    if (state.X[i] > rho_X * (1.0 - 1e-6))
      throw step_error("solids concentration reached the solids density", state.t);
    ratio_den[i] = 1.0 / (rho_X - state.X[i]);
  }

  MatX6 phi_s(nf, 6);
  for (int i = 0; i < nf; ++i) {
    const double vel = rho_X * fs.q_tilde[i] - fs.total[i];
    const double pos = std::max(vel, 0.0), neg = std::min(vel, 0.0);
    const int iu = std::max(i - 1, 0), id = std::min(i, nc - 1);
    phi_s.row(i) =
        pos * ratio_den[iu] * state.S.row(iu) + neg * ratio_den[id] * state.S.row(id);
  }

  MatX6 Sn = MatX6::Zero(nc, 6);
  for (int j = -1; j <= grid.N + 1; ++j) {
    const int i = grid.idx(j);
    if ((j == -1 && !c.extraction) || (j == grid.N + 1 && c.q_u <= 0.0)) continue;
    Eigen::Matrix<double, 1, 6> s = kappa[i] * state.S.row(i) -
                                    lambda * (phi_s.row(i + 1) - phi_s.row(i)) +
                                    tau * grid.gamma_cell(j) * rf.R_S.row(i);
    if (j == 0) s += lambda * c.beta * c.q_f * c.S_f.transpose();
    Sn.row(i) = s;
  }
  return Sn;
}

namespace {

void accumulate_ledgers(StepAudit* audit, const Grid& grid, const GridState& old_state,
                        const ArrayXd& kappa, const ReactionField& rf,
                        const StageCoeffs& c, double tau, double phi_x_top,
                        double phi_x_bot, const Vec6& phi_s_top, const Vec6& phi_s_bot) {
  if (!audit) return;
  const double dxi = grid.delta_xi;
  double stretch_x = 0.0;
  Vec6 stretch_s = Vec6::Zero();
  double react_x = 0.0;
  Vec6 react_s = Vec6::Zero();
  for (int j = 0; j <= grid.N; ++j) {
    const int i = grid.idx(j);
    stretch_x += (kappa[i] - 1.0) * old_state.X[i] * dxi;
    stretch_s += (kappa[i] - 1.0) * dxi * old_state.S.row(i).transpose();
    react_x += grid.gamma_cell(j) * rf.R[i] * dxi;
    react_s += grid.gamma_cell(j) * dxi * rf.R_S.row(i).transpose();
  }
  audit->x.stretch += stretch_x;
  audit->x.reaction += tau * react_x;
  audit->x.inflow += tau * c.beta * c.q_f * c.X_f;
  audit->x.outflow_top += -tau * phi_x_top;
  audit->x.outflow_bottom += tau * phi_x_bot;
  for (int k = 0; k < 6; ++k) {
    audit->s[k].stretch += stretch_s[k];
    audit->s[k].reaction += tau * react_s[k];
    audit->s[k].inflow += tau * c.beta * c.q_f * c.S_f[k];
    audit->s[k].outflow_top += -tau * phi_s_top[k];
    audit->s[k].outflow_bottom += tau * phi_s_bot[k];
  }
}

}  // namespace

StepDiagnostics explicit_step(GridState& state, const Grid& grid, const Scenario& sc,
                              const StageCoeffs& c, double tau, FluxKind flux,
                              StepAudit* audit) {
  validate_stage_resolution(grid, c);
  const Constitutive& con = *sc.constitutive;
  const Biokinetics& bio = *sc.biokinetics;
  StepDiagnostics diag;

  const FluxSet fs = assemble_fluxes(state.X, state.X, grid, c, con, flux, true);
  diag.flux_clamps = fs.clamp_count;
  const ArrayXd kappa = kappa_coefficients(grid, c, tau);
  const ReactionField rf = evaluate_reactions(state, grid, bio);

  const ArrayXd X_new = step_x(state, grid, fs, kappa, rf, c, tau);
  const MatX6 P_new = step_p(state, grid, fs, kappa, rf, c, X_new, tau, bio.c_conv(),
                             &diag.rowsum_defect);
  const MatX6 S_new = step_s(state, grid, fs, kappa, rf, c, tau,
                             con.params().rho_X);

  if (audit) {
    // Boundary substrate fluxes at the tank openings, for the exact ledger.
    const int top = 1, bot = grid.N + 2;
    const auto phi_s_at = [&](int i) -> Vec6 {
      const double vel = con.params().rho_X * fs.q_tilde[i] - fs.total[i];
      const int iu = std::max(i - 1, 0), id = std::min(i, grid.num_cells() - 1);
      const Vec6 su = state.S.row(iu).transpose() / (con.params().rho_X - state.X[iu]);
      const Vec6 sd = state.S.row(id).transpose() / (con.params().rho_X - state.X[id]);
      return std::max(vel, 0.0) * su + std::min(vel, 0.0) * sd;
    };
    accumulate_ledgers(audit, grid, state, kappa, rf, c, tau, fs.total[top],
                       fs.total[bot], phi_s_at(top), phi_s_at(bot));
  }

  state.X = X_new;
  state.P = P_new;
  state.S = S_new;
  state.t += tau;

  OmegaLimits lim;
  lim.X_hat = con.X_hat();
  diag.omega = omega_project(state, lim);
  return diag;
}

}  // namespace sbr

#include "sbr/semi_implicit.hpp"

#include <cmath>
#include <vector>

namespace sbr {

ArrayXd predictor_x(const GridState& state, const Grid& grid, const FluxSet& fs_adv,
                    const ArrayXd& kappa, const ReactionField& rf, const StageCoeffs& c,
                    double tau) {
  return step_x(state, grid, fs_adv, kappa, rf, c, tau);
}

NewtonResult newton_solve(const ArrayXd& X_tilde, const ArrayXd& u0, double beta,
                          double mu, const Constitutive& con, const NewtonConfig& cfg,
                          double t_for_errors) {
  const int m = int(X_tilde.size());
  const double coef = beta * beta * mu;
  NewtonResult out;

  const auto phi = [&](const ArrayXd& u) {
    ArrayXd D(m);
    for (int i = 0; i < m; ++i) D[i] = con.integrated_diffusion(u[i]);
    ArrayXd td(m);
    td[0] = D[0] - D[1];
    for (int i = 1; i < m - 1; ++i) td[i] = 2.0 * D[i] - D[i - 1] - D[i + 1];
    td[m - 1] = D[m - 1] - D[m - 2];
    return ArrayXd(u + coef * td - X_tilde);
  };

  if (u0.abs().sum() == 0.0) {
    // Fully empty tank: the termination quotient is undefined, accept the
    // predictor directly (the system is the identity there anyway).
    out.x = X_tilde;
    out.residual_l1 = phi(out.x).abs().sum();
    return out;
  }

  ArrayXd u = u0;
  ArrayXd u_prev = u0, u_prev2 = u0;
  TridiagonalSolver solver;
  ArrayXd sub(m), diag(m), super(m), a(m);
  bool converged = false;
  for (int k = 0; k < cfg.max_iter; ++k) {
    for (int i = 0; i < m; ++i) a[i] = con.diffusion_a(u[i]);
    for (int i = 0; i < m; ++i) {
      const double weight = (i == 0 || i == m - 1) ? 1.0 : 2.0;
      diag[i] = 1.0 + coef * weight * a[i];
      sub[i] = i > 0 ? -coef * a[i - 1] : 0.0;
      super[i] = i < m - 1 ? -coef * a[i + 1] : 0.0;
    }
    if (TridiagonalSolver::column_dominance_margin(sub, diag, super) < -1e-12)
      throw numerical_error("newton_solve: Jacobian lost column diagonal dominance");
    solver.factor(sub, diag, super);
    Eigen::VectorXd delta = -phi(u).matrix();
    solver.solve_in_place(delta);
    const double unorm = u.abs().sum();
    u_prev2 = u_prev;
    u_prev = u;
    u += delta.array();
    out.iterations = k + 1;
    out.last_step_rel = unorm > 0.0 ? delta.cwiseAbs().sum() / unorm
                                    : (delta.cwiseAbs().sum() == 0.0 ? 0.0 : 1.0);
    if (out.last_step_rel < cfg.epsilon) {
      converged = true;
      break;
    }
    // The integrated-diffusion slope jumps at X_c, so an iterate straddling
    // the kink can revisit its two-ago point exactly. Bisecting the cycle
    // pair contracts the bracket onto the kink, after which the plain
    // iteration resumes.
    if (k >= 2 && (u - u_prev2).abs().sum() <= 1e-6 * (u - u_prev).abs().sum())
      u = 0.5 * (u + u_prev);
  }
  out.residual_l1 = phi(u).abs().sum();
  if (!converged)
    throw step_error("newton_solve: no convergence within " +
                         std::to_string(cfg.max_iter) + " iterations (residual l1 " +
                         std::to_string(out.residual_l1) + ")",
                     t_for_errors);
  out.x = u;
  return out;
}

namespace {

// Boundary-layer (pX) and S updates shared with the explicit scheme: at the
// pipe and underflow cells every coefficient is evaluated at time n.
void boundary_rows(const GridState& state, const Grid& grid, const ArrayXd& phi,
                   const ArrayXd& q_tilde, const ArrayXd& kappa, const StageCoeffs& c,
                   const ArrayXd& X_new, double tau, double rho_X, MatX6& P_new,
                   MatX6& S_new) {
  const double lambda = tau / grid.delta_xi;
  const int last = grid.num_cells() - 1;

  const auto phi_p_at = [&](int f) -> Eigen::Matrix<double, 1, 6> {
    const int iu = std::max(f - 1, 0), id = std::min(f, last);
    return std::max(phi[f], 0.0) * state.P.row(iu) + std::min(phi[f], 0.0) * state.P.row(id);
  };
  const auto phi_s_at = [&](int f) -> Eigen::Matrix<double, 1, 6> {
    const double vel = rho_X * q_tilde[f] - phi[f];
    const int iu = std::max(f - 1, 0), id = std::min(f, last);
    return std::max(vel, 0.0) / (rho_X - state.X[iu]) * state.S.row(iu) +
           std::min(vel, 0.0) / (rho_X - state.X[id]) * state.S.row(id);
  };

  for (const int j : {-1, grid.N + 1}) {
    const int i = grid.idx(j);
    if ((j == -1 && !c.extraction) || (j == grid.N + 1 && c.q_u <= 0.0)) {
      S_new.row(i).setZero();
      continue;  // zero-rule cell; percentages stay
    }
    const Eigen::Matrix<double, 1, 6> q = kappa[i] * state.X[i] * state.P.row(i) -
                                          lambda * (phi_p_at(i + 1) - phi_p_at(i));
    if (X_new[i] > 0.0) {
      const double qsum = q.sum();
      P_new.row(i) = qsum > 0.0 ? (q / qsum).eval() : state.P.row(i);
    }
    S_new.row(i) = kappa[i] * state.S.row(i) - lambda * (phi_s_at(i + 1) - phi_s_at(i));
  }
}

}  // namespace

MatX6 step_p_implicit(const GridState& state, const Grid& grid, const ArrayXd& phi_mixed,
                      const ArrayXd& kappa, const ReactionField& rf, const StageCoeffs& c,
                      const ArrayXd& X_new, double tau, double c_conv,
                      double* rowsum_defect) {
  const double lambda = tau / grid.delta_xi;
  constexpr double kZeroThreshold = 1e-14;
  MatX6 P_new = state.P;
  double defect = 0.0;

  int j = 0;
  while (j <= grid.N) {
    if (X_new[grid.idx(j)] <= kZeroThreshold) {
      ++j;  // eliminated row: percentages copied
      continue;
    }
    int jb = j;
    while (jb + 1 <= grid.N && X_new[grid.idx(jb + 1)] > kZeroThreshold) ++jb;
    const int m = jb - j + 1;

    ArrayXd sub(m), diag(m), super(m);
    MatX6 rhs(m, 6);
    for (int r = 0; r < m; ++r) {
      const int jj = j + r, i = grid.idx(jj);
      const int fL = i, fR = i + 1;
      diag[r] = X_new[i] + lambda * (std::max(phi_mixed[fR], 0.0) -
                                     std::min(phi_mixed[fL], 0.0));
      sub[r] = r > 0 ? -lambda * std::max(phi_mixed[fL], 0.0) : 0.0;
      super[r] = r < m - 1 ? lambda * std::min(phi_mixed[fR], 0.0) : 0.0;
      Eigen::Matrix<double, 1, 6> row = kappa[i] * state.X[i] * state.P.row(i) +
                                        tau * grid.gamma_cell(jj) * c_conv * rf.R_C.row(i);
      if (jj == 0) row += lambda * c.beta * c.q_f * c.X_f * c.p_f.transpose();
      rhs.row(r) = row;
    }
    if (TridiagonalSolver::column_dominance_margin(sub, diag, super) < -1e-12)
      throw numerical_error("step_p_implicit: system lost column diagonal dominance");
    TridiagonalSolver solver;
    solver.factor(sub, diag, super);
    for (int k = 0; k < 6; ++k) {
      Eigen::VectorXd col = rhs.col(k);
      solver.solve_in_place(col);
      rhs.col(k) = col;
    }
    for (int r = 0; r < m; ++r) {
      const int i = grid.idx(j + r);
      const double s = rhs.row(r).sum();
      defect = std::max(defect, std::abs(s - 1.0) * X_new[i]);
      P_new.row(i) = s > 0.0 ? (rhs.row(r) / s).eval() : state.P.row(i);
    }
    j = jb + 1;
  }
  // the identity holds up to the X-solve residual; report in mass units
  // relative to the profile scale
  if (rowsum_defect)
    *rowsum_defect = defect / std::max(X_new.maxCoeff(), 1e-300);
  return P_new;
}

MatX6 step_s_implicit(const GridState& state, const Grid& grid, const FluxSet& fs_adv,
                      const ArrayXd& J_new, const ArrayXd& kappa, const ReactionField& rf,
                      const StageCoeffs& c, const ArrayXd& X_new, double tau, double rho_X,
                      Vec6* outflow_top, Vec6* outflow_bottom) {
  const double lambda = tau / grid.delta_xi;
  const int m = grid.N + 1;

  ArrayXd theta(grid.num_faces());
  for (int f = 0; f < grid.num_faces(); ++f)
    theta[f] = rho_X * fs_adv.q_tilde[f] - fs_adv.convective[f] + J_new[f];

  ArrayXd y(grid.num_cells());
  for (int i = 0; i < grid.num_cells(); ++i) {
    if (X_new[i] > rho_X * (1.0 - 1e-6))
      throw step_error("solids concentration reached the solids density", state.t);
    y[i] = 1.0 / (rho_X - X_new[i]);
  }

  ArrayXd sub(m), diag(m), super(m);
  MatX6 rhs(m, 6);
  for (int r = 0; r < m; ++r) {
    const int jj = r, i = grid.idx(jj);
    const int fL = i, fR = i + 1;
    diag[r] = 1.0 + lambda * (std::max(theta[fR], 0.0) - std::min(theta[fL], 0.0)) * y[i];
    sub[r] = r > 0 ? -lambda * std::max(theta[fL], 0.0) * y[i - 1] : 0.0;
    super[r] = r < m - 1 ? lambda * std::min(theta[fR], 0.0) * y[i + 1] : 0.0;
    Eigen::Matrix<double, 1, 6> row =
        kappa[i] * state.S.row(i) + tau * grid.gamma_cell(jj) * rf.R_S.row(i);
    if (jj == 0) row += lambda * c.beta * c.q_f * c.S_f.transpose();
    rhs.row(r) = row;
  }
  if (TridiagonalSolver::column_dominance_margin(sub, diag, super) < -1e-12)
    throw numerical_error("step_s_implicit: system lost column diagonal dominance");
  TridiagonalSolver solver;
  solver.factor(sub, diag, super);
  for (int k = 0; k < 6; ++k) {
    Eigen::VectorXd col = rhs.col(k);
    solver.solve_in_place(col);
    rhs.col(k) = col;
  }

  MatX6 S_new = MatX6::Zero(grid.num_cells(), 6);
  for (int r = 0; r < m; ++r) S_new.row(grid.idx(r)) = rhs.row(r);

  if (outflow_top)
    *outflow_top = -std::min(theta[1], 0.0) * y[grid.idx(0)] *
                   S_new.row(grid.idx(0)).transpose();
  if (outflow_bottom)
    *outflow_bottom = std::max(theta[grid.N + 2], 0.0) * y[grid.idx(grid.N)] *
                      S_new.row(grid.idx(grid.N)).transpose();
  return S_new;
}

StepDiagnostics semi_implicit_step(GridState& state, const Grid& grid, const Scenario& sc,
                                   const StageCoeffs& c, double tau, FluxKind flux,
                                   const NewtonConfig& cfg, StepAudit* audit) {
  validate_stage_resolution(grid, c);
  const Constitutive& con = *sc.constitutive;
  const Biokinetics& bio = *sc.biokinetics;
  const double rho_X = con.params().rho_X;
  StepDiagnostics diag;

  const FluxSet fs = assemble_fluxes(state.X, state.X, grid, c, con, flux, false);
  diag.flux_clamps = fs.clamp_count;
  const ArrayXd kappa = kappa_coefficients(grid, c, tau);
  const ReactionField rf = evaluate_reactions(state, grid, bio);

  // Predictor, then the nonlinear correction on the interior cells.
  const ArrayXd X_tilde = predictor_x(state, grid, fs, kappa, rf, c, tau);
  const int m = grid.N + 1;
  const double mu = tau / (grid.delta_xi * grid.delta_xi);
  const ArrayXd tilde_int = X_tilde.segment(grid.idx(0), m);
  const ArrayXd u0 = state.X.segment(grid.idx(0), m);
  NewtonResult nr = newton_solve(tilde_int, u0, c.beta, mu, con, cfg, state.t);
  diag.newton_iterations = nr.iterations;
  diag.newton_residual = nr.residual_l1;

  ArrayXd X_new = X_tilde;
  X_new.segment(grid.idx(0), m) = nr.x;

  // Diffusive flux re-evaluated at the new totals; mixed flux for P and S.
  ArrayXd J_new = ArrayXd::Zero(grid.num_faces());
  for (int f = 2; f <= grid.N + 1; ++f)
    J_new[f] = c.beta * c.beta / grid.delta_xi *
               (con.integrated_diffusion(std::clamp(X_new[f], 0.0, con.X_hat())) -
                con.integrated_diffusion(std::clamp(X_new[f - 1], 0.0, con.X_hat())));
  const ArrayXd phi_mixed = fs.convective - J_new;

  MatX6 P_new = step_p_implicit(state, grid, phi_mixed, kappa, rf, c, X_new, tau,
                                bio.c_conv(), &diag.rowsum_defect);
  Vec6 s_out_top = Vec6::Zero(), s_out_bot = Vec6::Zero();
  MatX6 S_new = step_s_implicit(state, grid, fs, J_new, kappa, rf, c, X_new, tau, rho_X,
                                &s_out_top, &s_out_bot);
  boundary_rows(state, grid, phi_mixed, fs.q_tilde, kappa, c, X_new, tau, rho_X, P_new,
                S_new);

  if (audit) {
    double stretch_x = 0.0, react_x = 0.0;
    Vec6 stretch_s = Vec6::Zero(), react_s = Vec6::Zero();
    for (int j = 0; j <= grid.N; ++j) {
      const int i = grid.idx(j);
      stretch_x += (kappa[i] - 1.0) * state.X[i] * grid.delta_xi;
      stretch_s += (kappa[i] - 1.0) * grid.delta_xi * state.S.row(i).transpose();
      react_x += grid.gamma_cell(j) * rf.R[i] * grid.delta_xi;
      react_s += grid.gamma_cell(j) * grid.delta_xi * rf.R_S.row(i).transpose();
    }
    audit->x.stretch += stretch_x;
    audit->x.reaction += tau * react_x;
    audit->x.inflow += tau * c.beta * c.q_f * c.X_f;
    audit->x.outflow_top += -tau * fs.convective[1];
    audit->x.outflow_bottom += tau * fs.convective[grid.N + 2];
    for (int k = 0; k < 6; ++k) {
      audit->s[k].stretch += stretch_s[k];
      audit->s[k].reaction += tau * react_s[k];
      audit->s[k].inflow += tau * c.beta * c.q_f * c.S_f[k];
      audit->s[k].outflow_top += tau * s_out_top[k];
      audit->s[k].outflow_bottom += tau * s_out_bot[k];
    }
  }

  state.X = X_new;
  state.P = P_new;
  state.S = S_new;
  state.t += tau;

  // The percentage identity and the X bounds hold only up to the Newton
  // residual, which shrinks quadratically with the step tolerance.
  OmegaLimits lim;
  lim.X_hat = con.X_hat();
  lim.slack = std::max(1e-10, cfg.epsilon * cfg.epsilon);
  lim.rowsum_cap = std::max(1e-10, cfg.epsilon);
  diag.omega = omega_project(state, lim);
  return diag;
}

}  // namespace sbr

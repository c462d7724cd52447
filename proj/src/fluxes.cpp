#include "sbr/fluxes.hpp"

#include <algorithm>
#include <cmath>

namespace sbr {

namespace {

inline double clamp_arg(double x, double X_hat, int* clamp_count) {
  if (x < 0.0 || x > X_hat + 1e-9) {
    if (clamp_count) ++*clamp_count;
    return std::clamp(x, 0.0, X_hat);
  }
  return std::min(x, X_hat);
}

// Four-case unimodal Engquist-Osher form on precomputed flux values.
inline double eo_core(double u, double v, double fu, double fv, double x_star,
                      double f_star) {
  if (u <= x_star) return v <= x_star ? fu : fu + fv - f_star;
  return v <= x_star ? f_star : fv;
}

inline double godunov_core(double u, double v, double fu, double fv, double x_star,
                           double f_star) {
  if (u <= v) return std::min(fu, fv);
  if (v <= x_star && x_star <= u) return f_star;
  return std::max(fu, fv);
}

}  // namespace

StageCoeffs stage_coeffs(const Scenario& sc, double t) {
  const Stage& s = sc.stage_at(t);
  StageCoeffs c;
  c.t = t;
  c.beta = sc.trajectory.beta(t);
  c.z_bar_prime = sc.trajectory.z_bar_prime(t);
  c.q_f = s.Q_f / sc.geometry.A;
  c.q_u = s.Q_u / sc.geometry.A;
  c.q_e = s.Q_e / sc.geometry.A;
  c.X_f = s.X_f;
  c.p_f = sc.feed.p_f;
  c.S_f = sc.feed.S_f;
  c.extraction = s.extraction();
  c.model = s.model;
  return c;
}

double engquist_osher(double u, double v, double gamma_face, const Constitutive& con,
                      int* clamp_count) {
  if (gamma_face == 0.0) return 0.0;
  const double X_hat = con.X_hat();
  u = clamp_arg(u, X_hat, clamp_count);
  v = clamp_arg(v, X_hat, clamp_count);
  return gamma_face * eo_core(u, v, con.batch_flux(u), con.batch_flux(v), con.X_star(),
                              con.derived().f_max);
}

double godunov(double u, double v, double gamma_face, const Constitutive& con,
               int* clamp_count) {
  if (gamma_face == 0.0) return 0.0;
  const double X_hat = con.X_hat();
  u = clamp_arg(u, X_hat, clamp_count);
  v = clamp_arg(v, X_hat, clamp_count);
  return gamma_face * godunov_core(u, v, con.batch_flux(u), con.batch_flux(v),
                                   con.X_star(), con.derived().f_max);
}

FluxSet assemble_fluxes(const ArrayXd& X_adv, const ArrayXd& X_diff, const Grid& grid,
                        const StageCoeffs& c, const Constitutive& con, FluxKind flux,
                        bool with_diffusion) {
  const int nc = grid.num_cells(), nf = grid.num_faces();
  FluxSet fs;
  fs.q_tilde.resize(nf);
  fs.eo = ArrayXd::Zero(nf);
  fs.bulk = ArrayXd::Zero(nf);
  fs.convective.resize(nf);
  fs.diffusive = ArrayXd::Zero(nf);
  fs.total.resize(nf);

  const double X_hat = con.X_hat();
  const double x_star = con.X_star();
  const double f_star = con.derived().f_max;

  // One constitutive evaluation per cell, shared by both adjacent faces.
  ArrayXd f_of_X(nc), Xc(nc);
  for (int i = 0; i < nc; ++i) {
    Xc[i] = clamp_arg(X_adv[i], X_hat, &fs.clamp_count);
    f_of_X[i] = con.batch_flux(Xc[i]);
  }
  ArrayXd D_of_X;
  if (with_diffusion) {
    D_of_X.resize(nc);
    for (int i = 0; i < nc; ++i)
      D_of_X[i] = con.integrated_diffusion(std::clamp(X_diff[i], 0.0, X_hat));
  }

  const double q_out = c.q_u + c.q_e;
  for (int i = 0; i < nf; ++i) {
    const int jj = i - 2;  // face sits between signed cells jj and jj+1
    const double xi_f = grid.xi_face(i);
    fs.q_tilde[i] = c.q_tilde(xi_f);

    double F;
    if (jj <= -1) {
      F = c.extraction ? -c.beta * (xi_f * q_out + c.q_e) * X_adv[i] : 0.0;
      fs.bulk[i] = F;
    } else if (jj <= grid.N - 1) {
      const double u = Xc[i - 1], v = Xc[i];
      fs.eo[i] = (flux == FluxKind::engquist_osher)
                     ? eo_core(u, v, f_of_X[i - 1], f_of_X[i], x_star, f_star)
                     : godunov_core(u, v, f_of_X[i - 1], f_of_X[i], x_star, f_star);
      fs.bulk[i] = upwind(fs.q_tilde[i], X_adv[i - 1], X_adv[i]);
      F = fs.bulk[i] + c.beta * fs.eo[i];
    } else {
      F = fs.q_tilde[i] * X_adv[i - 1];
      fs.bulk[i] = F;
    }
    fs.convective[i] = F;

    if (with_diffusion && grid.gamma_face(i) != 0.0)
      fs.diffusive[i] =
          c.beta * c.beta / grid.delta_xi * (D_of_X[i] - D_of_X[i - 1]);
  }
  fs.total = fs.convective - fs.diffusive;
  return fs;
}

ArrayXd kappa_coefficients(const Grid& grid, const StageCoeffs& c, double tau) {
  ArrayXd kappa(grid.num_cells());
  const double tb = tau * c.beta;
  for (int j = -1; j <= grid.N + 1; ++j) {
    double k;
    if (j < 0) {
      k = c.extraction ? 1.0 - tb * (c.q_u + c.q_e) : 1.0;
    } else if (j == 0) {
      // half factor from averaging sgn(xi) z_bar' X over the straddling
      // feed cell (only its tank half carries mixture when nothing is drawn)
      k = c.extraction ? 1.0 : 1.0 + 0.5 * tb * c.z_bar_prime;
    } else {
      k = 1.0 + tb * c.z_bar_prime;
    }
    kappa[grid.idx(j)] = k;
  }
  return kappa;
}

CflConstants cfl_constants(const Scenario& sc, const Stage& stage) {
  CflConstants k;
  const double A = sc.geometry.A;
  const double q_f = stage.Q_f / A, q_u = stage.Q_u / A, q_e = stage.Q_e / A;
  k.zeta = sc.trajectory.zeta_effective();
  k.M_q1 = std::max(q_u + q_e, q_f);
  k.M_q2 = std::max(q_f, q_e) + 2.0 * q_u;
  k.f_prime_sup = sc.constitutive->derived().f_prime_sup;
  k.a_sup = sc.constitutive->derived().a_sup;
  k.C1 = k.zeta * (k.M_q2 + k.f_prime_sup);
  k.C2 = k.zeta * k.zeta * k.a_sup;
  k.M_R = sc.reaction_bounds.M_R;
  k.M_C = sc.reaction_bounds.M_C;
  k.M_S = sc.reaction_bounds.M_S;
  k.rho_X = sc.constitutive->params().rho_X;
  k.X_hat = sc.constitutive->X_hat();
  return k;
}

double cfl_tau(const CflConstants& k, double delta_xi, SchemeKind scheme, double safety) {
  const double C2 = scheme == SchemeKind::explicit_euler ? k.C2 : 0.0;
  const double gap = k.rho_X - k.X_hat;
  const double solids = k.C1 + C2 / delta_xi;
  const double liquid =
      (k.zeta * k.M_q2 * k.rho_X + k.C1 * k.X_hat + C2 * k.X_hat / delta_xi) / gap;
  const double denom = k.zeta * k.M_q1 + std::max({k.M_R, k.M_C, k.M_S}) +
                       2.0 / delta_xi * std::max(solids, liquid);
  if (!(denom > 0.0) || !std::isfinite(denom))
    throw config_error("cfl_tau: degenerate CFL constants");
  const double tau = safety / denom;
  if (!(tau > 0.0)) throw config_error("cfl_tau: nonpositive time step");
  return tau;
}

}  // namespace sbr

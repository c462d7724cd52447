#include "sbr/state.hpp"

#include <cmath>

namespace sbr {

OmegaDefects omega_project(GridState& state, const OmegaLimits& lim) {
  OmegaDefects d;
  const int n = int(state.X.size());
  for (int i = 0; i < n; ++i) {
    double& x = state.X[i];
    if (x < 0.0) {
      d.x_out = std::max(d.x_out, -x);
      x = 0.0;
    } else if (x > lim.X_hat) {
      d.x_out = std::max(d.x_out, x - lim.X_hat);
      x = lim.X_hat;
    }
    double psum = 0.0;
    for (int k = 0; k < 6; ++k) {
      double& p = state.P(i, k);
      if (p < 0.0) {
        d.p_neg = std::max(d.p_neg, -p);
        p = 0.0;
      }
      psum += p;
      double& s = state.S(i, k);
      if (s < 0.0) {
        d.s_neg = std::max(d.s_neg, -s);
        s = 0.0;
      }
    }
    d.p_sum = std::max(d.p_sum, std::abs(psum - 1.0));
    if (psum > 0.0) state.P.row(i) /= psum;
  }
  if (d.x_out > lim.slack || d.p_neg > lim.slack || d.s_neg > lim.slack ||
      d.p_sum > lim.rowsum_cap)
    throw step_error("state left the invariant region beyond the round-off budget "
                     "(max defect " + std::to_string(d.max_defect()) + ")",
                     state.t);
  return d;
}

bool in_omega(const GridState& state, double X_hat, double tol) {
  const int n = int(state.X.size());
  for (int i = 0; i < n; ++i) {
    if (state.X[i] < -tol || state.X[i] > X_hat + tol) return false;
    double psum = 0.0;
    for (int k = 0; k < 6; ++k) {
      if (state.P(i, k) < -tol || state.S(i, k) < -tol) return false;
      psum += state.P(i, k);
    }
    if (std::abs(psum - 1.0) > tol) return false;
  }
  return true;
}

GridState initial_state(const Scenario& sc, const Grid& grid) {
  GridState st = GridState::zero(grid);
  const double c = sc.constitutive->params().c_conv;
  for (int i = 0; i < grid.num_cells(); ++i) st.P.row(i) = sc.feed.p_f.transpose();
  for (int j = 0; j <= grid.N; ++j) {
    const int i = grid.idx(j);
    const double z = sc.trajectory.z_of_xi(grid.xi_center(j), 0.0);
    const Vec6 C = sc.initial.C_at(z);
    const double X = c * C.sum();
    st.X[i] = X;
    if (X > 0.0) st.P.row(i) = (c / X) * C.transpose();
    st.S.row(i) = sc.initial.S_at(z).transpose();
  }
  return st;
}

}  // namespace sbr

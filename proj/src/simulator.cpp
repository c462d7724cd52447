#include "sbr/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sbr {

namespace {

double tank_sum(const ArrayXd& field, const Grid& grid) {
  double s = 0.0;
  for (int j = 0; j <= grid.N; ++j) s += field[grid.idx(j)];
  return s * grid.delta_xi;
}

Vec6 tank_sum_rows(const MatX6& field, const Grid& grid) {
  Vec6 s = Vec6::Zero();
  for (int j = 0; j <= grid.N; ++j) s += field.row(grid.idx(j)).transpose();
  return s * grid.delta_xi;
}

}  // namespace

double MassAuditReport::residual(double initial, double final_mass, const MassLedger& l) {
  return final_mass - initial -
         (l.inflow - l.outflow_top - l.outflow_bottom + l.reaction + l.stretch + l.handoff);
}

double MassAuditReport::scale(double initial, const MassLedger& l) {
  return std::max({1e-30, std::abs(initial), l.inflow, l.outflow_top, l.outflow_bottom,
                   std::abs(l.reaction), std::abs(l.stretch), std::abs(l.handoff)});
}

double MassAuditReport::x_residual_rel() const {
  return std::abs(residual(initial_x, final_x, x)) / scale(initial_x, x);
}

double MassAuditReport::max_s_residual_rel() const {
  double worst = 0.0;
  for (int k = 0; k < 6; ++k)
    worst = std::max(worst, std::abs(residual(initial_s[k], final_s[k], s[k])) /
                                scale(initial_s[k], s[k]));
  return worst;
}

const Snapshot* SimulationOutput::snapshot_at(double t, double tol) const {
  for (const Snapshot& s : snapshots)
    if (std::abs(s.t - t) <= tol) return &s;
  return nullptr;
}

OutletRecord outlet_concentrations(const GridState& state, const Grid& grid,
                                   const StageCoeffs& c, double c_conv) {
  OutletRecord rec;
  rec.t = state.t;
  if (c.extraction) {
    const int i = grid.idx(-1);
    rec.X_e = state.X[i];
    rec.C_e = state.P.row(i).transpose() * state.X[i] / c_conv;
    rec.S_e = state.S.row(i).transpose();
  }
  if (c.q_u > 0.0) {
    const int i = grid.idx(grid.N + 1);
    rec.X_u = state.X[i];
    rec.C_u = state.P.row(i).transpose() * state.X[i] / c_conv;
    rec.S_u = state.S.row(i).transpose();
  }
  return rec;
}

Snapshot snapshot_to_z(const GridState& state, const Grid& grid, const Scenario& sc) {
  Snapshot s;
  s.t = state.t;
  s.z_bar = sc.trajectory.z_bar(state.t);
  const int nc = grid.num_cells();
  s.z.resize(nc);
  for (int j = -1; j <= grid.N + 1; ++j)
    s.z[grid.idx(j)] = sc.trajectory.z_of_xi(grid.xi_center(j), state.t);
  s.X = state.X;
  const double c = sc.constitutive->params().c_conv;
  s.C = state.P;
  for (int i = 0; i < nc; ++i) s.C.row(i) *= state.X[i] / c;
  s.S = state.S;
  return s;
}

namespace {

class Recorder {
public:
  Recorder(SimulationOutput& out, const Scenario& sc, const Grid& grid, double cadence)
      : out_(out), sc_(sc), grid_(grid), cadence_(cadence) {}

  void record(const GridState& state, bool force) {
    if (!force && state.t + 1e-9 < next_) return;
    if (!out_.snapshots.empty() && std::abs(out_.snapshots.back().t - state.t) < 1e-9)
      return;
    out_.snapshots.push_back(snapshot_to_z(state, grid_, sc_));
    const StageCoeffs c = stage_coeffs(sc_, state.t);
    out_.outlets.push_back(
        outlet_concentrations(state, grid_, c, sc_.constitutive->params().c_conv));
    next_ = (std::floor(state.t / cadence_ + 1e-9) + 1.0) * cadence_;
  }

private:
  SimulationOutput& out_;
  const Scenario& sc_;
  const Grid& grid_;
  double cadence_;
  double next_ = 0.0;
};

void merge_diag(RunDiagnostics& diag, const StepDiagnostics& d, SchemeKind scheme) {
  ++diag.steps;
  diag.omega.merge(d.omega);
  diag.max_rowsum_defect = std::max(diag.max_rowsum_defect, d.rowsum_defect);
  diag.flux_clamps += d.flux_clamps;
  if (scheme == SchemeKind::semi_implicit) {
    ++diag.newton_steps;
    diag.newton_iterations += d.newton_iterations;
  }
}

}  // namespace

SimulationOutput run(const Scenario& sc, const RunOptions& opt) {
  const Grid grid(opt.cells);
  GridState state = initial_state(sc, grid);

  SimulationOutput out;
  out.N = grid.N;
  out.delta_xi = grid.delta_xi;
  out.B = sc.geometry.B;
  out.scheme = opt.scheme;
  out.flux = opt.flux;

  StepAudit audit;
  out.audit.initial_x = tank_sum(state.X, grid);
  out.audit.initial_s = tank_sum_rows(state.S, grid);

  Recorder recorder(out, sc, grid, opt.snapshot_s);
  recorder.record(state, true);

  std::vector<double> cuts = opt.hard_times;
  std::sort(cuts.begin(), cuts.end());

  const auto t_begin = std::chrono::steady_clock::now();

  for (const Stage& stage : sc.stages) {
    // segment the stage at requested hard times
    std::vector<double> ends;
    for (double h : cuts)
      if (h > stage.t_start + 1e-9 && h < stage.t_end - 1e-9) ends.push_back(h);
    ends.push_back(stage.t_end);

    if (stage.model == StageModel::ode_mixing) {
      MixedState mixed = average_profile(state, grid, sc.feed.p_f);
      audit.x.handoff += mixed.X - tank_sum(state.X, grid);
      const Vec6 s_before = tank_sum_rows(state.S, grid);
      for (int k = 0; k < 6; ++k) audit.s[k].handoff += mixed.S[k] - s_before[k];

      const CflConstants kc = cfl_constants(sc, stage);
      const double rate = kc.zeta * kc.M_q1 + std::max({kc.M_R, kc.M_C, kc.M_S});
      double tau_raw = rate > 0.0 ? opt.cfl_safety / rate
                                  : std::numeric_limits<double>::infinity();
      tau_raw = std::min(tau_raw, (stage.t_end - stage.t_start) / 100.0);

      double t0 = stage.t_start;
      for (double t1 : ends) {
        const long n = std::max(1L, long(std::ceil((t1 - t0) / tau_raw - 1e-12)));
        const double tau = (t1 - t0) / double(n);
        for (long i = 0; i < n; ++i) {
          const StageCoeffs c = stage_coeffs(sc, mixed.t);
          euler_mix_step(mixed, c, *sc.biokinetics, sc.constitutive->X_hat(), tau, &audit);
          ++out.diag.steps;
          reallocate(mixed, grid, state);
          recorder.record(state, false);
        }
        mixed.t = t1;  // absorb accumulated round-off in the step times
        reallocate(mixed, grid, state);
        recorder.record(state, true);
        t0 = t1;
      }
      audit.x.handoff += tank_sum(state.X, grid) - mixed.X;
      const Vec6 s_after = tank_sum_rows(state.S, grid);
      for (int k = 0; k < 6; ++k) audit.s[k].handoff += s_after[k] - mixed.S[k];
      continue;
    }

    const CflConstants kc = cfl_constants(sc, stage);
    const double tau_raw = cfl_tau(kc, grid.delta_xi, opt.scheme, opt.cfl_safety);

    double t0 = stage.t_start;
    for (double t1 : ends) {
      const long n = std::max(1L, long(std::ceil((t1 - t0) / tau_raw - 1e-12)));
      const double tau = (t1 - t0) / double(n);
      for (long i = 0; i < n; ++i) {
        const StageCoeffs c = stage_coeffs(sc, state.t);
        StepDiagnostics d;
        try {
          if (opt.scheme == SchemeKind::explicit_euler)
            d = explicit_step(state, grid, sc, c, tau, opt.flux, &audit);
          else
            d = semi_implicit_step(state, grid, sc, c, tau, opt.flux, opt.newton, &audit);
        } catch (const step_error& e) {
          throw step_error("stage [" + std::to_string(stage.t_start / kSecondsPerHour) +
                               ", " + std::to_string(stage.t_end / kSecondsPerHour) +
                               "] h: " + e.what(),
                           state.t);
        }
        merge_diag(out.diag, d, opt.scheme);
        if (i + 1 == n) state.t = t1;  // absorb accumulated round-off
        recorder.record(state, i + 1 == n);
      }
      t0 = t1;
    }
  }

  const auto t_end = std::chrono::steady_clock::now();
  out.diag.wall_seconds = std::chrono::duration<double>(t_end - t_begin).count();

  out.audit.final_x = tank_sum(state.X, grid);
  out.audit.final_s = tank_sum_rows(state.S, grid);
  out.audit.x = audit.x;
  out.audit.s = audit.s;
  return out;
}

}  // namespace sbr

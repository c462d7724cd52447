#include "sbr/validation.hpp"

#include "sbr/csv.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace sbr {

std::string ErrorReport::to_csv() const {
  std::ostringstream os;
  os << "N,scheme,t_s,epsilon,e_rel,eoc,cpu_s,mean_newton_iters\n";
  for (const ErrorRow& r : rows)
    os << r.N << ',' << to_string(r.scheme) << ',' << format_double(r.t) << ','
       << format_double(r.epsilon) << ',' << format_double(r.e_rel) << ','
       << format_double(r.eoc) << ',' << format_double(r.cpu_s) << ','
       << format_double(r.mean_newton) << '\n';
  return os.str();
}

int batch_threads() {
  const char* env = std::getenv("SBR_SIM_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

void parallel_for_jobs(int threads, const std::vector<std::function<void()>>& jobs) {
  if (threads <= 1 || jobs.size() <= 1) {
    for (const auto& j : jobs) j();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex err_mutex;
  const int n = std::min<int>(threads, int(jobs.size()));
  for (int w = 0; w < n; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        try {
          jobs[i]();
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!failed.exchange(true)) first_error = e.what();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failed) throw numerical_error("batch job failed: " + first_error);
}

SimulationOutput reference_run(const Scenario& sc, int N_ref,
                               const std::vector<double>& eval_times) {
  RunOptions opt = RunOptions::from(sc.numerics);
  opt.cells = N_ref;
  opt.scheme = SchemeKind::explicit_euler;
  opt.flux = FluxKind::godunov;
  opt.hard_times = eval_times;
  return run(sc, opt);
}

namespace {

// piecewise-constant cell lookup of a profile at computational coordinate xi
int cell_of_xi(double xi, int N, double delta_xi) {
  const int j = int(std::floor(xi / delta_xi + 0.5));
  return std::clamp(j, 0, N) + 1;  // row index
}

}  // namespace

double relative_error(const SimulationOutput& coarse, const SimulationOutput& reference,
                      double t) {
  const Snapshot* a = coarse.snapshot_at(t);
  const Snapshot* r = reference.snapshot_at(t);
  if (!a || !r)
    throw config_error("relative_error: missing snapshot at t = " + std::to_string(t));
  const int M = 10 * reference.N;
  double err = 0.0;
  for (int comp = 0; comp < 12; ++comp) {
    double num = 0.0, den = 0.0;
    for (int m = 0; m < M; ++m) {
      const double xi = (m + 0.5) / M;
      const int ia = cell_of_xi(xi, coarse.N, coarse.delta_xi);
      const int ir = cell_of_xi(xi, reference.N, reference.delta_xi);
      const double va = comp < 6 ? a->C(ia, comp) : a->S(ia, comp - 6);
      const double vr = comp < 6 ? r->C(ir, comp) : r->S(ir, comp - 6);
      num += std::abs(va - vr);
      den += std::abs(vr);
    }
    if (den / M < 1e-14) continue;  // component absent from the reference
    err += num / den;
  }
  return err;
}

ErrorReport convergence_study(const Scenario& sc, const std::vector<int>& Ns,
                              const std::vector<SchemeKind>& schemes,
                              const std::vector<double>& eval_times,
                              const SimulationOutput& reference) {
  ErrorReport report;
  std::vector<SimulationOutput> outs(Ns.size() * schemes.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t si = 0; si < schemes.size(); ++si)
    for (std::size_t ni = 0; ni < Ns.size(); ++ni)
      jobs.push_back([&, si, ni] {
        RunOptions opt = RunOptions::from(sc.numerics);
        opt.cells = Ns[ni];
        opt.scheme = schemes[si];
        opt.hard_times = eval_times;
        outs[si * Ns.size() + ni] = run(sc, opt);
      });
  parallel_for_jobs(batch_threads(), jobs);

  for (std::size_t si = 0; si < schemes.size(); ++si)
    for (double t : eval_times) {
      double prev_e = 0.0;
      int prev_N = 0;
      for (std::size_t ni = 0; ni < Ns.size(); ++ni) {
        const SimulationOutput& o = outs[si * Ns.size() + ni];
        ErrorRow row;
        row.N = Ns[ni];
        row.scheme = schemes[si];
        row.t = t;
        row.e_rel = relative_error(o, reference, t);
        row.cpu_s = o.diag.wall_seconds;
        row.mean_newton = o.diag.mean_newton_iterations();
        if (prev_N > 0 && row.e_rel > 0.0)
          row.eoc = std::log(prev_e / row.e_rel) / std::log(double(row.N) / prev_N);
        prev_e = row.e_rel;
        prev_N = row.N;
        report.rows.push_back(row);
      }
    }
  return report;
}

ErrorReport tolerance_sweep(const Scenario& sc, int N, const std::vector<double>& eps_list,
                            double eval_time, const SimulationOutput& reference) {
  ErrorReport report;
  std::vector<SimulationOutput> outs(eps_list.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t i = 0; i < eps_list.size(); ++i)
    jobs.push_back([&, i] {
      RunOptions opt = RunOptions::from(sc.numerics);
      opt.cells = N;
      opt.scheme = SchemeKind::semi_implicit;
      opt.newton.epsilon = eps_list[i];
      opt.hard_times = {eval_time};
      outs[i] = run(sc, opt);
    });
  parallel_for_jobs(batch_threads(), jobs);
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    ErrorRow row;
    row.N = N;
    row.scheme = SchemeKind::semi_implicit;
    row.t = eval_time;
    row.epsilon = eps_list[i];
    row.e_rel = relative_error(outs[i], reference, eval_time);
    row.cpu_s = outs[i].diag.wall_seconds;
    row.mean_newton = outs[i].diag.mean_newton_iterations();
    report.rows.push_back(row);
  }
  return report;
}

std::vector<StationarityRow> moving_mesh_stationarity(const Scenario& sc,
                                                      const std::vector<int>& Ns,
                                                      double t_early, double t_late) {
  std::vector<StationarityRow> rows(Ns.size());
  std::vector<std::function<void()>> jobs;
  const double X_c = sc.constitutive->params().X_c;
  for (std::size_t i = 0; i < Ns.size(); ++i)
    jobs.push_back([&, i] {
      RunOptions opt = RunOptions::from(sc.numerics);
      opt.cells = Ns[i];
      opt.scheme = SchemeKind::semi_implicit;
      opt.hard_times = {t_early, t_late};
      const SimulationOutput out = run(sc, opt);
      const Snapshot* a = out.snapshot_at(t_early);
      const Snapshot* b = out.snapshot_at(t_late);
      if (!a || !b) throw numerical_error("stationarity: missing probe snapshot");

      // sediment region at the early probe, in physical coordinates
      double z_s = out.B;
      for (int j = 0; j <= out.N; ++j)
        if (a->X[j + 1] > X_c) z_s = std::min(z_s, a->z[j + 1]);
      StationarityRow row;
      row.N = Ns[i];
      if (z_s < out.B) {
        const int M = 10 * Ns[i];
        const double dz = (out.B - z_s) / M;
        double dev = 0.0;
        for (int m = 0; m < M; ++m) {
          const double z = z_s + (m + 0.5) * dz;
          const double xi_a = (z - a->z_bar) / (out.B - a->z_bar);
          const double xi_b = (z - b->z_bar) / (out.B - b->z_bar);
          const double va = a->X[cell_of_xi(xi_a, out.N, out.delta_xi)];
          const double vb = b->X[cell_of_xi(xi_b, out.N, out.delta_xi)];
          dev += std::abs(va - vb) * dz;
        }
        row.deviation = dev;
      }
      rows[i] = row;
    });
  parallel_for_jobs(batch_threads(), jobs);
  return rows;
}

std::vector<BenchmarkRow> benchmark(const Scenario& sc, int N) {
  std::vector<BenchmarkRow> rows;
  for (SchemeKind scheme : {SchemeKind::explicit_euler, SchemeKind::semi_implicit}) {
    RunOptions opt = RunOptions::from(sc.numerics);
    opt.cells = N;
    opt.scheme = scheme;
    const SimulationOutput out = run(sc, opt);
    BenchmarkRow r;
    r.scheme = scheme;
    r.N = N;
    r.wall_seconds = out.diag.wall_seconds;
    r.steps = out.diag.steps;
    r.mean_newton = out.diag.mean_newton_iterations();
    rows.push_back(r);
  }
  return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream os;
  os << "scheme,N,wall_s,steps,mean_newton_iters\n";
  for (const BenchmarkRow& r : rows)
    os << to_string(r.scheme) << ',' << r.N << ',' << format_double(r.wall_seconds) << ','
       << r.steps << ',' << format_double(r.mean_newton) << '\n';
  return os.str();
}

GridState random_omega_state(const Scenario& sc, const Grid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const double X_hat = sc.constitutive->X_hat();
  const Vec6 S_box = 2.0 * sc.initial.S0.cwiseMax(sc.feed.S_f);
  GridState st = GridState::zero(grid);
  for (int i = 0; i < grid.num_cells(); ++i) {
    st.X[i] = unif(rng) * X_hat;
    Vec6 p;
    for (int k = 0; k < 6; ++k) p[k] = expo(rng);
    st.P.row(i) = (p / p.sum()).transpose();
    for (int k = 0; k < 6; ++k) st.S(i, k) = unif(rng) * S_box[k];
  }
  return st;
}

PropertyReport omega_stress(const Scenario& sc, int N, SchemeKind scheme, int trials,
                            std::uint64_t seed, double budget, double tau_scale) {
  const Grid grid(N);
  PropertyReport rep;
  std::vector<const Stage*> pde_stages;
  for (const Stage& s : sc.stages)
    if (s.model == StageModel::pde) pde_stages.push_back(&s);
  if (pde_stages.empty()) return rep;

  for (int trial = 0; trial < trials; ++trial) {
    const Stage& stage = *pde_stages[trial % pde_stages.size()];
    const double t_mid = 0.5 * (stage.t_start + stage.t_end);
    const double tau =
        tau_scale * cfl_tau(cfl_constants(sc, stage), grid.delta_xi, scheme,
                            sc.numerics.cfl_safety);
    GridState st = random_omega_state(sc, grid, seed + trial);
    st.t = t_mid;
    const StageCoeffs c = stage_coeffs(sc, t_mid);
    ++rep.trials;
    try {
      StepDiagnostics d;
      if (scheme == SchemeKind::explicit_euler)
        d = explicit_step(st, grid, sc, c, tau, FluxKind::engquist_osher, nullptr);
      else {
        NewtonConfig cfg;
        cfg.epsilon = 1e-10;
        d = semi_implicit_step(st, grid, sc, c, tau, FluxKind::engquist_osher, cfg,
                               nullptr);
      }
      rep.worst = std::max(rep.worst, d.omega.max_defect());
      if (d.omega.max_defect() > budget) ++rep.failures;
    } catch (const std::exception& e) {
      ++rep.failures;
      if (rep.detail.empty()) rep.detail = e.what();
    }
  }
  return rep;
}

PropertyReport monotonicity_check(const Scenario& sc, int N, SchemeKind scheme, int trials,
                                  std::uint64_t seed, double bump, double budget) {
  const Grid grid(N);
  PropertyReport rep;
  std::vector<const Stage*> pde_stages;
  for (const Stage& s : sc.stages)
    if (s.model == StageModel::pde) pde_stages.push_back(&s);
  if (pde_stages.empty()) return rep;
  const double X_hat = sc.constitutive->X_hat();
  NewtonConfig tight;
  tight.epsilon = 1e-12;

  const auto advance = [&](GridState st, const StageCoeffs& c, double tau) {
    if (scheme == SchemeKind::explicit_euler)
      explicit_step(st, grid, sc, c, tau, FluxKind::engquist_osher, nullptr);
    else
      semi_implicit_step(st, grid, sc, c, tau, FluxKind::engquist_osher, tight, nullptr);
    return st.X;
  };

  for (int trial = 0; trial < trials; ++trial) {
    const Stage& stage = *pde_stages[trial % pde_stages.size()];
    const double t_mid = 0.5 * (stage.t_start + stage.t_end);
    const double tau = cfl_tau(cfl_constants(sc, stage), grid.delta_xi, scheme,
                               sc.numerics.cfl_safety);
    GridState base = random_omega_state(sc, grid, seed + trial);
    base.t = t_mid;
    const StageCoeffs c = stage_coeffs(sc, t_mid);
    const ArrayXd X0 = advance(base, c, tau);
    ++rep.trials;
    bool bad = false;
    for (int cell = 0; cell < grid.num_cells(); ++cell) {
      if (base.X[cell] + bump > X_hat) continue;
      GridState pert = base;
      pert.X[cell] += bump;
      const ArrayXd X1 = advance(pert, c, tau);
      const double drop = (X0 - X1).maxCoeff();
      rep.worst = std::max(rep.worst, drop);
      if (drop > budget) bad = true;
    }
    if (bad) ++rep.failures;
  }
  return rep;
}

PropertyReport mmatrix_check(const Scenario& sc, int N, int trials, std::uint64_t seed) {
  const Grid grid(N);
  PropertyReport rep;
  const Constitutive& con = *sc.constitutive;
  std::vector<const Stage*> pde_stages;
  for (const Stage& s : sc.stages)
    if (s.model == StageModel::pde) pde_stages.push_back(&s);
  if (pde_stages.empty()) return rep;

  for (int trial = 0; trial < trials; ++trial) {
    const Stage& stage = *pde_stages[trial % pde_stages.size()];
    const double t_mid = 0.5 * (stage.t_start + stage.t_end);
    const double tau = cfl_tau(cfl_constants(sc, stage), grid.delta_xi,
                               SchemeKind::semi_implicit, sc.numerics.cfl_safety);
    const double beta = sc.trajectory.beta(t_mid);
    const double mu = tau / (grid.delta_xi * grid.delta_xi);
    const double coef = beta * beta * mu;
    GridState st = random_omega_state(sc, grid, seed + trial);
    st.t = t_mid;
    ++rep.trials;

    // Newton Jacobian: column diagonal dominance at a random iterate.
    const int m = grid.N + 1;
    ArrayXd sub(m), diag(m), super(m);
    for (int r = 0; r < m; ++r) {
      const double a = con.diffusion_a(st.X[grid.idx(r)]);
      const double w = (r == 0 || r == m - 1) ? 1.0 : 2.0;
      diag[r] = 1.0 + coef * w * a;
    }
    for (int r = 0; r < m; ++r) {
      sub[r] = r > 0 ? -coef * con.diffusion_a(st.X[grid.idx(r - 1)]) : 0.0;
      super[r] = r < m - 1 ? -coef * con.diffusion_a(st.X[grid.idx(r + 1)]) : 0.0;
    }
    double margin = TridiagonalSolver::column_dominance_margin(sub, diag, super);
    if (margin < 1.0 - 1e-12) {
      ++rep.failures;
      rep.detail = "Jacobian column dominance margin " + std::to_string(margin);
      continue;
    }

    // Secant-coefficient system matrix: rows must sum to one exactly.
    ArrayXd w(m - 1);
    for (int r = 0; r + 1 < m; ++r) {
      const double x0 = st.X[grid.idx(r)], x1 = st.X[grid.idx(r + 1)];
      w[r] = x1 != x0 ? coef * (con.integrated_diffusion(x1) - con.integrated_diffusion(x0)) /
                            (x1 - x0)
                      : 0.0;
    }
    double worst_row = 0.0;
    for (int r = 0; r < m; ++r) {
      const double lower = r > 0 ? -w[r - 1] : 0.0;
      const double upper = r < m - 1 ? -w[r] : 0.0;
      const double d = 1.0 - lower - upper;
      worst_row = std::max(worst_row, std::abs(d + lower + upper - 1.0));
    }
    rep.worst = std::max(rep.worst, worst_row);
    if (worst_row > 1e-13) {
      ++rep.failures;
      rep.detail = "secant system row sum defect " + std::to_string(worst_row);
      continue;
    }

    // The implicit percentage/substrate assemblies assert dominance internally.
    try {
      NewtonConfig cfg;
      const StageCoeffs c = stage_coeffs(sc, t_mid);
      semi_implicit_step(st, grid, sc, c, tau, FluxKind::engquist_osher, cfg, nullptr);
    } catch (const std::exception& e) {
      ++rep.failures;
      if (rep.detail.empty()) rep.detail = e.what();
    }
  }
  return rep;
}

}  // namespace sbr

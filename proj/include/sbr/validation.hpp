#pragma once

#include "sbr/simulator.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sbr {

/// One row of a convergence/tolerance/benchmark report.
struct ErrorRow {
  int N = 0;
  SchemeKind scheme = SchemeKind::semi_implicit;
  double t = 0.0;
  double epsilon = 0.0;
  double e_rel = 0.0;
  double eoc = 0.0;  // log2(e_N / e_2N), 0 in the first row of a column
  double cpu_s = 0.0;
  double mean_newton = 0.0;
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  std::string to_csv() const;
};

/// Explicit Godunov run used as the surrogate for an exact solution.
SimulationOutput reference_run(const Scenario& sc, int N_ref,
                               const std::vector<double>& eval_times);

/// Relative L1 distance over all particulate and soluble components at time
/// t, sampled on a common fine grid; components with a vanishing reference
/// norm are skipped. Throws config_error when either run lacks the snapshot.
double relative_error(const SimulationOutput& coarse, const SimulationOutput& reference,
                      double t);

ErrorReport convergence_study(const Scenario& sc, const std::vector<int>& Ns,
                              const std::vector<SchemeKind>& schemes,
                              const std::vector<double>& eval_times,
                              const SimulationOutput& reference);

ErrorReport tolerance_sweep(const Scenario& sc, int N, const std::vector<double>& eps_list,
                            double eval_time, const SimulationOutput& reference);

struct StationarityRow {
  int N = 0;
  double deviation = 0.0;  // sediment-region L1 change between the two probe times
};

/// Sediment-layer drift induced by the moving mesh: L1 deviation of the
/// profile over the region where X exceeds the critical concentration at the
/// first probe time.
std::vector<StationarityRow> moving_mesh_stationarity(const Scenario& sc,
                                                      const std::vector<int>& Ns,
                                                      double t_early, double t_late);

struct BenchmarkRow {
  SchemeKind scheme;
  int N = 0;
  double wall_seconds = 0.0;
  long steps = 0;
  double mean_newton = 0.0;
};

std::vector<BenchmarkRow> benchmark(const Scenario& sc, int N);
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

// --- property suites (used by the validate command and the acceptance tests)

/// Uniform random state in the invariant region (X in [0, X_hat], rows of P
/// on the simplex, S within the scenario box).
GridState random_omega_state(const Scenario& sc, const Grid& grid, std::uint64_t seed);

struct PropertyReport {
  long trials = 0;
  long failures = 0;
  double worst = 0.0;
  std::string detail;
  bool ok() const { return failures == 0; }
};

/// One step from random admissible states at the stage's CFL step; defects
/// beyond the round-off budget count as failures.
PropertyReport omega_stress(const Scenario& sc, int N, SchemeKind scheme, int trials,
                            std::uint64_t seed, double budget = 1e-10,
                            double tau_scale = 1.0);

/// Finite-difference monotonicity of the X-update at small N.
PropertyReport monotonicity_check(const Scenario& sc, int N, SchemeKind scheme, int trials,
                                  std::uint64_t seed, double bump = 1e-6,
                                  double budget = 1e-12);

/// Secant-form system matrix applied to the all-ones vector, plus column
/// dominance of every assembled implicit system along a short run.
PropertyReport mmatrix_check(const Scenario& sc, int N, int trials, std::uint64_t seed);

/// Executes jobs with at most `threads` workers (simple fan-out for batch
/// studies; each job must be independent).
void parallel_for_jobs(int threads, const std::vector<std::function<void()>>& jobs);

/// Thread cap from SBR_SIM_THREADS (1 if unset or invalid).
int batch_threads();

}  // namespace sbr

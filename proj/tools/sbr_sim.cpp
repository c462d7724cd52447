// Command-line front end: scenario runs, convergence/tolerance studies,
// benchmarks and the property-validation suite.

#include "sbr/csv.hpp"
#include "sbr/scenario_config.hpp"
#include "sbr/validation.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace sbr;

struct CommonArgs {
  std::string scenario_path;
  int cells = 0;  // 0: take the scenario default
  std::string scheme, flux;
  double tolerance = 0.0;
  double cfl_safety = 0.0;
  double snapshot_s = 0.0;
  std::string out_dir = ".";
  std::string reference_path;
  int ref_cells = 1200;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_scenario = true) {
  cmd->add_option("--scenario", a.scenario_path, "scenario config file")
      ->required(needs_scenario);
  cmd->add_option("--cells", a.cells, "interior cell count N");
  cmd->add_option("--scheme", a.scheme, "explicit | semi-implicit");
  cmd->add_option("--flux", a.flux, "eo | godunov");
  cmd->add_option("--tolerance", a.tolerance, "Newton termination tolerance");
  cmd->add_option("--cfl-safety", a.cfl_safety, "CFL safety factor in (0, 1]");
  cmd->add_option("--snapshot-s", a.snapshot_s, "snapshot cadence, seconds");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--reference", a.reference_path, "saved reference run to reuse");
  cmd->add_option("--ref-cells", a.ref_cells, "reference resolution when computing one");
}

RunOptions options_from(const Scenario& sc, const CommonArgs& a) {
  RunOptions opt = RunOptions::from(sc.numerics);
  if (a.cells > 0) opt.cells = a.cells;
  if (!a.scheme.empty()) {
    if (a.scheme == "explicit")
      opt.scheme = SchemeKind::explicit_euler;
    else if (a.scheme == "semi-implicit")
      opt.scheme = SchemeKind::semi_implicit;
    else
      throw config_error("unknown --scheme value: " + a.scheme);
  }
  if (!a.flux.empty()) {
    if (a.flux == "eo")
      opt.flux = FluxKind::engquist_osher;
    else if (a.flux == "godunov")
      opt.flux = FluxKind::godunov;
    else
      throw config_error("unknown --flux value: " + a.flux);
  }
  if (a.tolerance > 0.0) opt.newton.epsilon = a.tolerance;
  if (a.cfl_safety > 0.0) opt.cfl_safety = a.cfl_safety;
  if (a.snapshot_s > 0.0) opt.snapshot_s = a.snapshot_s;
  return opt;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw config_error("cannot write " + path);
  f << text;
}

SimulationOutput obtain_reference(const Scenario& sc, const CommonArgs& a,
                                  const std::vector<double>& eval_times) {
  if (!a.reference_path.empty() && std::filesystem::exists(a.reference_path)) {
    std::cerr << "loading reference from " << a.reference_path << "\n";
    return load_output(a.reference_path);
  }
  std::cerr << "computing reference (explicit, godunov, N = " << a.ref_cells << ")...\n";
  SimulationOutput ref = reference_run(sc, a.ref_cells, eval_times);
  if (!a.reference_path.empty()) save_output(a.reference_path, ref);
  return ref;
}

int cmd_run(const CommonArgs& a) {
  const Scenario sc = build_scenario(parse_scenario(a.scenario_path));
  const RunOptions opt = options_from(sc, a);
  const SimulationOutput out = run(sc, opt);

  std::filesystem::create_directories(a.out_dir);
  {
    std::ofstream f(a.out_dir + "/profile.csv");
    write_profile_csv(f, out);
  }
  {
    std::ofstream f(a.out_dir + "/outlet.csv");
    write_outlet_csv(f, out);
  }
  std::cout << "steps " << out.diag.steps << ", wall " << out.diag.wall_seconds << " s";
  if (opt.scheme == SchemeKind::semi_implicit)
    std::cout << ", mean newton iterations " << out.diag.mean_newton_iterations();
  std::cout << "\nmax invariant-region defect " << out.diag.omega.max_defect()
            << ", mass audit residual " << out.audit.x_residual_rel() << " (solids), "
            << out.audit.max_s_residual_rel() << " (substrates)\n";
  std::cout << "wrote " << a.out_dir << "/profile.csv and outlet.csv\n";
  return 0;
}

int cmd_convergence(const CommonArgs& a, std::vector<int> Ns, double eval_h) {
  const Scenario sc = build_scenario(parse_scenario(a.scenario_path));
  const double t_eval = eval_h * kSecondsPerHour;
  const SimulationOutput ref = obtain_reference(sc, a, {t_eval});
  const ErrorReport rep = convergence_study(
      sc, Ns, {SchemeKind::explicit_euler, SchemeKind::semi_implicit}, {t_eval}, ref);
  std::filesystem::create_directories(a.out_dir);
  write_file(a.out_dir + "/convergence.csv", rep.to_csv());
  std::cout << rep.to_csv();
  return 0;
}

int cmd_tolerance(const CommonArgs& a, std::vector<double> eps_list, double eval_h) {
  const Scenario sc = build_scenario(parse_scenario(a.scenario_path));
  const double t_eval = eval_h * kSecondsPerHour;
  const SimulationOutput ref = obtain_reference(sc, a, {t_eval});
  const int N = a.cells > 0 ? a.cells : sc.numerics.cells;
  const ErrorReport rep = tolerance_sweep(sc, N, eps_list, t_eval, ref);
  std::filesystem::create_directories(a.out_dir);
  write_file(a.out_dir + "/tolerance.csv", rep.to_csv());
  std::cout << rep.to_csv();
  return 0;
}

int cmd_benchmark(const CommonArgs& a) {
  const Scenario sc = build_scenario(parse_scenario(a.scenario_path));
  const int N = a.cells > 0 ? a.cells : sc.numerics.cells;
  const auto rows = benchmark(sc, N);
  std::filesystem::create_directories(a.out_dir);
  write_file(a.out_dir + "/benchmark.csv", benchmark_csv(rows));
  std::cout << benchmark_csv(rows);
  return 0;
}

int cmd_validate(const CommonArgs& a, int trials, std::uint64_t seed) {
  const Scenario sc = build_scenario(parse_scenario(a.scenario_path));
  const int N = a.cells > 0 ? a.cells : 24;
  // --cfl-safety above the scenario's factor deliberately over-steps the
  // admissible time step, so the stress suite should then report violations
  const double tau_scale =
      a.cfl_safety > 0.0 ? a.cfl_safety / sc.numerics.cfl_safety : 1.0;
  bool ok = true;
  const auto report = [&](const char* name, const PropertyReport& r) {
    std::cout << name << ": " << (r.ok() ? "ok" : "FAILED") << " (" << r.trials
              << " trials, worst " << r.worst << ")";
    if (!r.detail.empty()) std::cout << " -- " << r.detail;
    std::cout << "\n";
    ok = ok && r.ok();
  };
  report("invariant-region stress (explicit)",
         omega_stress(sc, N, SchemeKind::explicit_euler, trials, seed, 1e-10, tau_scale));
  report("invariant-region stress (semi-implicit)",
         omega_stress(sc, N, SchemeKind::semi_implicit, trials, seed + 1, 1e-10,
                      tau_scale));
  report("monotonicity (explicit)",
         monotonicity_check(sc, 8, SchemeKind::explicit_euler, trials / 10 + 1, seed + 2));
  report("monotonicity (semi-implicit)",
         monotonicity_check(sc, 8, SchemeKind::semi_implicit, trials / 10 + 1, seed + 3));
  report("implicit-system structure", mmatrix_check(sc, N, trials / 10 + 1, seed + 4));
  if (!ok) throw validation_error("property suite reported failures");
  std::cout << "all property suites passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-dimensional reactive settling simulator for sequencing batch reactors"};
  app.require_subcommand(1);

  CommonArgs a_run, a_conv, a_tol, a_bench, a_val;
  std::vector<int> conv_cells = {50, 100, 200, 400};
  std::vector<double> eps_list = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6,
                                  1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12};
  double eval_h = 1.0, eval_h_tol = 1.0;
  int trials = 200;
  std::uint64_t seed = 42;

  CLI::App* run_cmd = app.add_subcommand("run", "simulate a scenario, write CSV outputs");
  add_common(run_cmd, a_run);
  CLI::App* conv_cmd =
      app.add_subcommand("convergence", "grid study against a reference run");
  add_common(conv_cmd, a_conv);
  conv_cmd->add_option("--cells-list", conv_cells, "N values")->delimiter(',');
  conv_cmd->add_option("--eval-h", eval_h, "evaluation time, hours");
  CLI::App* tol_cmd = app.add_subcommand("tolerance", "Newton tolerance sweep");
  add_common(tol_cmd, a_tol);
  tol_cmd->add_option("--eps-list", eps_list, "tolerance values")->delimiter(',');
  tol_cmd->add_option("--eval-h", eval_h_tol, "evaluation time, hours");
  CLI::App* bench_cmd =
      app.add_subcommand("benchmark", "explicit vs semi-implicit wall-clock");
  add_common(bench_cmd, a_bench);
  CLI::App* val_cmd =
      app.add_subcommand("validate", "run the property suites, nonzero exit on failure");
  add_common(val_cmd, a_val);
  val_cmd->add_option("--trials", trials, "random trials per suite");
  val_cmd->add_option("--seed", seed, "base random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(a_run);
    if (conv_cmd->parsed()) return cmd_convergence(a_conv, conv_cells, eval_h);
    if (tol_cmd->parsed()) return cmd_tolerance(a_tol, eps_list, eval_h_tol);
    if (bench_cmd->parsed()) return cmd_benchmark(a_bench);
    if (val_cmd->parsed()) return cmd_validate(a_val, trials, seed);
  } catch (const sbr::validation_error& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return 3;
  } catch (const sbr::config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

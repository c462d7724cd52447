#include "sbr/scenario_config.hpp"

#include "sbr/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sbr {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw config_error("scenario config: bad number '" + t + "' in " + where);
  return v;
}

Vec6 parse_vec6(const std::string& s, const std::string& where) {
  Vec6 v;
  std::istringstream is(s);
  std::string field;
  for (int k = 0; k < 6; ++k) {
    if (!std::getline(is, field, ','))
      throw config_error("scenario config: expected 6 comma-separated values in " + where);
    v[k] = parse_number(field, where);
  }
  if (std::getline(is, field, ','))
    throw config_error("scenario config: more than 6 values in " + where);
  return v;
}

std::string vec6_str(const Vec6& v) {
  std::string s;
  for (int k = 0; k < 6; ++k) {
    if (k) s += ",";
    s += format_double(v[k]);
  }
  return s;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin) {
  ScenarioConfig cfg;
  std::map<std::string, std::function<void(const std::string&, const std::string&)>> keys;

  const auto num = [&](const char* name, double* target) {
    keys[name] = [target](const std::string& v, const std::string& w) {
      *target = parse_number(v, w);
    };
  };
  const auto vec = [&](const char* name, Vec6* target) {
    keys[name] = [target](const std::string& v, const std::string& w) {
      *target = parse_vec6(v, w);
    };
  };

  num("geometry.depth_m", &cfg.depth_m);
  num("geometry.area_m2", &cfg.area_m2);
  num("geometry.min_depth_m", &cfg.min_depth_m);
  keys["geometry.initial_surface_m"] = [&cfg](const std::string& v, const std::string& w) {
    cfg.initial_surface_m = parse_number(v, w);
  };

  num("constitutive.v0_mps", &cfg.constitutive.v0);
  num("constitutive.X_breve_kgpm3", &cfg.constitutive.X_breve);
  num("constitutive.eta", &cfg.constitutive.eta);
  num("constitutive.X_c_kgpm3", &cfg.constitutive.X_c);
  num("constitutive.sigma0_m2ps2", &cfg.constitutive.sigma0);
  num("constitutive.rho_s_kgpm3", &cfg.constitutive.rho_X);
  num("constitutive.rho_f_kgpm3", &cfg.constitutive.rho_L);
  num("constitutive.g_mps2", &cfg.constitutive.g);
  num("constitutive.X_tangent_kgpm3", &cfg.constitutive.X_tangent);
  num("constitutive.c_conv", &cfg.constitutive.c_conv);

  num("kinetics.Y_A", &cfg.Y_A);
  num("kinetics.Y_H", &cfg.Y_H);
  num("kinetics.f_P", &cfg.f_P);
  num("kinetics.i_XB", &cfg.i_XB);
  num("kinetics.i_XP", &cfg.i_XP);
  num("kinetics.mu_H_per_d", &cfg.mu_H_per_d);
  num("kinetics.b_H_per_d", &cfg.b_H_per_d);
  num("kinetics.mu_A_per_d", &cfg.mu_A_per_d);
  num("kinetics.b_A_per_d", &cfg.b_A_per_d);
  num("kinetics.k_h_per_d", &cfg.k_h_per_d);
  num("kinetics.k_a_m3_per_g_d", &cfg.k_a_m3_per_g_d);
  num("kinetics.K_S_gpm3", &cfg.K_S_gpm3);
  num("kinetics.K_OH_gpm3", &cfg.K_OH_gpm3);
  num("kinetics.K_NO_gpm3", &cfg.K_NO_gpm3);
  num("kinetics.K_X", &cfg.K_X);
  num("kinetics.K_NH_gpm3", &cfg.K_NH_gpm3);
  num("kinetics.K_NH_bar_gpm3", &cfg.K_NH_bar_gpm3);
  num("kinetics.K_OA_gpm3", &cfg.K_OA_gpm3);
  num("kinetics.eta_g", &cfg.eta_g);
  num("kinetics.eta_h", &cfg.eta_h);
  num("kinetics.growth_cutoff_rel", &cfg.growth_cutoff_rel);

  vec("feed.pf_weights", &cfg.pf_weights);
  vec("feed.Sf_kgpm3", &cfg.Sf_kgpm3);

  num("initial.clear_above_m", &cfg.clear_above_m);
  vec("initial.C0_kgpm3", &cfg.C0_kgpm3);
  vec("initial.S0_kgpm3", &cfg.S0_kgpm3);

  keys["numerics.cells"] = [&cfg](const std::string& v, const std::string& w) {
    cfg.numerics.cells = int(parse_number(v, w));
  };
  keys["numerics.scheme"] = [&cfg](const std::string& v, const std::string& w) {
    const std::string t = trim(v);
    if (t == "explicit")
      cfg.numerics.scheme = SchemeKind::explicit_euler;
    else if (t == "semi-implicit")
      cfg.numerics.scheme = SchemeKind::semi_implicit;
    else
      throw config_error("scenario config: unknown scheme '" + t + "' in " + w);
  };
  keys["numerics.flux"] = [&cfg](const std::string& v, const std::string& w) {
    const std::string t = trim(v);
    if (t == "eo")
      cfg.numerics.flux = FluxKind::engquist_osher;
    else if (t == "godunov")
      cfg.numerics.flux = FluxKind::godunov;
    else
      throw config_error("scenario config: unknown flux '" + t + "' in " + w);
  };
  num("numerics.newton_tolerance", &cfg.numerics.newton_epsilon);
  keys["numerics.newton_max_iter"] = [&cfg](const std::string& v, const std::string& w) {
    cfg.numerics.newton_max_iter = int(parse_number(v, w));
  };
  num("numerics.cfl_safety", &cfg.numerics.cfl_safety);
  num("numerics.snapshot_s", &cfg.numerics.snapshot_s);

  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("scenario config: malformed section header at " + where);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    if (section == "stages") {
      std::istringstream ls(line);
      std::string field;
      std::vector<std::string> fields;
      while (std::getline(ls, field, ',')) fields.push_back(trim(field));
      if (fields.size() != 7)
        throw config_error("scenario config: stage row needs 7 fields "
                           "(t_start_h,t_end_h,model,Qf,Qu,Qe,Xf) at " + where);
      ScenarioConfig::StageRow row;
      row.t_start_h = parse_number(fields[0], where);
      row.t_end_h = parse_number(fields[1], where);
      row.model = fields[2];
      if (row.model != "pde" && row.model != "ode")
        throw config_error("scenario config: stage model must be pde or ode at " + where);
      row.Qf_m3ph = parse_number(fields[3], where);
      row.Qu_m3ph = parse_number(fields[4], where);
      row.Qe_m3ph = parse_number(fields[5], where);
      row.Xf_kgpm3 = parse_number(fields[6], where);
      cfg.stage_rows.push_back(row);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("scenario config: expected key = value at " + where);
    const std::string key = section + "." + trim(line.substr(0, eq));
    const auto it = keys.find(key);
    if (it == keys.end())
      throw config_error("scenario config: unknown key '" + key + "' at " + where);
    it->second(line.substr(eq + 1), where);
  }
  if (cfg.stage_rows.empty())
    throw config_error("scenario config: missing [stages] table in " + origin);
  return cfg;
}

ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("scenario config: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario_text(ss.str(), path);
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "[geometry]\n";
  os << "depth_m = " << format_double(cfg.depth_m) << "\n";
  os << "area_m2 = " << format_double(cfg.area_m2) << "\n";
  os << "min_depth_m = " << format_double(cfg.min_depth_m) << "\n";
  if (cfg.initial_surface_m)
    os << "initial_surface_m = " << format_double(*cfg.initial_surface_m) << "\n";
  os << "\n[constitutive]\n";
  os << "v0_mps = " << format_double(cfg.constitutive.v0) << "\n";
  os << "X_breve_kgpm3 = " << format_double(cfg.constitutive.X_breve) << "\n";
  os << "eta = " << format_double(cfg.constitutive.eta) << "\n";
  os << "X_c_kgpm3 = " << format_double(cfg.constitutive.X_c) << "\n";
  os << "sigma0_m2ps2 = " << format_double(cfg.constitutive.sigma0) << "\n";
  os << "rho_s_kgpm3 = " << format_double(cfg.constitutive.rho_X) << "\n";
  os << "rho_f_kgpm3 = " << format_double(cfg.constitutive.rho_L) << "\n";
  os << "g_mps2 = " << format_double(cfg.constitutive.g) << "\n";
  os << "X_tangent_kgpm3 = " << format_double(cfg.constitutive.X_tangent) << "\n";
  os << "c_conv = " << format_double(cfg.constitutive.c_conv) << "\n";
  os << "\n[kinetics]\n";
  os << "Y_A = " << format_double(cfg.Y_A) << "\n";
  os << "Y_H = " << format_double(cfg.Y_H) << "\n";
  os << "f_P = " << format_double(cfg.f_P) << "\n";
  os << "i_XB = " << format_double(cfg.i_XB) << "\n";
  os << "i_XP = " << format_double(cfg.i_XP) << "\n";
  os << "mu_H_per_d = " << format_double(cfg.mu_H_per_d) << "\n";
  os << "b_H_per_d = " << format_double(cfg.b_H_per_d) << "\n";
  os << "mu_A_per_d = " << format_double(cfg.mu_A_per_d) << "\n";
  os << "b_A_per_d = " << format_double(cfg.b_A_per_d) << "\n";
  os << "k_h_per_d = " << format_double(cfg.k_h_per_d) << "\n";
  os << "k_a_m3_per_g_d = " << format_double(cfg.k_a_m3_per_g_d) << "\n";
  os << "K_S_gpm3 = " << format_double(cfg.K_S_gpm3) << "\n";
  os << "K_OH_gpm3 = " << format_double(cfg.K_OH_gpm3) << "\n";
  os << "K_NO_gpm3 = " << format_double(cfg.K_NO_gpm3) << "\n";
  os << "K_X = " << format_double(cfg.K_X) << "\n";
  os << "K_NH_gpm3 = " << format_double(cfg.K_NH_gpm3) << "\n";
  os << "K_NH_bar_gpm3 = " << format_double(cfg.K_NH_bar_gpm3) << "\n";
  os << "K_OA_gpm3 = " << format_double(cfg.K_OA_gpm3) << "\n";
  os << "eta_g = " << format_double(cfg.eta_g) << "\n";
  os << "eta_h = " << format_double(cfg.eta_h) << "\n";
  os << "growth_cutoff_rel = " << format_double(cfg.growth_cutoff_rel) << "\n";
  os << "\n[feed]\n";
  os << "pf_weights = " << vec6_str(cfg.pf_weights) << "\n";
  os << "Sf_kgpm3 = " << vec6_str(cfg.Sf_kgpm3) << "\n";
  os << "\n[initial]\n";
  os << "clear_above_m = " << format_double(cfg.clear_above_m) << "\n";
  os << "C0_kgpm3 = " << vec6_str(cfg.C0_kgpm3) << "\n";
  os << "S0_kgpm3 = " << vec6_str(cfg.S0_kgpm3) << "\n";
  os << "\n[numerics]\n";
  os << "cells = " << cfg.numerics.cells << "\n";
  os << "scheme = " << to_string(cfg.numerics.scheme) << "\n";
  os << "flux = " << to_string(cfg.numerics.flux) << "\n";
  os << "newton_tolerance = " << format_double(cfg.numerics.newton_epsilon) << "\n";
  os << "newton_max_iter = " << cfg.numerics.newton_max_iter << "\n";
  os << "cfl_safety = " << format_double(cfg.numerics.cfl_safety) << "\n";
  os << "snapshot_s = " << format_double(cfg.numerics.snapshot_s) << "\n";
  os << "\n[stages]\n";
  for (const auto& r : cfg.stage_rows)
    os << format_double(r.t_start_h) << ", " << format_double(r.t_end_h) << ", " << r.model
       << ", " << format_double(r.Qf_m3ph) << ", " << format_double(r.Qu_m3ph) << ", "
       << format_double(r.Qe_m3ph) << ", " << format_double(r.Xf_kgpm3) << "\n";
  return os.str();
}

Scenario build_scenario(const ScenarioConfig& cfg, int bound_samples) {
  TankGeometry geom;
  geom.B = cfg.depth_m;
  geom.A = cfg.area_m2;
  geom.B_c = cfg.min_depth_m;
  geom.z_bar0 = cfg.initial_surface_m ? *cfg.initial_surface_m : cfg.clear_above_m;

  std::vector<Stage> stages;
  for (const auto& r : cfg.stage_rows) {
    Stage s;
    s.t_start = r.t_start_h * kSecondsPerHour;
    s.t_end = r.t_end_h * kSecondsPerHour;
    s.model = r.model == "ode" ? StageModel::ode_mixing : StageModel::pde;
    s.Q_f = r.Qf_m3ph / kSecondsPerHour;
    s.Q_u = r.Qu_m3ph / kSecondsPerHour;
    s.Q_e = r.Qe_m3ph / kSecondsPerHour;
    s.X_f = r.Xf_kgpm3;
    stages.push_back(s);
  }

  FeedSpec feed;
  const double wsum = cfg.pf_weights.sum();
  if (!(wsum > 0.0))
    throw config_error("scenario config: feed percentage weights must have a positive sum");
  feed.p_f = cfg.pf_weights / wsum;
  feed.S_f = cfg.Sf_kgpm3;

  InitialProfile init;
  init.clear_above = cfg.clear_above_m;
  init.C0 = cfg.C0_kgpm3;
  init.S0 = cfg.S0_kgpm3;

  Asm1Params kin;
  kin.Y_A = cfg.Y_A;
  kin.Y_H = cfg.Y_H;
  kin.f_P = cfg.f_P;
  kin.i_XB = cfg.i_XB;
  kin.i_XP = cfg.i_XP;
  kin.mu_H = cfg.mu_H_per_d / kSecondsPerDay;
  kin.b_H = cfg.b_H_per_d / kSecondsPerDay;
  kin.mu_A = cfg.mu_A_per_d / kSecondsPerDay;
  kin.b_A = cfg.b_A_per_d / kSecondsPerDay;
  kin.k_h = cfg.k_h_per_d / kSecondsPerDay;
  kin.k_a = cfg.k_a_m3_per_g_d * 1e3 / kSecondsPerDay;
  kin.K_S = cfg.K_S_gpm3 * 1e-3;
  kin.K_OH = cfg.K_OH_gpm3 * 1e-3;
  kin.K_NO = cfg.K_NO_gpm3 * 1e-3;
  kin.K_X = cfg.K_X;
  kin.K_NH = cfg.K_NH_gpm3 * 1e-3;
  kin.K_NH_bar = cfg.K_NH_bar_gpm3 * 1e-3;
  kin.K_OA = cfg.K_OA_gpm3 * 1e-3;
  kin.eta_g = cfg.eta_g;
  kin.eta_h = cfg.eta_h;
  if (!(cfg.growth_cutoff_rel > 0.0 && cfg.growth_cutoff_rel < 1.0))
    throw config_error("scenario config: growth_cutoff_rel must lie in (0, 1)");
  kin.eps_cutoff = cfg.growth_cutoff_rel * derive_x_hat(cfg.constitutive);

  return make_scenario(geom, std::move(stages), feed, init, cfg.constitutive, kin,
                       cfg.numerics, bound_samples);
}

}  // namespace sbr

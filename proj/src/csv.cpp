#include "sbr/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sbr {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void write_row(std::ostream& os, const Snapshot& s, int i) {
  os << format_double(s.t) << ',' << format_double(s.z[i]) << ','
     << format_double(s.X[i]);
  for (int k = 0; k < 6; ++k) os << ',' << format_double(s.C(i, k));
  for (int k = 0; k < 6; ++k) os << ',' << format_double(s.S(i, k));
  os << '\n';
}

}  // namespace

void write_profile_csv(std::ostream& os, const SimulationOutput& out) {
  os << "t_s,z_m,X_kgpm3,XI,XSND,XBH,XBA,XP,XND,SI,SS,SO,SNO,SNH,SND\n";
  for (const Snapshot& s : out.snapshots)
    for (int i = 0; i < int(s.X.size()); ++i) write_row(os, s, i);
}

void write_outlet_csv(std::ostream& os, const SimulationOutput& out) {
  os << "t_s,Xe,Xu";
  const char* cn[] = {"XI", "XSND", "XBH", "XBA", "XP", "XND"};
  const char* sn[] = {"SI", "SS", "SO", "SNO", "SNH", "SND"};
  for (const char* n : cn) os << ",Ce_" << n;
  for (const char* n : sn) os << ",Se_" << n;
  for (const char* n : cn) os << ",Cu_" << n;
  for (const char* n : sn) os << ",Su_" << n;
  os << '\n';
  for (const OutletRecord& r : out.outlets) {
    os << format_double(r.t) << ',' << format_double(r.X_e) << ',' << format_double(r.X_u);
    for (int k = 0; k < 6; ++k) os << ',' << format_double(r.C_e[k]);
    for (int k = 0; k < 6; ++k) os << ',' << format_double(r.S_e[k]);
    for (int k = 0; k < 6; ++k) os << ',' << format_double(r.C_u[k]);
    for (int k = 0; k < 6; ++k) os << ',' << format_double(r.S_u[k]);
    os << '\n';
  }
}

void save_output(const std::string& path, const SimulationOutput& out) {
  std::ofstream f(path);
  if (!f) throw config_error("save_output: cannot open " + path);
  f << "# sbr-run N=" << out.N << " B=" << format_double(out.B)
    << " scheme=" << to_string(out.scheme) << " flux=" << to_string(out.flux) << '\n';
  for (const Snapshot& s : out.snapshots) {
    f << "snapshot t=" << format_double(s.t) << " z_bar=" << format_double(s.z_bar)
      << '\n';
    for (int i = 0; i < int(s.X.size()); ++i) {
      f << format_double(s.z[i]) << ',' << format_double(s.X[i]);
      for (int k = 0; k < 6; ++k) f << ',' << format_double(s.C(i, k));
      for (int k = 0; k < 6; ++k) f << ',' << format_double(s.S(i, k));
      f << '\n';
    }
  }
}

SimulationOutput load_output(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("load_output: cannot open " + path);
  SimulationOutput out;
  std::string line;
  if (!std::getline(f, line) || line.rfind("# sbr-run", 0) != 0)
    throw config_error("load_output: not a saved run: " + path);
  {
    std::istringstream hs(line.substr(9));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "N") out.N = std::stoi(val);
      if (key == "B") out.B = std::stod(val);
      if (key == "scheme") out.scheme = val == "explicit" ? SchemeKind::explicit_euler
                                                          : SchemeKind::semi_implicit;
      if (key == "flux")
        out.flux = val == "godunov" ? FluxKind::godunov : FluxKind::engquist_osher;
    }
  }
  if (out.N < 4) throw config_error("load_output: bad header in " + path);
  out.delta_xi = 1.0 / (out.N + 0.5);
  const int nc = out.N + 3;
  while (std::getline(f, line)) {
    if (line.rfind("snapshot", 0) != 0)
      throw config_error("load_output: expected snapshot header in " + path);
    Snapshot s;
    {
      std::istringstream hs(line.substr(8));
      std::string tok;
      while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        if (tok.substr(0, eq) == "t") s.t = std::stod(tok.substr(eq + 1));
        if (tok.substr(0, eq) == "z_bar") s.z_bar = std::stod(tok.substr(eq + 1));
      }
    }
    s.z.resize(nc);
    s.X.resize(nc);
    s.C.resize(nc, 6);
    s.S.resize(nc, 6);
    for (int i = 0; i < nc; ++i) {
      if (!std::getline(f, line))
        throw config_error("load_output: truncated snapshot in " + path);
      std::istringstream ls(line);
      std::string field;
      double vals[14];
      for (double& v : vals) {
        if (!std::getline(ls, field, ','))
          throw config_error("load_output: short row in " + path);
        v = std::stod(field);
      }
      s.z[i] = vals[0];
      s.X[i] = vals[1];
      for (int k = 0; k < 6; ++k) s.C(i, k) = vals[2 + k];
      for (int k = 0; k < 6; ++k) s.S(i, k) = vals[8 + k];
    }
    out.snapshots.push_back(std::move(s));
  }
  return out;
}

}  // namespace sbr

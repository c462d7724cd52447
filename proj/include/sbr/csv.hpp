#pragma once

#include "sbr/simulator.hpp"

#include <iosfwd>
#include <string>

namespace sbr {

/// Locale-independent shortest-round-trip formatting of a double.
std::string format_double(double v);

/// Profile CSV, one row per cell per snapshot:
/// t_s,z_m,X_kgpm3,XI,XSND,XBH,XBA,XP,XND,SI,SS,SO,SNO,SNH,SND
void write_profile_csv(std::ostream& os, const SimulationOutput& out);

/// Outlet CSV: t_s,Xe,Xu then the extraction and underflow C/S components.
void write_outlet_csv(std::ostream& os, const SimulationOutput& out);

/// Compact save/load of a run (snapshots only) for reference reuse.
void save_output(const std::string& path, const SimulationOutput& out);
SimulationOutput load_output(const std::string& path);

}  // namespace sbr

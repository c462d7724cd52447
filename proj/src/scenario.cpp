#include "sbr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sbr {

BoundaryTrajectory::BoundaryTrajectory(const std::vector<Stage>& stages,
                                       const TankGeometry& geom)
    : geom_(geom) {
  if (stages.empty()) throw config_error("trajectory: empty stage table");
  knots_t_.reserve(stages.size() + 1);
  knots_z_.reserve(stages.size() + 1);
  slopes_.reserve(stages.size());
  knots_t_.push_back(stages.front().t_start);
  knots_z_.push_back(geom.z_bar0);
  double z = geom.z_bar0;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const Stage& s = stages[i];
    const double Q_bar = s.extraction() ? -s.Q_e : s.Q_f;
    const double slope = (s.Q_u - Q_bar) / geom.A;
    z += slope * (s.t_end - s.t_start);
    slopes_.push_back(slope);
    knots_t_.push_back(s.t_end);
    knots_z_.push_back(z);
    const double z_lo = std::min(knots_z_[i], z), z_hi = std::max(knots_z_[i], z);
    if (z_lo < -1e-12 || z_hi > geom.B - geom.B_c + 1e-12) {
      std::ostringstream msg;
      msg << "trajectory: stage " << i + 1 << " drives the surface to z = " << z
          << " m, outside [0, " << geom.B - geom.B_c << "] (depth bound B_c = " << geom.B_c
          << " m)";
      throw config_error(msg.str());
    }
  }
  zeta_ = 0.0;
  for (double zk : knots_z_) zeta_ = std::max(zeta_, 1.0 / (geom.B - zk));
}

namespace {
int stage_index(const std::vector<double>& knots, double t) {
  // half-open [t_k, t_{k+1}); the final instant belongs to the last stage
  if (t <= knots.front()) return 0;
  if (t >= knots.back()) return int(knots.size()) - 2;
  const auto it = std::upper_bound(knots.begin(), knots.end(), t);
  return int(it - knots.begin()) - 1;
}
}  // namespace

double BoundaryTrajectory::z_bar(double t) const {
  const int k = stage_index(knots_t_, t);
  const double tc = std::clamp(t, knots_t_.front(), knots_t_.back());
  return knots_z_[k] + slopes_[k] * (tc - knots_t_[k]);
}

double BoundaryTrajectory::z_bar_prime(double t) const {
  return slopes_[stage_index(knots_t_, t)];
}

const Stage& Scenario::stage_at(double t) const {
  for (std::size_t i = 0; i + 1 < stages.size(); ++i)
    if (t < stages[i].t_end) return stages[i];
  return stages.back();
}

Scenario make_scenario(TankGeometry geometry, std::vector<Stage> stages, FeedSpec feed,
                       InitialProfile initial, ConstitutiveParams constitutive,
                       Asm1Params kinetics, NumericsDefaults numerics, int bound_samples) {
  if (stages.empty()) throw config_error("scenario: no stages");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const Stage& s = stages[i];
    if (!(s.t_end > s.t_start))
      throw config_error("scenario: stage " + std::to_string(i + 1) + " has t_end <= t_start");
    if (s.Q_f < 0.0 || s.Q_u < 0.0 || s.Q_e < 0.0)
      throw config_error("scenario: stage " + std::to_string(i + 1) + " has a negative flow");
    if (s.Q_e > 0.0 && s.Q_f > 0.0)
      throw config_error("scenario: stage " + std::to_string(i + 1) +
                         " fills and extracts simultaneously");
    if (i > 0 && std::abs(s.t_start - stages[i - 1].t_end) > 1e-9)
      throw config_error("scenario: stage table is not contiguous at stage " +
                         std::to_string(i + 1));
  }
  if (!(geometry.A > 0.0)) throw config_error("scenario: cross-section must be positive");
  if (!(geometry.z_bar0 >= 0.0 && geometry.z_bar0 < geometry.B))
    throw config_error("scenario: initial surface must lie in [0, B)");

  const double psum = feed.p_f.sum();
  if (std::abs(psum - 1.0) > 1e-9 || (feed.p_f.array() < -1e-15).any())
    throw config_error("scenario: feed percentages must be nonnegative and sum to 1");
  feed.p_f /= psum;
  if ((feed.S_f.array() < 0.0).any())
    throw config_error("scenario: feed substrate concentrations must be nonnegative");

  Scenario sc;
  sc.geometry = geometry;
  sc.stages = std::move(stages);
  sc.feed = feed;
  sc.initial = initial;
  sc.numerics = numerics;
  sc.constitutive = std::make_shared<Constitutive>(constitutive);

  if (kinetics.eps_cutoff <= 0.0) kinetics.eps_cutoff = 0.05 * sc.constitutive->X_hat();
  sc.kinetics = kinetics;
  sc.biokinetics = std::make_shared<Biokinetics>(kinetics, constitutive.c_conv,
                                                 sc.constitutive->X_hat());

  for (const Stage& s : sc.stages)
    if (s.X_f > sc.constitutive->X_hat() + 1e-12)
      throw config_error("scenario: feed solids exceed the maximum packing concentration");

  sc.trajectory = BoundaryTrajectory(sc.stages, sc.geometry);

  Vec6 S_box = 2.0 * initial.S0.cwiseMax(feed.S_f);
  sc.reaction_bounds = derivative_bounds(*sc.biokinetics, S_box, bound_samples);
  return sc;
}

}  // namespace sbr

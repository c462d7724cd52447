#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace sbr {

using Eigen::ArrayXd;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat6x8 = Eigen::Matrix<double, 6, 8>;
using Mat8x6 = Eigen::Matrix<double, 8, 6>;
// Row-major so that one cell's six components are contiguous.
using MatX6 = Eigen::Matrix<double, Eigen::Dynamic, 6, Eigen::RowMajor>;

inline constexpr int kParticulateComponents = 6;
inline constexpr int kSolubleComponents = 6;
inline constexpr int kProcesses = 8;

inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerDay = 86400.0;

/// Invalid or inconsistent scenario/parameter input. CLI exit code 1.
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (singular solve, NaN, CFL breach, ...). CLI exit code 2.
class numerical_error : public std::runtime_error {
public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// A time step left the admissible state set beyond the round-off budget.
class step_error : public numerical_error {
public:
  step_error(const std::string& what, double t)
      : numerical_error(what + " (at t = " + std::to_string(t) + " s)"), t_(t) {}
  double time() const { return t_; }

private:
  double t_;
};

/// Property/validation suite failure. CLI exit code 3.
class validation_error : public std::runtime_error {
public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

enum class SchemeKind { explicit_euler, semi_implicit };
enum class FluxKind { engquist_osher, godunov };

inline const char* to_string(SchemeKind s) {
  return s == SchemeKind::explicit_euler ? "explicit" : "semi-implicit";
}
inline const char* to_string(FluxKind f) {
  return f == FluxKind::engquist_osher ? "eo" : "godunov";
}

}  // namespace sbr

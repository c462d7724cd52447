#include "sbr/constitutive.hpp"

#include <algorithm>
#include <cmath>

namespace sbr {

namespace {

double base_vhs(const ConstitutiveParams& p, double X) {
  return p.v0 / (1.0 + std::pow(X / p.X_breve, p.eta));
}

double base_vhs_slope(const ConstitutiveParams& p, double X) {
  if (X <= 0.0) return 0.0;
  const double y = std::pow(X / p.X_breve, p.eta);
  const double d = 1.0 + y;
  return -p.v0 * p.eta * y / (X * d * d);
}

// Adaptive Simpson on a smooth integrand, absolute tolerance.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double m = 0.5 * (a + b);
  return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 48);
}

}  // namespace

void ConstitutiveParams::validate() const {
  if (!(v0 > 0.0)) throw config_error("constitutive: v0 must be positive");
  if (!(X_breve > 0.0)) throw config_error("constitutive: X_breve must be positive");
  if (!(eta > 1.0)) throw config_error("constitutive: eta must exceed 1");
  if (!(X_c > 0.0 && X_c < X_tangent))
    throw config_error("constitutive: require 0 < X_c < X_tangent");
  if (!(sigma0 >= 0.0)) throw config_error("constitutive: sigma0 must be nonnegative");
  if (!(rho_X > rho_L)) throw config_error("constitutive: rho_X must exceed rho_L");
  if (!(g > 0.0)) throw config_error("constitutive: g must be positive");
  if (!(c_conv > 0.0)) throw config_error("constitutive: c_conv must be positive");
}

double derive_x_hat(const ConstitutiveParams& params) {
  const double v = base_vhs(params, params.X_tangent);
  const double s = base_vhs_slope(params, params.X_tangent);
  if (!(s < 0.0))
    throw config_error("constitutive: settling velocity slope at X_tangent is not negative");
  return params.X_tangent - v / s;
}

Constitutive::Constitutive(const ConstitutiveParams& params) : params_(params) {
  params_.validate();
  tangent_slope_ = base_vhs_slope(params_, params_.X_tangent);
  derived_.X_hat = derive_x_hat(params_);
  if (!(params_.X_tangent < derived_.X_hat && derived_.X_hat < params_.rho_X))
    throw config_error("constitutive: require X_tangent < X_hat < rho_X");
  a_factor_ = params_.rho_X * params_.sigma0 / (params_.g * params_.delta_rho());
  build_diffusion_table();
  derive_extrema();
}

double Constitutive::hindered_settling_velocity(double X) const {
  if (X < 0.0) throw std::domain_error("hindered_settling_velocity: negative concentration");
  if (X <= params_.X_tangent) return base_vhs(params_, X);
  // Point-slope form through the root keeps v_hs(X_hat) exactly zero.
  return std::max(0.0, tangent_slope_ * (X - derived_.X_hat));
}

double Constitutive::hindered_settling_slope(double X) const {
  if (X < 0.0) throw std::domain_error("hindered_settling_slope: negative concentration");
  if (X <= params_.X_tangent) return base_vhs_slope(params_, X);
  return X < derived_.X_hat ? tangent_slope_ : 0.0;
}

double Constitutive::effective_stress(double X) const {
  if (X < 0.0) throw std::domain_error("effective_stress: negative concentration");
  return X < params_.X_c ? 0.0 : params_.sigma0 * (X - params_.X_c);
}

double Constitutive::effective_stress_derivative(double X) const {
  if (X < 0.0) throw std::domain_error("effective_stress_derivative: negative concentration");
  return X < params_.X_c ? 0.0 : params_.sigma0;
}

double Constitutive::diffusion_a(double X) const {
  if (X <= params_.X_c || X >= derived_.X_hat) return 0.0;
  return a_factor_ * hindered_settling_velocity(X);
}

double Constitutive::diffusion_d(double X) const {
  if (X <= params_.X_c) return 0.0;
  return diffusion_a(X) / X;
}

double Constitutive::batch_flux(double X) const {
  return hindered_settling_velocity(X) * X;
}

void Constitutive::build_diffusion_table() {
  const double Xc = params_.X_c, Xh = derived_.X_hat;
  const int segments = 2048;
  tab_x_.resize(segments + 1);
  tab_d_.resize(segments + 1);
  // Keep the branch point of v_hs on a node so every segment is smooth.
  const double h = (Xh - Xc) / segments;
  for (int i = 0; i <= segments; ++i) tab_x_[i] = Xc + i * h;
  {
    double nearest = tab_x_[1];
    int k = 1;
    for (int i = 1; i < segments; ++i)
      if (std::abs(tab_x_[i] - params_.X_tangent) < std::abs(nearest - params_.X_tangent)) {
        nearest = tab_x_[i];
        k = i;
      }
    tab_x_[k] = params_.X_tangent;
  }
  const auto a_fn = [this](double s) { return diffusion_a(s); };
  tab_d_[0] = 0.0;
  for (int i = 1; i <= segments; ++i)
    tab_d_[i] = tab_d_[i - 1] + integrate(a_fn, tab_x_[i - 1], tab_x_[i], 1e-14);

  // Fritsch-Carlson slopes: monotone piecewise-cubic interpolation.
  const int n = segments + 1;
  tab_m_.assign(n, 0.0);
  std::vector<double> sec(segments);
  for (int i = 0; i < segments; ++i)
    sec[i] = (tab_d_[i + 1] - tab_d_[i]) / (tab_x_[i + 1] - tab_x_[i]);
  tab_m_[0] = sec[0];
  tab_m_[n - 1] = sec[segments - 1];
  for (int i = 1; i < n - 1; ++i)
    tab_m_[i] = (sec[i - 1] * sec[i] <= 0.0) ? 0.0 : 0.5 * (sec[i - 1] + sec[i]);
  for (int i = 0; i < segments; ++i) {
    if (sec[i] == 0.0) {
      tab_m_[i] = tab_m_[i + 1] = 0.0;
      continue;
    }
    const double a = tab_m_[i] / sec[i], b = tab_m_[i + 1] / sec[i];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double t = 3.0 / std::sqrt(r);
      tab_m_[i] = t * a * sec[i];
      tab_m_[i + 1] = t * b * sec[i];
    }
  }
}

double Constitutive::integrated_diffusion(double X) const {
  if (X <= params_.X_c) return 0.0;
  if (X >= derived_.X_hat) return tab_d_.back();
  const auto it = std::upper_bound(tab_x_.begin(), tab_x_.end(), X);
  const int i = std::max<int>(0, int(it - tab_x_.begin()) - 1);
  const double h = tab_x_[i + 1] - tab_x_[i];
  const double t = (X - tab_x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * tab_d_[i] + h * h10 * tab_m_[i] + h01 * tab_d_[i + 1] + h * h11 * tab_m_[i + 1];
}

void Constitutive::derive_extrema() {
  const double Xh = derived_.X_hat;
  const int n = 1 << 14;
  const double h = Xh / n;
  std::vector<double> f(n + 1);
  for (int i = 0; i <= n; ++i) f[i] = batch_flux(i * h);

  // Unimodality: the discrete increments must change sign exactly once (+ to -).
  int sign = +1, changes = 0;
  const double tiny = 1e-14 * params_.v0 * Xh;
  for (int i = 0; i < n; ++i) {
    const double df = f[i + 1] - f[i];
    if (std::abs(df) <= tiny) continue;
    const int s = df > 0.0 ? +1 : -1;
    if (s != sign) {
      ++changes;
      sign = s;
    }
  }
  if (changes != 1 || sign != -1)
    throw config_error("constitutive: batch flux is not unimodal on [0, X_hat]");

  int imax = 0;
  for (int i = 1; i <= n; ++i)
    if (f[i] > f[imax]) imax = i;

  // Golden-section refinement of the maximizer.
  double a = std::max(0.0, (imax - 1) * h), b = std::min(Xh, (imax + 1) * h);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = batch_flux(x1), f2 = batch_flux(x2);
  while ((b - a) > 1e-10 * Xh) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = batch_flux(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = batch_flux(x1);
    }
  }
  derived_.X_star = 0.5 * (a + b);
  derived_.f_max = batch_flux(derived_.X_star);

  double fp = 0.0;
  for (int i = 1; i < n; ++i) fp = std::max(fp, std::abs(f[i + 1] - f[i - 1]) / (2.0 * h));
  fp = std::max(fp, std::abs(f[1] - f[0]) / h);
  fp = std::max(fp, std::abs(f[n] - f[n - 1]) / h);
  derived_.f_prime_sup = 1.05 * fp;

  double amax = a_factor_ * hindered_settling_velocity(params_.X_c);  // sup at X_c+
  for (int i = 0; i <= n; ++i) amax = std::max(amax, diffusion_a(i * h));
  derived_.a_sup = 1.05 * amax;
}

}  // namespace sbr

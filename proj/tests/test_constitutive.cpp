#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sbr/constitutive.hpp"

#include <cmath>
#include <functional>

using namespace sbr;

namespace {

Constitutive reference_model() { return Constitutive(ConstitutiveParams{}); }

// Independent adaptive Simpson, used as the quadrature oracle for 𝒟.
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double halves = (b - a) / 12.0 * (fa + 4.0 * flm + 2.0 * fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(halves - whole) < 15.0 * tol) return halves;
  return simpson_rec(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

double simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  return simpson_rec(f, a, b, f(a), f(0.5 * (a + b)), f(b), tol, 40);
}

}  // namespace

TEST_CASE("hindered settling velocity: base law values") {
  const Constitutive con = reference_model();
  CHECK(con.hindered_settling_velocity(0.0) == doctest::Approx(1.76e-3).epsilon(1e-14));
  // at X = X_breve the hindrance factor is exactly 1/2
  CHECK(con.hindered_settling_velocity(3.87) ==
        doctest::Approx(0.5 * 1.76e-3).epsilon(1e-14));
  CHECK(con.X_hat() == doctest::Approx(31.992).epsilon(1e-3 / 31.992));
  CHECK(con.hindered_settling_velocity(con.X_hat()) == 0.0);
  CHECK(con.hindered_settling_velocity(con.X_hat() + 5.0) == 0.0);
  CHECK_THROWS_AS(con.hindered_settling_velocity(-1e-9), std::domain_error);
}

TEST_CASE("hindered settling velocity: tangent branch is affine") {
  const Constitutive con = reference_model();
  const double Xt = con.params().X_tangent, Xh = con.X_hat();
  const double mid = 0.5 * (Xt + Xh);
  const double expect = con.hindered_settling_velocity(Xt) * (Xh - mid) / (Xh - Xt);
  CHECK(con.hindered_settling_velocity(mid) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("tangent root: hand-differentiated case") {
  // v0 = 1, X_breve = 1, eta = 2, X_t = 2: root at 2 + (1/5)/(4/25) = 3.25
  ConstitutiveParams p;
  p.v0 = 1.0;
  p.X_breve = 1.0;
  p.eta = 2.0;
  p.X_tangent = 2.0;
  p.X_c = 1.0;
  CHECK(derive_x_hat(p) == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("invalid parameterizations are rejected") {
  ConstitutiveParams p;
  p.eta = 0.5;
  CHECK_THROWS_AS(Constitutive{p}, config_error);
  ConstitutiveParams q;
  q.X_c = 26.0;  // X_c must lie below the tangent onset
  CHECK_THROWS_AS(Constitutive{q}, config_error);
}

TEST_CASE("effective stress: piecewise affine") {
  const Constitutive con = reference_model();
  CHECK(con.effective_stress(4.0) == 0.0);
  CHECK(con.effective_stress(6.0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(con.effective_stress_derivative(5.0 - 1e-9) == 0.0);
  CHECK(con.effective_stress_derivative(5.0 + 1e-9) == doctest::Approx(0.2));
}

TEST_CASE("diffusion functions: degenerate below X_c, X cancels in a") {
  const Constitutive con = reference_model();
  const ConstitutiveParams& p = con.params();
  CHECK(con.diffusion_a(p.X_c) == 0.0);
  CHECK(con.diffusion_a(0.5 * p.X_c) == 0.0);
  // direct substitution oracle just above X_c
  const double Xp = p.X_c * (1.0 + 1e-12);
  const double vhs5 = 1.76e-3 / (1.0 + std::pow(5.0 / 3.87, 3.58));
  const double expect = vhs5 * 1050.0 * 0.2 / (9.81 * 52.0);
  CHECK(con.diffusion_a(Xp) == doctest::Approx(expect).epsilon(1e-9));
  // a = X d
  CHECK(con.diffusion_d(2.0 * p.X_c) ==
        doctest::Approx(con.diffusion_a(2.0 * p.X_c) / (2.0 * p.X_c)).epsilon(1e-14));
}

TEST_CASE("integrated diffusion: exact zero, monotone, quadrature oracle") {
  const Constitutive con = reference_model();
  const ConstitutiveParams& p = con.params();
  const double Xh = con.X_hat();
  CHECK(con.integrated_diffusion(p.X_c) == 0.0);
  CHECK(con.integrated_diffusion(0.0) == 0.0);

  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double X = Xh * i / 1000.0;
    const double v = con.integrated_diffusion(X);
    CHECK(v >= prev);
    if (X <= p.X_c) CHECK(v == 0.0);
    prev = v;
  }

  const auto a_fn = [&](double s) { return con.diffusion_a(s); };
  const double oracle =
      simpson(a_fn, p.X_c, p.X_tangent, 1e-14) + simpson(a_fn, p.X_tangent, Xh, 1e-14);
  CHECK(con.integrated_diffusion(Xh) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("integrated diffusion: table derivative matches a away from X_c") {
  const Constitutive con = reference_model();
  const double Xc = con.params().X_c, Xh = con.X_hat();
  const double h = 1e-6;
  for (int i = 0; i <= 200; ++i) {
    const double X = Xc * 1.1 + (Xh * 0.999 - Xc * 1.1) * i / 200.0;
    const double fd =
        (con.integrated_diffusion(X + h) - con.integrated_diffusion(X - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(con.diffusion_a(X)).epsilon(1e-4));
  }
}

TEST_CASE("batch flux: endpoints exact, known value at X_breve") {
  const Constitutive con = reference_model();
  CHECK(con.batch_flux(0.0) == 0.0);
  CHECK(con.batch_flux(con.X_hat()) == 0.0);
  CHECK(con.batch_flux(3.87) == doctest::Approx(1.76e-3 * 3.87 / 2.0).epsilon(1e-14));
  const double delta = 1e-6 * con.X_hat();
  for (int i = 1; i < 300; ++i) {
    const double X = delta + (con.X_hat() - 2.0 * delta) * i / 300.0;
    CHECK(con.batch_flux(X) > 0.0);
  }
}

TEST_CASE("flux maximizer: brute-force scan agrees with golden section") {
  const Constitutive con = reference_model();
  const int n = 1000000;
  double best = 0.0;
  int ibest = 0;
  for (int i = 0; i <= n; ++i) {
    const double f = con.batch_flux(con.X_hat() * i / n);
    if (f > best) {
      best = f;
      ibest = i;
    }
  }
  // parabolic refinement of the discrete argmax (the flux is smooth here)
  const double h = con.X_hat() / n;
  const double fm = con.batch_flux(con.X_hat() * (ibest - 1) / n);
  const double fp = con.batch_flux(con.X_hat() * (ibest + 1) / n);
  const double best_x =
      con.X_hat() * ibest / n + 0.5 * h * (fm - fp) / (fm - 2.0 * best + fp);
  CHECK(con.X_star() == doctest::Approx(best_x).epsilon(1e-6));
  CHECK(con.derived().f_max == doctest::Approx(best).epsilon(1e-9));
  CHECK(con.X_star() > 0.0);
  CHECK(con.X_star() < con.X_hat());
}

TEST_CASE("monotone velocity and sound suprema on a dense grid") {
  const Constitutive con = reference_model();
  const int n = 10000;
  double prev = con.hindered_settling_velocity(0.0);
  for (int i = 1; i <= n; ++i) {
    const double X = con.X_hat() * i / n;
    const double v = con.hindered_settling_velocity(X);
    CHECK(v >= 0.0);
    CHECK(v <= prev + 1e-15);
    prev = v;
    CHECK(con.diffusion_a(X) <= con.derived().a_sup);
  }
  const double h = con.X_hat() / n;
  for (int i = 1; i < n; ++i) {
    const double X = con.X_hat() * i / n;
    const double fp = (con.batch_flux(X + h) - con.batch_flux(X - h)) / (2.0 * h);
    CHECK(std::abs(fp) <= con.derived().f_prime_sup);
  }
}

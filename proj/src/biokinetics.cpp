#include "sbr/biokinetics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace sbr {

namespace {

inline double monod(double A, double B) {
  const double d = A + B;
  return d > 0.0 ? A / d : 0.0;
}

inline Vec6 clamped(const Vec6& v) { return v.cwiseMax(0.0); }

}  // namespace

void Asm1Params::validate() const {
  const double rates[] = {mu_H, b_H, mu_A, b_A, k_h, k_a};
  for (double r : rates)
    if (!(r >= 0.0)) throw config_error("kinetics: rates must be nonnegative");
  const double halfs[] = {K_S, K_OH, K_NO, K_X, K_NH, K_NH_bar, K_OA};
  for (double k : halfs)
    if (!(k > 0.0)) throw config_error("kinetics: half-saturation constants must be positive");
  if (!(Y_H > 0.0 && Y_H < 1.0)) throw config_error("kinetics: require 0 < Y_H < 1");
  if (!(Y_A > 0.0)) throw config_error("kinetics: require Y_A > 0");
  if (!(f_P > 0.0 && f_P < 1.0)) throw config_error("kinetics: require 0 < f_P < 1");
  if (!(eta_g >= 0.0 && eta_h >= 0.0)) throw config_error("kinetics: correction factors must be nonnegative");
  if (!(eps_cutoff > 0.0)) throw config_error("kinetics: growth-cutoff width must be positive");
}

StoichiometricModel StoichiometricModel::build(const Asm1Params& p, double c_conv) {
  StoichiometricModel m;
  m.c_conv = c_conv;
  m.sigma_C.setZero();
  m.sigma_S.setZero();

  const double decay_to_sless = 1.0 - p.f_P * (1.0 + p.i_XP) - p.i_XB;
  const double decay_to_nd = p.i_XB - p.f_P * p.i_XP;

  // rows: (X_I, X_S-ND, X_BH, X_BA, X_P, X_ND); columns: processes 1..8
  m.sigma_C(1, 3) = decay_to_sless;
  m.sigma_C(1, 4) = decay_to_sless;
  m.sigma_C(1, 6) = -1.0;
  m.sigma_C(1, 7) = 1.0;
  m.sigma_C(2, 0) = 1.0;
  m.sigma_C(2, 1) = 1.0;
  m.sigma_C(2, 3) = -1.0;
  m.sigma_C(3, 2) = 1.0;
  m.sigma_C(3, 4) = -1.0;
  m.sigma_C(4, 3) = p.f_P;
  m.sigma_C(4, 4) = p.f_P;
  m.sigma_C(5, 3) = decay_to_nd;
  m.sigma_C(5, 4) = decay_to_nd;
  m.sigma_C(5, 7) = -1.0;

  // rows: (S_I, S_S, S_O, S_NO, S_NH, S_ND)
  m.sigma_S(1, 0) = -1.0 / p.Y_H;
  m.sigma_S(1, 1) = -1.0 / p.Y_H;
  m.sigma_S(1, 6) = 1.0;
  m.sigma_S(2, 0) = -(1.0 - p.Y_H) / p.Y_H;
  m.sigma_S(2, 2) = -(4.57 - p.Y_A) / p.Y_A;
  m.sigma_S(3, 1) = -(1.0 - p.Y_H) / (2.86 * p.Y_H);
  m.sigma_S(3, 2) = 1.0 / p.Y_A;
  m.sigma_S(4, 0) = -p.i_XB;
  m.sigma_S(4, 1) = -p.i_XB;
  m.sigma_S(4, 2) = -p.i_XB - 1.0 / p.Y_A;
  m.sigma_S(4, 5) = 1.0;
  m.sigma_S(5, 5) = -1.0;
  m.sigma_S(5, 7) = 1.0;
  return m;
}

Biokinetics::Biokinetics(const Asm1Params& params, double c_conv, double X_hat)
    : params_(params), stoich_(StoichiometricModel::build(params, c_conv)), X_hat_(X_hat) {
  params_.validate();
}

double Biokinetics::growth_cutoff(double X) const {
  return std::clamp((X_hat_ - X) / params_.eps_cutoff, 0.0, 1.0);
}

Vec8 Biokinetics::reaction_rates(const Vec6& C_in, const Vec6& S_in) const {
  if (!C_in.allFinite() || !S_in.allFinite())
    throw numerical_error("reaction_rates: non-finite concentration");
  const Vec6 C = clamped(C_in), S = clamped(S_in);
  const Asm1Params& p = params_;

  const double X_BH = C[2], X_BA = C[3], X_ND = C[5];
  const double X_S = C[1] + C[5];
  const double S_S = S[1], S_O = S[2], S_NO = S[3], S_NH = S[4], S_ND = S[5];

  const double m_nhb = monod(S_NH, p.K_NH_bar);
  const double m_ss = monod(S_S, p.K_S);
  const double m_oh = monod(S_O, p.K_OH);
  const double m_ohx = monod(p.K_OH, S_O);
  const double m_no = monod(S_NO, p.K_NO);
  const double hyd = m_oh + p.eta_h * m_ohx * m_no;

  double g7 = 0.0, g8 = 0.0;
  if (X_S > 0.0 || X_BH > 0.0) {
    const double den = p.K_X * X_BH + X_S;
    g7 = X_S * X_BH / den;
    g8 = X_BH * X_ND / den;
  }

  Vec8 r;
  r[0] = p.mu_H * m_nhb * m_ss * m_oh * X_BH;
  r[1] = p.mu_H * m_nhb * m_ss * m_ohx * m_no * p.eta_g * X_BH;
  r[2] = p.mu_A * monod(S_NH, p.K_NH) * monod(S_O, p.K_OA) * X_BA;
  r[3] = p.b_H * X_BH;
  r[4] = p.b_A * X_BA;
  r[5] = p.k_a * S_ND * X_BH;
  r[6] = p.k_h * g7 * hyd;
  r[7] = p.k_h * g8 * hyd;
  return r;
}

Vec6 Biokinetics::particulate_reactions(const Vec6& C, const Vec6& S, double X) const {
  const double chi = growth_cutoff(X);
  if (chi == 0.0) return Vec6::Zero();
  return chi * (stoich_.sigma_C * reaction_rates(C, S));
}

Vec6 Biokinetics::soluble_reactions(const Vec6& C, const Vec6& S) const {
  return stoich_.sigma_S * reaction_rates(C, S);
}

double Biokinetics::total_reaction(const Vec6& C, const Vec6& S, double X) const {
  return stoich_.c_conv * particulate_reactions(C, S, X).sum();
}

CellReactions Biokinetics::evaluate(const Vec6& C, const Vec6& S, double X) const {
  CellReactions out;
  const Vec8 r = reaction_rates(C, S);
  out.R_C = growth_cutoff(X) * (stoich_.sigma_C * r);
  out.R_S = stoich_.sigma_S * r;
  out.R = stoich_.c_conv * out.R_C.sum();
  return out;
}

void Biokinetics::rate_jacobian(const Vec6& C_in, const Vec6& S_in, Mat8x6& dr_dC,
                                Mat8x6& dr_dS) const {
  const Vec6 C = clamped(C_in), S = clamped(S_in);
  const Asm1Params& p = params_;
  dr_dC.setZero();
  dr_dS.setZero();

  const double X_BH = C[2], X_BA = C[3], X_ND = C[5];
  const double X_S = C[1] + C[5];
  const double S_S = S[1], S_O = S[2], S_NO = S[3], S_NH = S[4], S_ND = S[5];

  const double m_nhb = monod(S_NH, p.K_NH_bar);
  const double m_ss = monod(S_S, p.K_S);
  const double m_oh = monod(S_O, p.K_OH);
  const double m_ohx = monod(p.K_OH, S_O);
  const double m_no = monod(S_NO, p.K_NO);
  const double m_nh = monod(S_NH, p.K_NH);
  const double m_oa = monod(S_O, p.K_OA);
  const double hyd = m_oh + p.eta_h * m_ohx * m_no;

  const auto sq = [](double x) { return x * x; };
  const double d_nhb = p.K_NH_bar / sq(S_NH + p.K_NH_bar);
  const double d_ss = p.K_S / sq(S_S + p.K_S);
  const double d_oh = p.K_OH / sq(S_O + p.K_OH);
  const double d_no = p.K_NO / sq(S_NO + p.K_NO);
  const double d_nh = p.K_NH / sq(S_NH + p.K_NH);
  const double d_oa = p.K_OA / sq(S_O + p.K_OA);
  const double dhyd_dSO = d_oh * (1.0 - p.eta_h * m_no);
  const double dhyd_dSNO = p.eta_h * m_ohx * d_no;

  // r1
  dr_dC(0, 2) = p.mu_H * m_nhb * m_ss * m_oh;
  dr_dS(0, 1) = p.mu_H * m_nhb * d_ss * m_oh * X_BH;
  dr_dS(0, 2) = p.mu_H * m_nhb * m_ss * d_oh * X_BH;
  dr_dS(0, 4) = p.mu_H * d_nhb * m_ss * m_oh * X_BH;
  // r2
  const double c2 = p.mu_H * p.eta_g;
  dr_dC(1, 2) = c2 * m_nhb * m_ss * m_ohx * m_no;
  dr_dS(1, 1) = c2 * m_nhb * d_ss * m_ohx * m_no * X_BH;
  dr_dS(1, 2) = -c2 * m_nhb * m_ss * d_oh * m_no * X_BH;
  dr_dS(1, 3) = c2 * m_nhb * m_ss * m_ohx * d_no * X_BH;
  dr_dS(1, 4) = c2 * d_nhb * m_ss * m_ohx * m_no * X_BH;
  // r3
  dr_dC(2, 3) = p.mu_A * m_nh * m_oa;
  dr_dS(2, 2) = p.mu_A * m_nh * d_oa * X_BA;
  dr_dS(2, 4) = p.mu_A * d_nh * m_oa * X_BA;
  // r4, r5, r6
  dr_dC(3, 2) = p.b_H;
  dr_dC(4, 3) = p.b_A;
  dr_dC(5, 2) = p.k_a * S_ND;
  dr_dS(5, 5) = p.k_a * X_BH;
  // r7, r8
  if (X_S > 0.0 || X_BH > 0.0) {
    const double den = p.K_X * X_BH + X_S;
    const double g7 = X_S * X_BH / den;
    const double g8 = X_BH * X_ND / den;
    const double dg7_dXS = p.K_X * X_BH * X_BH / sq(den);
    const double dg7_dBH = X_S * X_S / sq(den);
    const double dg8_dBH = X_ND * X_S / sq(den);
    const double dg8_dND = X_BH * (p.K_X * X_BH + C[1]) / sq(den);
    const double dg8_dSND = -X_BH * X_ND / sq(den);
    dr_dC(6, 1) = p.k_h * hyd * dg7_dXS;
    dr_dC(6, 5) = p.k_h * hyd * dg7_dXS;
    dr_dC(6, 2) = p.k_h * hyd * dg7_dBH;
    dr_dS(6, 2) = p.k_h * g7 * dhyd_dSO;
    dr_dS(6, 3) = p.k_h * g7 * dhyd_dSNO;
    dr_dC(7, 1) = p.k_h * hyd * dg8_dSND;
    dr_dC(7, 5) = p.k_h * hyd * dg8_dND;
    dr_dC(7, 2) = p.k_h * hyd * dg8_dBH;
    dr_dS(7, 2) = p.k_h * g8 * dhyd_dSO;
    dr_dS(7, 3) = p.k_h * g8 * dhyd_dSNO;
  }
}

double Biokinetics::particulate_decay_bound(const Vec6& C_in, const Vec6& S_in) const {
  const Vec6 C = clamped(C_in), S = clamped(S_in);
  const Asm1Params& p = params_;
  const double X_BH = C[2];
  const double X_S = C[1] + C[5];
  double hydro = 0.0;
  if (X_S > 0.0 || X_BH > 0.0) {
    const double m_oh = monod(S[2], p.K_OH);
    const double hyd = m_oh + p.eta_h * monod(p.K_OH, S[2]) * monod(S[3], p.K_NO);
    // (r7 - r8)/C_2 and r8/C_6 share this factored rate.
    hydro = p.k_h * X_BH / (p.K_X * X_BH + X_S) * hyd;
  }
  return std::max({p.b_H, p.b_A, hydro});
}

double Biokinetics::soluble_decay_bound(const Vec6& C_in, const Vec6& S_in,
                                        const std::array<bool, 6>& active) const {
  const Vec6 C = clamped(C_in), S = clamped(S_in);
  const Asm1Params& p = params_;
  const double X_BH = C[2], X_BA = C[3];
  const double S_S = S[1], S_O = S[2], S_NO = S[3], S_NH = S[4];

  const double m_nhb = monod(S_NH, p.K_NH_bar);
  const double m_ss = monod(S_S, p.K_S);
  const double m_oh = monod(S_O, p.K_OH);
  const double m_ohx = monod(p.K_OH, S_O);
  const double m_no = monod(S_NO, p.K_NO);

  double worst = 0.0;
  if (active[1])
    worst = std::max(worst, (1.0 / p.Y_H) * p.mu_H * m_nhb / (S_S + p.K_S) *
                                (m_oh + m_ohx * m_no * p.eta_g) * X_BH);
  if (active[2])
    worst = std::max(worst, (1.0 - p.Y_H) / p.Y_H * p.mu_H * m_nhb * m_ss /
                                    (S_O + p.K_OH) * X_BH +
                                (4.57 - p.Y_A) / p.Y_A * p.mu_A * monod(S_NH, p.K_NH) /
                                    (S_O + p.K_OA) * X_BA);
  if (active[3])
    worst = std::max(worst, (1.0 - p.Y_H) / (2.86 * p.Y_H) * p.mu_H * p.eta_g * m_nhb *
                                m_ss * m_ohx / (S_NO + p.K_NO) * X_BH);
  if (active[4])
    worst = std::max(worst, p.i_XB * p.mu_H * m_ss * (m_oh + m_ohx * m_no * p.eta_g) /
                                    (S_NH + p.K_NH_bar) * X_BH +
                                (p.i_XB + 1.0 / p.Y_A) * p.mu_A * monod(S_O, p.K_OA) /
                                    (S_NH + p.K_NH) * X_BA);
  if (active[5]) worst = std::max(worst, p.k_a * X_BH);
  return worst;
}

double Biokinetics::total_reaction_gradient_bound(const Vec6& C, const Vec6& S, double X) const {
  const double c = stoich_.c_conv;
  Mat8x6 drC, drS;
  rate_jacobian(C, S, drC, drS);
  const Vec8 r = reaction_rates(C, S);
  const double raw_sum = (stoich_.sigma_C * r).sum();
  const double chi = growth_cutoff(X);
  const double chi_slope =
      (X < X_hat_ && X > X_hat_ - params_.eps_cutoff) ? -1.0 / params_.eps_cutoff : 0.0;
  double best = 0.0;
  for (int k = 0; k < kParticulateComponents; ++k) {
    const double dsum = (stoich_.sigma_C * drC.col(k)).sum();
    const double dR_dCk = c * (chi * dsum + chi_slope * c * raw_sum);
    best = std::max(best, std::abs(dR_dCk));
  }
  return best / c;
}

ReactionBounds derivative_bounds(const Biokinetics& bio, const Vec6& S_box, int samples,
                                 double inflation, std::uint64_t seed) {
  if (samples < 1) throw config_error("derivative_bounds: need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Latin hypercube over 13 dimensions: X, six simplex drivers, six S.
  constexpr int kDims = 13;
  std::vector<std::vector<int>> perm(kDims, std::vector<int>(samples));
  for (auto& col : perm) {
    std::iota(col.begin(), col.end(), 0);
    std::shuffle(col.begin(), col.end(), rng);
  }

  const double X_hat = bio.X_hat();
  const double c = bio.c_conv();
  std::array<bool, 6> active;
  for (int k = 0; k < 6; ++k) active[k] = S_box[k] > 0.0;
  ReactionBounds b;
  for (int i = 0; i < samples; ++i) {
    const auto coord = [&](int d) { return (perm[d][i] + unif(rng)) / samples; };
    const double X = coord(0) * X_hat;
    Vec6 p;
    double psum = 0.0;
    for (int k = 0; k < 6; ++k) {
      p[k] = -std::log(std::max(coord(1 + k), 1e-300));
      psum += p[k];
    }
    p /= psum;
    Vec6 S;
    for (int k = 0; k < 6; ++k) S[k] = coord(7 + k) * S_box[k];
    const Vec6 C = p * (X / c);

    if (!std::isfinite(X)) throw config_error("derivative_bounds: non-finite sample");
    b.M_R = std::max(b.M_R, bio.total_reaction_gradient_bound(C, S, X));
    b.M_C = std::max(b.M_C, bio.particulate_decay_bound(C, S));
    b.M_S = std::max(b.M_S, bio.soluble_decay_bound(C, S, active));
  }
  if (!std::isfinite(b.M_R) || !std::isfinite(b.M_C) || !std::isfinite(b.M_S))
    throw config_error("derivative_bounds: sampled derivative is not finite");
  b.M_R *= inflation;
  b.M_C *= inflation;
  b.M_S *= inflation;
  return b;
}

}  // namespace sbr

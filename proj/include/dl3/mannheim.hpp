#pragma once

/**
 * @file mannheim.hpp
 * @brief Dual timelike Mannheim pairs {α̃, β̃}: the binormal line of α̃
 * coincides with the principal normal line of β̃.
 *
 * Notation: α̃ has frame {T, N, B} with curvature κ and torsion τ, β̃ has
 * frame {V₁, V₂, V₃} with curvature P and torsion Q, β̃ = α̃ + λB with a
 * constant dual λ, and Φ is the dual hyperbolic angle between T and V₁.
 *
 * The frame relations V₁ = coshΦ T + sinhΦ N, V₂ = B, V₃ = sinhΦ T + coshΦ N
 * pair frames of opposite handedness, while both curves here carry frames of
 * the same handedness (B = N∧T, V₃ = V₂∧V₁). The report therefore works with
 * adapted frames: B and τ are flipped where ⟨B, V₂⟩ < 0, and V₃ and Q where
 * V₃ points against sinhΦ T + coshΦ N. The applied signs are recorded per
 * sample.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dl3/curve.hpp"
#include "dl3/dual.hpp"
#include "dl3/dual_lorentz.hpp"
#include "dl3/error.hpp"
#include "dl3/frenet.hpp"
#include "dl3/natural.hpp"
#include "dl3/parallel.hpp"
#include "dl3/stencil.hpp"

namespace dl3 {

/// Corresponding parameters: sample i pairs α̃(t_alpha[i]) with β̃(t_beta[i]).
struct Correspondence {
  std::vector<double> t_alpha;
  std::vector<double> t_beta;

  static Correspondence shared(std::vector<double> t) { return {t, t}; }
  std::size_t size() const { return t_alpha.size(); }
};

// ---------------------------------------------------------------------------
// Construction

/// β̃ = α̃ + λB sampled at `ts`; the returned table shares the parameter grid.
inline CurveSpec offset_along_binormal(const CurveSpec& alpha, const DualScalar& lambda,
                                       const std::vector<double>& ts) {
  std::vector<DualVec3> points(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) {
    DualFrame f = frenet_from_jet(eval_jet(alpha, ts[i], 3));
    points[i] = f.position + f.B * lambda;
  });
  return CurveSpec{SampledTable(ts, std::move(points)), Range{ts.front(), ts.back()}, ts.size()};
}

/// Root of λ(P² − Q²) = P that stays bounded as λ → 0.
inline DualScalar mannheim_curvature(const DualScalar& q, const DualScalar& lambda) {
  return (1.0 - sqrt(1.0 + 4.0 * lambda * lambda * q * q)) / (2.0 * lambda);
}

inline constexpr const char* kMannheimBranch = "P = (1 - sqrt(1 + 4*lambda^2*Q^2)) / (2*lambda)";

struct PartnerPair {
  NaturalCurve beta;  ///< β̃ with its integrated frame, parameter s*
  CurveSpec alpha;    ///< α̃ = β̃ − λV₂ on the same grid
  DualScalar lambda;
  Range range;
  std::size_t steps = 0;
};

/// Builds β̃ from Q(s*) and P from the quadratic, then α̃ = β̃ − λV₂.
inline PartnerPair partner_from_invariants(const InvariantFn& Q, const DualScalar& lambda, Range range,
                                           std::size_t steps, const FrameAxes& frame0 = {}) {
  if (lambda.re == 0.0) {
    throw Error(Errc::Validation, "lambda must have a nonzero real part (λ is a nonzero constant)");
  }
  if (!(range.t0 < range.t1)) throw Error(Errc::Validation, "range must satisfy t0 < t1");
  if (steps < 7) throw Error(Errc::Validation, "at least 7 integration steps are required");

  std::vector<double> grid = uniform_grid(range, steps + 1);
  DualScalar q_first = Q(grid.front());
  bool constant = true;
  for (double s : grid) {
    DualScalar q = Q(s);
    double scale = std::max(1.0, std::abs(q.re));
    constant = constant && std::abs(q.re - q_first.re) <= 1e-12 * scale && std::abs(q.du - q_first.du) <= 1e-12 * scale;
  }
  if (constant) {
    throw Error(Errc::DegeneratePair,
                "Q is constant, so P is constant too and alpha'' = 0: alpha is a straight line with no Frenet "
                "frame and the pair cannot be verified");
  }

  InvariantFn P = [&Q, lambda](double s) {
    DualScalar p = mannheim_curvature(Q(s), lambda);
    if (!(p.re > 0.0)) {
      throw Error(Errc::BranchInfeasible, "the Mannheim branch gives P with real part " + expr::format_number(p.re) +
                                              " <= 0 at s* = " + expr::format_number(s) +
                                              " (a negative real part of lambda is required)");
    }
    return p;
  };
  for (double s : grid) P(s);

  PartnerPair out;
  out.beta = integrate_from_invariants(P, Q, frame0, range, steps);
  out.lambda = lambda;
  out.range = range;
  out.steps = steps;
  std::vector<DualVec3> points;
  points.reserve(out.beta.frames.size());
  for (const auto& f : out.beta.frames) points.push_back(f.position - f.V2 * lambda);
  out.alpha = CurveSpec{SampledTable(grid, std::move(points)), range, steps + 1};
  return out;
}

inline PartnerPair partner_from_invariants(const expr::Expr& Q, const DualScalar& lambda, Range range,
                                           std::size_t steps, const FrameAxes& frame0 = {}) {
  return partner_from_invariants(invariant_from_expr(Q), lambda, range, steps, frame0);
}

// ---------------------------------------------------------------------------
// Verification

struct PairFrames {
  std::vector<DualFrame> alpha;
  std::vector<DualFrame> beta;
};

inline PairFrames pair_frames(const CurveSpec& alpha, const CurveSpec& beta, const Correspondence& c) {
  if (c.t_alpha.size() != c.t_beta.size() || c.t_alpha.size() < 2) {
    throw Error(Errc::Input, "correspondence must pair at least two samples of each curve");
  }
  return {frenet_table(alpha, c.t_alpha), frenet_table(beta, c.t_beta)};
}

/// ‖β̃ − α̃‖; zero when the two points coincide exactly.
inline DualScalar pair_distance(const DualVec3& a, const DualVec3& b) {
  DualVec3 d = b - a;
  if (real_part(d) == RealVec3{} && dual_part(d) == RealVec3{}) return DualScalar(0.0);
  return dnorm(d);
}

struct PairCheck {
  bool is_pair = false;
  double tol = 0.0;
  std::vector<DualScalar> collinearity;  ///< sign-aligned ⟨B, V₂⟩, ideally 1 + ε0
  std::vector<DualScalar> distance;      ///< ‖β̃ − α̃‖ per sample
  double collinearity_error_re = 0.0;    ///< max | |⟨B,V₂⟩.re| − 1 |
  double collinearity_error_du = 0.0;    ///< max |dual part| after alignment
  double distance_spread_re = 0.0;
  double distance_spread_du = 0.0;
};

inline PairCheck verify_pair(const PairFrames& fr, double tol) {
  PairCheck out;
  out.tol = tol;
  const std::size_t n = fr.alpha.size();
  double dmin_re = std::numeric_limits<double>::infinity(), dmax_re = -dmin_re;
  double dmin_du = dmin_re, dmax_du = -dmin_re;
  for (std::size_t i = 0; i < n; ++i) {
    DualScalar c = dinner(fr.alpha[i].B, fr.beta[i].N);
    c = c * sign_of(c.re);
    out.collinearity.push_back(c);
    out.collinearity_error_re = std::max(out.collinearity_error_re, std::abs(c.re - 1.0));
    out.collinearity_error_du = std::max(out.collinearity_error_du, std::abs(c.du));
    DualScalar d = pair_distance(fr.alpha[i].position, fr.beta[i].position);
    out.distance.push_back(d);
    dmin_re = std::min(dmin_re, d.re);
    dmax_re = std::max(dmax_re, d.re);
    dmin_du = std::min(dmin_du, d.du);
    dmax_du = std::max(dmax_du, d.du);
  }
  out.distance_spread_re = dmax_re - dmin_re;
  out.distance_spread_du = dmax_du - dmin_du;
  out.is_pair = out.collinearity_error_re <= tol && out.collinearity_error_du <= tol &&
                out.distance_spread_re <= tol && out.distance_spread_du <= tol;
  return out;
}

inline PairCheck verify_pair(const CurveSpec& alpha, const CurveSpec& beta, const Correspondence& c, double tol) {
  return verify_pair(pair_frames(alpha, beta, c), tol);
}

/// Φ with coshΦ = −⟨T, V₁⟩ and the sign of θ taken from sinhΦ = ⟨N, V₁⟩.
inline DualScalar extract_phi(const DualFrame& a, const DualFrame& b) {
  DualScalar x = -dinner(a.T, b.T);
  DualScalar y = dinner(a.N, b.T);
  if (x.re <= -1.0 + 1e-9) {
    throw Error(Errc::InversionDomain, "extract_phi: T and V1 lie in opposite time cones");
  }
  if (x.re < 1.0 - 1e-9) {
    throw Error(Errc::InversionDomain, "extract_phi: |<T,V1>| is below 1, no hyperbolic angle");
  }
  if (x.re - 1.0 > 1e-6) return acosh(x) * sign_of(y.re);
  return asinh(y);
}

// ---------------------------------------------------------------------------
// Identity report

struct ValueRange {
  double min = 0.0;
  double max = 0.0;
  double spread() const { return max - min; }
};

struct IdentitySummary {
  std::string name;
  double max_residual_re = 0.0;
  double max_residual_du = 0.0;
  double mean_residual_re = 0.0;
  double mean_residual_du = 0.0;
  std::size_t undefined = 0;
};

struct MannheimSample {
  double t_alpha = 0.0;
  double t_beta = 0.0;
  DualScalar s, s_star, phi, kappa, tau, P, Q, ds_star_ds;
  double binormal_sign = 1.0;  ///< sign applied to B and τ
  double v3_sign = 1.0;        ///< sign applied to V₃ and Q
  std::vector<std::optional<DualScalar>> residuals;  ///< aligned with MannheimReport::identity_names
};

/// Osculating-circle data at one sample.
struct CenterRecord {
  DualVec3 M, M_star;
  DualScalar beta_M, alpha_M, beta_M_star, alpha_M_star;
  DualScalar ratio;
  std::optional<DualScalar> closed_form_product;  ///< (1 + κP)(1 + λP)
  std::optional<DualScalar> closed_form_root;     ///< (1 + λP)√(1 − λ²κ²)
};

struct Verdicts {
  bool is_pair = false;
  double collinearity_error_re = 0.0;
  double collinearity_error_du = 0.0;
  double distance_spread_re = 0.0;
  double distance_spread_du = 0.0;
  ValueRange schell_product_range;  ///< τQ, real parts
  std::optional<ValueRange> mannheim_ratio_range;
  bool torsion_sign_negative = false;  ///< τ.re·Q.re < 0 at every sample
  double torsion_sign_product_max = 0.0;
};

struct MannheimReport {
  DualScalar lambda;
  double tol = 0.0;
  std::vector<std::string> identity_names;
  std::vector<MannheimSample> samples;
  std::vector<IdentitySummary> identities;
  Verdicts verdicts;
  std::vector<CenterRecord> centers;

  std::size_t index_of(const std::string& name) const {
    auto it = std::find(identity_names.begin(), identity_names.end(), name);
    if (it == identity_names.end()) throw Error(Errc::Input, "no identity named '" + name + "'");
    return static_cast<std::size_t>(it - identity_names.begin());
  }
  const IdentitySummary& summary(const std::string& name) const { return identities[index_of(name)]; }
};

/// Identity names, in report order. Each residual is left side minus right side.
namespace identity {
inline constexpr const char* kTorsionRatio = "torsion_ratio";                  // τ = P/(λQ)
inline constexpr const char* kMannheimQuadratic = "mannheim_quadratic";        // λ(P² − Q²) = P
inline constexpr const char* kCurvatureDifference = "curvature_difference";    // Q² − P² = τ²(ds/ds*)²
inline constexpr const char* kPhiDerivative = "phi_derivative";                // κ = −dΦ/ds
inline constexpr const char* kTorsionFromPartner = "torsion_from_partner";     // τ = −(P sinhΦ + Q coshΦ) ds*/ds
inline constexpr const char* kPartnerCurvature = "partner_curvature";          // P = τ sinhΦ ds/ds*
inline constexpr const char* kPartnerTorsion = "partner_torsion";              // Q = −τ coshΦ ds/ds*
inline constexpr const char* kMuCoth = "mu_lambda_coth";                       // μQ + λP = 1, μ = λ cothΦ
inline constexpr const char* kMuTanh = "mu_lambda_tanh";                       // μQ + λP = 1, μ = λ tanhΦ
inline constexpr const char* kCoshNegOnePlus = "cosh_sq_minus_one_plus_lambda_p";  // cosh²Φ = −(1 + λP)
inline constexpr const char* kSinhPos = "sinh_sq_lambda2_tau_q";                   // sinh²Φ = λ²τQ
inline constexpr const char* kCoshOneMinus = "cosh_sq_one_minus_lambda_p";         // cosh²Φ = 1 − λP
inline constexpr const char* kSinhNeg = "sinh_sq_minus_lambda2_tau_q";             // sinh²Φ = −λ²τQ
inline constexpr const char* kSpeedRatio = "speed_ratio";                      // ds*/ds = 1/coshΦ
inline constexpr const char* kTanhTorsion = "tanh_phi_torsion";                // tanhΦ = −λτ
inline constexpr const char* kTanhInvariants = "tanh_phi_invariants";          // tanhΦ = λQ/(1 − λP)
inline constexpr const char* kFrameRelation = "frame_relation";                // V₁, V₂, V₃ in terms of T, N, B
inline constexpr const char* kDistance = "distance";                           // ‖β̃ − α̃‖ = |λ|
inline constexpr const char* kCollinearity = "collinearity";                   // ⟨B, V₂⟩ = 1
}  // namespace identity

inline std::vector<std::string> identity_names() {
  using namespace identity;
  return {kTorsionRatio, kMannheimQuadratic, kCurvatureDifference, kPhiDerivative, kTorsionFromPartner,
          kPartnerCurvature, kPartnerTorsion, kMuCoth, kMuTanh, kCoshNegOnePlus, kSinhPos, kCoshOneMinus,
          kSinhNeg, kSpeedRatio, kTanhTorsion, kTanhInvariants, kFrameRelation, kDistance, kCollinearity};
}

/// Residuals of the Mannheim-pair identities at one sample. `dphi_ds` is
/// empty where sinhΦ vanishes; the dependent identities are then undefined.
struct IdentityInputs {
  DualScalar phi, kappa, tau, P, Q, lambda, r;  ///< r = ds*/ds
  std::optional<DualScalar> dphi_ds;
  DualScalar frame_relation, distance, collinearity;
};

inline std::vector<std::optional<DualScalar>> identity_residuals(const IdentityInputs& in) {
  const auto& [phi, kappa, tau, P, Q, lambda, r, dphi_ds, frame_relation, distance, collinearity] = in;
  auto [sh, ch] = hyperbolic_pair(phi);
  bool sinh_zero = std::abs(sh.re) < 1e-12;
  DualScalar th = sh / ch;
  DualScalar lp = lambda * P;
  std::optional<DualScalar> phi_derivative;
  std::optional<DualScalar> mu_coth;
  if (dphi_ds) phi_derivative = kappa + *dphi_ds;
  if (!sinh_zero) mu_coth = (lambda * ch / sh) * Q + lp - 1.0;
  DualScalar inv_r = 1.0 / r;
  return {
      tau - P / (lambda * Q),
      lambda * (P * P - Q * Q) - P,
      Q * Q - P * P - tau * tau * inv_r * inv_r,
      phi_derivative,
      tau + (P * sh + Q * ch) * r,
      P - tau * sh * inv_r,
      Q + tau * ch * inv_r,
      mu_coth,
      (lambda * th) * Q + lp - 1.0,
      ch * ch + (1.0 + lp),
      sh * sh - lambda * lambda * tau * Q,
      ch * ch - (1.0 - lp),
      sh * sh + lambda * lambda * tau * Q,
      1.0 / ch - r,
      th + lambda * tau,
      th - lambda * Q / (1.0 - lp),
      frame_relation,
      distance - dual_abs(lambda),
      collinearity - 1.0,
  };
}

namespace detail {

inline DualScalar max_abs_components(std::initializer_list<DualVec3> vs) {
  double re = 0.0, du = 0.0;
  for (const DualVec3& v : vs) {
    for (const DualScalar& x : {v.x1, v.x2, v.x3}) {
      re = std::max(re, std::abs(x.re));
      du = std::max(du, std::abs(x.du));
    }
  }
  return DualScalar(re, du);
}

inline std::vector<double> require_uniform(const std::vector<double>& t) {
  double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  double tol = 1e-9 * std::max(1.0, std::abs(t.back() - t.front()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(h > 0.0) || std::abs(t[i] - (t.front() + h * static_cast<double>(i))) > tol) {
      throw Error(Errc::Input, "correspondence parameters must form a uniform increasing grid");
    }
  }
  return t;
}

}  // namespace detail

/// Osculating circles of both curves and the ratio of their distance ratios.
inline CenterRecord curvature_center(const DualFrame& a, const DualFrame& b, const DualScalar& lambda) {
  if (!(a.kappa.re > kDegenerateCurvature)) {
    throw Error(Errc::DegenerateFrame, "curvature center: kappa vanishes, the osculating circle is degenerate");
  }
  if (!(b.kappa.re > kDegenerateCurvature)) {
    throw Error(Errc::DegenerateFrame, "curvature center: P vanishes, the osculating circle is degenerate");
  }
  CenterRecord c;
  c.M = a.position + a.N / a.kappa;
  c.M_star = b.position + b.N / b.kappa;
  c.beta_M = dnorm(c.M - b.position);
  c.alpha_M = dnorm(c.M - a.position);
  c.beta_M_star = dnorm(c.M_star - b.position);
  c.alpha_M_star = dnorm(c.M_star - a.position);
  c.ratio = (c.beta_M / c.alpha_M) / (c.beta_M_star / c.alpha_M_star);
  DualScalar lp = lambda * b.kappa;
  c.closed_form_product = (1.0 + a.kappa * b.kappa) * (1.0 + lp);
  DualScalar rad = 1.0 - lambda * lambda * a.kappa * a.kappa;
  if (rad.re > 0.0) c.closed_form_root = (1.0 + lp) * sqrt(rad);
  return c;
}

inline std::vector<CenterRecord> curvature_center_ratio(const PairFrames& fr, const DualScalar& lambda) {
  std::vector<CenterRecord> out(fr.alpha.size());
  parallel_for(out.size(), [&](std::size_t i) { out[i] = curvature_center(fr.alpha[i], fr.beta[i], lambda); });
  return out;
}

inline std::vector<CenterRecord> curvature_center_ratio(const CurveSpec& alpha, const CurveSpec& beta,
                                                        const DualScalar& lambda, const Correspondence& c) {
  return curvature_center_ratio(pair_frames(alpha, beta, c), lambda);
}

inline void summarize(MannheimReport& rep) {
  rep.identities.clear();
  for (std::size_t k = 0; k < rep.identity_names.size(); ++k) {
    IdentitySummary s;
    s.name = rep.identity_names[k];
    std::size_t defined = 0;
    for (const auto& sample : rep.samples) {
      const auto& r = sample.residuals[k];
      if (!r) {
        ++s.undefined;
        continue;
      }
      ++defined;
      s.max_residual_re = std::max(s.max_residual_re, std::abs(r->re));
      s.max_residual_du = std::max(s.max_residual_du, std::abs(r->du));
      s.mean_residual_re += std::abs(r->re);
      s.mean_residual_du += std::abs(r->du);
    }
    if (defined > 0) {
      s.mean_residual_re /= static_cast<double>(defined);
      s.mean_residual_du /= static_cast<double>(defined);
    }
    rep.identities.push_back(s);
  }
}

/// Per-sample residuals of every pair identity, with aggregates and verdicts.
/// With `with_centers`, also the osculating-circle ratios.
inline MannheimReport theorem_report(const PairFrames& fr, const Correspondence& corr, const DualScalar& lambda,
                                     double tol, bool with_centers = true) {
  const std::size_t n = fr.alpha.size();
  PairCheck check = verify_pair(fr, tol);

  MannheimReport rep;
  rep.lambda = lambda;
  rep.tol = tol;
  rep.identity_names = identity_names();
  rep.samples.resize(n);

  std::vector<DualScalar> phis(n);
  parallel_for(n, [&](std::size_t i) { phis[i] = extract_phi(fr.alpha[i], fr.beta[i]); });
  std::vector<double> ta = detail::require_uniform(corr.t_alpha);
  double h = (ta.back() - ta.front()) / static_cast<double>(n - 1);
  UniformSamples<DualScalar> phi_samples(ta.front(), h, phis, default_stencil_spacing(ta.back() - ta.front()));

  parallel_for(n, [&](std::size_t i) {
    const DualFrame& a = fr.alpha[i];
    const DualFrame& b = fr.beta[i];
    MannheimSample& smp = rep.samples[i];
    DualScalar phi = phis[i];
    auto [sh, ch] = hyperbolic_pair(phi);

    smp.binormal_sign = sign_of(dinner(a.B, b.N).re);
    DualVec3 b_ad = a.B * smp.binormal_sign;
    DualVec3 v3_expected = a.T * sh + a.N * ch;
    smp.v3_sign = sign_of(dinner(b.B, v3_expected).re);
    DualVec3 v3_ad = b.B * smp.v3_sign;

    smp.t_alpha = corr.t_alpha[i];
    smp.t_beta = corr.t_beta[i];
    smp.s = a.s;
    smp.s_star = b.s;
    smp.phi = phi;
    smp.kappa = a.kappa;
    smp.tau = a.tau * smp.binormal_sign;
    smp.P = b.kappa;
    smp.Q = b.tau * smp.v3_sign;
    smp.ds_star_ds = b.speed_ratio / a.speed_ratio;

    IdentityInputs in{phi, smp.kappa, smp.tau, smp.P, smp.Q, lambda, smp.ds_star_ds, std::nullopt,
                      DualScalar(0.0), check.distance[i], check.collinearity[i]};
    if (std::abs(sh.re) >= 1e-12) in.dphi_ds = phi_samples.jet(corr.t_alpha[i], 1)[1] / a.speed_ratio;
    in.frame_relation = detail::max_abs_components(
        {b.T - (a.T * ch + a.N * sh), b.N - b_ad, v3_ad - v3_expected});
    smp.residuals = identity_residuals(in);
  });
  summarize(rep);

  Verdicts& v = rep.verdicts;
  v.is_pair = check.is_pair;
  v.collinearity_error_re = check.collinearity_error_re;
  v.collinearity_error_du = check.collinearity_error_du;
  v.distance_spread_re = check.distance_spread_re;
  v.distance_spread_du = check.distance_spread_du;
  v.schell_product_range = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  v.torsion_sign_product_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : rep.samples) {
    double tq = (s.tau * s.Q).re;
    v.schell_product_range.min = std::min(v.schell_product_range.min, tq);
    v.schell_product_range.max = std::max(v.schell_product_range.max, tq);
    v.torsion_sign_product_max = std::max(v.torsion_sign_product_max, s.tau.re * s.Q.re);
  }
  v.torsion_sign_negative = v.torsion_sign_product_max < 0.0;

  if (with_centers) {
    rep.centers = curvature_center_ratio(fr, lambda);
    ValueRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& c : rep.centers) {
      r.min = std::min(r.min, c.ratio.re);
      r.max = std::max(r.max, c.ratio.re);
    }
    v.mannheim_ratio_range = r;
  }
  return rep;
}

inline MannheimReport theorem_report(const CurveSpec& alpha, const CurveSpec& beta, const DualScalar& lambda,
                                     const Correspondence& corr, double tol = 1e-6, bool with_centers = true) {
  return theorem_report(pair_frames(alpha, beta, corr), corr, lambda, tol, with_centers);
}

// ---------------------------------------------------------------------------
// Real/dual splits

/// Real and dual components of a residual, computed from component formulas.
struct ComponentPair {
  double re = 0.0;
  double du = 0.0;
};

/// τ = P/(cQ) for a real c: k₂ = p/(cq), k₂* = (p*q − pq*)/(cq²).
inline ComponentPair split_torsion_ratio(const DualScalar& tau, const DualScalar& P, const DualScalar& Q, double c) {
  double p = P.re, ps = P.du, q = Q.re, qs = Q.du;
  return {tau.re - p / (c * q), tau.du - (ps * q - p * qs) / (c * q * q)};
}

/// P = c(P² − Q²) for a real c: p = c(p² − q²), p* = 2c(pp* − qq*).
inline ComponentPair split_mannheim_quadratic(const DualScalar& P, const DualScalar& Q, double c) {
  double p = P.re, ps = P.du, q = Q.re, qs = Q.du;
  return {c * (p * p - q * q) - p, 2.0 * c * (p * ps - q * qs) - ps};
}

/// Components of the three partner relations between (τ, Φ) and (P, Q)
/// with r = ds*/ds = r₀ + εr*. The dual parts include the r* terms, which
/// vanish when the speed ratio is real.
struct PartnerSplit {
  ComponentPair torsion_from_partner;
  ComponentPair partner_curvature;
  ComponentPair partner_torsion;
};

inline PartnerSplit split_partner_relations(const DualScalar& tau, const DualScalar& P, const DualScalar& Q,
                                            const DualScalar& phi, const DualScalar& r) {
  double k = tau.re, ks = tau.du, p = P.re, ps = P.du, q = Q.re, qs = Q.du;
  double th = phi.re, ths = phi.du, r0 = r.re, rs = r.du;
  double sh = std::sinh(th), ch = std::cosh(th);
  PartnerSplit out;
  // τ = −(P sinhΦ + Q coshΦ) r
  double g = p * sh + q * ch;
  double gs = ps * sh + p * ths * ch + qs * ch + q * ths * sh;
  out.torsion_from_partner = {k + g * r0, ks + (gs * r0 + g * rs)};
  // P = τ sinhΦ / r
  out.partner_curvature = {p - k * sh / r0, ps - ((ks * sh + k * ths * ch) / r0 - k * sh * rs / (r0 * r0))};
  // Q = −τ coshΦ / r
  out.partner_torsion = {q + k * ch / r0, qs + ((ks * ch + k * ths * sh) / r0 - k * ch * rs / (r0 * r0))};
  return out;
}

struct SplitSample {
  std::optional<ComponentPair> torsion_ratio;
  std::optional<ComponentPair> mannheim_quadratic;
  PartnerSplit partner;
};

struct SplitReport {
  bool real_lambda = false;  ///< the first two splits need a real λ
  std::vector<SplitSample> samples;
  /// Largest |split component − dual residual component| per split.
  double torsion_ratio_deviation = 0.0;
  double mannheim_quadratic_deviation = 0.0;
  double partner_deviation = 0.0;
};

/// Splits every sample of a report and compares against its dual residuals.
/// The first two splits assume a real λ; for a dual λ they are omitted
/// (`split_torsion_ratio` itself rejects that case with a precondition error).
inline SplitReport split_components(const MannheimReport& rep) {
  SplitReport out;
  out.real_lambda = rep.lambda.du == 0.0;
  double c = rep.lambda.re;
  std::size_t i_ratio = rep.index_of(identity::kTorsionRatio);
  std::size_t i_quad = rep.index_of(identity::kMannheimQuadratic);
  std::size_t i_ii = rep.index_of(identity::kTorsionFromPartner);
  std::size_t i_iii = rep.index_of(identity::kPartnerCurvature);
  std::size_t i_iv = rep.index_of(identity::kPartnerTorsion);
  auto deviation = [](const ComponentPair& a, const std::optional<DualScalar>& b) {
    return b ? std::max(std::abs(a.re - b->re), std::abs(a.du - b->du)) : 0.0;
  };
  for (const auto& s : rep.samples) {
    SplitSample x;
    if (out.real_lambda) {
      x.torsion_ratio = split_torsion_ratio(s.tau, s.P, s.Q, c);
      x.mannheim_quadratic = split_mannheim_quadratic(s.P, s.Q, c);
      out.torsion_ratio_deviation = std::max(out.torsion_ratio_deviation, deviation(*x.torsion_ratio, s.residuals[i_ratio]));
      out.mannheim_quadratic_deviation =
          std::max(out.mannheim_quadratic_deviation, deviation(*x.mannheim_quadratic, s.residuals[i_quad]));
    }
    x.partner = split_partner_relations(s.tau, s.P, s.Q, s.phi, s.ds_star_ds);
    out.partner_deviation = std::max({out.partner_deviation, deviation(x.partner.torsion_from_partner, s.residuals[i_ii]),
                                      deviation(x.partner.partner_curvature, s.residuals[i_iii]),
                                      deviation(x.partner.partner_torsion, s.residuals[i_iv])});
    out.samples.push_back(x);
  }
  return out;
}

/// Component split of τ − P/(λQ) and λ(P² − Q²) − P for one sample; a dual
/// λ is rejected because the component formulas assume λ real.
inline std::pair<ComponentPair, ComponentPair> split_real_lambda(const DualScalar& tau, const DualScalar& P,
                                                                 const DualScalar& Q, const DualScalar& lambda) {
  if (lambda.du != 0.0) {
    throw Error(Errc::Precondition, "component split requires a real lambda; use the dual residuals instead");
  }
  return {split_torsion_ratio(tau, P, Q, lambda.re), split_mannheim_quadratic(P, Q, lambda.re)};
}

}  // namespace dl3

#pragma once

/**
 * @file frenet.hpp
 * @brief Frenet frames of dual timelike curves.
 *
 * Frame equations, with ′ = d/ds̃ along the dual arc length:
 *
 *     T′ = κN,   N′ = κT + τB,   B′ = −τN,
 *     ⟨T,T⟩ = −1,  ⟨N,N⟩ = ⟨B,B⟩ = 1.
 *
 * Orientation: κ ≥ 0 fixes N, and B = N∧T. With that choice the torsion is
 * τ = −det(α̃′,α̃″,α̃‴)/‖α̃′∧α̃″‖², which is +b/c² on the hyperbolic helix.
 */

#include <cmath>
#include <vector>

#include "dl3/curve.hpp"
#include "dl3/dual_lorentz.hpp"
#include "dl3/error.hpp"
#include "dl3/parallel.hpp"

namespace dl3 {

inline constexpr double kDegenerateCurvature = 1e-10;

struct DualFrame {
  DualScalar s;  ///< dual arc length s + εs* from the start of the range
  DualVec3 position;
  DualVec3 T;
  DualVec3 N;
  DualVec3 B;
  DualScalar kappa;
  DualScalar tau;
  DualScalar speed_ratio;  ///< ds̃/dt for the curve's own parameter t
};

namespace detail {

inline DualScalar checked_timelike_speed(const DualVec3& d1) {
  if (dclassify(d1) != CausalClass::Timelike || real_part(d1) == RealVec3{}) {
    throw Error(Errc::Causal, "frenet: tangent is not timelike");
  }
  return dnorm(d1);
}

inline void check_curvature(const DualVec3& c, const DualScalar& sigma) {
  RealVec3 re = real_part(c);
  double k = std::sqrt(std::max(0.0, inner(re, re))) / (sigma.re * sigma.re * sigma.re);
  if (!(k > kDegenerateCurvature)) {
    throw Error(Errc::DegenerateFrame, "frenet: curvature vanishes, N, B and torsion are undefined");
  }
}

}  // namespace detail

/// Frame, κ = ‖α̃′∧α̃″‖/‖α̃′‖³ and τ from a jet in an arbitrary parameter.
inline DualFrame frenet_from_jet(const Jet& j, const DualScalar& s = DualScalar(0.0)) {
  DualScalar sigma = detail::checked_timelike_speed(j[1]);
  DualVec3 c = dcross(j[1], j[2]);
  detail::check_curvature(c, sigma);
  DualScalar cc = dinner(c, c);
  DualScalar cn = dnorm(c);
  DualFrame f;
  f.s = s;
  f.position = j[0];
  f.T = j[1] / sigma;
  f.B = -(c / cn);
  f.N = dcross(f.T, f.B);
  f.kappa = cn / (sigma * sigma * sigma);
  f.tau = -dinner(c, j[3]) / cc;
  f.speed_ratio = sigma;
  return f;
}

/// Frenet frame at parameter t, any regular parameterization.
inline DualFrame frenet_general(const CurveSpec& spec, double t) {
  return frenet_from_jet(eval_jet(spec, t, 3), arc_length(spec, t));
}

/// Frame through κ = ‖T′‖ and τ = ⟨N′, B⟩ on a curve already parameterized
/// by real arc length (the dual speed may still carry a dual part, which the
/// chain rule below accounts for).
inline DualFrame frenet_unit_speed_from_jet(const Jet& j, const DualScalar& s = DualScalar(0.0)) {
  DualScalar sigma = detail::checked_timelike_speed(j[1]);
  if (!(std::abs(sigma.re - 1.0) < 1e-8)) {
    throw Error(Errc::Precondition, "frenet_unit_speed: curve is not unit speed; reparameterize it first");
  }
  const DualVec3& d1 = j[1];
  const DualVec3& d2 = j[2];
  const DualVec3& d3 = j[3];
  // σ² = −⟨α̃′,α̃′⟩ differentiated once and twice.
  DualScalar sigma_t = -dinner(d1, d2) / sigma;
  DualScalar sigma_tt = (-dinner(d2, d2) - dinner(d1, d3) - sigma_t * sigma_t) / sigma;
  DualScalar s3 = sigma * sigma * sigma;

  DualVec3 u = (d2 * sigma - d1 * sigma_t) / s3;  // T′
  detail::check_curvature(dcross(d1, d2), sigma);
  DualFrame f;
  f.s = s;
  f.position = j[0];
  f.T = d1 / sigma;
  f.kappa = dnorm(u);
  f.N = u / f.kappa;
  f.B = dcross(f.N, f.T);
  DualVec3 u_t = (d3 * sigma - d1 * sigma_tt) / s3 - u * (3.0 * sigma_t / sigma);
  // N′ = u′/κ − uκ′/κ², and ⟨u, B⟩ = 0.
  f.tau = dinner(u_t / sigma, f.B) / f.kappa;
  f.speed_ratio = sigma;
  return f;
}

inline DualFrame frenet_unit_speed(const CurveSpec& spec, double s) {
  return frenet_unit_speed_from_jet(eval_jet(spec, s, 3), arc_length(spec, s));
}

/// Frames at the given increasing parameters, with cumulative arc length.
inline std::vector<DualFrame> frenet_table(const CurveSpec& spec, const std::vector<double>& ts) {
  std::vector<DualScalar> arc = arc_length_grid(spec, ts);
  if (!ts.empty() && ts.front() != spec.range.t0) {
    DualScalar offset = arc_length(spec, ts.front());
    for (auto& a : arc) a += offset;
  }
  std::vector<DualFrame> frames(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) { frames[i] = frenet_from_jet(eval_jet(spec, ts[i], 3), arc[i]); });
  return frames;
}

/// Largest deviation of {T, N, B} from the frame metric table, over both
/// components of all six inner products.
inline double frame_metric_error(const DualVec3& t, const DualVec3& n, const DualVec3& b) {
  const DualScalar ips[6] = {dinner(t, t) + 1.0, dinner(n, n) - 1.0, dinner(b, b) - 1.0,
                             dinner(t, n),       dinner(t, b),       dinner(n, b)};
  double worst = 0.0;
  for (const auto& x : ips) worst = std::max({worst, std::abs(x.re), std::abs(x.du)});
  return worst;
}

}  // namespace dl3

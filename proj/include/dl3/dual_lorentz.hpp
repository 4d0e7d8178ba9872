#pragma once

/**
 * @file dual_lorentz.hpp
 * @brief The dual Lorentzian space D³₁: dual vectors A = a + εa*, the dual
 * inner and cross products, the dual norm, causal classification, and the
 * dual angles between unit dual vectors.
 */

#include <cmath>
#include <string>
#include <string_view>

#include "dl3/dual.hpp"
#include "dl3/error.hpp"
#include "dl3/lorentz.hpp"

namespace dl3 {

using DualVec3 = Vec3<DualScalar>;

inline DualVec3 make_dual(const RealVec3& re, const RealVec3& du = {}) {
  return {DualScalar(re.x1, du.x1), DualScalar(re.x2, du.x2), DualScalar(re.x3, du.x3)};
}

inline RealVec3 real_part(const DualVec3& a) { return {a.x1.re, a.x2.re, a.x3.re}; }
inline RealVec3 dual_part(const DualVec3& a) { return {a.x1.du, a.x2.du, a.x3.du}; }

/// ⟨A,B⟩ = ⟨a,b⟩ + ε(⟨a,b*⟩ + ⟨a*,b⟩)
inline DualScalar dinner(const DualVec3& a, const DualVec3& b) { return inner(a, b); }

/// A∧B = a∧b + ε(a∧b* + a*∧b)
inline DualVec3 dcross(const DualVec3& a, const DualVec3& b) { return cross(a, b); }

/// Causal character of the real part of ⟨A,A⟩, with the same relative
/// threshold as the real classification.
inline CausalClass dclassify(const DualVec3& a) { return causal_class3(real_part(a)); }

/// ‖A‖ = √|⟨A,A⟩| in dual arithmetic. For spacelike A this is
/// ‖a‖ + ε⟨a,a*⟩/‖a‖; for timelike A the dual part changes sign.
inline DualScalar dnorm(const DualVec3& a) {
  RealVec3 re = real_part(a);
  if (re == RealVec3{}) {
    throw Error(Errc::NormUndefined, "dnorm: real part of the vector is zero");
  }
  if (causal_class3(re) == CausalClass::Lightlike) {
    throw Error(Errc::LightlikeNorm, "dnorm: vector is lightlike");
  }
  return sqrt(dual_abs(dinner(a, a)));
}

inline DualVec3 dnormalize(const DualVec3& a) {
  RealVec3 re = real_part(a);
  if (re != RealVec3{} && causal_class3(re) == CausalClass::Lightlike) {
    throw Error(Errc::LightlikeNormalize, "dnormalize: vector is lightlike");
  }
  DualScalar inv = 1.0 / dnorm(a);
  return a * inv;
}

/// Membership in the dual unit sphere: ‖A‖ = 1 + ε0 within `tol`.
inline bool is_unit(const DualVec3& a, double tol = 1e-9) {
  try {
    return approx_equal(dnorm(a), DualScalar(1.0), tol);
  } catch (const Error&) {
    return false;
  }
}

enum class AngleKind { Hyperbolic, Central, Spacelike, LorentzianTimelike };

constexpr std::string_view to_string(AngleKind k) noexcept {
  switch (k) {
    case AngleKind::Hyperbolic: return "hyperbolic";
    case AngleKind::Central: return "central";
    case AngleKind::Spacelike: return "spacelike";
    case AngleKind::LorentzianTimelike: return "lorentzian_timelike";
  }
  return "?";
}

struct DualAngle {
  DualScalar value;
  AngleKind kind;
};

namespace detail {

// acosh on [1, inf) that tolerates the endpoint when the dual part vanishes
// there (equal vectors); elsewhere at the endpoint θ* is not recoverable.
inline DualScalar inverse_cosh(const DualScalar& x, double tol = 1e-12) {
  if (x.re < 1.0 - tol) {
    throw Error(Errc::InversionDomain, "dangle: |<A,B>| is below 1, no hyperbolic angle");
  }
  if (x.re <= 1.0) {
    if (std::abs(x.du) > tol) {
      throw Error(Errc::InversionDomain, "dangle: angle is zero but the dual part is not recoverable");
    }
    return DualScalar(0.0, 0.0);
  }
  return acosh(x);
}

}  // namespace detail

/// Dual angle between two non-lightlike unit dual vectors. The kind follows
/// the causal characters of the pair; for two spacelike vectors the causal
/// class of the normal a∧b decides whether they span a timelike plane
/// (Central, ⟨A,B⟩ = cosh Φ) or a spacelike plane (Spacelike, ⟨A,B⟩ = cos Φ).
inline DualAngle dangle(const DualVec3& a, const DualVec3& b) {
  CausalClass ca = dclassify(a);
  CausalClass cb = dclassify(b);
  if (ca == CausalClass::Lightlike || cb == CausalClass::Lightlike) {
    throw Error(Errc::Causal, "dangle: lightlike input");
  }
  DualScalar ip = dinner(a, b);
  if (ca == CausalClass::Timelike && cb == CausalClass::Timelike) {
    // Opposite time cones give ⟨A,B⟩ ≥ 1, which no cosh can match with the minus sign.
    return {detail::inverse_cosh(-ip), AngleKind::Hyperbolic};
  }
  if (ca != cb) {
    return {asinh(ip), AngleKind::LorentzianTimelike};
  }
  CausalClass normal = causal_class3(cross3(real_part(a), real_part(b)));
  switch (normal) {
    case CausalClass::Spacelike:
      return {detail::inverse_cosh(ip), AngleKind::Central};
    case CausalClass::Timelike: {
      if (!(std::abs(ip.re) <= 1.0)) {
        throw Error(Errc::InversionDomain, "dangle: |<A,B>| exceeds 1 for a spacelike plane");
      }
      if (std::abs(ip.re) == 1.0) {
        if (ip.du != 0.0) throw Error(Errc::InversionDomain, "dangle: dual part not recoverable at 0 or pi");
        return {DualScalar(ip.re > 0 ? 0.0 : M_PI, 0.0), AngleKind::Spacelike};
      }
      return {acos(ip), AngleKind::Spacelike};
    }
    case CausalClass::Lightlike:
      break;
  }
  throw Error(Errc::Causal, "dangle: the two spacelike vectors span a degenerate plane");
}

}  // namespace dl3

#pragma once

/**
 * @file natural.hpp
 * @brief Curves from prescribed curvature P(s) and torsion Q(s).
 *
 * Integrates V₁′ = PV₂, V₂′ = PV₁ + QV₃, V₃′ = −QV₂ together with β̃′ = V₁
 * by classical fourth-order Runge-Kutta, re-projecting the frame onto the
 * metric table after every step.
 */

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dl3/curve.hpp"
#include "dl3/dual_lorentz.hpp"
#include "dl3/error.hpp"
#include "dl3/expr.hpp"
#include "dl3/frenet.hpp"

namespace dl3 {

/// Invariant as a function of the real arc length.
using InvariantFn = std::function<DualScalar(double)>;

inline InvariantFn invariant_from_expr(expr::Expr e) {
  return [e = std::move(e)](double s) { return e.eval(DualScalar(s)); };
}

inline constexpr double kFrameTolerance = 1e-10;
inline constexpr double kMaxStepDrift = 1e-3;

struct FrameSample {
  double s = 0.0;
  DualVec3 position;
  DualVec3 V1, V2, V3;
  DualScalar P, Q;
  double drift_before = 0.0;  ///< metric error after the RK4 step
  double drift_after = 0.0;   ///< metric error after re-projection
};

struct NaturalCurve {
  CurveSpec curve;  ///< sampled table of positions over [s0, s1]
  std::vector<FrameSample> frames;
};

/// Lorentzian Gram-Schmidt: V₁ timelike first, then V₂, then V₃.
inline void reproject(DualVec3& v1, DualVec3& v2, DualVec3& v3) {
  v1 = dnormalize(v1);
  v2 = dnormalize(v2 + v1 * dinner(v2, v1));
  v3 = dnormalize(v3 + v1 * dinner(v3, v1) - v2 * dinner(v3, v2));
}

/// Checks the frame metric table and the orientation V₃ = V₂∧V₁.
inline void check_initial_frame(const FrameAxes& f) {
  if (frame_metric_error(f.V1, f.V2, f.V3) > kFrameTolerance) {
    throw Error(Errc::Precondition, "initial frame does not satisfy the metric table");
  }
  DualVec3 d = dcross(f.V2, f.V1) - f.V3;
  for (const DualScalar& x : {d.x1, d.x2, d.x3}) {
    if (std::abs(x.re) > kFrameTolerance || std::abs(x.du) > kFrameTolerance) {
      throw Error(Errc::Precondition, "initial frame must be oriented with V3 = V2 ^ V1");
    }
  }
}

inline NaturalCurve integrate_from_invariants(const InvariantFn& P, const InvariantFn& Q, const FrameAxes& frame0,
                                              Range range, std::size_t steps) {
  if (!(range.t0 < range.t1)) throw Error(Errc::Validation, "range must satisfy t0 < t1");
  if (steps < 7) throw Error(Errc::Validation, "at least 7 integration steps are required");
  check_initial_frame(frame0);

  auto invariants_at = [&](double s) {
    DualScalar p = P(s);
    DualScalar q = Q(s);
    if (p.re < 0.0) {
      throw Error(Errc::Precondition, "curvature P has a negative real part at s = " + expr::format_number(s));
    }
    if (!all_finite(p) || !all_finite(q)) throw Error(Errc::ArithmeticOverflow, "non-finite invariant");
    return std::pair{p, q};
  };

  struct State {
    DualVec3 x, v1, v2, v3;
  };
  auto rhs = [](const State& y, const DualScalar& p, const DualScalar& q) {
    return State{y.v1, y.v2 * p, y.v1 * p + y.v3 * q, -(y.v2 * q)};
  };
  auto axpy = [](const State& y, double h, const State& k) {
    return State{y.x + k.x * h, y.v1 + k.v1 * h, y.v2 + k.v2 * h, y.v3 + k.v3 * h};
  };

  const double h = range.span() / static_cast<double>(steps);
  std::vector<double> s_grid = uniform_grid(range, steps + 1);
  NaturalCurve out;
  out.frames.reserve(steps + 1);

  State y{frame0.origin, frame0.V1, frame0.V2, frame0.V3};
  auto [p0, q0] = invariants_at(range.t0);
  out.frames.push_back({range.t0, y.x, y.v1, y.v2, y.v3, p0, q0, 0.0, frame_metric_error(y.v1, y.v2, y.v3)});

  for (std::size_t i = 0; i < steps; ++i) {
    double s = s_grid[i];
    auto [pa, qa] = invariants_at(s);
    auto [pm, qm] = invariants_at(s + 0.5 * h);
    auto [pb, qb] = invariants_at(s_grid[i + 1]);
    State k1 = rhs(y, pa, qa);
    State k2 = rhs(axpy(y, 0.5 * h, k1), pm, qm);
    State k3 = rhs(axpy(y, 0.5 * h, k2), pm, qm);
    State k4 = rhs(axpy(y, h, k3), pb, qb);
    State next{y.x + (k1.x + k2.x * 2.0 + k3.x * 2.0 + k4.x) * (h / 6.0),
               y.v1 + (k1.v1 + k2.v1 * 2.0 + k3.v1 * 2.0 + k4.v1) * (h / 6.0),
               y.v2 + (k1.v2 + k2.v2 * 2.0 + k3.v2 * 2.0 + k4.v2) * (h / 6.0),
               y.v3 + (k1.v3 + k2.v3 * 2.0 + k3.v3 * 2.0 + k4.v3) * (h / 6.0)};
    double before = frame_metric_error(next.v1, next.v2, next.v3);
    if (!(before <= kMaxStepDrift)) {
      throw Error(Errc::StepSize, "frame drift " + expr::format_number(before) + " at s = " +
                                      expr::format_number(s) + " exceeds 1e-3; use more steps");
    }
    reproject(next.v1, next.v2, next.v3);
    y = next;
    out.frames.push_back(
        {s_grid[i + 1], y.x, y.v1, y.v2, y.v3, pb, qb, before, frame_metric_error(y.v1, y.v2, y.v3)});
  }

  std::vector<DualVec3> points;
  points.reserve(out.frames.size());
  for (const auto& f : out.frames) points.push_back(f.position);
  out.curve = CurveSpec{SampledTable(s_grid, std::move(points)), range, steps + 1};
  return out;
}

inline NaturalCurve integrate_from_invariants(const expr::Expr& P, const expr::Expr& Q, const FrameAxes& frame0,
                                              Range range, std::size_t steps) {
  return integrate_from_invariants(invariant_from_expr(P), invariant_from_expr(Q), frame0, range, steps);
}

}  // namespace dl3

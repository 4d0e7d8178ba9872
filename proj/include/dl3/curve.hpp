#pragma once

/**
 * @file curve.hpp
 * @brief Dual space curves α̃(t) = α(t) + εα*(t): sources, jets, dual arc
 * length and arc-length reparameterization.
 *
 * Derivatives per source kind:
 *  - built-in families: closed forms;
 *  - expressions: exact, by evaluating over nested dual numbers;
 *  - sampled tables: 9-node finite-difference stencils on the uniform grid.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dl3/dual.hpp"
#include "dl3/dual_lorentz.hpp"
#include "dl3/error.hpp"
#include "dl3/expr.hpp"
#include "dl3/parallel.hpp"
#include "dl3/stencil.hpp"

namespace dl3 {

/// Position and its first three parameter derivatives.
using Jet = std::array<DualVec3, kMaxJetOrder + 1>;

struct Range {
  double t0 = 0.0;
  double t1 = 1.0;

  double span() const { return t1 - t0; }
  friend bool operator==(const Range&, const Range&) = default;
};

/// Named closed-form family. Registry:
///  - "timelike_hyperbolic_helix": a, b (a² > b²), optional a_du, b_du, speed;
///    γ(u) = (A sinh(u/C), A cosh(u/C), Bu/C), A = a+εa_du, B = b+εb_du,
///    C = √(A²−B²), u = speed·t.
///  - "timelike_line": v2, v3 (v2² + v3² < 1), optional v2_du, v3_du, speed;
///    γ(u) = u·(1, V2, V3).
struct BuiltinFamily {
  std::string name;
  std::map<std::string, double> params;
};

/// Component expressions in the variable s: x1, x2, x3 (real parts) and
/// x1d, x2d, x3d (dual parts).
struct Expressions {
  std::array<expr::Expr, 6> components;
};

/// Initial point and frame of a curve defined by its invariants.
struct FrameAxes {
  DualVec3 origin{};
  DualVec3 V1{DualScalar(1.0), DualScalar(0.0), DualScalar(0.0)};
  DualVec3 V2{DualScalar(0.0), DualScalar(1.0), DualScalar(0.0)};
  DualVec3 V3{DualScalar(0.0), DualScalar(0.0), DualScalar(-1.0)};
};

/// Curvature P(s) and torsion Q(s) of a curve still to be integrated.
struct Invariants {
  expr::Expr P;
  expr::Expr Q;
  FrameAxes frame0{};
};

/// Default node spacing for table stencils.
inline double default_stencil_spacing(double span) { return 0.02 * std::max(1.0, std::abs(span)); }

/// Dual positions on a uniform parameter grid.
class SampledTable {
 public:
  SampledTable() = default;

  SampledTable(std::vector<double> t, std::vector<DualVec3> points, double spacing = 0.0)
      : t_(std::move(t)) {
    if (t_.size() != points.size()) {
      throw Error(Errc::Input, "table: parameter and point counts differ");
    }
    if (t_.size() < 8) throw Error(Errc::Input, "table: at least 8 rows are required");
    double span = t_.back() - t_.front();
    if (!(span > 0.0)) throw Error(Errc::Input, "table: parameter must increase");
    double h = span / static_cast<double>(t_.size() - 1);
    double tol = 1e-9 * std::max(1.0, std::abs(span));
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (std::abs(t_[i] - (t_.front() + h * static_cast<double>(i))) > tol) {
        throw Error(Errc::Input, "table: parameter grid is not uniform at row " + std::to_string(i));
      }
    }
    if (spacing <= 0.0) spacing = default_stencil_spacing(span);
    samples_ = std::make_shared<const UniformSamples<DualVec3>>(t_.front(), h, std::move(points), spacing);
  }

  const std::vector<double>& t() const { return t_; }
  const std::vector<DualVec3>& points() const { return samples_->values(); }
  std::size_t size() const { return t_.size(); }
  Range range() const { return {t_.front(), t_.back()}; }

  Jet jet(double t, int order) const { return samples_->jet(t, order); }

 private:
  std::vector<double> t_;
  std::shared_ptr<const UniformSamples<DualVec3>> samples_;
};

using CurveSource = std::variant<BuiltinFamily, Expressions, Invariants, SampledTable>;

struct CurveSpec {
  CurveSource source;
  Range range;
  std::size_t samples = 256;
};

/// Uniform grid of `n` parameters over the range, endpoints included.
inline std::vector<double> uniform_grid(const Range& r, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = i + 1 == n ? r.t1 : r.t0 + r.span() * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return t;
}

namespace detail {

inline double param_or(const BuiltinFamily& f, const std::string& key, double fallback) {
  auto it = f.params.find(key);
  return it == f.params.end() ? fallback : it->second;
}

inline double required_param(const BuiltinFamily& f, const std::string& key) {
  auto it = f.params.find(key);
  if (it == f.params.end()) {
    throw Error(Errc::Validation, "family '" + f.name + "': missing parameter '" + key + "'");
  }
  return it->second;
}

inline Jet helix_jet(const BuiltinFamily& f, double t) {
  DualScalar a(required_param(f, "a"), param_or(f, "a_du", 0.0));
  DualScalar b(required_param(f, "b"), param_or(f, "b_du", 0.0));
  double v = param_or(f, "speed", 1.0);
  DualScalar c = sqrt(a * a - b * b);
  DualScalar w = v / c;
  DualScalar u = w * t;
  DualScalar sh = sinh(u);
  DualScalar ch = cosh(u);
  DualScalar w2 = w * w;
  DualScalar w3 = w2 * w;
  DualScalar z(0.0);
  return {DualVec3{a * sh, a * ch, b * u}, DualVec3{a * w * ch, a * w * sh, b * w},
          DualVec3{a * w2 * sh, a * w2 * ch, z}, DualVec3{a * w3 * ch, a * w3 * sh, z}};
}

inline Jet line_jet(const BuiltinFamily& f, double t) {
  double v = param_or(f, "speed", 1.0);
  DualVec3 dir{DualScalar(1.0), DualScalar(param_or(f, "v2", 0.0), param_or(f, "v2_du", 0.0)),
               DualScalar(param_or(f, "v3", 0.0), param_or(f, "v3_du", 0.0))};
  dir = dir * v;
  return {dir * t, dir, DualVec3{}, DualVec3{}};
}

template <typename T>
T nested_seed(double t) {
  if constexpr (std::is_same_v<T, double>) {
    return t;
  } else {
    using Inner = std::remove_cvref_t<decltype(std::declval<T>().re)>;
    return T(nested_seed<Inner>(t), Inner(1.0));
  }
}

/// Value and derivatives up to `order` of a scalar expression, exact up to
/// rounding: the variable is seeded as t + ε₁ + ε₂ + ε₃.
inline std::array<double, 4> expr_jet(const expr::Expr& e, double t, int order) {
  using D1 = Dual<double>;
  using D2 = Dual<D1>;
  using D3 = Dual<D2>;
  switch (order) {
    case 0: return {e.eval(t), 0.0, 0.0, 0.0};
    case 1: {
      D1 x = e.eval(nested_seed<D1>(t));
      return {x.re, x.du, 0.0, 0.0};
    }
    case 2: {
      D2 x = e.eval(nested_seed<D2>(t));
      return {x.re.re, x.re.du, x.du.du, 0.0};
    }
    default: {
      D3 x = e.eval(nested_seed<D3>(t));
      return {x.re.re.re, x.re.re.du, x.re.du.du, x.du.du.du};
    }
  }
}

inline Jet expressions_jet(const Expressions& src, double t, int order) {
  std::array<std::array<double, 4>, 6> c;
  for (std::size_t i = 0; i < 6; ++i) c[i] = expr_jet(src.components[i], t, order);
  Jet out{};
  for (int k = 0; k <= order; ++k) {
    out[k] = DualVec3{DualScalar(c[0][k], c[3][k]), DualScalar(c[1][k], c[4][k]), DualScalar(c[2][k], c[5][k])};
  }
  return out;
}

}  // namespace detail

/// Checks the registry and the family's parameter constraints.
inline BuiltinFamily make_builtin(std::string name, std::map<std::string, double> params) {
  BuiltinFamily f{std::move(name), std::move(params)};
  auto check_known = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : f.params) {
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) throw Error(Errc::Validation, "family '" + f.name + "': unknown parameter '" + key + "'");
      if (!std::isfinite(value)) {
        throw Error(Errc::Validation, "family '" + f.name + "': parameter '" + key + "' is not finite");
      }
    }
  };
  if (f.name == "timelike_hyperbolic_helix") {
    check_known({"a", "b", "a_du", "b_du", "speed"});
    double a = detail::required_param(f, "a");
    double b = detail::required_param(f, "b");
    if (!(a * a > b * b)) throw Error(Errc::Validation, "timelike_hyperbolic_helix: requires a^2 > b^2");
  } else if (f.name == "timelike_line") {
    check_known({"v2", "v3", "v2_du", "v3_du", "speed"});
    double v2 = detail::param_or(f, "v2", 0.0);
    double v3 = detail::param_or(f, "v3", 0.0);
    if (!(v2 * v2 + v3 * v3 < 1.0)) throw Error(Errc::Validation, "timelike_line: requires v2^2 + v3^2 < 1");
  } else {
    throw Error(Errc::Validation, "unknown curve family '" + f.name + "'");
  }
  if (detail::param_or(f, "speed", 1.0) <= 0.0) {
    throw Error(Errc::Validation, "family '" + f.name + "': speed must be positive");
  }
  return f;
}

inline void validate(const CurveSpec& spec) {
  if (!(spec.range.t0 < spec.range.t1)) throw Error(Errc::Validation, "range must satisfy t0 < t1");
  if (spec.samples < 8) throw Error(Errc::Validation, "samples must be at least 8");
}

/// Position and derivatives up to `order` with respect to the parameter t.
inline Jet eval_jet(const CurveSpec& spec, double t, int order) {
  if (order < 0 || order > kMaxJetOrder) throw Error(Errc::OutOfRange, "jet order must be in 0..3");
  double slack = 1e-12 * std::max(1.0, std::abs(spec.range.span()));
  if (!(t >= spec.range.t0 - slack && t <= spec.range.t1 + slack)) {
    throw Error(Errc::OutOfRange, "parameter " + expr::format_number(t) + " is outside the curve range");
  }
  t = std::clamp(t, spec.range.t0, spec.range.t1);
  return std::visit(
      [&](const auto& src) -> Jet {
        using S = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<S, BuiltinFamily>) {
          return src.name == "timelike_line" ? detail::line_jet(src, t) : detail::helix_jet(src, t);
        } else if constexpr (std::is_same_v<S, Expressions>) {
          return detail::expressions_jet(src, t, order);
        } else if constexpr (std::is_same_v<S, SampledTable>) {
          return src.jet(t, order);
        } else {
          throw Error(Errc::Precondition, "invariant-defined curves must be integrated before evaluation");
        }
      },
      spec.source);
}

/// Dual speed ‖α̃′(t)‖.
inline DualScalar dual_speed(const DualVec3& d1) {
  RealVec3 re = real_part(d1);
  if (re == RealVec3{} || causal_class3(re) == CausalClass::Lightlike) {
    throw Error(Errc::DegenerateSpeed, "arc length: derivative is lightlike or zero");
  }
  return dnorm(d1);
}

namespace detail {

inline DualScalar gauss_legendre7(const CurveSpec& spec, double a, double b) {
  static constexpr double x[7] = {0.0,
                                  0.4058451513773971669066064,
                                  -0.4058451513773971669066064,
                                  0.7415311855993944398638648,
                                  -0.7415311855993944398638648,
                                  0.9491079123427585245261897,
                                  -0.9491079123427585245261897};
  static constexpr double w[7] = {0.4179591836734693877551020, 0.3818300505051189449503698,
                                  0.3818300505051189449503698, 0.2797053914892766679014678,
                                  0.2797053914892766679014678, 0.1294849661688696932706114,
                                  0.1294849661688696932706114};
  double m = 0.5 * (a + b);
  double r = 0.5 * (b - a);
  DualScalar sum(0.0);
  for (int i = 0; i < 7; ++i) {
    sum += w[i] * dual_speed(eval_jet(spec, m + r * x[i], 1)[1]);
  }
  return sum * r;
}

inline DualScalar adaptive_arc(const CurveSpec& spec, double a, double b, const DualScalar& whole, int depth) {
  constexpr double kPanelTol = 1e-10;
  double m = 0.5 * (a + b);
  DualScalar left = gauss_legendre7(spec, a, m);
  DualScalar right = gauss_legendre7(spec, m, b);
  DualScalar both = left + right;
  if (depth >= 30 || (std::abs(both.re - whole.re) <= kPanelTol && std::abs(both.du - whole.du) <= kPanelTol)) {
    return both;
  }
  return adaptive_arc(spec, a, m, left, depth + 1) + adaptive_arc(spec, m, b, right, depth + 1);
}

}  // namespace detail

/// s̃(b) − s̃(a) = ∫ₐᵇ ‖α̃′(t)‖ dt by adaptive Gauss-Legendre quadrature.
inline DualScalar arc_length(const CurveSpec& spec, double a, double b) {
  if (a == b) return DualScalar(0.0);
  return detail::adaptive_arc(spec, a, b, detail::gauss_legendre7(spec, a, b), 0);
}

/// Dual arc length from the start of the range: s̃ = s + εs*, with
/// s* = ∫⟨t, (α*)′⟩ dt up to the timelike sign of the dual norm.
inline DualScalar arc_length(const CurveSpec& spec, double t) { return arc_length(spec, spec.range.t0, t); }

/// Cumulative dual arc length at increasing parameters `ts`, measured from ts[0].
inline std::vector<DualScalar> arc_length_grid(const CurveSpec& spec, const std::vector<double>& ts) {
  std::vector<DualScalar> panels(ts.size(), DualScalar(0.0));
  if (ts.size() > 1) {
    parallel_for(ts.size() - 1, [&](std::size_t i) { panels[i + 1] = arc_length(spec, ts[i], ts[i + 1]); });
  }
  for (std::size_t i = 1; i < panels.size(); ++i) panels[i] = panels[i - 1] + panels[i];
  return panels;
}

/// A curve resampled on a uniform grid of its real arc length s, together
/// with the dual arc length s + εs* at each row.
struct ArcLengthCurve {
  CurveSpec spec;
  std::vector<DualScalar> arc;
};

/// Resamples the curve by real arc length; each row's parameter is found by
/// bisection on s(t) to machine precision.
inline ArcLengthCurve reparameterize(const CurveSpec& spec) {
  validate(spec);
  std::vector<double> ts = uniform_grid(spec.range, spec.samples);
  for (double t : ts) {
    if (causal_class3(real_part(eval_jet(spec, t, 1)[1])) != CausalClass::Timelike) {
      throw Error(Errc::DegenerateSpeed, "reparameterize: tangent is not timelike");
    }
  }
  std::vector<DualScalar> cum = arc_length_grid(spec, ts);
  double total = cum.back().re;
  std::size_t n = spec.samples;
  std::vector<double> s_grid = uniform_grid({0.0, total}, n);
  std::vector<DualVec3> points(n);
  std::vector<DualScalar> arc(n);

  parallel_for(n, [&](std::size_t k) {
    double target = s_grid[k];
    auto it = std::upper_bound(cum.begin(), cum.end(), target,
                               [](double v, const DualScalar& c) { return v < c.re; });
    std::size_t j = it == cum.begin() ? 0 : static_cast<std::size_t>(it - cum.begin()) - 1;
    if (j + 1 >= ts.size()) j = ts.size() - 2;
    double lo = ts[j];
    double hi = ts[j + 1];
    DualScalar at_lo = cum[j];
    for (int iter = 0; iter < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi));
         ++iter) {
      double mid = 0.5 * (lo + hi);
      if (at_lo.re + arc_length(spec, ts[j], mid).re < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    double t = 0.5 * (lo + hi);
    arc[k] = at_lo + arc_length(spec, ts[j], t);
    points[k] = eval_jet(spec, t, 0)[0];
  });

  CurveSpec out{SampledTable(s_grid, std::move(points)), Range{0.0, total}, n};
  return {std::move(out), std::move(arc)};
}

}  // namespace dl3

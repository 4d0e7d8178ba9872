#pragma once

/**
 * @file dual.hpp
 * @brief The dual-number ring D = { a + εa* : ε² = 0 } and its Taylor-lifted
 * elementary functions.
 *
 * `Dual<T>` is generic over its component type so that duals can be nested:
 * `Dual<Dual<double>>` carries two independent infinitesimals, which the
 * curve engine uses to get exact higher derivatives of expression curves.
 * `DualScalar` (= `Dual<double>`) is the ring element used everywhere else.
 *
 * Every arithmetic operation and every lift checks that its result is
 * finite and throws `Errc::ArithmeticOverflow` otherwise.
 */

#include <cmath>
#include <concepts>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include "dl3/error.hpp"

namespace dl3 {

template <typename T>
struct Dual;

namespace detail {

template <typename T>
struct is_dual : std::false_type {};
template <typename T>
struct is_dual<Dual<T>> : std::true_type {};

}  // namespace detail

template <typename T>
concept DualType = detail::is_dual<T>::value;

template <typename T>
concept Scalar = std::same_as<T, double> || DualType<T>;

/// Default |b| threshold below which a divisor counts as pure dual.
inline constexpr double kDivisionZeroThreshold = 1e-300;

// Recursive helpers over nested component types.

constexpr double primal(double x) noexcept { return x; }
template <typename T>
constexpr double primal(const Dual<T>& x) noexcept {
  return primal(x.re);
}

inline bool all_finite(double x) noexcept { return std::isfinite(x); }
template <typename T>
bool all_finite(const Dual<T>& x) noexcept {
  return all_finite(x.re) && all_finite(x.du);
}

constexpr bool is_zero(double x) noexcept { return x == 0.0; }
template <typename T>
constexpr bool is_zero(const Dual<T>& x) noexcept {
  return is_zero(x.re) && is_zero(x.du);
}

template <typename T>
struct Dual {
  T re{};
  T du{};

  constexpr Dual() = default;
  constexpr Dual(double value) : re(value), du(0.0) {}  // NOLINT: implicit by design of the ring
  constexpr Dual(T real, T dual) requires(!std::same_as<T, double>) : re(std::move(real)), du(std::move(dual)) {}
  constexpr Dual(double real, double dual) requires std::same_as<T, double> : re(real), du(dual) {}

  /// The infinitesimal unit ε = (0, 1).
  static constexpr Dual epsilon() { return Dual(T(0.0), T(1.0)); }

  friend constexpr bool operator==(const Dual&, const Dual&) = default;
};

using DualScalar = Dual<double>;

template <typename T>
Dual<T> checked(Dual<T> x, std::string_view op) {
  if (!all_finite(x)) {
    throw Error(Errc::ArithmeticOverflow, std::string(op) + ": non-finite component");
  }
  return x;
}

template <typename T>
Dual<T> operator-(const Dual<T>& a) {
  return Dual<T>(-a.re, -a.du);
}

template <typename T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return checked(Dual<T>(a.re + b.re, a.du + b.du), "add");
}

template <typename T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return checked(Dual<T>(a.re - b.re, a.du - b.du), "sub");
}

/// (a, a*)·(b, b*) = (ab, ab* + a*b)
template <typename T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return checked(Dual<T>(a.re * b.re, a.re * b.du + a.du * b.re), "mul");
}

template <typename T>
Dual<T> div(const Dual<T>& a, const Dual<T>& b, double zero_threshold = kDivisionZeroThreshold) {
  if (!(std::abs(primal(b.re)) > zero_threshold)) {
    throw Error(Errc::PureDualDivisor, "div: divisor has zero real part");
  }
  T q = a.re / b.re;
  T qd = (a.du - q * b.du) / b.re;
  return checked(Dual<T>(std::move(q), std::move(qd)), "div");
}

template <typename T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  return div(a, b);
}

template <typename T>
Dual<T> mul(const Dual<T>& a, const Dual<T>& b) {
  return a * b;
}

// Mixed operations with plain reals.

template <typename T>
Dual<T> operator+(const Dual<T>& a, double b) {
  return checked(Dual<T>(a.re + b, a.du), "add");
}
template <typename T>
Dual<T> operator+(double a, const Dual<T>& b) {
  return b + a;
}
template <typename T>
Dual<T> operator-(const Dual<T>& a, double b) {
  return checked(Dual<T>(a.re - b, a.du), "sub");
}
template <typename T>
Dual<T> operator-(double a, const Dual<T>& b) {
  return checked(Dual<T>(a - b.re, -b.du), "sub");
}
template <typename T>
Dual<T> operator*(const Dual<T>& a, double b) {
  return checked(Dual<T>(a.re * b, a.du * b), "mul");
}
template <typename T>
Dual<T> operator*(double a, const Dual<T>& b) {
  return b * a;
}
template <typename T>
Dual<T> operator/(const Dual<T>& a, double b) {
  if (!(std::abs(b) > kDivisionZeroThreshold)) {
    throw Error(Errc::PureDualDivisor, "div: divisor has zero real part");
  }
  return checked(Dual<T>(a.re / b, a.du / b), "div");
}
template <typename T>
Dual<T> operator/(double a, const Dual<T>& b) {
  return div(Dual<T>(a), b);
}

template <typename T, typename U>
Dual<T>& operator+=(Dual<T>& a, const U& b) {
  return a = a + b;
}
template <typename T, typename U>
Dual<T>& operator-=(Dual<T>& a, const U& b) {
  return a = a - b;
}
template <typename T, typename U>
Dual<T>& operator*=(Dual<T>& a, const U& b) {
  return a = a * b;
}
template <typename T, typename U>
Dual<T>& operator/=(Dual<T>& a, const U& b) {
  return a = a / b;
}

template <typename T>
std::ostream& operator<<(std::ostream& os, const Dual<T>& x) {
  return os << '(' << x.re << " + e" << x.du << ')';
}

// ---------------------------------------------------------------------------
// Taylor lift: f(a + εa*) = f(a) + εa* f'(a)
// ---------------------------------------------------------------------------

enum class Fn { Identity, Sin, Cos, Sinh, Cosh, Tanh, Exp, Ln, Sqrt, Atanh, Asinh, Acosh, Acos };

constexpr std::string_view fn_name(Fn f) noexcept {
  switch (f) {
    case Fn::Identity: return "identity";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Sinh: return "sinh";
    case Fn::Cosh: return "cosh";
    case Fn::Tanh: return "tanh";
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Sqrt: return "sqrt";
    case Fn::Atanh: return "atanh";
    case Fn::Asinh: return "asinh";
    case Fn::Acosh: return "acosh";
    case Fn::Acos: return "acos";
  }
  return "?";
}

namespace detail {

[[noreturn]] inline void domain_error(Fn f, double x, std::string_view why) {
  throw Error(Errc::Domain,
              std::string(fn_name(f)) + ": argument " + std::to_string(x) + " " + std::string(why));
}

[[noreturn]] inline void domain_error(std::string_view name, double x, std::string_view why) {
  throw Error(Errc::Domain, std::string(name) + ": argument " + std::to_string(x) + " " + std::string(why));
}

// Domain of the value itself.
inline void check_value_domain(Fn f, double x) {
  switch (f) {
    case Fn::Ln:
      if (!(x > 0.0)) domain_error(f, x, "outside (0, inf)");
      break;
    case Fn::Sqrt:
      if (!(x >= 0.0)) domain_error(f, x, "is negative");
      break;
    case Fn::Atanh:
      if (!(std::abs(x) < 1.0)) domain_error(f, x, "outside (-1, 1)");
      break;
    case Fn::Acosh:
      if (!(x >= 1.0)) domain_error(f, x, "is below 1");
      break;
    case Fn::Acos:
      if (!(std::abs(x) <= 1.0)) domain_error(f, x, "outside [-1, 1]");
      break;
    default:
      break;
  }
}

// Points of the value domain where the derivative does not exist.
inline void check_derivative_domain(Fn f, double x) {
  switch (f) {
    case Fn::Sqrt:
      if (!(x > 0.0)) domain_error(f, x, "has no derivative at 0");
      break;
    case Fn::Acosh:
      if (!(x > 1.0)) domain_error(f, x, "has no derivative at 1");
      break;
    case Fn::Acos:
      if (!(std::abs(x) < 1.0)) domain_error(f, x, "has no derivative at +-1");
      break;
    default:
      break;
  }
}

inline double apply_real(Fn f, double x) {
  check_value_domain(f, x);
  switch (f) {
    case Fn::Identity: return x;
    case Fn::Sin: return std::sin(x);
    case Fn::Cos: return std::cos(x);
    case Fn::Sinh: return std::sinh(x);
    case Fn::Cosh: return std::cosh(x);
    case Fn::Tanh: return std::tanh(x);
    case Fn::Exp: return std::exp(x);
    case Fn::Ln: return std::log(x);
    case Fn::Sqrt: return std::sqrt(x);
    case Fn::Atanh: return std::atanh(x);
    case Fn::Asinh: return std::asinh(x);
    case Fn::Acosh: return std::acosh(x);
    case Fn::Acos: return std::acos(x);
  }
  return x;
}

}  // namespace detail

inline double lift(Fn f, double x) {
  double y = detail::apply_real(f, x);
  if (!std::isfinite(y)) {
    throw Error(Errc::ArithmeticOverflow, std::string(fn_name(f)) + ": non-finite result");
  }
  return y;
}

template <typename T>
Dual<T> lift(Fn f, const Dual<T>& a);

namespace detail {

// f'(x), written with lifts so that it works for any nesting depth.
template <typename T>
T derivative(Fn f, const T& x) {
  check_derivative_domain(f, primal(x));
  switch (f) {
    case Fn::Identity: return T(1.0);
    case Fn::Sin: return lift(Fn::Cos, x);
    case Fn::Cos: return -lift(Fn::Sin, x);
    case Fn::Sinh: return lift(Fn::Cosh, x);
    case Fn::Cosh: return lift(Fn::Sinh, x);
    case Fn::Tanh: {
      T t = lift(Fn::Tanh, x);
      return 1.0 - t * t;
    }
    case Fn::Exp: return lift(Fn::Exp, x);
    case Fn::Ln: return 1.0 / x;
    case Fn::Sqrt: return 0.5 / lift(Fn::Sqrt, x);
    case Fn::Atanh: return 1.0 / (1.0 - x * x);
    case Fn::Asinh: return 1.0 / lift(Fn::Sqrt, x * x + 1.0);
    case Fn::Acosh: return 1.0 / lift(Fn::Sqrt, x * x - 1.0);
    case Fn::Acos: return -1.0 / lift(Fn::Sqrt, 1.0 - x * x);
  }
  return T(1.0);
}

}  // namespace detail

template <typename T>
Dual<T> lift(Fn f, const Dual<T>& a) {
  T value = lift(f, a.re);
  if (is_zero(a.du)) {
    return Dual<T>(std::move(value), T(0.0));
  }
  T slope = detail::derivative(f, a.re);
  return checked(Dual<T>(std::move(value), a.du * slope), fn_name(f));
}

/// x^p for a real exponent. Non-integer exponents need a positive base.
inline double lift_pow(double x, double p) {
  bool integral = std::floor(p) == p;
  if (!integral && !(x > 0.0) && !(x == 0.0 && p > 0.0)) {
    detail::domain_error("power", x, "must be positive for a non-integer exponent");
  }
  if (x == 0.0 && p < 0.0) detail::domain_error("power", x, "is zero with a negative exponent");
  double y = std::pow(x, p);
  if (!std::isfinite(y)) throw Error(Errc::ArithmeticOverflow, "power: non-finite result");
  return y;
}

template <typename T>
Dual<T> lift_pow(const Dual<T>& a, double p) {
  T value = lift_pow(a.re, p);
  if (is_zero(a.du) || p == 0.0) {
    return Dual<T>(std::move(value), T(0.0));
  }
  T slope = p * lift_pow(a.re, p - 1.0);
  return checked(Dual<T>(std::move(value), a.du * slope), "power");
}

// Named shorthands used throughout the library.
template <typename T> T sin(const T& x) { return lift(Fn::Sin, x); }
template <typename T> T cos(const T& x) { return lift(Fn::Cos, x); }
template <typename T> T sinh(const T& x) { return lift(Fn::Sinh, x); }
template <typename T> T cosh(const T& x) { return lift(Fn::Cosh, x); }
template <typename T> T tanh(const T& x) { return lift(Fn::Tanh, x); }
template <typename T> T exp(const T& x) { return lift(Fn::Exp, x); }
template <typename T> T ln(const T& x) { return lift(Fn::Ln, x); }
template <typename T> T sqrt(const T& x) { return lift(Fn::Sqrt, x); }
template <typename T> T atanh(const T& x) { return lift(Fn::Atanh, x); }
template <typename T> T asinh(const T& x) { return lift(Fn::Asinh, x); }
template <typename T> T acosh(const T& x) { return lift(Fn::Acosh, x); }
template <typename T> T acos(const T& x) { return lift(Fn::Acos, x); }

/// (sinh Φ, cosh Φ) for a dual angle Φ = θ + εθ*.
inline std::pair<DualScalar, DualScalar> hyperbolic_pair(const DualScalar& phi) {
  return {sinh(phi), cosh(phi)};
}

/// |x| + εx*·sign(x); undefined at a zero real part with nonzero dual part.
inline DualScalar dual_abs(const DualScalar& x) {
  if (x.re == 0.0) {
    if (x.du != 0.0) detail::domain_error("abs", 0.0, "has no derivative at 0");
    return DualScalar(0.0, 0.0);
  }
  return x.re > 0.0 ? x : -x;
}

/// Componentwise |a − b| ≤ tol.
inline bool approx_equal(const DualScalar& a, const DualScalar& b, double tol) {
  return std::abs(a.re - b.re) <= tol && std::abs(a.du - b.du) <= tol;
}

inline double sign_of(double x) noexcept { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace dl3

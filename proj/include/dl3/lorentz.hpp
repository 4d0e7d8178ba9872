#pragma once

/**
 * @file lorentz.hpp
 * @brief Minkowski 3-space R³₁: vectors, the Lorentzian inner and cross
 * products, and causal classification.
 *
 * The first coordinate is the timelike axis: ⟨a,b⟩ = −a₁b₁ + a₂b₂ + a₃b₃.
 * `Vec3<T>` is generic over the scalar so the same formulas serve real
 * vectors (`RealVec3`) and dual vectors (`DualVec3`, see dual_lorentz.hpp);
 * with dual components they expand to exactly the ε-rules of D³.
 */

#include <algorithm>
#include <cmath>
#include <concepts>
#include <ostream>
#include <string_view>

#include "dl3/dual.hpp"

namespace dl3 {

template <typename T>
struct Vec3 {
  T x1{};
  T x2{};
  T x3{};

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

using RealVec3 = Vec3<double>;

template <typename T>
Vec3<T> operator+(const Vec3<T>& a, const Vec3<T>& b) {
  return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3};
}

template <typename T>
Vec3<T> operator-(const Vec3<T>& a, const Vec3<T>& b) {
  return {a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3};
}

template <typename T>
Vec3<T> operator-(const Vec3<T>& a) {
  return {-a.x1, -a.x2, -a.x3};
}

template <typename T, typename S>
  requires(std::same_as<S, double> || std::same_as<S, T>)
Vec3<T> operator*(const S& k, const Vec3<T>& a) {
  return {a.x1 * k, a.x2 * k, a.x3 * k};
}

template <typename T, typename S>
  requires(std::same_as<S, double> || std::same_as<S, T>)
Vec3<T> operator*(const Vec3<T>& a, const S& k) {
  return {a.x1 * k, a.x2 * k, a.x3 * k};
}

template <typename T, typename S>
  requires(std::same_as<S, double> || std::same_as<S, T>)
Vec3<T> operator/(const Vec3<T>& a, const S& k) {
  return {a.x1 / k, a.x2 / k, a.x3 / k};
}

template <typename T>
std::ostream& operator<<(std::ostream& os, const Vec3<T>& a) {
  return os << '[' << a.x1 << ", " << a.x2 << ", " << a.x3 << ']';
}

/// Lorentzian inner product, signature (−, +, +).
template <typename T>
T inner(const Vec3<T>& a, const Vec3<T>& b) {
  return a.x2 * b.x2 + a.x3 * b.x3 - a.x1 * b.x1;
}

/// Lorentzian cross product; ⟨a∧b, c⟩ = det(a, b, c) and a∧b is
/// Lorentz-orthogonal to both factors.
template <typename T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a.x3 * b.x2 - a.x2 * b.x3, a.x3 * b.x1 - a.x1 * b.x3, a.x1 * b.x2 - a.x2 * b.x1};
}

inline double inner3(const RealVec3& a, const RealVec3& b) { return inner(a, b); }
inline RealVec3 cross3(const RealVec3& a, const RealVec3& b) { return cross(a, b); }

/// Euclidean determinant of the rows a, b, c.
inline double det3(const RealVec3& a, const RealVec3& b, const RealVec3& c) {
  return a.x1 * (b.x2 * c.x3 - b.x3 * c.x2) - a.x2 * (b.x1 * c.x3 - b.x3 * c.x1) +
         a.x3 * (b.x1 * c.x2 - b.x2 * c.x1);
}

inline double euclidean_norm2(const RealVec3& a) { return a.x1 * a.x1 + a.x2 * a.x2 + a.x3 * a.x3; }

inline bool all_finite(const RealVec3& a) {
  return std::isfinite(a.x1) && std::isfinite(a.x2) && std::isfinite(a.x3);
}

enum class CausalClass { Spacelike, Timelike, Lightlike };

constexpr std::string_view to_string(CausalClass c) noexcept {
  switch (c) {
    case CausalClass::Spacelike: return "spacelike";
    case CausalClass::Timelike: return "timelike";
    case CausalClass::Lightlike: return "lightlike";
  }
  return "?";
}

/// Relative threshold separating the light cone from its two sides.
inline double lightlike_threshold(const RealVec3& a) {
  return 1e-12 * std::max(1.0, euclidean_norm2(a));
}

/// The zero vector counts as spacelike.
inline CausalClass causal_class3(const RealVec3& a) {
  if (a == RealVec3{}) return CausalClass::Spacelike;
  double q = inner(a, a);
  double tol = lightlike_threshold(a);
  if (q < -tol) return CausalClass::Timelike;
  if (q > tol) return CausalClass::Spacelike;
  return CausalClass::Lightlike;
}

}  // namespace dl3

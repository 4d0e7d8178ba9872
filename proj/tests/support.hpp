#pragma once

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dl3/dl3.hpp"

namespace dl3::test {

/// Fixed-seed generator so every run draws the same cases.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 20261016) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  DualScalar dual(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
  RealVec3 vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  DualVec3 dvec(double lo, double hi) { return make_dual(vec(lo, hi), vec(lo, hi)); }

  /// Future-pointing timelike vector with a random dual part.
  DualVec3 timelike(double dual_scale = 1.0) {
    RealVec3 space = vec(-1.0, 1.0);
    double t = std::sqrt(space.x2 * space.x2 + space.x3 * space.x3) + uniform(0.2, 2.0);
    return make_dual({t, space.x2, space.x3}, vec(-dual_scale, dual_scale));
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline ::testing::AssertionResult DualNear(const DualScalar& a, const DualScalar& b, double tol) {
  if (std::abs(a.re - b.re) <= tol && std::abs(a.du - b.du) <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << a << " vs " << b << " (tol " << tol << ")";
}

inline ::testing::AssertionResult VecNear(const DualVec3& a, const DualVec3& b, double tol) {
  for (auto [x, y] : {std::pair{a.x1, b.x1}, std::pair{a.x2, b.x2}, std::pair{a.x3, b.x3}}) {
    if (!(std::abs(x.re - y.re) <= tol && std::abs(x.du - y.du) <= tol)) {
      return ::testing::AssertionFailure() << a << " vs " << b << " (tol " << tol << ")";
    }
  }
  return ::testing::AssertionSuccess();
}

template <typename F>
Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a dl3::Error";
  return Errc::Io;
}

template <typename F>
std::string error_message_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected a dl3::Error";
  return {};
}

}  // namespace dl3::test

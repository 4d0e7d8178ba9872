#pragma once

/**
 * @file stencil.hpp
 * @brief Finite-difference derivatives of uniformly sampled data.
 *
 * Weights come from Fornberg's recursion, so the same code handles centred
 * stencils in the interior, shifted stencils near the ends of the grid and
 * evaluation between grid nodes.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dl3/error.hpp"

namespace dl3 {

inline constexpr int kMaxJetOrder = 3;

/// Weights w[k][i] such that f⁽ᵏ⁾(z) ≈ Σᵢ w[k][i]·f(xᵢ), for k ≤ max_order.
inline std::vector<std::array<double, kMaxJetOrder + 1>> fornberg_weights(double z, std::span<const double> x,
                                                                          int max_order) {
  const std::size_t n = x.size();
  std::vector<std::array<double, kMaxJetOrder + 1>> c(n, std::array<double, kMaxJetOrder + 1>{});
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    int mn = std::min<int>(static_cast<int>(i), max_order);
    double c2 = 1.0;
    double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  return c;
}

/// Values on the grid t₀ + i·h, differentiated with (up to) 9-node stencils
/// whose node spacing is the multiple of h closest to `spacing`.
template <typename V>
class UniformSamples {
 public:
  static constexpr std::size_t kStencilNodes = 9;

  UniformSamples(double t0, double h, std::vector<V> values, double spacing)
      : t0_(t0), h_(h), values_(std::move(values)), spacing_(spacing) {
    if (values_.size() < 2 || !(h_ > 0.0)) {
      throw Error(Errc::Input, "uniform samples need at least two nodes and a positive step");
    }
  }

  std::size_t size() const { return values_.size(); }
  double step() const { return h_; }
  double t0() const { return t0_; }
  double t1() const { return t0_ + h_ * static_cast<double>(values_.size() - 1); }
  const std::vector<V>& values() const { return values_; }

  /// Value and derivatives up to `order` at any t in [t0, t1].
  std::array<V, kMaxJetOrder + 1> jet(double t, int order) const {
    const std::size_t n_total = values_.size();
    std::size_t count = std::min(kStencilNodes, n_total);
    if (static_cast<std::size_t>(order) >= count) {
      throw Error(Errc::OutOfRange, "not enough samples for the requested derivative order");
    }
    std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(spacing_ / h_)));
    stride = std::min(stride, std::max<std::size_t>(1, (n_total - 1) / (count - 1)));

    double centre = (t - t0_) / h_;
    double span = static_cast<double>((count - 1) * stride);
    double first = std::round(centre - span / 2.0);
    double last_start = static_cast<double>(n_total - 1) - span;
    first = std::clamp(first, 0.0, last_start);
    auto start = static_cast<std::size_t>(first);

    std::array<double, kStencilNodes> x{};
    for (std::size_t i = 0; i < count; ++i) {
      double idx = static_cast<double>(start + i * stride);
      x[i] = (idx - centre) / static_cast<double>(stride);
    }
    auto w = fornberg_weights(0.0, std::span<const double>(x.data(), count), order);

    std::array<V, kMaxJetOrder + 1> out{};
    double unit = h_ * static_cast<double>(stride);
    double scale = 1.0;
    for (int k = 0; k <= order; ++k) {
      V acc = values_[start] * w[0][k];
      for (std::size_t i = 1; i < count; ++i) {
        acc = acc + values_[start + i * stride] * w[i][k];
      }
      out[k] = acc * (1.0 / scale);
      scale *= unit;
    }
    return out;
  }

 private:
  double t0_;
  double h_;
  std::vector<V> values_;
  double spacing_;
};

}  // namespace dl3

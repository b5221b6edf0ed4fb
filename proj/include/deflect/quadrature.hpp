#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace deflect {

/// Gauss-Legendre rule on [-1, 1] with N nodes.
///
/// `cumulative` is the spectral integration matrix: for a function sampled
/// at the nodes, sum_k cumulative[j][k] * f(x_k) approximates the integral
/// from -1 to x_j (exact for polynomials of degree < N).
template <int N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};
  std::array<std::array<double, N>, N> cumulative{};

  static const GaussLegendre& get() {
    static const GaussLegendre rule;
    return rule;
  }

 private:
  GaussLegendre() {
    for (int i = 0; i < N; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[N - 1 - i] = x;
      weights[N - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // Lagrange basis integrated from -1 to each node with the rule itself
    // mapped onto [-1, x_j]; the basis has degree N-1 so this is exact.
    for (int j = 0; j < N; ++j) {
      const double half = 0.5 * (nodes[j] + 1.0);
      for (int k = 0; k < N; ++k) {
        double acc = 0.0;
        for (int q = 0; q < N; ++q) {
          const double s = -1.0 + half * (nodes[q] + 1.0);
          double basis = 1.0;
          for (int m = 0; m < N; ++m) {
            if (m != k) basis *= (s - nodes[m]) / (nodes[k] - nodes[m]);
          }
          acc += weights[q] * basis;
        }
        cumulative[j][k] = half * acc;
      }
    }
  }
};

}  // namespace deflect

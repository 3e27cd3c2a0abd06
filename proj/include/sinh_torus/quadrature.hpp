#pragma once

// Adaptive Gauss-Legendre quadrature with interval bisection.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace sinh_torus {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
template <std::size_t N>
struct GaussLegendreRule {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendreRule() {
    constexpr double kPiLocal = 3.14159265358979323846;
    const std::size_t half = (N + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
      // Chebyshev-like initial guess, then Newton on P_N.
      double z = std::cos(kPiLocal * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = z;
        for (std::size_t k = 2; k <= N; ++k) {
          const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = pk;
        }
        // p1 = P_N(z), p0 = P_{N-1}(z)
        dp = static_cast<double>(N) * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      nodes[i] = -z;
      nodes[N - 1 - i] = z;
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      weights[i] = w;
      weights[N - 1 - i] = w;
    }
  }
};

namespace detail {

template <class F, std::size_t N>
double gauss_panel(const F& f, double a, double b, const GaussLegendreRule<N>& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

template <class F, std::size_t N>
double adaptive_panel(const F& f, double a, double b, double whole, double tol, int depth,
                      const GaussLegendreRule<N>& rule) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_panel(f, a, mid, rule);
  const double right = gauss_panel(f, mid, b, rule);
  if (std::abs(left + right - whole) <= tol || depth <= 0) return left + right;
  return adaptive_panel(f, a, mid, left, 0.5 * tol, depth - 1, rule) +
         adaptive_panel(f, mid, b, right, 0.5 * tol, depth - 1, rule);
}

}  // namespace detail

/// Integral of f over [a, b] to absolute tolerance `tol` (orientation aware).
template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol = 1e-12) {
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_adaptive: tol must be positive");
  if (a == b) return 0.0;
  static const GaussLegendreRule<10> rule;
  const double whole = detail::gauss_panel(f, a, b, rule);
  return detail::adaptive_panel(f, a, b, whole, tol, 40, rule);
}

}  // namespace sinh_torus

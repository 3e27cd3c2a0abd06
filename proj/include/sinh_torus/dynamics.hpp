#pragma once

// The commuting vector fields Z (u-flow) and W (v-flow) on R^18, the reduced
// system for the pairings xi_i = <B frame, frame>, and the conserved
// quantities M, E, A.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "sinh_torus/core.hpp"

namespace sinh_torus {

/// A tangent vector at a FrameState, same component layout.
struct Tangent18 {
  Vector4 dp;
  Vector4 dv1;
  Vector4 dv2;
  Vector4 dnu;
  double dr = 0.0;
  double ds = 0.0;

  constexpr FrameState::Flat flat() const {
    return FrameState{dp, dv1, dv2, dnu, dr, ds}.flat();
  }
};

// u-equations, term by term.
inline Tangent18 field_Z(const FrameState& x, const SystemParams& params) {
  const double c = std::cos(params.theta);
  const double sn = std::sin(params.theta);
  const double ep = std::exp(x.r);
  const double em = std::exp(-x.r);
  const SkewMatrix4& b = params.b;
  Tangent18 t;
  // dp/du = e^{-r}(cos V1 + sin V2)
  t.dp = em * (c * x.v1 + sn * x.v2);
  // dV1/du = s V2 + cos (e^{r} nu - e^{-r} p)
  t.dv1 = x.s * x.v2 + c * (ep * x.nu - em * x.p);
  // dV2/du = -s V1 - sin (e^{r} nu + e^{-r} p)
  t.dv2 = -x.s * x.v1 - sn * (ep * x.nu + em * x.p);
  // dnu/du = e^{r}(-cos V1 + sin V2)
  t.dnu = ep * (-c * x.v1 + sn * x.v2);
  // dr/du = <Bp, nu>
  t.dr = b.pairing(x.p, x.nu);
  // ds/du = cos <BV2, e^{-r} nu - e^{r} p> - sin <BV1, e^{-r} nu + e^{r} p>
  t.ds = c * b.pairing(x.v2, em * x.nu - ep * x.p) - sn * b.pairing(x.v1, em * x.nu + ep * x.p);
  return t;
}

// v-equations.
inline Tangent18 field_W(const FrameState& x, const SystemParams& params) {
  const double c = std::cos(params.theta);
  const double sn = std::sin(params.theta);
  const double ep = std::exp(x.r);
  const double em = std::exp(-x.r);
  const SkewMatrix4& b = params.b;
  const double bpn = b.pairing(x.p, x.nu);
  Tangent18 t;
  // dp/dv = e^{-r}(cos V2 - sin V1)
  t.dp = em * (c * x.v2 - sn * x.v1);
  // dV1/dv = -<Bp,nu> V2 + sin (-e^{r} nu + e^{-r} p)
  t.dv1 = -bpn * x.v2 + sn * (-ep * x.nu + em * x.p);
  // dV2/dv = <Bp,nu> V1 - cos (e^{r} nu + e^{-r} p)
  t.dv2 = bpn * x.v1 - c * (ep * x.nu + em * x.p);
  // dnu/dv = e^{r}(sin V1 + cos V2)
  t.dnu = ep * (sn * x.v1 + c * x.v2);
  // dr/dv = s
  t.dr = x.s;
  // ds/dv = e^{-2r} - e^{2r} - sin <BV2, e^{-r} nu - e^{r} p> - cos <BV1, e^{-r} nu + e^{r} p>
  t.ds = em * em - ep * ep - sn * b.pairing(x.v2, em * x.nu - ep * x.p) -
         c * b.pairing(x.v1, em * x.nu + ep * x.p);
  return t;
}

enum class Field { Z, W };

inline Tangent18 evaluate_field(Field f, const FrameState& x, const SystemParams& params) {
  return f == Field::Z ? field_Z(x, params) : field_W(x, params);
}

/// The six pairings xi_1..xi_6:
/// <Bp,nu>, <BV1,p>, <BV2,p>, <BV1,V2>, <BV1,nu>, <BV2,nu>.
using XiValues = std::array<double, 6>;

inline XiValues xi_of(const FrameState& x, const SkewMatrix4& b) {
  return {b.pairing(x.p, x.nu),  b.pairing(x.v1, x.p),  b.pairing(x.v2, x.p),
          b.pairing(x.v1, x.v2), b.pairing(x.v1, x.nu), b.pairing(x.v2, x.nu)};
}

/// State of the reduced system: (xi, r, s) and optionally the pairings
/// xi~ with a second matrix B~.
struct XiState {
  XiValues xi{};
  double r = 0.0;
  double s = 0.0;
  std::optional<XiValues> xi_tilde;
};

inline XiState xi_state_of(const FrameState& x, const SkewMatrix4& b,
                           const std::optional<SkewMatrix4>& b_tilde = std::nullopt) {
  XiState out{xi_of(x, b), x.r, x.s, std::nullopt};
  if (b_tilde) out.xi_tilde = xi_of(x, *b_tilde);
  return out;
}

namespace detail {

// u-derivative of one block of pairings; shared by xi and xi~.
inline XiValues xi_block_u(const XiValues& k, double s, double c, double sn, double ep,
                           double em) {
  return {ep * (c * k[1] - sn * k[2]) + em * (c * k[4] + sn * k[5]),
          s * k[2] - ep * c * k[0] + em * sn * k[3],
          -s * k[1] + ep * sn * k[0] - em * c * k[3],
          ep * (-sn * k[4] - c * k[5]) + em * (c * k[2] - sn * k[1]),
          s * k[5] + ep * sn * k[3] - em * c * k[0],
          -s * k[4] + ep * c * k[3] - em * sn * k[0]};
}

// v-derivative of one block; the quadratic terms always carry xi_1 of B.
inline XiValues xi_block_v(const XiValues& k, double xi1, double c, double sn, double ep,
                           double em) {
  return {-ep * (c * k[2] + sn * k[1]) + em * (c * k[5] - sn * k[4]),
          -xi1 * k[2] + ep * sn * k[0] + em * c * k[3],
          xi1 * k[1] + ep * c * k[0] + em * sn * k[3],
          ep * (sn * k[5] - c * k[4]) + em * (-c * k[1] - sn * k[2]),
          -xi1 * k[5] + ep * c * k[3] + em * sn * k[0],
          xi1 * k[4] - ep * sn * k[3] - em * c * k[0]};
}

}  // namespace detail

/// Right-hand side of the reduced system along u. The result is a tangent
/// with the same shape as the input.
inline XiState xi_field_u(const XiState& x, double theta) {
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  const double ep = std::exp(x.r);
  const double em = std::exp(-x.r);
  const auto& k = x.xi;
  XiState t;
  t.xi = detail::xi_block_u(k, x.s, c, sn, ep, em);
  t.r = k[0];
  t.s = ep * (-c * k[2] - sn * k[1]) + em * (c * k[5] - sn * k[4]);
  if (x.xi_tilde) t.xi_tilde = detail::xi_block_u(*x.xi_tilde, x.s, c, sn, ep, em);
  return t;
}

inline XiState xi_field_v(const XiState& x, double theta) {
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  const double ep = std::exp(x.r);
  const double em = std::exp(-x.r);
  const auto& k = x.xi;
  XiState t;
  t.xi = detail::xi_block_v(k, k[0], c, sn, ep, em);
  t.r = x.s;
  t.s = -2.0 * std::sinh(2.0 * x.r) + ep * (sn * k[2] - c * k[1]) + em * (-sn * k[5] - c * k[4]);
  if (x.xi_tilde) t.xi_tilde = detail::xi_block_v(*x.xi_tilde, k[0], c, sn, ep, em);
  return t;
}

struct FirstIntegrals {
  double m = 0.0;  ///< half the sum of squared pairings
  double e = 0.0;  ///< half the summed squared norms of the frame vectors
  double a = 0.0;
};

inline FirstIntegrals first_integrals(const FrameState& x, const SystemParams& params) {
  const XiValues k = xi_of(x, params.b);
  const double c = std::cos(params.theta);
  const double sn = std::sin(params.theta);
  FirstIntegrals fi;
  for (double v : k) fi.m += 0.5 * v * v;
  fi.e = 0.5 * (dot(x.p, x.p) + dot(x.v1, x.v1) + dot(x.v2, x.v2) + dot(x.nu, x.nu));
  fi.a = std::exp(x.r) * (c * k[1] - sn * k[2]) - std::exp(-x.r) * (c * k[4] + sn * k[5]) +
         0.5 * x.s * x.s + std::cosh(2.0 * x.r) - 0.5 * k[0] * k[0];
  return fi;
}

/// Right-hand side of the trapping inequality cosh(2R) > rhs(R).
///
/// Two estimates are combined. The first is the classical one,
/// A + 4M cosh R + M^2/2. It under-estimates the xi_1^2/2 term when M < 2 and
/// the cross terms when M < 1/2, and real trajectories with small M cross it.
/// The second, A + M + 2 sqrt(2M) cosh R, follows from xi_1^2/2 <= M and
/// |cos xi_2 - sin xi_3|, |cos xi_5 + sin xi_6| <= sqrt(2M). Taking the larger
/// keeps R a true trap in every regime.
inline double r_bound_rhs(double m, double a, double big_r) {
  const double ch = std::cosh(big_r);
  const double classical = a + 4.0 * m * ch + 0.5 * m * m;
  const double rigorous = a + m + 2.0 * std::sqrt(2.0 * m) * ch;
  return std::max(classical, rigorous);
}

/// Smallest R (plus a 1e-6 margin) with cosh(2R) > rhs(R) and R > |r0|.
/// Every solution with first integrals (M, A) through r0 stays in |r| < R.
inline double r_bound(double m, double a, double r0) {
  if (!(m >= 0.0)) throw std::invalid_argument("r_bound: M must be non-negative");
  constexpr double kMargin = 1e-6;
  auto g = [&](double big_r) { return std::cosh(2.0 * big_r) - r_bound_rhs(m, a, big_r); };
  double lo = std::max(std::abs(r0), 1e-6);
  double hi = 50.0;
  if (g(lo) > 0.0) return lo + kMargin;
  if (!(g(hi) > 0.0)) throw std::domain_error("r_bound: no root below R = 50");
  // g is negative at lo and positive at hi; bisect to the last sign change.
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return hi + kMargin;
}

/// Lie bracket [Z, W] = (DW)Z - (DZ)W with directional derivatives by central
/// differences of step eps. Returns the max-norm over the 18 components.
inline double bracket_defect(const FrameState& x, const SystemParams& params, double eps = 1e-5) {
  using Flat = FrameState::Flat;
  auto shifted = [&](const Flat& dir, double h) {
    Flat y = x.flat();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h * dir[i];
    return FrameState::from_flat(y);
  };
  auto directional = [&](Field f, const Flat& dir) {
    const Flat plus = evaluate_field(f, shifted(dir, eps), params).flat();
    const Flat minus = evaluate_field(f, shifted(dir, -eps), params).flat();
    Flat d{};
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (plus[i] - minus[i]) / (2.0 * eps);
    return d;
  };
  const Flat z = field_Z(x, params).flat();
  const Flat w = field_W(x, params).flat();
  const Flat dw_z = directional(Field::W, z);
  const Flat dz_w = directional(Field::Z, w);
  double m = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) m = std::max(m, std::abs(dw_z[i] - dz_w[i]));
  return m;
}

}  // namespace sinh_torus

#pragma once

// Closed-form solutions built from the Lawson-Hsiang tori
//   (cos(mx) cos y, sin(mx) cos y, cos(kx) sin y, sin(kx) sin y)
// in the conformal coordinates (u, v) of the integrable system.
//
// The frame as usually written down, (rho, V1, V2, nu), is negatively
// oriented. Every state returned here is reflected in the fourth ambient
// coordinate, which makes det[p|V1|V2|nu] = +1 and leaves the coupling matrix
// unchanged (it only touches the e1 e2 plane). lh_state_unreflected() keeps the
// unreflected frame for reference.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sinh_torus/core.hpp"
#include "sinh_torus/dynamics.hpp"
#include "sinh_torus/quadrature.hpp"

namespace sinh_torus {

/// Which of the two coordinate assignments is used: u measured along y with
/// v = sqrt(mk) x, or the roles of u and v exchanged.
enum class LHVariant { UAlongY, VAlongY };

struct LHParams {
  double m = 1.0;
  double k = 1.0;
  LHVariant variant = LHVariant::UAlongY;

  void validate() const {
    if (!(m > 0.0 && k > 0.0) || !std::isfinite(m) || !std::isfinite(k))
      throw std::invalid_argument("Lawson-Hsiang parameters m, k must be positive");
  }
};

inline constexpr double kLHTheta = -kPi / 4.0;

/// m^2 cos^2 y + k^2 sin^2 y
inline double lh_denominator(double m, double k, double y) {
  const double c = std::cos(y);
  const double s = std::sin(y);
  return m * m * c * c + k * k * s * s;
}

/// du/dy along the y-direction.
inline double lh_speed(double m, double k, double y) {
  return std::sqrt(m * k / lh_denominator(m, k, y));
}

/// u(y) = int_0^y sqrt(mk / (m^2 cos^2 t + k^2 sin^2 t)) dt
inline double lh_u_of_y(double m, double k, double y) {
  return integrate_adaptive([&](double t) { return lh_speed(m, k, t); }, 0.0, y, 1e-12);
}

inline SkewMatrix4 lh_B(double m, double k, LHVariant variant = LHVariant::UAlongY) {
  LHParams{m, k, variant}.validate();
  if (variant == LHVariant::VAlongY) return SkewMatrix4{};
  return skew_from_params((m * m - k * k) / (k * std::sqrt(m * k)), 0, 0, 0, 0, 0);
}

inline SystemParams lh_system(const LHParams& p) {
  return SystemParams{lh_B(p.m, p.k, p.variant), kLHTheta};
}

/// The frame exactly as the closed form writes it (determinant -1).
inline FrameState lh_state_unreflected(const LHParams& params, double x, double y) {
  params.validate();
  const double m = params.m;
  const double k = params.k;
  const double cmx = std::cos(m * x), smx = std::sin(m * x);
  const double ckx = std::cos(k * x), skx = std::sin(k * x);
  const double cy = std::cos(y), sy = std::sin(y);
  const double d = lh_denominator(m, k, y);
  const double root2 = std::sqrt(2.0);

  const Vector4 rho{{cmx * cy, smx * cy, ckx * sy, skx * sy}};
  const Vector4 along{{-cmx * sy, -smx * sy, ckx * cy, skx * cy}};
  const Vector4 across{{-m * smx * cy, m * cmx * cy, -k * skx * sy, k * ckx * sy}};

  FrameState st;
  st.p = rho;
  st.v1 = (1.0 / root2) * along + (1.0 / std::sqrt(2.0 * d)) * across;
  st.v2 = (-1.0 / root2) * along + (1.0 / std::sqrt(2.0 * d)) * across;
  st.nu = (1.0 / std::sqrt(d)) * Vector4{{k * smx * sy, -k * cmx * sy, -m * skx * cy, m * ckx * cy}};
  st.r = 0.5 * std::log(m * k / d);
  st.s = params.variant == LHVariant::UAlongY
             ? 0.0
             : (m * m - k * k) / std::sqrt(m * k * d) * sy * cy;
  return st;
}

/// Positively oriented closed-form state at torus parameters (x, y).
inline FrameState lh_state(const LHParams& params, double x, double y) {
  FrameState st = lh_state_unreflected(params, x, y);
  for (Vector4* v : {&st.p, &st.v1, &st.v2, &st.nu}) (*v)[3] = -(*v)[3];
  return st;
}

/// Conformal factor along y for the u-along-y variant, with its exact first
/// and second u-derivatives.
struct LHConformalFactor {
  double r = 0.0;
  double r_u = 0.0;
  double r_uu = 0.0;
};

inline LHConformalFactor lh_conformal_factor(double m, double k, double y) {
  const double d = lh_denominator(m, k, y);
  const double c = std::cos(y), s = std::sin(y);
  const double d1 = 2.0 * (k * k - m * m) * s * c;
  const double d2 = 2.0 * (k * k - m * m) * (c * c - s * s);
  return {0.5 * std::log(m * k / d), -d1 / (2.0 * std::sqrt(m * k * d)),
          -(d2 - d1 * d1 / (2.0 * d)) / (2.0 * m * k)};
}

/// The map y -> u and its inverse. The inverse starts from a tabulated cubic
/// Hermite interpolant over one period of the integrand and is polished by
/// Newton steps on the quadrature.
class LHCoordinates {
 public:
  explicit LHCoordinates(double m, double k, std::size_t table_size = 64) : m_(m), k_(k) {
    LHParams{m, k}.validate();
    ys_.resize(table_size + 1);
    us_.resize(table_size + 1);
    for (std::size_t i = 0; i <= table_size; ++i) {
      ys_[i] = kPi * static_cast<double>(i) / static_cast<double>(table_size);
      us_[i] = i == 0 ? 0.0 : us_[i - 1] + lh_u_of_y(m, k, ys_[i]) - lh_u_of_y(m, k, ys_[i - 1]);
    }
    half_period_ = us_.back();
  }

  /// u gained over y in [0, pi]; the integrand has period pi.
  double half_period() const { return half_period_; }

  double u_of_y(double y) const { return lh_u_of_y(m_, k_, y); }

  double y_of_u(double u) const {
    const double n = std::floor(u / half_period_);
    const double rem = u - n * half_period_;
    double y = interpolate(rem);
    for (int it = 0; it < 8; ++it) {
      const double f = lh_u_of_y(m_, k_, y) - rem;
      const double step = f / lh_speed(m_, k_, y);
      y -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return n * kPi + y;
  }

 private:
  double interpolate(double u) const {
    const auto it = std::upper_bound(us_.begin(), us_.end(), u);
    std::size_t i = it == us_.begin() ? 0 : static_cast<std::size_t>(it - us_.begin()) - 1;
    i = std::min(i, us_.size() - 2);
    const double h = us_[i + 1] - us_[i];
    const double t = (u - us_[i]) / h;
    const double m0 = h / lh_speed(m_, k_, ys_[i]);
    const double m1 = h / lh_speed(m_, k_, ys_[i + 1]);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ys_[i] + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * ys_[i + 1] + (t3 - t2) * m1;
  }

  double m_;
  double k_;
  double half_period_ = 0.0;
  std::vector<double> ys_;
  std::vector<double> us_;
};

/// Closed-form state at conformal coordinates (u, v).
inline FrameState lh_state_at(const LHParams& params, const LHCoordinates& coords, double u,
                              double v) {
  const double root_mk = std::sqrt(params.m * params.k);
  if (params.variant == LHVariant::UAlongY) return lh_state(params, v / root_mk, coords.y_of_u(u));
  return lh_state(params, u / root_mk, coords.y_of_u(v));
}

/// (u period, v period) of the closed form; x and y both have period 2 pi.
inline std::pair<double, double> lh_periods(double m, double k,
                                            LHVariant variant = LHVariant::UAlongY) {
  LHParams{m, k, variant}.validate();
  const double along_y = lh_u_of_y(m, k, 2.0 * kPi);
  const double along_x = 2.0 * kPi * std::sqrt(m * k);
  if (variant == LHVariant::UAlongY) return {along_y, along_x};
  return {along_x, along_y};
}

/// u- and v-derivatives of the closed form at (x, y), by Richardson-extrapolated
/// central differences on the torus parameters.
inline std::pair<FrameState::Flat, FrameState::Flat> lh_derivatives(const LHParams& params,
                                                                    double x, double y,
                                                                    double h = 1e-5) {
  using Flat = FrameState::Flat;
  auto central = [&](double hx, double hy, double step) {
    const Flat a = lh_state(params, x + hx, y + hy).flat();
    const Flat b = lh_state(params, x - hx, y - hy).flat();
    Flat d;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (a[i] - b[i]) / (2.0 * step);
    return d;
  };
  auto richardson = [&](bool along_x) {
    const Flat coarse = along_x ? central(h, 0, h) : central(0, h, h);
    const Flat fine = along_x ? central(h / 2, 0, h / 2) : central(0, h / 2, h / 2);
    Flat d;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    return d;
  };
  const Flat dx = richardson(true);
  const Flat dy = richardson(false);
  const double root_mk = std::sqrt(params.m * params.k);
  const double dy_scale = 1.0 / lh_speed(params.m, params.k, y);  // dy/d(u or v)
  Flat along_y, along_x;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    along_y[i] = dy[i] * dy_scale;
    along_x[i] = dx[i] / root_mk;
  }
  if (params.variant == LHVariant::UAlongY) return {along_y, along_x};
  return {along_x, along_y};
}

/// Largest deviation, over `sample_count` pseudo-random (x, y), between the
/// closed-form derivatives and the vector fields Z, W at (lh_B, theta).
/// theta defaults to -pi/4; overriding it is how a mismatch is injected.
inline double lh_residual(const LHParams& params, std::size_t sample_count,
                          std::optional<double> theta = std::nullopt,
                          std::uint64_t seed = 20240601) {
  if (sample_count < 1) throw std::invalid_argument("lh_residual: need at least one sample");
  SystemParams sys = lh_system(params);
  if (theta) sys.theta = *theta;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  double worst = 0.0;
  for (std::size_t n = 0; n < sample_count; ++n) {
    const double x = angle(rng);
    const double y = angle(rng);
    const FrameState st = lh_state(params, x, y);
    const auto [du, dv] = lh_derivatives(params, x, y);
    const auto z = field_Z(st, sys).flat();
    const auto w = field_W(st, sys).flat();
    for (std::size_t i = 0; i < z.size(); ++i)
      worst = std::max({worst, std::abs(du[i] - z[i]), std::abs(dv[i] - w[i])});
  }
  return worst;
}

}  // namespace sinh_torus

#pragma once

// Jacobi fields of the minimal immersion: the Killing functions f_B, the
// torus functions h_theta, the stability operator J, and the criterion for
// s to vanish identically.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinh_torus/core.hpp"
#include "sinh_torus/dynamics.hpp"
#include "sinh_torus/integrate.hpp"

namespace sinh_torus {

/// One value per grid node, same indexing as SurfaceGrid::states.
using NodeField = std::vector<double>;

/// <B~ p, nu> at every node.
inline NodeField f_B_field(const SurfaceGrid& g, const SkewMatrix4& b_tilde) {
  NodeField f(g.states.size());
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = b_tilde.pairing(g.states[n].p, g.states[n].nu);
  return f;
}

/// h at angle theta' on a solution grid of angle theta. h_theta = 2 r_u and
/// h_{theta+pi/2} = 2 r_v = 2s; other angles are the rotation combination.
inline NodeField h_theta_field(const SurfaceGrid& g, double theta_prime) {
  const double theta = g.params.theta;
  const double c = std::cos(theta_prime - theta);
  const double sn = std::sin(theta_prime - theta);
  NodeField h(g.states.size());
  for (std::size_t n = 0; n < h.size(); ++n) {
    const FrameState& x = g.states[n];
    const double two_r_u = 2.0 * g.params.b.pairing(x.p, x.nu);
    const double two_s = 2.0 * x.s;
    if (theta_prime == theta)
      h[n] = two_r_u;
    else if (theta_prime == theta + kPi / 2.0)
      h[n] = two_s;
    else
      h[n] = c * two_r_u + sn * two_s;
  }
  return h;
}

/// Same combination with r_u, r_v by central differences of r. Boundary
/// nodes are NaN.
inline NodeField h_theta_field_fd(const SurfaceGrid& g, double theta_prime) {
  const double c = std::cos(theta_prime - g.params.theta);
  const double sn = std::sin(theta_prime - g.params.theta);
  NodeField h(g.states.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < g.nu; ++i)
    for (std::size_t j = 1; j + 1 < g.nv; ++j) {
      const double r_u = (g.at(i + 1, j).r - g.at(i - 1, j).r) / (2.0 * g.du);
      const double r_v = (g.at(i, j + 1).r - g.at(i, j - 1).r) / (2.0 * g.dv);
      h[i * g.nv + j] = 2.0 * (c * r_u + sn * r_v);
    }
  return h;
}

/// max over interior nodes of |-a lap f - 2 a^2 f - 2 f| with a = e^{2r} and
/// the 5-point Laplacian in (u, v).
inline double stability_residual(const SurfaceGrid& g, const NodeField& f) {
  if (g.nu < 3 || g.nv < 3)
    throw std::invalid_argument("stability_residual: grid needs at least 3 nodes per axis");
  if (f.size() != g.states.size())
    throw std::invalid_argument("stability_residual: field size does not match grid");
  auto at = [&](std::size_t i, std::size_t j) { return f[i * g.nv + j]; };
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < g.nu; ++i)
    for (std::size_t j = 1; j + 1 < g.nv; ++j) {
      const double lap = (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (g.du * g.du) +
                         (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (g.dv * g.dv);
      const double a = std::exp(2.0 * g.at(i, j).r);
      worst = std::max(worst, std::abs(-a * lap - 2.0 * a * a * at(i, j) - 2.0 * at(i, j)));
    }
  return worst;
}

/// B^1_theta + lambda B^2_theta: the matrices for which s vanishes along the
/// solution through (e1, e2, e3, e4, r0, 0).
inline SkewMatrix4 s_vanishing_family(double theta, double r0, double lambda) {
  const double c = std::cos(theta), sn = std::sin(theta);
  const double ep = std::exp(r0), em = std::exp(-r0);
  const SkewMatrix4 b1 = skew_from_params(-ep * c, ep * sn, 0.0, 0.0, -em * c, -em * sn);
  const SkewMatrix4 b2 = skew_from_params(em * sn, -em * c, 0.0, 0.0, ep * sn, ep * c);
  return b1 + lambda * b2;
}

/// Generators of isometries preserving the Clifford torus through e1 with
/// normal e4: b3 = b4 = 0, b5 = b1, b6 = -b2.
inline SkewMatrix4 clifford_family(double b1, double b2) {
  return skew_from_params(b1, b2, 0.0, 0.0, b1, -b2);
}

enum class SCondition { B3, B4, A, B, C };

inline const char* condition_name(SCondition c) {
  switch (c) {
    case SCondition::B3: return "b3";
    case SCondition::B4: return "b4";
    case SCondition::A: return "a";
    case SCondition::B: return "b";
    case SCondition::C: return "c";
  }
  return "?";
}

inline constexpr std::array<SCondition, 5> kAllSConditions{SCondition::B3, SCondition::B4,
                                                           SCondition::A, SCondition::B,
                                                           SCondition::C};

struct SConditionReport {
  /// |xi1|, |xi4| and the three derivative conditions, indexed by SCondition.
  std::array<double, 5> defect{};
  /// Left-hand sides of (a), (b), (c) written in the entries of B in the
  /// seed frame; (a) is compared against 2 sinh 2r0, the others against 0.
  std::array<double, 3> lhs{};
  double tolerance = 0.0;

  double operator[](SCondition c) const { return defect[static_cast<std::size_t>(c)]; }
  bool pass() const {
    return std::all_of(defect.begin(), defect.end(), [&](double d) { return d < tolerance; });
  }
  /// The condition with the largest defect.
  SCondition worst() const {
    return kAllSConditions[static_cast<std::size_t>(
        std::max_element(defect.begin(), defect.end()) - defect.begin())];
  }
};

/// Tests whether s vanishes identically along the solution through
/// (frame, r0, s = 0). With pairings xi at the seed the conditions are
/// xi1 = 0, xi4 = 0, and ds/dv = ds/du = dxi4/dv = 0 from the reduced system.
inline SConditionReport check_s_conditions(const SkewMatrix4& b, double theta, double r0,
                                           double tol = 1e-8,
                                           const Matrix4& frame = Matrix4::identity()) {
  const FrameState seed = FrameState::from_matrix(frame, r0, 0.0);
  const XiState x = xi_state_of(seed, b);
  const XiState du = xi_field_u(x, theta);
  const XiState dv = xi_field_v(x, theta);
  // In the seed frame xi2 = b1, xi3 = b2, xi5 = -b5, xi6 = -b6.
  const SkewMatrix4 local = b.conjugated(frame);
  const double c = std::cos(theta), sn = std::sin(theta);
  const double ep = std::exp(r0), em = std::exp(-r0);
  SConditionReport rep;
  rep.tolerance = tol;
  rep.lhs = {-ep * c * local.b(1) + ep * sn * local.b(2) + em * (c * local.b(5) + sn * local.b(6)),
             -ep * (sn * local.b(1) + c * local.b(2)) + em * (sn * local.b(5) - c * local.b(6)),
             -em * (c * local.b(1) + sn * local.b(2)) + ep * (c * local.b(5) - sn * local.b(6))};
  rep.defect = {std::abs(x.xi[0]), std::abs(x.xi[3]), std::abs(dv.s), std::abs(du.s),
                std::abs(dv.xi[3])};
  return rep;
}

/// A perturbation of B (in the identity frame) that moves exactly one of the
/// five conditions by `magnitude` and leaves the other four untouched.
inline SkewMatrix4 condition_perturbation(SCondition which, double theta, double r0,
                                          double magnitude) {
  if (which == SCondition::B3) return skew_from_params(0, 0, magnitude, 0, 0, 0);
  if (which == SCondition::B4) return skew_from_params(0, 0, 0, magnitude, 0, 0);
  // Rows: the linear forms of (a), (b), (c) on (b1, b2, b5, b6).
  const double c = std::cos(theta), sn = std::sin(theta);
  const double ep = std::exp(r0), em = std::exp(-r0);
  const std::array<std::array<double, 4>, 3> l{{{-ep * c, ep * sn, em * c, em * sn},
                                                {-ep * sn, -ep * c, em * sn, -em * c},
                                                {-em * c, -em * sn, ep * c, -ep * sn}}};
  // Minimum-norm solution of L d = magnitude e_k: d = L^T (L L^T)^{-1} e_k.
  std::array<std::array<double, 3>, 3> g{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 4; ++k) g[i][j] += l[i][k] * l[j][k];
  const std::size_t row = which == SCondition::A ? 0 : (which == SCondition::B ? 1 : 2);
  // Solve g y = e_row by Cramer's rule.
  auto det3 = [](const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double dg = det3(g);
  std::array<double, 3> y{};
  for (std::size_t col = 0; col < 3; ++col) {
    auto m = g;
    for (std::size_t i = 0; i < 3; ++i) m[i][col] = i == row ? 1.0 : 0.0;
    y[col] = det3(m) / dg;
  }
  std::array<double, 4> d{};
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < 3; ++i) d[k] += magnitude * l[i][k] * y[i];
  return skew_from_params(d[0], d[1], 0.0, 0.0, d[2], d[3]);
}

/// Raised when the seed does not satisfy xi1 = s = xi4 = 0.
class SeedConditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// max |r(u,v) - r(-u,-v)| on a grid symmetric about the origin, for a seed
/// with xi1 = s = xi4 = 0.
inline double symmetry_defect(const SurfaceGrid& g, double seed_tol = 1e-10) {
  const XiValues xi = xi_of(g.seed, g.params.b);
  auto check = [&](const char* name, double value) {
    if (!(std::abs(value) <= seed_tol))
      throw SeedConditionError(std::string("symmetry_defect: seed has ") + name + " = " +
                               std::to_string(value) + ", expected 0");
  };
  check("xi1", xi[0]);
  check("s", g.seed.s);
  check("xi4", xi[3]);
  const double su = 1e-9 * g.du, sv = 1e-9 * g.dv;
  if (std::abs(g.u(0) + g.u(g.nu - 1)) > su || std::abs(g.v(0) + g.v(g.nv - 1)) > sv)
    throw std::invalid_argument("symmetry_defect: grid window is not symmetric about the origin");
  double worst = 0.0;
  for (std::size_t i = 0; i < g.nu; ++i)
    for (std::size_t j = 0; j < g.nv; ++j)
      worst = std::max(worst, std::abs(g.at(i, j).r - g.at(g.nu - 1 - i, g.nv - 1 - j).r));
  return worst;
}

inline double max_abs_s(const SurfaceGrid& g) {
  double m = 0.0;
  for (const FrameState& x : g.states) m = std::max(m, std::abs(x.s));
  return m;
}

}  // namespace sinh_torus

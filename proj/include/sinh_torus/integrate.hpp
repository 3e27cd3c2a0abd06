#pragma once

// Fixed-step RK4 flows of Z and W and the two-parameter solution
// phi(u, v) = Theta_Z(u, Theta_W(v, x0)) sampled on rectangular grids.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sinh_torus/core.hpp"
#include "sinh_torus/dynamics.hpp"

namespace sinh_torus {

struct IntegratorOptions {
  double step = 1e-3;
  double max_arc = 100.0;
  /// Worker threads for independent row sweeps; 0 picks hardware concurrency.
  /// Results do not depend on this value.
  unsigned threads = 0;

  void validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step must be > 0");
    if (!(max_arc > 0.0)) throw std::invalid_argument("max_arc must be > 0");
  }
};

/// Raised when a non-finite state shows up. Solutions are globally bounded,
/// so this points at a bug or a corrupted input rather than a blow-up.
class IntegrationDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline FrameState::Flat rk4_step(Field f, const FrameState::Flat& x, double h,
                                 const SystemParams& params) {
  using Flat = FrameState::Flat;
  auto rhs = [&](const Flat& y) { return evaluate_field(f, FrameState::from_flat(y), params).flat(); };
  auto axpy = [](const Flat& y, double a, const Flat& k) {
    Flat out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + a * k[i];
    return out;
  };
  const Flat k1 = rhs(x);
  const Flat k2 = rhs(axpy(x, 0.5 * h, k1));
  const Flat k3 = rhs(axpy(x, 0.5 * h, k2));
  const Flat k4 = rhs(axpy(x, h, k3));
  Flat out;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace detail

/// Theta_f(t, x): classic RK4 with step opts.step; the last step is shortened
/// so the flow lands exactly on t.
inline FrameState flow(Field f, double t, const FrameState& x, const SystemParams& params,
                       const IntegratorOptions& opts = {}) {
  opts.validate();
  if (!std::isfinite(t)) throw std::invalid_argument("flow: non-finite time");
  if (std::abs(t) > opts.max_arc)
    throw std::invalid_argument("flow: |t| = " + std::to_string(std::abs(t)) +
                                " exceeds max_arc");
  if (t == 0.0) return x;
  const double span = std::abs(t);
  const double dir = t > 0.0 ? 1.0 : -1.0;
  const auto n = static_cast<long>(std::max(1.0, std::ceil(span / opts.step - 1e-9)));
  FrameState::Flat y = x.flat();
  for (long i = 0; i < n; ++i) {
    const double h = (i + 1 < n) ? opts.step : span - static_cast<double>(n - 1) * opts.step;
    y = detail::rk4_step(f, y, dir * h, params);
  }
  FrameState out = FrameState::from_flat(y);
  if (!is_finite(out))
    throw IntegrationDiverged(std::string("flow of ") + (f == Field::Z ? "Z" : "W") +
                              " produced a non-finite state");
  return out;
}

/// phi(u, v) = Theta_Z(u, Theta_W(v, x0)).
inline FrameState evaluate(double u, double v, const FrameState& x0, const SystemParams& params,
                           const IntegratorOptions& opts = {}, const Tolerances& tol = {}) {
  const double d = frame_defect(x0);
  if (!(d < tol.frame_tol))
    throw std::invalid_argument("evaluate: seed frame defect " + std::to_string(d) +
                                " exceeds frame_tol");
  return flow(Field::Z, u, flow(Field::W, v, x0, params, opts), params, opts);
}

/// Max-norm distance between the two orders of composing the flows.
inline double commutator_defect(double u, double v, const FrameState& x0,
                                const SystemParams& params, const IntegratorOptions& opts = {}) {
  const FrameState zw = flow(Field::Z, u, flow(Field::W, v, x0, params, opts), params, opts);
  const FrameState wz = flow(Field::W, v, flow(Field::Z, u, x0, params, opts), params, opts);
  return max_abs_diff(zw, wz);
}

struct GridWindow {
  double u_min = 0.0;
  double u_max = 1.0;
  double v_min = 0.0;
  double v_max = 1.0;
};

struct GridResolution {
  std::size_t nu = 2;
  std::size_t nv = 2;
};

/// Samples of phi on the lattice (u0 + i du, v0 + j dv).
struct SurfaceGrid {
  double u0 = 0.0;
  double v0 = 0.0;
  double du = 0.0;
  double dv = 0.0;
  std::size_t nu = 0;
  std::size_t nv = 0;
  std::vector<FrameState> states;  ///< index i * nv + j
  SystemParams params;
  FrameState seed;  ///< phi(0, 0)

  const FrameState& at(std::size_t i, std::size_t j) const { return states[i * nv + j]; }
  FrameState& at(std::size_t i, std::size_t j) { return states[i * nv + j]; }
  double u(std::size_t i) const { return u0 + static_cast<double>(i) * du; }
  double v(std::size_t j) const { return v0 + static_cast<double>(j) * dv; }
};

namespace detail {

// Flow x along f to every coordinate in `coords`, marching outward from 0 so
// that each node is reached from its neighbour nearer the origin.
inline std::vector<FrameState> sweep(Field f, const std::vector<double>& coords,
                                     const FrameState& x, const SystemParams& params,
                                     const IntegratorOptions& opts) {
  std::vector<FrameState> out(coords.size());
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < coords.size(); ++i) (coords[i] >= 0.0 ? pos : neg).push_back(i);
  std::sort(pos.begin(), pos.end(), [&](auto a, auto b) { return coords[a] < coords[b]; });
  std::sort(neg.begin(), neg.end(), [&](auto a, auto b) { return coords[a] > coords[b]; });
  for (const auto* side : {&pos, &neg}) {
    FrameState cur = x;
    double at = 0.0;
    for (std::size_t idx : *side) {
      cur = flow(f, coords[idx] - at, cur, params, opts);
      at = coords[idx];
      out[idx] = cur;
    }
  }
  return out;
}

}  // namespace detail

/// Column seeds Theta_W(v_j, x0) first, then an independent Theta_Z sweep per
/// column. Deterministic: the thread count does not change a single bit.
inline SurfaceGrid make_grid(const GridWindow& window, const GridResolution& res,
                             const FrameState& x0, const SystemParams& params,
                             const IntegratorOptions& opts = {}) {
  opts.validate();
  if (res.nu < 2 || res.nv < 2) throw std::invalid_argument("make_grid: need nu, nv >= 2");
  if (!(window.u_max > window.u_min) || !(window.v_max > window.v_min))
    throw std::invalid_argument("make_grid: empty window");

  SurfaceGrid g;
  g.u0 = window.u_min;
  g.v0 = window.v_min;
  g.du = (window.u_max - window.u_min) / static_cast<double>(res.nu - 1);
  g.dv = (window.v_max - window.v_min) / static_cast<double>(res.nv - 1);
  g.nu = res.nu;
  g.nv = res.nv;
  g.params = params;
  g.seed = x0;
  g.states.resize(res.nu * res.nv);

  std::vector<double> us(res.nu), vs(res.nv);
  // Coordinates within rounding of 0 are snapped so the origin node is x0.
  for (std::size_t i = 0; i < res.nu; ++i) us[i] = std::abs(g.u(i)) < 1e-9 * g.du ? 0.0 : g.u(i);
  for (std::size_t j = 0; j < res.nv; ++j) vs[j] = std::abs(g.v(j)) < 1e-9 * g.dv ? 0.0 : g.v(j);

  const std::vector<FrameState> column_seeds = detail::sweep(Field::W, vs, x0, params, opts);

  auto fill_column = [&](std::size_t j) {
    const auto row = detail::sweep(Field::Z, us, column_seeds[j], params, opts);
    for (std::size_t i = 0; i < res.nu; ++i) g.at(i, j) = row[i];
  };

  unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, res.nv));
  if (workers <= 1) {
    for (std::size_t j = 0; j < res.nv; ++j) fill_column(j);
    return g;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t j = w; j < res.nv; j += workers) fill_column(j);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return g;
}

/// Maxima over a grid of the drift of M, E, A from their seed values, the
/// frame defect, and the largest |r| compared with the trapping radius.
struct DriftReport {
  double m = 0.0;
  double e = 0.0;
  double a = 0.0;
  double frame = 0.0;
  double max_abs_r = 0.0;
  double r_bound = 0.0;
  FirstIntegrals seed_integrals;

  bool r_bound_holds() const { return max_abs_r <= r_bound; }
};

inline DriftReport invariant_drift_report(const SurfaceGrid& grid) {
  DriftReport rep;
  rep.seed_integrals = first_integrals(grid.seed, grid.params);
  const auto& f0 = rep.seed_integrals;
  rep.r_bound = r_bound(f0.m, f0.a, grid.seed.r);
  for (const auto& x : grid.states) {
    const FirstIntegrals f = first_integrals(x, grid.params);
    rep.m = std::max(rep.m, std::abs(f.m - f0.m));
    rep.e = std::max(rep.e, std::abs(f.e - f0.e));
    rep.a = std::max(rep.a, std::abs(f.a - f0.a));
    rep.frame = std::max(rep.frame, frame_defect(x));
    rep.max_abs_r = std::max(rep.max_abs_r, std::abs(x.r));
  }
  return rep;
}

/// Nearest orthogonal frame (polar factor) for display purposes only, e.g.
/// before exporting a mesh. Integration never calls this.
inline FrameState polar_project(const FrameState& x) {
  // Newton iteration X <- (X + X^{-T}) / 2 converges to the polar factor for
  // frames near O(4); a few steps suffice for drift-sized defects.
  Matrix4 q = x.frame_matrix();
  for (int it = 0; it < 20; ++it) {
    // X^{-T} via the adjugate: inverse = adj / det.
    const double det = determinant(q);
    if (det == 0.0) break;
    Matrix4 cof;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        Matrix4 minor3;
        // 3x3 minor embedded in a 4x4 with a unit diagonal entry.
        std::size_t mi = 0;
        for (std::size_t a = 0; a < 4; ++a) {
          if (a == i) continue;
          std::size_t mj = 0;
          for (std::size_t b = 0; b < 4; ++b) {
            if (b == j) continue;
            minor3(mi, mj) = q(a, b);
            ++mj;
          }
          ++mi;
        }
        minor3(3, 3) = 1.0;
        cof(i, j) = (((i + j) % 2) ? -1.0 : 1.0) * determinant(minor3);
      }
    const Matrix4 inv_t = (1.0 / det) * cof;  // cofactor / det = inverse transposed
    const Matrix4 next = 0.5 * (q + inv_t);
    const double change = max_abs_diff(next, q);
    q = next;
    if (change < 1e-15) break;
  }
  return FrameState::from_matrix(q, x.r, x.s);
}

}  // namespace sinh_torus

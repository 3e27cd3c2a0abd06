#pragma once

// Geometry of the immersion p(u, v) read off a SurfaceGrid: conformality,
// Gauss map, principal curvatures, the sinh-Gordon residual, and OBJ export
// through stereographic projection.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinh_torus/core.hpp"
#include "sinh_torus/dynamics.hpp"
#include "sinh_torus/integrate.hpp"

namespace sinh_torus {

/// A defect measured twice: with derivatives taken from the vector fields
/// (exact up to the state) and with central differences on the grid.
struct DefectSplit {
  double field = 0.0;
  double fd = 0.0;

  double max() const { return std::max(field, fd); }
};

namespace detail {

inline void require_interior(const SurfaceGrid& g, const char* what) {
  if (g.nu < 3 || g.nv < 3)
    throw std::invalid_argument(std::string(what) + ": grid needs at least 3 nodes per axis");
}

// Central differences of a per-node vector quantity at an interior node.
template <class Get>
Vector4 diff_u(const SurfaceGrid& g, std::size_t i, std::size_t j, Get get) {
  return (1.0 / (2.0 * g.du)) * (get(g.at(i + 1, j)) - get(g.at(i - 1, j)));
}
template <class Get>
Vector4 diff_v(const SurfaceGrid& g, std::size_t i, std::size_t j, Get get) {
  return (1.0 / (2.0 * g.dv)) * (get(g.at(i, j + 1)) - get(g.at(i, j - 1)));
}

inline double conformal_mismatch(const Vector4& pu, const Vector4& pv, double r) {
  const double e = std::exp(-2.0 * r);
  return std::max({std::abs(dot(pu, pu) - e), std::abs(dot(pv, pv) - e), std::abs(dot(pu, pv))});
}

// |dnu(V1) + a V1| and |dnu(V2) - a V2| with the principal directions
// V1 = e^r (cos d/du - sin d/dv) p, V2 = e^r (sin d/du + cos d/dv) p.
inline double shape_mismatch(const FrameState& x, const Vector4& nu_u, const Vector4& nu_v,
                             double theta) {
  const double c = std::cos(theta), sn = std::sin(theta);
  const double ep = std::exp(x.r);
  const double a = ep * ep;
  const Vector4 d1 = ep * (c * nu_u - sn * nu_v) + a * x.v1;
  const Vector4 d2 = ep * (sn * nu_u + c * nu_v) - a * x.v2;
  return std::max(norm(d1), norm(d2));
}

}  // namespace detail

/// |p_u|^2 = |p_v|^2 = e^{-2r}, <p_u, p_v> = 0.
inline DefectSplit conformality_defect(const SurfaceGrid& g) {
  detail::require_interior(g, "conformality_defect");
  DefectSplit d;
  for (std::size_t i = 0; i < g.nu; ++i)
    for (std::size_t j = 0; j < g.nv; ++j) {
      const FrameState& x = g.at(i, j);
      d.field = std::max(d.field, detail::conformal_mismatch(field_Z(x, g.params).dp,
                                                             field_W(x, g.params).dp, x.r));
    }
  auto pos = [](const FrameState& x) { return x.p; };
  for (std::size_t i = 1; i + 1 < g.nu; ++i)
    for (std::size_t j = 1; j + 1 < g.nv; ++j)
      d.fd = std::max(d.fd, detail::conformal_mismatch(detail::diff_u(g, i, j, pos),
                                                       detail::diff_v(g, i, j, pos), g.at(i, j).r));
  return d;
}

/// Shape operator check: V1, V2 are principal with curvatures -a and +a.
/// The field part is an identity in the state; only the FD part notices a
/// grid analysed with the wrong angle.
inline DefectSplit principal_curvature_defect(const SurfaceGrid& g) {
  DefectSplit d;
  for (const FrameState& x : g.states)
    d.field = std::max(d.field, detail::shape_mismatch(x, field_Z(x, g.params).dnu,
                                                       field_W(x, g.params).dnu, g.params.theta));
  if (g.nu < 3 || g.nv < 3) return d;
  auto normal = [](const FrameState& x) { return x.nu; };
  for (std::size_t i = 1; i + 1 < g.nu; ++i)
    for (std::size_t j = 1; j + 1 < g.nv; ++j)
      d.fd = std::max(d.fd, detail::shape_mismatch(g.at(i, j), detail::diff_u(g, i, j, normal),
                                                   detail::diff_v(g, i, j, normal),
                                                   g.params.theta));
  return d;
}

/// nu is a unit normal of the surface inside S^3: |p| = |nu| = 1 and nu is
/// orthogonal to p, V1, V2 and to both coordinate tangents.
inline double gauss_map_defect(const SurfaceGrid& g) {
  double d = 0.0;
  for (const FrameState& x : g.states) {
    const Vector4 pu = field_Z(x, g.params).dp;
    const Vector4 pv = field_W(x, g.params).dp;
    d = std::max({d, std::abs(norm(x.p) - 1.0), std::abs(norm(x.nu) - 1.0),
                  std::abs(dot(x.nu, x.p)), std::abs(dot(x.nu, x.v1)), std::abs(dot(x.nu, x.v2)),
                  std::abs(dot(x.nu, pu)), std::abs(dot(x.nu, pv))});
  }
  return d;
}

/// max |r_uu + r_vv + 2 sinh 2r| over interior nodes, with r_u = <Bp,nu> and
/// r_v = s taken from the state and differenced once.
inline double sinh_gordon_residual(const SurfaceGrid& g) {
  detail::require_interior(g, "sinh_gordon_residual");
  auto r_u = [&](const FrameState& x) { return g.params.b.pairing(x.p, x.nu); };
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < g.nu; ++i)
    for (std::size_t j = 1; j + 1 < g.nv; ++j) {
      const double r_uu = (r_u(g.at(i + 1, j)) - r_u(g.at(i - 1, j))) / (2.0 * g.du);
      const double r_vv = (g.at(i, j + 1).s - g.at(i, j - 1).s) / (2.0 * g.dv);
      worst = std::max(worst, std::abs(r_uu + r_vv + 2.0 * std::sinh(2.0 * g.at(i, j).r)));
    }
  return worst;
}

struct GeometryReport {
  double max_conformality_defect = 0.0;
  double max_gauss_defect = 0.0;
  double max_principal_defect = 0.0;
  double max_sinh_gordon_residual = 0.0;
  DefectSplit conformality;
  DefectSplit principal;
};

inline GeometryReport geometry_report(const SurfaceGrid& g) {
  GeometryReport r;
  r.conformality = conformality_defect(g);
  r.principal = principal_curvature_defect(g);
  r.max_conformality_defect = r.conformality.max();
  r.max_principal_defect = r.principal.max();
  r.max_gauss_defect = gauss_map_defect(g);
  r.max_sinh_gordon_residual = sinh_gordon_residual(g);
  return r;
}

/// Orthonormal basis of the hyperplane orthogonal to a unit q. The ambient
/// axis most aligned with q is dropped and the other three are
/// Gram-Schmidt'ed against q in index order.
inline std::array<Vector4, 3> orthogonal_basis(const Vector4& q) {
  std::size_t drop = 0;
  for (std::size_t k = 1; k < 4; ++k)
    if (std::abs(q[k]) > std::abs(q[drop])) drop = k;
  std::array<Vector4, 3> out;
  std::size_t n = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (k == drop) continue;
    Vector4 w = Vector4::basis(k) - dot(Vector4::basis(k), q) * q;
    for (std::size_t m = 0; m < n; ++m) w -= dot(w, out[m]) * out[m];
    out[n++] = (1.0 / norm(w)) * w;
  }
  return out;
}

/// Raised when a node sits too close to the projection pole.
class PoleProximityError : public std::runtime_error {
 public:
  PoleProximityError(std::size_t node, double distance)
      : std::runtime_error("node " + std::to_string(node) + " is within " +
                           std::to_string(distance) + " of the projection pole"),
        node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

inline constexpr double kPoleClearance = 1e-3;

/// Stereographic projection from q: x -> (x - <x,q> q) / (1 - <x,q>) in the
/// coordinates of orthogonal_basis(q).
inline std::array<double, 3> stereographic_project(const Vector4& x, const Vector4& q,
                                                   const std::array<Vector4, 3>& basis) {
  const double denom = 1.0 - dot(x, q);
  return {dot(x, basis[0]) / denom, dot(x, basis[1]) / denom, dot(x, basis[2]) / denom};
}

struct Mesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::size_t, 3>> faces;  ///< 1-based
};

/// Default pole: the antipode of the normal at the seed.
inline Vector4 default_pole(const SurfaceGrid& g) { return -g.seed.nu; }

inline Mesh build_mesh(const SurfaceGrid& g, const Vector4& pole) {
  if (std::abs(norm(pole) - 1.0) > 1e-12) throw std::invalid_argument("pole must be a unit vector");
  const auto basis = orthogonal_basis(pole);
  Mesh mesh;
  mesh.vertices.reserve(g.states.size());
  for (std::size_t n = 0; n < g.states.size(); ++n) {
    const Vector4& x = g.states[n].p;
    const double dist = norm(x - pole);
    if (dist < kPoleClearance) throw PoleProximityError(n, dist);
    mesh.vertices.push_back(stereographic_project(x, pole, basis));
  }
  auto id = [&](std::size_t i, std::size_t j) { return i * g.nv + j + 1; };
  for (std::size_t i = 0; i + 1 < g.nu; ++i)
    for (std::size_t j = 0; j + 1 < g.nv; ++j) {
      const std::size_t a = id(i, j), b = id(i, j + 1), c = id(i + 1, j + 1), d = id(i + 1, j);
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  return mesh;
}

inline void write_obj(const Mesh& mesh, std::ostream& out) {
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v[0], v[1], v[2]);
    out << buf;
  }
  for (const auto& f : mesh.faces) out << "f " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

/// Writes the OBJ file; the mesh is fully built (and the pole checked)
/// before the file is opened.
inline Mesh export_mesh(const SurfaceGrid& g, const Vector4& pole, const std::string& path) {
  Mesh mesh = build_mesh(g, pole);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_obj(mesh, out);
  if (!out) throw std::runtime_error("failed writing " + path);
  return mesh;
}

}  // namespace sinh_torus

#pragma once

// Text formats: grid snapshots (one node per line) and drift CSV.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinh_torus/core.hpp"
#include "sinh_torus/integrate.hpp"

namespace sinh_torus {

inline constexpr const char* kGridHeader =
    "# u v p0 p1 p2 p3 v10 v11 v12 v13 v20 v21 v22 v23 n0 n1 n2 n3 r s";

inline std::string format_g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Header, then "u v" and the 18 state components per node, row-major in
/// (i, j), 17 significant digits.
inline void write_grid_snapshot(const SurfaceGrid& g, std::ostream& out) {
  out << kGridHeader << '\n';
  for (std::size_t i = 0; i < g.nu; ++i)
    for (std::size_t j = 0; j < g.nv; ++j) {
      out << format_g17(g.u(i)) << ' ' << format_g17(g.v(j));
      for (double x : g.at(i, j).flat()) out << ' ' << format_g17(x);
      out << '\n';
    }
}

struct SnapshotRow {
  double u = 0.0;
  double v = 0.0;
  FrameState state;
};

inline std::vector<SnapshotRow> read_grid_snapshot(std::istream& in) {
  std::vector<SnapshotRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    SnapshotRow row;
    FrameState::Flat f{};
    ls >> row.u >> row.v;
    for (double& x : f) ls >> x;
    if (!ls) throw std::runtime_error("malformed snapshot line: " + line);
    row.state = FrameState::from_flat(f);
    rows.push_back(row);
  }
  return rows;
}

struct DriftRow {
  std::string quantity;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Rows M, E, A, frame_defect (drift against tolerance) and max_abs_r (against
/// the trapping radius, which holds when max |r| <= R).
inline std::vector<DriftRow> drift_rows(const DriftReport& d, const Tolerances& tol) {
  return {{"M", d.m, tol.integral_tol, d.m < tol.integral_tol},
          {"E", d.e, tol.integral_tol, d.e < tol.integral_tol},
          {"A", d.a, tol.integral_tol, d.a < tol.integral_tol},
          {"frame_defect", d.frame, tol.frame_tol, d.frame < tol.frame_tol},
          {"max_abs_r", d.max_abs_r, d.r_bound, d.r_bound_holds()}};
}

inline void write_drift_csv(const std::vector<DriftRow>& rows, std::ostream& out) {
  char buf[160];
  out << "quantity,max_drift,tolerance,pass\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.6e,%.6e,%s\n", r.quantity.c_str(), r.value, r.tolerance,
                  r.pass ? "true" : "false");
    out << buf;
  }
}

}  // namespace sinh_torus

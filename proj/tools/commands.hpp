#pragma once

// The five sinh-torus subcommands. Each returns the process exit code:
// 0 pass, 1 verification or geometry failure, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "sinh_torus/io.hpp"

namespace sinh_torus::cli {

inline constexpr double kAgreementTol = 1e-6;
inline constexpr double kSVanishTol = 1e-6;

/// Pass/fail table with measured values against thresholds.
class Report {
 public:
  explicit Report(std::string title) : title_(std::move(title)) {}

  void check(const std::string& name, double value, double tol, bool pass) {
    rows_.push_back({name, value, tol, pass ? "PASS" : "FAIL", true});
    ok_ = ok_ && pass;
  }
  /// value < tol
  void below(const std::string& name, double value, double tol) {
    check(name, value, tol, value < tol);
  }
  void info(const std::string& name, double value) { rows_.push_back({name, value, 0, "", false}); }
  void line(const std::string& text) { lines_.push_back(text); }
  void fail() { ok_ = false; }
  bool ok() const { return ok_; }

  void write(std::ostream& out, const RunConfig& cfg) const {
    char buf[256];
    out << "# sinh-torus " << title_ << '\n';
    out << "# config: " << cfg.source.dump() << '\n';
    std::snprintf(buf, sizeof buf,
                  "# tolerances: frame_tol=%.3g integral_tol=%.3g residual_tol=%.3g "
                  "commutator_tol=%.3g\n",
                  cfg.tol.frame_tol, cfg.tol.integral_tol, cfg.tol.residual_tol,
                  cfg.tol.commutator_tol);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "# step=%.3g window=[%.6g,%.6g]x[%.6g,%.6g] resolution=%zux%zu theta=%.17g\n",
                  cfg.integrator.step, cfg.window.u_min, cfg.window.u_max, cfg.window.v_min,
                  cfg.window.v_max, cfg.resolution.nu, cfg.resolution.nv, cfg.params.theta);
    out << buf;
    for (const auto& r : rows_) {
      if (r.checked)
        std::snprintf(buf, sizeof buf, "%-32s %14.6e  <  %12.4e  %s\n", r.name.c_str(), r.value,
                      r.tol, r.verdict.c_str());
      else
        std::snprintf(buf, sizeof buf, "%-32s %22.15g\n", r.name.c_str(), r.value);
      out << buf;
    }
    for (const auto& l : lines_) out << l << '\n';
    out << "result: " << (ok_ ? "PASS" : "FAIL") << '\n';
  }

 private:
  struct Row {
    std::string name;
    double value;
    double tol;
    std::string verdict;
    bool checked;
  };
  std::string title_;
  std::vector<Row> rows_;
  std::vector<std::string> lines_;
  bool ok_ = true;
};

namespace detail {

inline std::filesystem::path output_path(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline void emit(const Report& rep, const RunConfig& cfg, const std::string& command,
                 const std::filesystem::path& dir, std::ostream& console) {
  rep.write(console, cfg);
  const std::string name = cfg.report_file.empty() ? command + "_report.txt" : cfg.report_file;
  std::ofstream f(output_path(dir, name), std::ios::binary);
  rep.write(f, cfg);
}

inline SurfaceGrid grid_of(const RunConfig& cfg) {
  return make_grid(cfg.window, cfg.resolution, cfg.seed, cfg.params, cfg.integrator);
}

}  // namespace detail

inline int cmd_integrate(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  const SurfaceGrid g = detail::grid_of(cfg);
  {
    std::ofstream f(detail::output_path(dir, cfg.grid_file), std::ios::binary);
    write_grid_snapshot(g, f);
  }
  const auto rows = drift_rows(invariant_drift_report(g), cfg.tol);
  {
    std::ofstream f(detail::output_path(dir, cfg.drift_file), std::ios::binary);
    write_drift_csv(rows, f);
  }
  Report rep("integrate");
  for (const auto& r : rows) rep.check(r.quantity, r.value, r.tolerance, r.pass);
  rep.line("grid: " + cfg.grid_file);
  rep.line("drift: " + cfg.drift_file);
  detail::emit(rep, cfg, "integrate", dir, out);
  return rep.ok() ? 0 : 1;
}

inline int cmd_verify(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  Report rep("verify");
  const SurfaceGrid g = detail::grid_of(cfg);
  const DriftReport d = invariant_drift_report(g);
  rep.below("seed_frame_defect", frame_defect(cfg.seed), cfg.tol.frame_tol);
  rep.below("drift_M", d.m, cfg.tol.integral_tol);
  rep.below("drift_E", d.e, cfg.tol.integral_tol);
  rep.below("drift_A", d.a, cfg.tol.integral_tol);
  rep.below("frame_defect", d.frame, cfg.tol.frame_tol);
  rep.check("max_abs_r_vs_bound", d.max_abs_r, d.r_bound, d.r_bound_holds());

  double comm = 0.0;
  for (double fu : {0.5, -0.5})
    for (double fv : {0.5, -0.5}) {
      const double u = fu > 0 ? fu * cfg.window.u_max : -fu * cfg.window.u_min;
      const double v = fv > 0 ? fv * cfg.window.v_max : -fv * cfg.window.v_min;
      comm = std::max(comm, commutator_defect(u, v, cfg.seed, cfg.params, cfg.integrator));
    }
  rep.below("commutator_defect", comm, cfg.tol.commutator_tol);

  if (g.nu >= 3 && g.nv >= 3) {
    const GeometryReport geo = geometry_report(g);
    rep.below("conformality_field", geo.conformality.field, cfg.tol.frame_tol);
    rep.below("conformality_fd", geo.conformality.fd, cfg.tol.residual_tol);
    rep.below("principal_curvature_field", geo.principal.field, cfg.tol.frame_tol);
    rep.below("principal_curvature_fd", geo.principal.fd, cfg.tol.residual_tol);
    rep.below("gauss_map", geo.max_gauss_defect, cfg.tol.frame_tol);
    rep.below("sinh_gordon_residual", geo.max_sinh_gordon_residual, cfg.tol.residual_tol);
    rep.below("stability_f_B", stability_residual(g, f_B_field(g, cfg.params.b)),
              cfg.tol.residual_tol);
    rep.below("stability_h_theta", stability_residual(g, h_theta_field(g, cfg.params.theta)),
              cfg.tol.residual_tol);
    rep.below("stability_h_theta_perp",
              stability_residual(g, h_theta_field(g, cfg.params.theta + kPi / 2.0)),
              cfg.tol.residual_tol);
  } else {
    rep.line("finite-difference checks skipped: resolution below 3");
  }

  if (cfg.lh) {
    const LHParams& lh = *cfg.lh;
    rep.below("closed_form_residual", lh_residual(lh, 200, cfg.params.theta), cfg.tol.integral_tol);
    const LHCoordinates coords(lh.m, lh.k);
    double agree = 0.0;
    for (std::size_t i = 0; i < g.nu; ++i)
      for (std::size_t j = 0; j < g.nv; ++j)
        agree = std::max(agree, max_abs_diff(g.at(i, j), lh_state_at(lh, coords, g.u(i), g.v(j))));
    rep.below("closed_form_agreement", agree, kAgreementTol);
    const auto [up, vp] = lh_periods(lh.m, lh.k, lh.variant);
    rep.info("u_period", up);
    rep.info("v_period", vp);
    IntegratorOptions opts = cfg.integrator;
    opts.max_arc = std::max(opts.max_arc, std::max(up, vp) + 1.0);
    rep.below("closure_u", max_abs_diff(evaluate(up, 0, cfg.seed, cfg.params, opts, cfg.tol), cfg.seed),
              kAgreementTol);
    rep.below("closure_v", max_abs_diff(evaluate(0, vp, cfg.seed, cfg.params, opts, cfg.tol), cfg.seed),
              kAgreementTol);
  }
  detail::emit(rep, cfg, "verify", dir, out);
  return rep.ok() ? 0 : 1;
}

inline int cmd_nullity(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  Report rep("nullity");
  const SConditionReport sc = check_s_conditions(cfg.params.b, cfg.params.theta, cfg.seed.r,
                                                 cfg.tol.integral_tol, cfg.seed.frame_matrix());
  for (SCondition c : kAllSConditions)
    rep.info(std::string("condition_") + condition_name(c) + "_defect", sc[c]);
  rep.info("lhs_a_minus_2sinh2r0", sc.lhs[0] - 2.0 * std::sinh(2.0 * cfg.seed.r));
  rep.info("lhs_b", sc.lhs[1]);
  rep.info("lhs_c", sc.lhs[2]);
  const bool seed_s_zero = std::abs(cfg.seed.s) < cfg.tol.integral_tol;
  const bool vanishes = sc.pass() && seed_s_zero;

  const SurfaceGrid g = detail::grid_of(cfg);
  const double smax = max_abs_s(g);
  rep.info("max_abs_s", smax);

  char verdict[160];
  if (vanishes)
    std::snprintf(verdict, sizeof verdict, "s-vanishing: PASS");
  else if (!seed_s_zero)
    std::snprintf(verdict, sizeof verdict, "s-vanishing: FAIL (seed s = %.3g)", cfg.seed.s);
  else
    std::snprintf(verdict, sizeof verdict, "s-vanishing: FAIL (condition %s defect %.3g)",
                  condition_name(sc.worst()), sc[sc.worst()]);
  rep.line(verdict);
  char buf[96];
  std::snprintf(buf, sizeof buf, "max|s|: %.6e", smax);
  rep.line(buf);
  // The criterion predicts s == 0 on the whole window.
  if (vanishes) rep.below("s_vanishing_consistency", smax, kSVanishTol);

  try {
    rep.below("symmetry_defect", symmetry_defect(g, cfg.tol.integral_tol), cfg.tol.integral_tol);
  } catch (const std::invalid_argument& e) {
    rep.line(std::string("symmetry: skipped (") + e.what() + ")");
  }

  if (g.nu >= 3 && g.nv >= 3) {
    rep.below("stability_f_B", stability_residual(g, f_B_field(g, cfg.params.b)),
              cfg.tol.residual_tol);
    rep.below("stability_h_theta", stability_residual(g, h_theta_field(g, cfg.params.theta)),
              cfg.tol.residual_tol);
    rep.below("stability_h_theta_perp",
              stability_residual(g, h_theta_field(g, cfg.params.theta + kPi / 2.0)),
              cfg.tol.residual_tol);
  }
  detail::emit(rep, cfg, "nullity", dir, out);
  return rep.ok() ? 0 : 1;
}

inline int cmd_export(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  Report rep("export");
  const SurfaceGrid g = detail::grid_of(cfg);
  const Vector4 pole = cfg.pole ? *cfg.pole : default_pole(g);
  char buf[160];
  std::snprintf(buf, sizeof buf, "pole: %.17g %.17g %.17g %.17g", pole[0], pole[1], pole[2], pole[3]);
  rep.line(buf);
  try {
    const Mesh mesh = export_mesh(g, pole, detail::output_path(dir, cfg.mesh_file).string());
    rep.info("vertices", static_cast<double>(mesh.vertices.size()));
    rep.info("faces", static_cast<double>(mesh.faces.size()));
    rep.line("mesh: " + cfg.mesh_file);
  } catch (const PoleProximityError& e) {
    rep.line(std::string("pole proximity: ") + e.what());
    rep.fail();
  }
  detail::emit(rep, cfg, "export", dir, out);
  return rep.ok() ? 0 : 1;
}

inline int cmd_bound(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  Report rep("bound");
  const FirstIntegrals fi = first_integrals(cfg.seed, cfg.params);
  rep.info("M", fi.m);
  rep.info("A", fi.a);
  rep.info("r0", cfg.seed.r);
  const double big_r = r_bound(fi.m, fi.a, cfg.seed.r);
  rep.info("R", big_r);
  const SurfaceGrid g = detail::grid_of(cfg);
  double max_r = 0.0;
  for (const auto& x : g.states) max_r = std::max(max_r, std::abs(x.r));
  rep.check("max_abs_r", max_r, big_r, max_r <= big_r);
  detail::emit(rep, cfg, "bound", dir, out);
  return rep.ok() ? 0 : 1;
}

inline const std::map<std::string, std::function<int(const RunConfig&, const std::filesystem::path&,
                                                     std::ostream&)>>&
commands() {
  static const std::map<std::string, std::function<int(const RunConfig&,
                                                       const std::filesystem::path&, std::ostream&)>>
      table{{"integrate", cmd_integrate},
            {"verify", cmd_verify},
            {"nullity", cmd_nullity},
            {"export", cmd_export},
            {"bound", cmd_bound}};
  return table;
}

/// Loads the config and dispatches; maps errors to exit codes.
inline int run(const std::string& command, const std::string& config_path,
               const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
  const auto it = commands().find(command);
  if (it == commands().end()) {
    err << "unknown command: " << command << '\n';
    return 2;
  }
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
  try {
    return it->second(cfg, out_dir, out);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sinh_torus::cli

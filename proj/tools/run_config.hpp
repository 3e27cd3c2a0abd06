#pragma once

// JSON run configuration for the sinh-torus tool.
//
// {
//   "seed":       {"type": "clifford", "r0": 0}
//               | {"type": "lawson-hsiang", "m": 2, "k": 1, "variant": "u-along-y"}
//               | {"type": "explicit", "state": [18 reals]},
//   "params":     {"B": [b1..b6] | {"family": {"theta": t, "r0": r, "lambda": l}},
//                  "theta": 0.5 | "-pi/4"},
//   "window":     {"u_min": -1, "u_max": 1, "v_min": -1, "v_max": 1},
//   "resolution": {"nu": 101, "nv": 101},
//   "step": 1e-3,
//   "threads": 0,
//   "tolerances": {"frame_tol": 1e-8, "integral_tol": 1e-8, "residual_tol": 1e-3,
//                  "commutator_tol": 1e-7},
//   "outputs":    {"grid": "grid.txt", "drift": "drift.csv", "report": "report.txt",
//                  "mesh": "mesh.obj"},
//   "pole": [0, 0, 0, 1]
// }
//
// "params" may be omitted: clifford seeds default to B = 0, theta = 0 and
// lawson-hsiang seeds to their own matrix and theta = -pi/4.

#include <cmath>
#include <fstream>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sinh_torus/sinh_torus.hpp"

namespace sinh_torus::cli {

using nlohmann::json;

/// Bad configuration; `key` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class SeedKind { Clifford, LawsonHsiang, Explicit };

struct RunConfig {
  SeedKind seed_kind = SeedKind::Clifford;
  FrameState seed;
  std::optional<LHParams> lh;
  SystemParams params;
  GridWindow window{-1.0, 1.0, -1.0, 1.0};
  GridResolution resolution{101, 101};
  IntegratorOptions integrator;
  Tolerances tol;
  std::string grid_file = "grid.txt";
  std::string drift_file = "drift.csv";
  std::string report_file;  ///< empty: <command>_report.txt
  std::string mesh_file = "mesh.obj";
  std::optional<Vector4> pole;
  json source;  ///< the document as read, echoed into reports
};

/// Radians, or a fraction of pi: "pi", "-pi/4", "3pi/4", "3*pi/2", "0.25*pi".
inline double parse_angle(const json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ConfigError(key, "expected a number or a pi-fraction string");
  const std::string s = j.get<std::string>();
  static const std::regex re(R"(^\s*([+-]?)\s*(\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(key, "cannot parse angle \"" + s + "\"");
  }
  double v = kPi;
  if (m[2].matched) v *= std::stod(m[2].str());
  if (m[3].matched) {
    const double d = std::stod(m[3].str());
    if (d == 0.0) throw ConfigError(key, "division by zero in angle");
    v /= d;
  }
  return m[1].str() == "-" ? -v : v;
}

namespace detail {

inline std::string join(const std::string& key, const std::string& name) {
  return key.empty() ? name : key + "." + name;
}

inline double number(const json& obj, const std::string& name, const std::string& key) {
  if (!obj.contains(name)) throw ConfigError(join(key, name), "missing");
  const json& v = obj.at(name);
  if (!v.is_number()) throw ConfigError(join(key, name), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(key, name), "not finite");
  return x;
}

inline double number_or(const json& obj, const std::string& name, const std::string& key,
                        double fallback) {
  return obj.contains(name) ? number(obj, name, key) : fallback;
}

inline const json& object(const json& obj, const std::string& name, const std::string& key) {
  if (!obj.contains(name)) throw ConfigError(key, "missing");
  const json& v = obj.at(name);
  if (!v.is_object()) throw ConfigError(key, "expected an object");
  return v;
}

template <std::size_t N>
std::array<double, N> reals(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != N)
    throw ConfigError(key, "expected an array of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) throw ConfigError(key + "[" + std::to_string(i) + "]", "expected a number");
    out[i] = v[i].get<double>();
    if (!std::isfinite(out[i])) throw ConfigError(key + "[" + std::to_string(i) + "]", "not finite");
  }
  return out;
}

inline std::string string_or(const json& obj, const std::string& name, const std::string& key,
                             const std::string& fallback) {
  if (!obj.contains(name)) return fallback;
  if (!obj.at(name).is_string()) throw ConfigError(join(key, name), "expected a string");
  return obj.at(name).get<std::string>();
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& prefix) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(join(prefix, it.key()), "unknown key");
  }
}

}  // namespace detail

inline RunConfig parse_config(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
  reject_unknown(doc, {"seed", "params", "window", "resolution", "step", "max_arc", "threads",
                       "tolerances", "outputs", "pole"},
                 "");
  RunConfig c;
  c.source = doc;

  const json& seed = object(doc, "seed", "seed");
  const std::string type = string_or(seed, "type", "seed", "");
  if (type == "clifford") {
    reject_unknown(seed, {"type", "r0"}, "seed");
    c.seed_kind = SeedKind::Clifford;
    c.seed = FrameState::standard(number_or(seed, "r0", "seed", 0.0));
    c.params = SystemParams{};
  } else if (type == "lawson-hsiang") {
    reject_unknown(seed, {"type", "m", "k", "variant"}, "seed");
    LHParams lh{number(seed, "m", "seed"), number(seed, "k", "seed"), LHVariant::UAlongY};
    if (!(lh.m > 0)) throw ConfigError("seed.m", "must be positive");
    if (!(lh.k > 0)) throw ConfigError("seed.k", "must be positive");
    const std::string variant = string_or(seed, "variant", "seed", "u-along-y");
    if (variant == "v-along-y")
      lh.variant = LHVariant::VAlongY;
    else if (variant != "u-along-y")
      throw ConfigError("seed.variant", "expected \"u-along-y\" or \"v-along-y\"");
    c.seed_kind = SeedKind::LawsonHsiang;
    c.lh = lh;
    c.seed = lh_state(lh, 0.0, 0.0);
    c.params = lh_system(lh);
  } else if (type == "explicit") {
    reject_unknown(seed, {"type", "state"}, "seed");
    if (!seed.contains("state")) throw ConfigError("seed.state", "missing");
    c.seed_kind = SeedKind::Explicit;
    c.seed = FrameState::from_flat(reals<18>(seed.at("state"), "seed.state"));
  } else {
    throw ConfigError("seed.type", "expected \"clifford\", \"lawson-hsiang\" or \"explicit\"");
  }

  if (doc.contains("params")) {
    const json& p = object(doc, "params", "params");
    reject_unknown(p, {"B", "theta"}, "params");
    if (!p.contains("theta")) throw ConfigError("params.theta", "missing");
    c.params.theta = parse_angle(p.at("theta"), "params.theta");
    if (!p.contains("B")) throw ConfigError("params.B", "missing");
    const json& b = p.at("B");
    if (b.is_array()) {
      c.params.b = skew_from_params(reals<6>(b, "params.B"));
    } else if (b.is_object() && b.contains("family")) {
      reject_unknown(b, {"family"}, "params.B");
      const json& f = object(b, "family", "params.B.family");
      reject_unknown(f, {"theta", "r0", "lambda"}, "params.B.family");
      if (!f.contains("theta")) throw ConfigError("params.B.family.theta", "missing");
      c.params.b = s_vanishing_family(parse_angle(f.at("theta"), "params.B.family.theta"),
                                      number(f, "r0", "params.B.family"),
                                      number_or(f, "lambda", "params.B.family", 0.0));
    } else {
      throw ConfigError("params.B", "expected 6 numbers or {\"family\": {...}}");
    }
  } else if (c.seed_kind == SeedKind::Explicit) {
    throw ConfigError("params", "required for explicit seeds");
  }

  if (doc.contains("window")) {
    const json& w = object(doc, "window", "window");
    reject_unknown(w, {"u_min", "u_max", "v_min", "v_max"}, "window");
    c.window = {number(w, "u_min", "window"), number(w, "u_max", "window"),
                number(w, "v_min", "window"), number(w, "v_max", "window")};
    if (!(c.window.u_max > c.window.u_min)) throw ConfigError("window.u_max", "must exceed u_min");
    if (!(c.window.v_max > c.window.v_min)) throw ConfigError("window.v_max", "must exceed v_min");
  }
  if (doc.contains("resolution")) {
    const json& r = object(doc, "resolution", "resolution");
    reject_unknown(r, {"nu", "nv"}, "resolution");
    for (const char* name : {"nu", "nv"}) {
      const std::string key = std::string("resolution.") + name;
      if (!r.contains(name) || !r.at(name).is_number_integer() || r.at(name).get<long long>() < 2)
        throw ConfigError(key, "expected an integer >= 2");
    }
    c.resolution = {r.at("nu").get<std::size_t>(), r.at("nv").get<std::size_t>()};
  }
  c.integrator.step = number_or(doc, "step", "", c.integrator.step);
  if (!(c.integrator.step > 0)) throw ConfigError("step", "must be positive");
  c.integrator.max_arc = number_or(doc, "max_arc", "", c.integrator.max_arc);
  if (!(c.integrator.max_arc > 0)) throw ConfigError("max_arc", "must be positive");
  if (doc.contains("threads")) {
    if (!doc.at("threads").is_number_unsigned()) throw ConfigError("threads", "expected an integer >= 0");
    c.integrator.threads = doc.at("threads").get<unsigned>();
  }

  if (doc.contains("tolerances")) {
    const json& t = object(doc, "tolerances", "tolerances");
    reject_unknown(t, {"frame_tol", "integral_tol", "residual_tol", "commutator_tol"},
                   "tolerances");
    c.tol.frame_tol = number_or(t, "frame_tol", "tolerances", c.tol.frame_tol);
    c.tol.integral_tol = number_or(t, "integral_tol", "tolerances", c.tol.integral_tol);
    c.tol.residual_tol = number_or(t, "residual_tol", "tolerances", c.tol.residual_tol);
    c.tol.commutator_tol = number_or(t, "commutator_tol", "tolerances", c.tol.commutator_tol);
    for (const char* name : {"frame_tol", "integral_tol", "residual_tol", "commutator_tol"})
      if (t.contains(name) && !(t.at(name).get<double>() > 0))
        throw ConfigError(std::string("tolerances.") + name, "must be positive");
  }

  if (doc.contains("outputs")) {
    const json& o = object(doc, "outputs", "outputs");
    reject_unknown(o, {"grid", "drift", "report", "mesh"}, "outputs");
    c.grid_file = string_or(o, "grid", "outputs", c.grid_file);
    c.drift_file = string_or(o, "drift", "outputs", c.drift_file);
    c.report_file = string_or(o, "report", "outputs", c.report_file);
    c.mesh_file = string_or(o, "mesh", "outputs", c.mesh_file);
  }

  if (doc.contains("pole")) {
    const auto q = reals<4>(doc.at("pole"), "pole");
    const Vector4 pole{q};
    if (std::abs(norm(pole) - 1.0) > 1e-12) throw ConfigError("pole", "must be a unit vector");
    c.pole = pole;
  }

  const double d = frame_defect(c.seed);
  if (!(d < c.tol.frame_tol))
    throw ConfigError("seed", "frame defect " + std::to_string(d) + " exceeds frame_tol");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace sinh_torus::cli

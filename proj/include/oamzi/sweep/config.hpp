#pragma once

// Declarative sweep configuration, read from JSON.
//
// Grammar (every key optional unless marked):
//
//   experiment   string, required. One of signal, sensitivity,
//                sensitivity_vs_N, fwhm_vs_L, qcrb, diagnostics, wigner,
//                joint_distribution, photon_vs_r, entropy_vs_N.
//   states       array, required, non-empty. Each entry is an object:
//                  name        "TMSV", "PA11", "PSA22", ...   or
//                  kind        "TMSV" | "PA" | "PS" | "PAS" | "PSA" with
//                  G, H, J, K  non-negative integers
//                  r           squeezing (>= 0)            } exactly one, except with an
//                  target_N    mean photon number (>= 0)   } N_grid or r_grid (then neither)
//                  psi         squeezing angle (default 0)
//                  convention  "name_driven" (default) | "mixed_mode"
//                  T_a, T_b    per-state transmittances, replacing the global ones
//                  label       display name (default: canonical name)
//   theta        {start, stop, count} or an explicit array (default [0.001])
//   L            integer or array of integers >= 1 (default [1])
//   T_a, T_b     number or array in [0, 1] (default 1); all combinations are swept
//   T_pairs      array of [T_a, T_b] pairs; replaces T_a/T_b
//   bias_mode    "GEARED" (default) | "EXTERNAL"
//   bias         operating-point offset (default π/2)
//   N_grid       {start, stop, count} or array of N > 0; required by
//                sensitivity_vs_N and entropy_vs_N, optional for qcrb
//   r_grid       {start, stop, count} or array; photon_vs_r
//   wigner       {half_width (4), points (81), mode "A"|"B" ("A"),
//                 stage "input"|"after_phase" ("input")}
//   joint        {max_n (20)}
//   numeric      {leak_tol (1e-10), cutoff_cap (64), fd_step (1e-6),
//                 paper_literal_sensitivity (false)}
//   output       {path, format "csv"|"json"}
//
// qcrb, diagnostics, wigner, joint_distribution, photon_vs_r and entropy_vs_N
// are lossless and reject every transmittance key.
//
// Unknown keys anywhere are rejected; errors name the offending path,
// e.g. "states[0]/T_a".

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "oamzi/channels.hpp"
#include "oamzi/errors.hpp"
#include "oamzi/measurement.hpp"
#include "oamzi/state.hpp"

namespace oamzi::sweep {

using Json = nlohmann::json;

enum class Experiment {
  Signal,
  Sensitivity,
  SensitivityVsN,
  FwhmVsL,
  Qcrb,
  Diagnostics,
  Wigner,
  JointDistribution,
  PhotonVsR,
  EntropyVsN,
};

inline constexpr std::pair<Experiment, const char*> kExperimentNames[] = {
    {Experiment::Signal, "signal"},
    {Experiment::Sensitivity, "sensitivity"},
    {Experiment::SensitivityVsN, "sensitivity_vs_N"},
    {Experiment::FwhmVsL, "fwhm_vs_L"},
    {Experiment::Qcrb, "qcrb"},
    {Experiment::Diagnostics, "diagnostics"},
    {Experiment::Wigner, "wigner"},
    {Experiment::JointDistribution, "joint_distribution"},
    {Experiment::PhotonVsR, "photon_vs_r"},
    {Experiment::EntropyVsN, "entropy_vs_N"},
};

inline std::string to_string(Experiment e) {
  for (const auto& [k, v] : kExperimentNames)
    if (k == e) return v;
  return "?";
}

enum class OutputFormat { Csv, Json };

struct StateEntry {
  StateSpec spec;
  std::optional<double> target_N;
  std::optional<double> T_a, T_b;
  std::string label;
};

struct WignerSettings {
  double half_width = 4.0;
  int points = 81;
  Mode mode = Mode::A;
  bool after_phase = false;
};

struct SweepSpec {
  Experiment experiment = Experiment::Signal;
  std::vector<StateEntry> states;
  std::vector<double> theta{0.001};
  std::vector<int> L{1};
  std::vector<std::pair<double, double>> T_pairs{{1.0, 1.0}};
  BiasMode bias_mode = BiasMode::Geared;
  double bias = std::numbers::pi / 2;
  std::vector<double> N_grid;
  std::vector<double> r_grid;
  WignerSettings wigner;
  int joint_max_n = 20;
  NumericOptions numeric;
  std::string output_path;
  OutputFormat format = OutputFormat::Csv;
  Json canonical;  // resolved settings in a fixed layout, used for hashing

  /// Experiments whose N axis is mandatory.
  bool requires_N_grid() const {
    return experiment == Experiment::SensitivityVsN || experiment == Experiment::EntropyVsN;
  }
  bool uses_N_grid() const { return requires_N_grid() || (experiment == Experiment::Qcrb && !N_grid.empty()); }

  /// Experiments that characterize the input state alone, or its lossless
  /// evolution, and so take no transmittances.
  bool lossless_only() const {
    switch (experiment) {
      case Experiment::Qcrb:
      case Experiment::Diagnostics:
      case Experiment::Wigner:
      case Experiment::JointDistribution:
      case Experiment::PhotonVsR:
      case Experiment::EntropyVsN:
        return true;
      default:
        return false;
    }
  }

  /// Transmittance pairs that apply to one state entry.
  std::vector<std::pair<double, double>> pairs_for(const StateEntry& s) const {
    if (!s.T_a && !s.T_b) return T_pairs;
    return {{s.T_a.value_or(1.0), s.T_b.value_or(1.0)}};
  }

  bool lossy() const {
    for (const auto& s : states)
      for (const auto& [a, b] : pairs_for(s))
        if (a < 1.0 || b < 1.0) return true;
    return false;
  }
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& path, const std::string& why) {
  fail(ErrorKind::ConfigError, (path.empty() ? std::string("<root>") : path) + ": " + why);
}

inline std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "/" + key; }

inline void reject_unknown(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) config_error(join(path, key), "unknown key");
  }
}

inline double number(const Json& v, const std::string& path) {
  if (!v.is_number()) config_error(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) config_error(path, "must be finite");
  return x;
}

inline int integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) config_error(path, "expected an integer");
  return v.get<int>();
}

inline std::string text(const Json& v, const std::string& path) {
  if (!v.is_string()) config_error(path, "expected a string");
  return v.get<std::string>();
}

inline double transmittance(const Json& v, const std::string& path) {
  const double t = number(v, path);
  if (t < 0.0 || t > 1.0) config_error(path, "transmittance " + std::to_string(t) + " outside [0, 1]");
  return t;
}

/// {start, stop, count} or an explicit array of numbers.
inline std::vector<double> grid(const Json& v, const std::string& path) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  } else if (v.is_object()) {
    reject_unknown(v, path, {"start", "stop", "count"});
    for (const char* k : {"start", "stop", "count"})
      if (!v.contains(k)) config_error(join(path, k), "missing");
    const double a = number(v["start"], join(path, "start"));
    const double b = number(v["stop"], join(path, "stop"));
    const int n = integer(v["count"], join(path, "count"));
    if (n < 1) config_error(join(path, "count"), "must be >= 1");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  } else {
    config_error(path, "expected {start, stop, count} or an array");
  }
  if (out.empty()) config_error(path, "grid is empty");
  return out;
}

inline std::vector<double> scalar_or_list(const Json& v, const std::string& path, bool is_T) {
  std::vector<double> out;
  auto one = [&](const Json& x, const std::string& p) { out.push_back(is_T ? transmittance(x, p) : number(x, p)); };
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) one(v[i], path + "[" + std::to_string(i) + "]");
    if (out.empty()) config_error(path, "list is empty");
  } else {
    one(v, path);
  }
  return out;
}

inline StateEntry parse_state(const Json& v, const std::string& path, bool vs_N) {
  reject_unknown(v, path,
                 {"name", "kind", "G", "H", "J", "K", "r", "target_N", "psi", "convention", "T_a", "T_b", "label"});
  StateEntry e;
  if (v.contains("name") == v.contains("kind")) config_error(path, "give exactly one of 'name' or 'kind'");
  if (v.contains("name")) {
    for (const char* k : {"G", "H", "J", "K"})
      if (v.contains(k)) config_error(join(path, k), "orders come from 'name'; use 'kind' to set them explicitly");
    try {
      e.spec = StateSpec::named(text(v["name"], join(path, "name")));
    } catch (const Error& err) {
      config_error(join(path, "name"), err.what());
    }
  } else {
    const std::string kind = text(v["kind"], join(path, "kind"));
    const std::pair<const char*, StateKind> kinds[] = {{"TMSV", StateKind::TMSV}, {"PA", StateKind::PA},
                                                       {"PS", StateKind::PS},     {"PAS", StateKind::PAS},
                                                       {"PSA", StateKind::PSA}};
    bool found = false;
    for (const auto& [n, k] : kinds)
      if (kind == n) {
        e.spec.kind = k;
        found = true;
      }
    if (!found) config_error(join(path, "kind"), "unknown state kind '" + kind + "'");
    int* orders[] = {&e.spec.G, &e.spec.H, &e.spec.J, &e.spec.K};
    const char* names[] = {"G", "H", "J", "K"};
    for (int i = 0; i < 4; ++i)
      if (v.contains(names[i])) {
        *orders[i] = integer(v[names[i]], join(path, names[i]));
        if (*orders[i] < 0 || *orders[i] > 9) config_error(join(path, names[i]), "order must lie in [0, 9]");
      }
  }
  if (v.contains("convention")) {
    const std::string c = text(v["convention"], join(path, "convention"));
    if (c == "name_driven")
      e.spec.convention = OrderConvention::NameDriven;
    else if (c == "mixed_mode")
      e.spec.convention = OrderConvention::MixedMode;
    else
      config_error(join(path, "convention"), "expected 'name_driven' or 'mixed_mode'");
  }
  if (v.contains("psi")) e.spec.psi = number(v["psi"], join(path, "psi"));
  if (v.contains("r") && v.contains("target_N")) config_error(path, "give at most one of 'r' or 'target_N'");
  if (vs_N && (v.contains("r") || v.contains("target_N")))
    config_error(path, "this experiment takes N from N_grid; remove 'r'/'target_N'");
  if (v.contains("r")) {
    e.spec.r = number(v["r"], join(path, "r"));
    if (e.spec.r < 0.0) config_error(join(path, "r"), "squeezing must be >= 0");
  }
  if (v.contains("target_N")) {
    e.target_N = number(v["target_N"], join(path, "target_N"));
    if (*e.target_N < 0.0) config_error(join(path, "target_N"), "must be >= 0");
  }
  if (v.contains("T_a")) e.T_a = transmittance(v["T_a"], join(path, "T_a"));
  if (v.contains("T_b")) e.T_b = transmittance(v["T_b"], join(path, "T_b"));
  try {
    e.spec.validate();
  } catch (const Error& err) {
    config_error(path, err.what());
  }
  e.label = v.contains("label") ? text(v["label"], join(path, "label")) : e.spec.name();
  return e;
}

/// Every resolved setting in a fixed layout, so documents that differ only in
/// key order, scalar-versus-list spelling or defaults serialize identically.
inline Json canonical_form(const SweepSpec& s) {
  Json states = Json::array();
  for (const auto& e : s.states) {
    Json st = {{"kind", std::string(to_string(e.spec.kind))},
               {"G", e.spec.G},
               {"H", e.spec.H},
               {"J", e.spec.J},
               {"K", e.spec.K},
               {"r", e.spec.r},
               {"psi", e.spec.psi},
               {"convention", e.spec.convention == OrderConvention::NameDriven ? "name_driven" : "mixed_mode"},
               {"label", e.label}};
    st["target_N"] = e.target_N ? Json(*e.target_N) : Json(nullptr);
    st["T_a"] = e.T_a ? Json(*e.T_a) : Json(nullptr);
    st["T_b"] = e.T_b ? Json(*e.T_b) : Json(nullptr);
    states.push_back(st);
  }
  Json pairs = Json::array();
  for (const auto& [a, b] : s.T_pairs) pairs.push_back({a, b});
  return {{"experiment", to_string(s.experiment)},
          {"states", states},
          {"theta", s.theta},
          {"L", s.L},
          {"T_pairs", pairs},
          {"bias_mode", s.bias_mode == BiasMode::Geared ? "GEARED" : "EXTERNAL"},
          {"bias", s.bias},
          {"N_grid", s.N_grid},
          {"r_grid", s.r_grid},
          {"wigner",
           {{"half_width", s.wigner.half_width},
            {"points", s.wigner.points},
            {"mode", s.wigner.mode == Mode::A ? "A" : "B"},
            {"stage", s.wigner.after_phase ? "after_phase" : "input"}}},
          {"joint", {{"max_n", s.joint_max_n}}},
          {"numeric",
           {{"leak_tol", s.numeric.leak_tol},
            {"cutoff_cap", s.numeric.cutoff_cap},
            {"fd_step", s.numeric.fd_step},
            {"paper_literal_sensitivity", s.numeric.paper_literal_sensitivity}}},
          {"output", {{"path", s.output_path}, {"format", s.format == OutputFormat::Csv ? "csv" : "json"}}}};
}

}  // namespace detail

/// Parses and validates a configuration document.
inline SweepSpec parse_config(const std::string& source) {
  using namespace detail;
  Json doc;
  try {
    doc = Json::parse(source);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("<root>: not valid JSON: ") + e.what());
  }
  reject_unknown(doc, "",
                 {"experiment", "states", "theta", "L", "T_a", "T_b", "T_pairs", "bias_mode", "bias", "N_grid",
                  "r_grid", "wigner", "joint", "numeric", "output"});
  SweepSpec s;

  if (!doc.contains("experiment")) config_error("experiment", "missing");
  {
    const std::string ex = text(doc["experiment"], "experiment");
    bool found = false;
    for (const auto& [k, v] : kExperimentNames)
      if (ex == v) {
        s.experiment = k;
        found = true;
      }
    if (!found) config_error("experiment", "unknown experiment '" + ex + "'");
  }


  if (doc.contains("N_grid")) {
    if (!s.requires_N_grid() && s.experiment != Experiment::Qcrb)
      config_error("N_grid", "only used by sensitivity_vs_N, entropy_vs_N and qcrb");
    s.N_grid = grid(doc["N_grid"], "N_grid");
    for (std::size_t i = 0; i < s.N_grid.size(); ++i)
      if (s.N_grid[i] <= 0.0) config_error("N_grid[" + std::to_string(i) + "]", "must be > 0");
  } else if (s.requires_N_grid()) {
    config_error("N_grid", "missing");
  }

  if (!doc.contains("states")) config_error("states", "missing");
  if (!doc["states"].is_array() || doc["states"].empty()) config_error("states", "expected a non-empty array");
  for (std::size_t i = 0; i < doc["states"].size(); ++i)
    s.states.push_back(parse_state(doc["states"][i], "states[" + std::to_string(i) + "]", s.uses_N_grid()));
  if (doc.contains("theta")) s.theta = grid(doc["theta"], "theta");
  if (doc.contains("L")) {
    s.L.clear();
    const Json& v = doc["L"];
    auto one = [&](const Json& x, const std::string& p) {
      const int L = integer(x, p);
      if (L < 1) config_error(p, "L must be >= 1");
      s.L.push_back(L);
    };
    if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) one(v[i], "L[" + std::to_string(i) + "]");
      if (s.L.empty()) config_error("L", "list is empty");
    } else {
      one(v, "L");
    }
  }

  if (doc.contains("T_pairs")) {
    if (doc.contains("T_a") || doc.contains("T_b")) config_error("T_pairs", "cannot be combined with T_a/T_b");
    const Json& v = doc["T_pairs"];
    if (!v.is_array() || v.empty()) config_error("T_pairs", "expected a non-empty array of [T_a, T_b]");
    s.T_pairs.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = "T_pairs[" + std::to_string(i) + "]";
      if (!v[i].is_array() || v[i].size() != 2) config_error(p, "expected [T_a, T_b]");
      s.T_pairs.emplace_back(transmittance(v[i][0], p + "[0]"), transmittance(v[i][1], p + "[1]"));
    }
  } else {
    const auto ta = doc.contains("T_a") ? scalar_or_list(doc["T_a"], "T_a", true) : std::vector<double>{1.0};
    const auto tb = doc.contains("T_b") ? scalar_or_list(doc["T_b"], "T_b", true) : std::vector<double>{1.0};
    s.T_pairs.clear();
    for (double a : ta)
      for (double b : tb) s.T_pairs.emplace_back(a, b);
  }

  if (doc.contains("bias_mode")) {
    const std::string m = text(doc["bias_mode"], "bias_mode");
    if (m == "GEARED")
      s.bias_mode = BiasMode::Geared;
    else if (m == "EXTERNAL")
      s.bias_mode = BiasMode::External;
    else
      config_error("bias_mode", "expected 'GEARED' or 'EXTERNAL'");
  }
  if (doc.contains("bias")) s.bias = number(doc["bias"], "bias");

  if (doc.contains("r_grid")) {
    if (s.experiment != Experiment::PhotonVsR) config_error("r_grid", "only used by photon_vs_r");
    s.r_grid = grid(doc["r_grid"], "r_grid");
    for (std::size_t i = 0; i < s.r_grid.size(); ++i)
      if (s.r_grid[i] < 0.0) config_error("r_grid[" + std::to_string(i) + "]", "must be >= 0");
  } else if (s.experiment == Experiment::PhotonVsR) {
    config_error("r_grid", "missing");
  }

  if (doc.contains("wigner")) {
    const Json& w = doc["wigner"];
    reject_unknown(w, "wigner", {"half_width", "points", "mode", "stage"});
    if (w.contains("half_width")) {
      s.wigner.half_width = number(w["half_width"], "wigner/half_width");
      if (s.wigner.half_width <= 0.0) config_error("wigner/half_width", "must be > 0");
    }
    if (w.contains("points")) {
      s.wigner.points = integer(w["points"], "wigner/points");
      if (s.wigner.points < 2) config_error("wigner/points", "must be >= 2");
    }
    if (w.contains("mode")) {
      const std::string m = text(w["mode"], "wigner/mode");
      if (m != "A" && m != "B") config_error("wigner/mode", "expected 'A' or 'B'");
      s.wigner.mode = m == "A" ? Mode::A : Mode::B;
    }
    if (w.contains("stage")) {
      const std::string st = text(w["stage"], "wigner/stage");
      if (st != "input" && st != "after_phase") config_error("wigner/stage", "expected 'input' or 'after_phase'");
      s.wigner.after_phase = st == "after_phase";
    }
  }
  if (doc.contains("joint")) {
    reject_unknown(doc["joint"], "joint", {"max_n"});
    if (doc["joint"].contains("max_n")) {
      s.joint_max_n = integer(doc["joint"]["max_n"], "joint/max_n");
      if (s.joint_max_n < 1) config_error("joint/max_n", "must be >= 1");
    }
  }
  if (doc.contains("numeric")) {
    const Json& n = doc["numeric"];
    reject_unknown(n, "numeric", {"leak_tol", "cutoff_cap", "fd_step", "paper_literal_sensitivity"});
    if (n.contains("leak_tol")) {
      s.numeric.leak_tol = number(n["leak_tol"], "numeric/leak_tol");
      if (!(s.numeric.leak_tol > 0.0 && s.numeric.leak_tol < 1.0)) config_error("numeric/leak_tol", "must lie in (0, 1)");
    }
    if (n.contains("cutoff_cap")) {
      s.numeric.cutoff_cap = integer(n["cutoff_cap"], "numeric/cutoff_cap");
      if (s.numeric.cutoff_cap < 4) config_error("numeric/cutoff_cap", "must be >= 4");
    }
    if (n.contains("fd_step")) {
      s.numeric.fd_step = number(n["fd_step"], "numeric/fd_step");
      if (!(s.numeric.fd_step > 0.0)) config_error("numeric/fd_step", "must be > 0");
    }
    if (n.contains("paper_literal_sensitivity")) {
      if (!n["paper_literal_sensitivity"].is_boolean())
        config_error("numeric/paper_literal_sensitivity", "expected true or false");
      s.numeric.paper_literal_sensitivity = n["paper_literal_sensitivity"].get<bool>();
    }
  }
  if (doc.contains("output")) {
    const Json& o = doc["output"];
    reject_unknown(o, "output", {"path", "format"});
    if (o.contains("path")) s.output_path = text(o["path"], "output/path");
    if (o.contains("format")) {
      const std::string f = text(o["format"], "output/format");
      if (f != "csv" && f != "json") config_error("output/format", "expected 'csv' or 'json'");
      s.format = f == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    }
  }
  if (s.lossless_only()) {
    for (const char* k : {"T_a", "T_b", "T_pairs"})
      if (doc.contains(k)) config_error(k, to_string(s.experiment) + " takes no transmittances");
    for (std::size_t i = 0; i < s.states.size(); ++i)
      for (const char* k : {"T_a", "T_b"})
        if (doc["states"][i].contains(k))
          config_error("states[" + std::to_string(i) + "]/" + k, to_string(s.experiment) + " takes no transmittances");
  }
  for (std::size_t i = 0; i < s.states.size(); ++i) {
    const bool has_r = doc["states"][i].contains("r") || doc["states"][i].contains("target_N");
    if (!s.uses_N_grid() && s.experiment != Experiment::PhotonVsR && !has_r)
      config_error("states[" + std::to_string(i) + "]", "needs 'r' or 'target_N'");
    if (s.experiment == Experiment::PhotonVsR && has_r)
      config_error("states[" + std::to_string(i) + "]", "photon_vs_r takes r from r_grid; remove 'r'/'target_N'");
  }
  s.canonical = detail::canonical_form(s);
  return s;
}

/// Desk-scale guard for lossy sweeps: target N above 12 or a cutoff cap
/// above 64 needs an explicit opt-in.
inline void check_guardrails(const SweepSpec& s, bool allow_heavy) {
  if (allow_heavy || !s.lossy()) return;
  if (s.numeric.cutoff_cap > 64)
    detail::config_error("numeric/cutoff_cap", "lossy sweeps above cutoff 64 need --allow-heavy");
  for (std::size_t i = 0; i < s.states.size(); ++i)
    if (s.states[i].target_N && *s.states[i].target_N > 12.0)
      detail::config_error("states[" + std::to_string(i) + "]/target_N", "lossy sweeps above N = 12 need --allow-heavy");
  for (std::size_t i = 0; i < s.N_grid.size(); ++i)
    if (s.N_grid[i] > 12.0)
      detail::config_error("N_grid[" + std::to_string(i) + "]", "lossy sweeps above N = 12 need --allow-heavy");
}

}  // namespace oamzi::sweep

#pragma once

// Canned sweep configurations for the published figures. A figure with two
// panels of different kinds ships one configuration per panel.

#include <string>
#include <string_view>
#include <vector>

#include "oamzi/errors.hpp"

namespace oamzi::sweep {

struct FigurePart {
  std::string suffix;  // empty for single-part figures
  std::string config;  // JSON
};

struct Figure {
  std::string id;
  std::string description;
  std::vector<FigurePart> parts;
};

namespace detail {

inline constexpr std::string_view kAllStates = R"([
    {"name": "TMSV"}, {"name": "PA11"}, {"name": "PS11"}, {"name": "PAS11"}, {"name": "PSA11"},
    {"name": "PA22"}, {"name": "PS22"}, {"name": "PAS22"}, {"name": "PSA22"}])";

inline constexpr std::string_view kAllStatesAtR = R"([
    {"name": "TMSV", "r": 1.096}, {"name": "PA11", "r": 1.096}, {"name": "PS11", "r": 1.096},
    {"name": "PAS11", "r": 1.096}, {"name": "PSA11", "r": 1.096}, {"name": "PA22", "r": 1.096},
    {"name": "PS22", "r": 1.096}, {"name": "PAS22", "r": 1.096}, {"name": "PSA22", "r": 1.096}])";

inline std::string with_states(std::string_view tmpl, std::string_view states) {
  std::string out(tmpl);
  const std::string key = "@STATES@";
  out.replace(out.find(key), key.size(), states);
  return out;
}

}  // namespace detail

/// All canned figures, in publication order.
inline const std::vector<Figure>& figures() {
  using detail::kAllStates;
  using detail::kAllStatesAtR;
  using detail::with_states;
  static const std::vector<Figure> all = {
      {"fig2",
       "parity signal versus theta, all states, r = 1.096, lossless",
       {{"", with_states(R"({"experiment": "signal", "states": @STATES@,
           "theta": {"start": -0.4, "stop": 0.4, "count": 801}, "L": 1,
           "numeric": {"cutoff_cap": 128}})",
                         kAllStatesAtR)}}},
      {"fig3",
       "sensitivity versus theta, all states, r = 1.096, lossless",
       {{"", with_states(R"({"experiment": "sensitivity", "states": @STATES@,
           "theta": {"start": -0.3, "stop": 0.3, "count": 600}, "L": 1,
           "numeric": {"cutoff_cap": 128}})",
                         kAllStatesAtR)}}},
      {"fig4",
       "sensitivity versus mean photon number, all states, theta = 1e-4, lossless",
       {{"", with_states(R"({"experiment": "sensitivity_vs_N", "states": @STATES@,
           "N_grid": {"start": 1, "stop": 20, "count": 20}, "theta": [0.0001], "L": 1,
           "numeric": {"cutoff_cap": 512}})",
                         kAllStates)}}},
      {"fig5",
       "PSA11 signal for L = 1, 3, 5 at r = 1.096, and FWHM versus L for r = 0.2, 0.4, 0.8",
       {{"signal", R"({"experiment": "signal", "states": [{"name": "PSA11", "r": 1.096}],
           "theta": {"start": -0.4, "stop": 0.4, "count": 801}, "L": [1, 3, 5],
           "numeric": {"cutoff_cap": 128}})"},
        {"fwhm", R"({"experiment": "fwhm_vs_L",
           "states": [{"name": "PSA11", "r": 0.2}, {"name": "PSA11", "r": 0.4}, {"name": "PSA11", "r": 0.8}],
           "L": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]})"}}},
      {"fig6",
       "sensitivity versus N for PSA11 and TMSV with L = 1, 3, 11, theta = 1e-4, lossless",
       {{"", R"({"experiment": "sensitivity_vs_N", "states": [{"name": "PSA11"}, {"name": "TMSV"}],
           "N_grid": {"start": 1, "stop": 20, "count": 20}, "theta": [0.0001], "L": [1, 3, 11],
           "numeric": {"cutoff_cap": 512}})"}}},
      {"fig7",
       "sensitivity versus theta, all states, r = 1.096, five asymmetric loss splits",
       {{"", with_states(R"({"experiment": "sensitivity", "states": @STATES@,
           "theta": {"start": -0.3, "stop": 0.3, "count": 600}, "L": 1,
           "T_pairs": [[0.1, 0.9], [0.2, 0.8], [0.3, 0.7], [0.4, 0.6], [0.5, 0.5]],
           "numeric": {"cutoff_cap": 128}})",
                         kAllStatesAtR)}}},
      {"fig8",
       "PSA11 sensitivity versus theta at T = 1, 0.75, 0.5, r = 1.096",
       {{"", R"({"experiment": "sensitivity", "states": [{"name": "PSA11", "r": 1.096}],
           "theta": {"start": -0.3, "stop": 0.3, "count": 600}, "L": 1,
           "T_pairs": [[1, 1], [0.75, 0.75], [0.5, 0.5]],
           "numeric": {"cutoff_cap": 128}})"}}},
      {"fig9",
       "sensitivity versus N, all states, T = 0.5, theta = 1e-4",
       {{"", with_states(R"({"experiment": "sensitivity_vs_N", "states": @STATES@,
           "N_grid": {"start": 1, "stop": 12, "count": 12}, "theta": [0.0001], "L": 1,
           "T_a": 0.5, "T_b": 0.5, "numeric": {"cutoff_cap": 256}})",
                         kAllStates)}}},
      {"fig10",
       "PSA11 sensitivity versus theta at T = 0.5 for L = 1, 3, 13, r = 1.096",
       {{"", R"({"experiment": "sensitivity", "states": [{"name": "PSA11", "r": 1.096}],
           "theta": {"start": -0.1, "stop": 0.1, "count": 2000}, "L": [1, 3, 13],
           "T_a": 0.5, "T_b": 0.5, "numeric": {"cutoff_cap": 128}})"}}},
      {"fig11",
       "sensitivity versus N, all states, L = 21, theta = 0.007, T = 0.5",
       {{"", with_states(R"({"experiment": "sensitivity_vs_N", "states": @STATES@,
           "N_grid": {"start": 1, "stop": 12, "count": 12}, "theta": [0.007], "L": 21,
           "T_a": 0.5, "T_b": 0.5, "numeric": {"cutoff_cap": 256}})",
                         kAllStates)}}},
      {"fig12",
       "PAS11 sensitivity versus theta at T = 0.5 and T_a/T_b = 0.1/0.9, L = 1, 5, r = 1.096",
       {{"", R"({"experiment": "sensitivity", "states": [{"name": "PAS11", "r": 1.096}],
           "theta": {"start": -0.3, "stop": 0.3, "count": 600}, "L": [1, 5],
           "T_pairs": [[0.5, 0.5], [0.1, 0.9]], "numeric": {"cutoff_cap": 128}})"}}},
      {"fig13",
       "PAS11 sensitivity versus N for several losses, L = 21, theta = 0.007",
       {{"", R"({"experiment": "sensitivity_vs_N", "states": [{"name": "PAS11"}],
           "N_grid": {"start": 1, "stop": 12, "count": 12}, "theta": [0.007], "L": 21,
           "T_pairs": [[1, 1], [0.9, 0.9], [0.75, 0.75], [0.5, 0.5], [0.3, 0.7], [0.1, 0.9]],
           "numeric": {"cutoff_cap": 256}})"}}},
      {"fig14",
       "mean photon number versus squeezing, all states",
       {{"", with_states(R"({"experiment": "photon_vs_r", "states": @STATES@,
           "r_grid": {"start": 0.01, "stop": 1.5, "count": 150}})",
                         kAllStates)}}},
      {"fig15",
       "entanglement entropy versus mean photon number, all states",
       {{"", with_states(R"({"experiment": "entropy_vs_N", "states": @STATES@,
           "N_grid": {"start": 0.5, "stop": 12, "count": 24}, "numeric": {"cutoff_cap": 256}})",
                         kAllStates)}}},
      {"fig16",
       "joint photon-number distribution of PAS11 and PSA11 at r = 1.096",
       {{"", R"({"experiment": "joint_distribution",
           "states": [{"name": "PAS11", "r": 1.096}, {"name": "PSA11", "r": 1.096}],
           "joint": {"max_n": 20}, "numeric": {"cutoff_cap": 128}})"}}},
      {"fig17",
       "reduced Wigner functions at N = 5, and PSA11 after the phase shift for L = 1, 7, 51",
       {{"input", R"({"experiment": "wigner",
           "states": [{"name": "TMSV", "target_N": 5}, {"name": "PA11", "target_N": 5},
                      {"name": "PS11", "target_N": 5}, {"name": "PAS11", "target_N": 5},
                      {"name": "PSA11", "target_N": 5}],
           "wigner": {"half_width": 4, "points": 81, "mode": "A", "stage": "input"},
           "numeric": {"cutoff_cap": 128}})"},
        {"phase", R"({"experiment": "wigner", "states": [{"name": "PSA11", "target_N": 5}],
           "L": [1, 7, 51], "theta": [0.05],
           "wigner": {"half_width": 4, "points": 81, "mode": "A", "stage": "after_phase"}})"}}},
      {"figA1",
       "PAS/PSA sensitivity and quantum Cramer-Rao bound versus N, lossless",
       {{"", R"({"experiment": "qcrb",
           "states": [{"name": "PAS11"}, {"name": "PSA11"}, {"name": "PAS22"}, {"name": "PSA22"}],
           "N_grid": {"start": 1, "stop": 20, "count": 20}, "theta": [0.0001], "L": 1,
           "numeric": {"cutoff_cap": 512}})"}}},
  };
  return all;
}

inline const Figure& figure(std::string_view id) {
  for (const auto& f : figures())
    if (f.id == id) return f;
  std::string known;
  for (const auto& f : figures()) known += (known.empty() ? "" : ", ") + f.id;
  fail(ErrorKind::ConfigError, "unknown figure '" + std::string(id) + "'; known: " + known);
}

}  // namespace oamzi::sweep

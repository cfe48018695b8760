#pragma once

// Sweep orchestration: expands a SweepSpec into work units, evaluates them on
// a thread pool and assembles the rows in grid order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "oamzi/diagnostics.hpp"
#include "oamzi/measurement.hpp"
#include "oamzi/reference.hpp"
#include "oamzi/sweep/config.hpp"
#include "oamzi/sweep/table.hpp"

namespace oamzi::sweep {

struct RunOptions {
  unsigned jobs = 0;  // 0: hardware concurrency
  bool allow_heavy = false;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

namespace detail {

struct Row {
  std::vector<Cell> cells;
  PointMeta meta;
};

using Unit = std::function<std::vector<Row>()>;

inline std::string describe(const std::exception& e) { return e.what(); }

inline Cell num(double x) { return x; }
inline Cell opt(const std::optional<double>& x) { return x ? Cell(*x) : Cell(); }

/// keys + values (padded with empties on failure) + cutoff, leakage, error.
inline Row make_row(std::vector<Cell> keys, std::vector<Cell> values, std::size_t width, const PointMeta& meta,
                    const std::string& error) {
  values.resize(width);
  Row row;
  row.cells = std::move(keys);
  row.cells.insert(row.cells.end(), values.begin(), values.end());
  row.cells.push_back(meta.cutoff > 0 ? Cell(static_cast<long long>(meta.cutoff)) : Cell());
  row.cells.push_back(meta.cutoff > 0 ? Cell(meta.leakage) : Cell());
  row.cells.push_back(error);
  row.meta = meta;
  return row;
}

/// Everything computed once per (state, N, T) unit.
struct Context {
  std::optional<StateSpec> spec;
  std::optional<double> N;
  std::optional<PreparedState> prepared;
  std::optional<Fringe> fringe;
  std::string error;

  PointMeta meta() const {
    return prepared ? PointMeta{prepared->cutoff, prepared->state.leakage()} : PointMeta{};
  }
  Cell r_cell() const { return spec ? Cell(spec->r) : Cell(); }
  Cell N_cell() const { return opt(N); }
};

inline Context make_context(const StateEntry& e, std::optional<double> target_N, const NumericOptions& numeric,
                            std::optional<std::pair<double, double>> T) {
  Context ctx;
  try {
    StateSpec s = e.spec;
    if (!target_N) target_N = e.target_N;
    if (target_N) s.r = invert_mean_photon(s, *target_N);
    ctx.spec = s;
    ctx.N = mean_photon(s);
    ctx.prepared = prepare(s, numeric);
    if (T) ctx.fringe = oamzi::fringe(ctx.prepared->state, T->first, T->second);
  } catch (const std::exception& ex) {
    ctx.error = describe(ex);
  }
  return ctx;
}

struct Reference {
  std::optional<double> parity;
  std::optional<double> delta_theta;
  std::string name;
};

/// Closed forms that apply at a point: repaired PSA11/PAS11 (lossless),
/// TMSV and PS11 (any transmittance). All assume the geared bias π/2.
inline Reference reference_for(const StateSpec& s, const InterferometerConfig& cfg, bool literal_fisher) {
  Reference ref;
  if (cfg.bias_mode != BiasMode::Geared || cfg.bias != std::numbers::pi / 2 || s.psi != 0.0) return ref;
  const double z = std::tanh(s.r);
  const bool lossless = cfg.lossless();
  auto attempt = [](auto&& f) -> std::optional<double> {
    try {
      return f();
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  const std::string name = s.name();
  if (s.kind == StateKind::TMSV) {
    ref.name = "TMSV closed form";
    ref.parity = attempt([&] { return reference::parity_tmsv_lossy_derived(z, cfg.theta, cfg.L, cfg.T_a, cfg.T_b); });
  } else if (name == "PS11") {
    ref.name = "PS11 lossy closed form";
    ref.parity = attempt([&] { return reference::parity_ps11_lossy_derived(z, cfg.theta, cfg.L, cfg.T_a, cfg.T_b); });
  } else if (lossless && s.convention == OrderConvention::NameDriven && (name == "PSA11" || name == "PAS11")) {
    const bool psa = name == "PSA11";
    ref.name = psa ? "PSA11 closed form" : "PAS11 closed form";
    ref.parity = attempt([&] {
      return psa ? reference::parity_psa11(z, cfg.theta, cfg.L) : reference::parity_pas11(z, cfg.theta, cfg.L);
    });
    if (!literal_fisher)
      ref.delta_theta = attempt([&] {
        return psa ? reference::sens_psa11(z, cfg.theta, cfg.L) : reference::sens_pas11(z, cfg.theta, cfg.L);
      });
  }
  return ref;
}

inline InterferometerConfig point_config(const SweepSpec& sp, int L, double theta, std::pair<double, double> T) {
  InterferometerConfig cfg;
  cfg.theta = theta;
  cfg.L = L;
  cfg.T_a = T.first;
  cfg.T_b = T.second;
  cfg.bias = sp.bias;
  cfg.bias_mode = sp.bias_mode;
  return cfg;
}

inline const std::vector<std::string> kSensitivityValues = {
    "parity",     "dP_dtheta", "fisher_classical", "delta_theta",         "snl",      "hl",
    "parity_ref", "parity_dev", "delta_theta_ref", "delta_theta_rel_dev", "reference"};

inline std::vector<Cell> sensitivity_values(const SweepSpec& sp, const Context& ctx, const InterferometerConfig& cfg) {
  const double h = sp.numeric.fd_step * std::max(1.0, std::abs(cfg.theta));
  const auto res = sensitivity(*ctx.fringe, cfg, h, sp.numeric.paper_literal_sensitivity);
  const auto ref = reference_for(*ctx.spec, cfg, sp.numeric.paper_literal_sensitivity);
  std::vector<Cell> v{res.parity, res.d_parity_d_theta, res.fisher_classical, res.delta_theta};
  v.push_back(*ctx.N > 0.0 ? Cell(1.0 / std::sqrt(*ctx.N)) : Cell());
  v.push_back(*ctx.N > 0.0 ? Cell(1.0 / *ctx.N) : Cell());
  v.push_back(opt(ref.parity));
  v.push_back(ref.parity ? Cell(std::abs(res.parity - *ref.parity)) : Cell());
  v.push_back(opt(ref.delta_theta));
  if (ref.delta_theta && std::isfinite(res.delta_theta))
    v.push_back(std::abs(res.delta_theta - *ref.delta_theta) / std::abs(*ref.delta_theta));
  else
    v.push_back(Cell());
  v.push_back(ref.name);
  return v;
}

inline std::vector<std::vector<Row>> execute(std::vector<Unit>& units, const RunOptions& o) {
  std::vector<std::vector<Row>> out(units.size());
  unsigned n = o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(units.size(), 1)));
  std::atomic<std::size_t> next{0}, done{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < units.size();) {
      try {
        out[i] = units[i]();
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
      const std::size_t d = done.fetch_add(1) + 1;
      if (o.progress) {
        std::lock_guard lock(mu);
        o.progress(d, units.size());
      }
    }
  };
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace detail

/// Evaluates every grid point of the sweep. Rows are ordered by state, then
/// N (or r), transmittance pair, L, theta, and finally any per-point sub-axis
/// (phase-space point or photon numbers); a failing point records its error
/// and leaves its observables empty.
inline ResultTable run_sweep(const SweepSpec& sp, const RunOptions& o = {}) {
  using namespace detail;
  check_guardrails(sp, o.allow_heavy);

  ResultTable table;
  table.experiment = to_string(sp.experiment);
  table.config_hash = config_hash(sp);
  std::vector<std::string> keys, values;
  std::vector<Unit> units;
  const auto& num_opt = sp.numeric;

  switch (sp.experiment) {
    case Experiment::Signal:
    case Experiment::Sensitivity: {
      const bool signal = sp.experiment == Experiment::Signal;
      keys = {"state", "r", "N", "T_a", "T_b", "L", "theta"};
      values = signal ? std::vector<std::string>{"phase", "parity", "parity_ref", "parity_dev", "reference"}
                      : kSensitivityValues;
      const std::size_t width = values.size();
      for (const auto& st : sp.states)
        for (const auto& T : sp.pairs_for(st))
          units.push_back([&sp, &st, T, signal, width, &num_opt] {
            const Context ctx = make_context(st, std::nullopt, num_opt, T);
            std::vector<Row> rows;
            for (int L : sp.L)
              for (double th : sp.theta) {
                const auto cfg = point_config(sp, L, th, T);
                std::vector<Cell> k{st.label, ctx.r_cell(), ctx.N_cell(), T.first, T.second, (long long)L, th};
                std::vector<Cell> v;
                std::string err = ctx.error;
                if (err.empty()) try {
                    if (signal) {
                      const double p = parity_expectation(*ctx.fringe, cfg);
                      const auto ref = reference_for(*ctx.spec, cfg, false);
                      v = {cfg.total_phase(), p, opt(ref.parity),
                           ref.parity ? Cell(std::abs(p - *ref.parity)) : Cell(), ref.name};
                    } else {
                      v = sensitivity_values(sp, ctx, cfg);
                    }
                  } catch (const std::exception& ex) {
                    err = describe(ex);
                  }
                rows.push_back(make_row(std::move(k), std::move(v), width, ctx.meta(), err));
              }
            return rows;
          });
      break;
    }

    case Experiment::SensitivityVsN: {
      keys = {"state", "N_target", "r", "N", "T_a", "T_b", "L", "theta"};
      values = kSensitivityValues;
      const std::size_t width = values.size();
      for (const auto& st : sp.states)
        for (double Nt : sp.N_grid)
          for (const auto& T : sp.pairs_for(st))
            units.push_back([&sp, &st, Nt, T, width, &num_opt] {
              const Context ctx = make_context(st, Nt, num_opt, T);
              std::vector<Row> rows;
              for (int L : sp.L)
                for (double th : sp.theta) {
                  const auto cfg = point_config(sp, L, th, T);
                  std::vector<Cell> k{st.label, Nt, ctx.r_cell(), ctx.N_cell(), T.first, T.second, (long long)L, th};
                  std::vector<Cell> v;
                  std::string err = ctx.error;
                  if (err.empty()) try {
                      v = sensitivity_values(sp, ctx, cfg);
                    } catch (const std::exception& ex) {
                      err = describe(ex);
                    }
                  rows.push_back(make_row(std::move(k), std::move(v), width, ctx.meta(), err));
                }
              return rows;
            });
      break;
    }

    case Experiment::FwhmVsL: {
      keys = {"state", "r", "N", "T_a", "T_b", "L"};
      values = {"peak_theta", "fwhm", "fwhm_times_L"};
      for (const auto& st : sp.states)
        for (const auto& T : sp.pairs_for(st))
          units.push_back([&sp, &st, T, &num_opt] {
            const Context ctx = make_context(st, std::nullopt, num_opt, T);
            std::vector<Row> rows;
            for (int L : sp.L) {
              const auto cfg = point_config(sp, L, 0.0, T);
              std::vector<Cell> k{st.label, ctx.r_cell(), ctx.N_cell(), T.first, T.second, (long long)L};
              std::vector<Cell> v;
              std::string err = ctx.error;
              if (err.empty()) try {
                  const double c = locate_peak(*ctx.fringe, cfg);
                  const double w = fwhm_refined(*ctx.fringe, cfg, c);
                  v = {c, w, w * L};
                } catch (const std::exception& ex) {
                  err = describe(ex);
                }
              rows.push_back(make_row(std::move(k), std::move(v), 3, ctx.meta(), err));
            }
            return rows;
          });
      break;
    }

    case Experiment::Qcrb: {
      const bool byN = sp.uses_N_grid();
      keys = byN ? std::vector<std::string>{"state", "N_target", "r", "N", "L", "theta"}
                 : std::vector<std::string>{"state", "r", "N", "L", "theta"};
      values = {"parity", "delta_theta", "fisher_quantum", "qcrb", "ratio"};
      const std::vector<std::optional<double>> Ns =
          byN ? std::vector<std::optional<double>>(sp.N_grid.begin(), sp.N_grid.end())
              : std::vector<std::optional<double>>{std::nullopt};
      for (const auto& st : sp.states)
        for (const auto& Nt : Ns)
          units.push_back([&sp, &st, Nt, byN, &num_opt] {
            const Context ctx = make_context(st, Nt, num_opt, std::pair{1.0, 1.0});
            std::vector<Row> rows;
            for (int L : sp.L) {
              std::optional<QfiResult> q;
              std::string qerr;
              if (ctx.error.empty()) try {
                  q = qfi(ctx.prepared->state, L);
                } catch (const std::exception& ex) {
                  qerr = describe(ex);
                }
              for (double th : sp.theta) {
                const auto cfg = point_config(sp, L, th, {1.0, 1.0});
                std::vector<Cell> k{st.label};
                if (byN) k.push_back(*Nt);
                k.insert(k.end(), {ctx.r_cell(), ctx.N_cell(), (long long)L, th});
                std::vector<Cell> v;
                std::string err = ctx.error.empty() ? qerr : ctx.error;
                if (err.empty()) try {
                    const double h = sp.numeric.fd_step * std::max(1.0, std::abs(th));
                    const auto s = sensitivity(*ctx.fringe, cfg, h, sp.numeric.paper_literal_sensitivity);
                    v = {s.parity, s.delta_theta, q->f_q, q->qcrb, s.delta_theta / q->qcrb};
                  } catch (const std::exception& ex) {
                    err = describe(ex);
                  }
                rows.push_back(make_row(std::move(k), std::move(v), 5, ctx.meta(), err));
              }
            }
            return rows;
          });
      break;
    }

    case Experiment::Diagnostics: {
      keys = {"state", "r", "N"};
      values = {"entropy", "argmax_na", "argmax_nb", "peak_probability", "reduced_parity", "wigner_min",
                "wigner_origin", "parity_link_dev"};
      for (const auto& st : sp.states)
        units.push_back([&sp, &st, &num_opt] {
          const Context ctx = make_context(st, std::nullopt, num_opt, std::nullopt);
          std::vector<Cell> v;
          std::string err = ctx.error;
          if (err.empty()) try {
              const auto& s = ctx.prepared->state;
              const auto jd = joint_distribution(s);
              v = {entropy(s), (long long)jd.argmax_a, (long long)jd.argmax_b,
                   jd.probabilities(jd.argmax_a, jd.argmax_b)};
              const auto rho = reduced_density(s, sp.wigner.mode);
              double par = 0.0;
              for (int n = 0; n < rho.cutoff; ++n) par += (n % 2 ? -1.0 : 1.0) * rho.matrix(n, n).real();
              v.push_back(par);
              const auto grid = wigner(rho, WignerGridSpec::square(sp.wigner.half_width, sp.wigner.points));
              const double w0 = wigner_at(rho, 0.0);
              v.insert(v.end(), {grid.min_value, w0, std::abs(w0 - 2.0 / std::numbers::pi * par)});
            } catch (const std::exception& ex) {
              err = describe(ex);
            }
          std::vector<Row> rows;
          rows.push_back(make_row({st.label, ctx.r_cell(), ctx.N_cell()}, std::move(v), 8, ctx.meta(), err));
          return rows;
        });
      break;
    }

    case Experiment::Wigner: {
      const bool phased = sp.wigner.after_phase;
      keys = phased ? std::vector<std::string>{"state", "r", "N", "L", "theta", "re_alpha", "im_alpha"}
                    : std::vector<std::string>{"state", "r", "N", "re_alpha", "im_alpha"};
      values = {"W", "orientation"};
      const auto gspec = WignerGridSpec::square(sp.wigner.half_width, sp.wigner.points);
      std::vector<std::pair<int, double>> stages;
      if (phased)
        for (int L : sp.L)
          for (double th : sp.theta) stages.emplace_back(L, th);
      else
        stages.emplace_back(0, 0.0);
      for (const auto& st : sp.states)
        for (const auto& [L, th] : stages)
          units.push_back([&sp, &st, L, th, phased, gspec, &num_opt] {
            const Context ctx = make_context(st, std::nullopt, num_opt, std::nullopt);
            std::optional<WignerGrid> grid;
            double orientation = 0.0;
            std::string err = ctx.error;
            if (err.empty()) try {
                TwoModeState s = ctx.prepared->state;
                if (phased) {
                  s = beam_splitter(s, Splitter::BS1);
                  s = oam_phase(s, point_config(sp, L, th, {1.0, 1.0}).total_phase(), 1);
                }
                const auto rho = reduced_density(s, sp.wigner.mode);
                grid = wigner(rho, gspec);
                orientation = wigner_orientation(rho);
              } catch (const std::exception& ex) {
                err = describe(ex);
              }
            std::vector<Row> rows;
            for (int i = 0; i < gspec.re_points; ++i)
              for (int j = 0; j < gspec.im_points; ++j) {
                const double re = gspec.re_min + gspec.re_step() * i, im = gspec.im_min + gspec.im_step() * j;
                std::vector<Cell> k{st.label, ctx.r_cell(), ctx.N_cell()};
                if (phased) k.insert(k.end(), {(long long)L, th});
                k.insert(k.end(), {re, im});
                std::vector<Cell> v;
                if (grid) v = {grid->values(i, j), orientation};
                rows.push_back(make_row(std::move(k), std::move(v), 2, ctx.meta(), err));
              }
            return rows;
          });
      break;
    }

    case Experiment::JointDistribution: {
      keys = {"state", "r", "N", "n_a", "n_b"};
      values = {"probability"};
      for (const auto& st : sp.states)
        units.push_back([&sp, &st, &num_opt] {
          const Context ctx = make_context(st, std::nullopt, num_opt, std::nullopt);
          std::optional<JointDistribution> jd;
          std::string err = ctx.error;
          if (err.empty()) try {
              jd = joint_distribution(ctx.prepared->state);
            } catch (const std::exception& ex) {
              err = describe(ex);
            }
          std::vector<Row> rows;
          for (int a = 0; a <= sp.joint_max_n; ++a)
            for (int b = 0; b <= sp.joint_max_n; ++b) {
              std::vector<Cell> v;
              if (jd) v = {a < jd->cutoff && b < jd->cutoff ? jd->probabilities(a, b) : 0.0};
              rows.push_back(make_row({st.label, ctx.r_cell(), ctx.N_cell(), (long long)a, (long long)b},
                                      std::move(v), 1, ctx.meta(), err));
            }
          return rows;
        });
      break;
    }

    case Experiment::PhotonVsR: {
      keys = {"state", "r"};
      values = {"N"};
      for (const auto& st : sp.states)
        units.push_back([&sp, &st] {
          std::vector<Row> rows;
          for (double r : sp.r_grid) {
            StateSpec s = st.spec;
            s.r = r;
            std::vector<Cell> v;
            std::string err;
            try {
              v = {mean_photon(s)};
            } catch (const std::exception& ex) {
              err = describe(ex);
            }
            rows.push_back(make_row({st.label, r}, std::move(v), 1, {}, err));
          }
          return rows;
        });
      break;
    }

    case Experiment::EntropyVsN: {
      keys = {"state", "N_target", "r", "N"};
      values = {"entropy", "entropy_ref"};
      for (const auto& st : sp.states)
        for (double Nt : sp.N_grid)
          units.push_back([&st, Nt, &num_opt] {
            const Context ctx = make_context(st, Nt, num_opt, std::nullopt);
            std::vector<Cell> v;
            std::string err = ctx.error;
            if (err.empty()) try {
                v = {entropy(ctx.prepared->state)};
                if (ctx.spec->kind == StateKind::TMSV) {
                  const double c2 = std::pow(std::cosh(ctx.spec->r), 2), s2 = std::pow(std::sinh(ctx.spec->r), 2);
                  v.push_back(s2 > 0.0 ? c2 * std::log(c2) - s2 * std::log(s2) : 0.0);
                }
              } catch (const std::exception& ex) {
                err = describe(ex);
              }
            std::vector<Row> rows;
            rows.push_back(make_row({st.label, Nt, ctx.r_cell(), ctx.N_cell()}, std::move(v), 2, ctx.meta(), err));
            return rows;
          });
      break;
    }
  }

  table.header = keys;
  table.header.insert(table.header.end(), values.begin(), values.end());
  table.header.insert(table.header.end(), {"cutoff", "leakage", "error"});
  for (auto& unit_rows : execute(units, o))
    for (auto& row : unit_rows) {
      table.rows.push_back(std::move(row.cells));
      table.points.push_back(row.meta);
    }
  return table;
}

}  // namespace oamzi::sweep

#pragma once

// Observables: output parity, phase sensitivity from the classical Fisher
// information of the parity outcome, fringe width, mean photon number and
// quantum Fisher information.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "oamzi/channels.hpp"
#include "oamzi/errors.hpp"
#include "oamzi/fock.hpp"
#include "oamzi/state.hpp"

namespace oamzi {

struct NumericOptions {
  double leak_tol = kDefaultLeakTol;
  int cutoff_cap = 64;
  double fd_step = 1e-6;  // relative: the actual step is fd_step * max(1, |theta|)
  bool paper_literal_sensitivity = false;

  CutoffOptions cutoff_options() const { return {leak_tol, cutoff_cap, 4}; }
};

struct ClampedParity {
  double value;
  bool clamped;
};

inline ClampedParity clamp_parity(double p) {
  if (p > 1.0) return {1.0, true};
  if (p < -1.0) return {-1.0, true};
  return {p, false};
}

/// Tr[rho (-1)^{n_b}], clamped to [-1, 1].
inline double parity_expectation(const DensityOperator& rho) {
  const int c = rho.cutoff;
  double p = 0.0;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) {
      const int i = joint_index(a, b, c);
      p += (b % 2 ? -1.0 : 1.0) * rho.matrix(i, i).real();
    }
  return clamp_parity(p).value;
}

/// <psi|(-1)^{n_b}|psi> for an output state.
inline double parity_expectation(const TwoModeState& out) {
  const int c = out.cutoff();
  double p = 0.0;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) p += (b % 2 ? -1.0 : 1.0) * std::norm(out(a, b));
  return clamp_parity(p).value;
}

inline double parity_expectation(const Fringe& f, const InterferometerConfig& cfg) {
  return clamp_parity(f.value(cfg)).value;
}

/// A constructed input state together with the cutoff that was chosen for it.
struct PreparedState {
  StateSpec spec;
  int cutoff = 0;
  TwoModeState state{1};
  double norm_before = 0.0;
};

inline PreparedState prepare(const StateSpec& spec, const NumericOptions& opt = {}) {
  const int c = choose_cutoff(spec, opt.cutoff_options());
  auto built = build_state(spec, c, opt.leak_tol);
  return {spec, c, std::move(built.state), built.norm_before};
}

struct SensitivityResult {
  double theta = 0.0;
  double parity = 0.0;
  double d_parity_d_theta = 0.0;
  double delta_theta = 0.0;
  double fisher_classical = 0.0;
  double analytic_derivative = 0.0;  // series derivative, for cross-checking the difference quotient
};

namespace detail {

/// P(hi) - P(lo) summed term by term as -4 sum Im[...] sin(), free of the
/// cancellation a plain subtraction suffers near a fringe peak.
inline double fringe_difference(const Fringe& f, double hi, double lo) {
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo) + std::numbers::pi / 2;
  double acc = 0.0;
  for (std::size_t q = f.R.size(); q-- > 1;) {
    const Complex rot = f.R[q] * std::polar(1.0, -double(q) * mid);
    acc += 4.0 * std::sin(double(q) * half) * rot.imag();
  }
  return acc;
}

}  // namespace detail

/// Phase sensitivity at cfg.theta from a precomputed fringe. `fd_step` is the
/// absolute central-difference step; pass 0 for 1e-6 * max(1, |theta|).
inline SensitivityResult sensitivity(const Fringe& f, const InterferometerConfig& cfg, double fd_step = 0.0,
                                     bool paper_literal = false) {
  const double h = fd_step > 0.0 ? fd_step : 1e-6 * std::max(1.0, std::abs(cfg.theta));
  InterferometerConfig hi = cfg, lo = cfg;
  hi.theta += h;
  lo.theta -= h;

  SensitivityResult res;
  res.theta = cfg.theta;
  res.parity = parity_expectation(f, cfg);
  res.d_parity_d_theta = detail::fringe_difference(f, hi.total_phase(), lo.total_phase()) / (2.0 * h);
  res.analytic_derivative = f.derivative(cfg.total_phase()) * cfg.phase_gear();

  const double num = std::max(0.0, paper_literal ? 1.0 - res.parity : 1.0 - res.parity * res.parity);
  const double slope = std::abs(res.d_parity_d_theta);
  if ((slope < 1e-14 || (num < 1e-14 && slope < 1e-7)) && num < 1e-14)
    fail(ErrorKind::DerivativeVanished, "parity is stationary at full visibility (theta=" + std::to_string(cfg.theta) +
                                            "); the Fisher information is 0/0");
  if (slope < 1e-14) {
    res.fisher_classical = 0.0;
    res.delta_theta = std::numeric_limits<double>::infinity();
    return res;
  }
  res.fisher_classical = res.d_parity_d_theta * res.d_parity_d_theta / num;
  res.delta_theta = std::sqrt(num) / slope;
  return res;
}

/// Builds the input at its converged cutoff, propagates it and evaluates the
/// sensitivity at cfg.theta.
inline SensitivityResult sensitivity(const StateSpec& spec, const InterferometerConfig& cfg,
                                     const NumericOptions& opt = {}) {
  cfg.validate();
  const auto prep = prepare(spec, opt);
  const auto f = fringe(prep.state, cfg.T_a, cfg.T_b);
  return sensitivity(f, cfg, opt.fd_step * std::max(1.0, std::abs(cfg.theta)), opt.paper_literal_sensitivity);
}

/// Central-peak width at half of (peak - baseline) of a sampled curve, the
/// baseline being the curve minimum. Crossings are linearly interpolated.
inline double fwhm(const std::vector<std::pair<double, double>>& curve) {
  if (curve.size() < 3) fail(ErrorKind::NoPeak, "curve needs at least three samples");
  std::size_t ip = 0, im = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].second > curve[ip].second) ip = i;
    if (curve[i].second < curve[im].second) im = i;
  }
  const double peak = curve[ip].second, base = curve[im].second;
  if (peak - base < 1e-12) fail(ErrorKind::NoPeak, "curve is flat");
  const double half = base + 0.5 * (peak - base);

  auto cross = [&](std::size_t a, std::size_t b) {
    const auto [x0, y0] = curve[a];
    const auto [x1, y1] = curve[b];
    return x0 + (half - y0) * (x1 - x0) / (y1 - y0);
  };
  std::size_t l = ip;
  while (l > 0 && curve[l - 1].second >= half) --l;
  std::size_t r = ip;
  while (r + 1 < curve.size() && curve[r + 1].second >= half) ++r;
  if (l == 0 || r + 1 == curve.size()) fail(ErrorKind::NoPeak, "peak is not interior to the sampled range");
  return cross(r, r + 1) - cross(l - 1, l);
}

/// Samples `samples` points of theta over [center - span/2, center + span/2]
/// from a fringe and returns the curve (theta, parity).
inline std::vector<std::pair<double, double>> sample_curve(const Fringe& f, InterferometerConfig cfg, double center,
                                                           double span, int samples) {
  std::vector<std::pair<double, double>> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    cfg.theta = center - span / 2 + span * i / (samples - 1);
    out.emplace_back(cfg.theta, parity_expectation(f, cfg));
  }
  return out;
}

/// FWHM of the fringe peak at `center`, with crossings refined by bisection on
/// the exact series rather than interpolated. Baseline is the minimum over
/// one period (π / L) sampled at `samples` points.
inline double fwhm_refined(const Fringe& f, InterferometerConfig cfg, double center = 0.0, int samples = 2001) {
  const double period = std::numbers::pi / cfg.L;
  const auto curve = sample_curve(f, cfg, center, period, samples);
  auto pv = [&](double th) {
    cfg.theta = th;
    return f.value(cfg);
  };
  const double peak = pv(center);
  double base = peak;
  for (const auto& pt : curve) base = std::min(base, pt.second);
  if (peak - base < 1e-12) fail(ErrorKind::NoPeak, "fringe is flat");
  const double half = base + 0.5 * (peak - base);
  auto edge = [&](int dir) {
    const double step = period / (samples - 1);
    double inside = center, outside = center;
    for (int i = 1; i < samples; ++i) {
      outside = center + dir * step * i;
      if (pv(outside) < half) break;
      inside = outside;
    }
    if (pv(outside) >= half) fail(ErrorKind::NoPeak, "no half-maximum crossing within one period");
    for (int it = 0; it < 200 && std::abs(outside - inside) > 1e-15 * std::max(1.0, std::abs(inside)); ++it) {
      const double mid = 0.5 * (inside + outside);
      (pv(mid) >= half ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  return edge(+1) - edge(-1);
}

/// theta of the fringe maximum nearest 0: the best of `samples` points over
/// one period, polished by bisection on the sign of the series derivative.
inline double locate_peak(const Fringe& f, InterferometerConfig cfg, int samples = 2001) {
  const double period = std::numbers::pi / cfg.L;
  const auto curve = sample_curve(f, cfg, 0.0, period, samples);
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].second > curve[best].second + 1e-15 ||
        (std::abs(curve[i].second - curve[best].second) <= 1e-15 && std::abs(curve[i].first) < std::abs(curve[best].first)))
      best = i;
  const double step = period / (samples - 1);
  auto slope = [&](double th) {
    cfg.theta = th;
    return f.derivative(cfg.total_phase());
  };
  double lo = curve[best].first - step, hi = curve[best].first + step;
  if (!(slope(lo) > 0.0 && slope(hi) < 0.0)) return curve[best].first;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// sum (n_a + n_b) |amplitude|^2.
inline double mean_photon(const TwoModeState& s) {
  const int c = s.cutoff();
  double acc = 0.0;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) acc += (a + b) * std::norm(s(a, b));
  return acc;
}

/// Mean photon number of a recipe, evaluated on its grid-free diagonal profile.
inline double mean_photon(const StateSpec& spec) {
  const auto prof = diagonal_profile(spec);
  double w = 0.0, nw = 0.0;
  for (std::size_t na = 0; na < prof.magnitude.size(); ++na) {
    const double p = prof.magnitude[na] * prof.magnitude[na];
    w += p;
    nw += (2.0 * na + prof.offset) * p;
  }
  if (!(w > 0.0)) fail(ErrorKind::ZeroNorm, spec.name() + " vanishes at r=" + std::to_string(spec.r));
  return nw / w;
}

struct InversionOptions {
  double r_min = 1e-6;
  double r_max = 4.0;
  double tol = 1e-8;
  int bracket_points = 64;
};

/// Squeezing r at which the recipe (kind and orders of `spec`) has mean
/// photon number `target_N`.
inline double invert_mean_photon(StateSpec spec, double target_N, const InversionOptions& opt = {}) {
  auto N_at = [&](double r) {
    spec.r = r;
    return mean_photon(spec);
  };
  // States that exist at r = 0 start there; subtraction-type states start at r_min.
  double r_lo = 0.0;
  double n_lo;
  try {
    n_lo = N_at(0.0);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ZeroNorm) throw;
    r_lo = opt.r_min;
    n_lo = N_at(r_lo);
  }
  const double n_hi = N_at(opt.r_max);
  if (target_N < n_lo - opt.tol)
    fail(ErrorKind::TargetUnreachable, spec.name() + " cannot reach N=" + std::to_string(target_N) +
                                           "; its r->0 intercept is " + std::to_string(n_lo));
  if (target_N > n_hi + opt.tol)
    fail(ErrorKind::TargetUnreachable, spec.name() + " needs r beyond " + std::to_string(opt.r_max) + " for N=" +
                                           std::to_string(target_N));
  if (target_N <= n_lo + opt.tol) return r_lo;

  double prev = n_lo;
  double a = r_lo, b = opt.r_max;
  for (int i = 1; i <= opt.bracket_points; ++i) {
    const double r = r_lo + (opt.r_max - r_lo) * i / opt.bracket_points;
    const double n = N_at(r);
    if (n < prev - 1e-12)
      fail(ErrorKind::InvalidArgument, spec.name() + ": mean photon number is not monotone in r near r=" +
                                           std::to_string(r));
    if (prev <= target_N && target_N <= n) {
      a = r - (opt.r_max - r_lo) / opt.bracket_points;
      b = r;
      break;
    }
    prev = n;
  }
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    const double n = N_at(m);
    if (std::abs(n - target_N) < opt.tol && b - a < 1e-12) return m;
    (n < target_N ? a : b) = m;
    if (b - a < 1e-15) break;
  }
  const double r = 0.5 * (a + b);
  if (std::abs(N_at(r) - target_N) >= opt.tol)
    fail(ErrorKind::TargetUnreachable, spec.name() + ": bisection stalled at N=" + std::to_string(N_at(r)));
  return r;
}

struct QfiResult {
  double f_q = 0.0;
  double qcrb = 0.0;
};

/// J2 = (a†b - ab†)/(2i) applied to a state, on a grid one larger so the
/// result is exact.
inline TwoModeState apply_j2(const TwoModeState& s) {
  const TwoModeState big = s.resized(s.cutoff() + 1);
  const TwoModeState adag_b = apply_creation(apply_annihilation(big, Mode::B), Mode::A, 1.0);
  const TwoModeState a_bdag = apply_creation(apply_annihilation(big, Mode::A), Mode::B, 1.0);
  TwoModeState out(big.cutoff(), s.leakage());
  out.amplitudes() = (adag_b.amplitudes() - a_bdag.amplitudes()) / Complex(0.0, 2.0);
  return out;
}

/// Quantum Fisher information of the input for the geared phase theta:
/// F_Q = 4 L^2 Var(J2).
inline QfiResult qfi(const TwoModeState& input, int L = 1) {
  const TwoModeState big = input.resized(input.cutoff() + 1);
  const TwoModeState j = apply_j2(input);
  const double mean = big.amplitudes().dot(j.amplitudes()).real();
  const double var = j.amplitudes().squaredNorm() - mean * mean;
  const double fq = 4.0 * L * L * var;
  if (!(fq >= 1e-14)) fail(ErrorKind::ZeroInformation, "quantum Fisher information " + std::to_string(fq) + " vanishes");
  return {fq, 1.0 / std::sqrt(fq)};
}

}  // namespace oamzi

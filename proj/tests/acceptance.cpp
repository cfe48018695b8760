// Acceptance run: one line per criterion with the measured figures of merit.
//
// Status words:
//   PASS      every check of the criterion met its pinned tolerance
//   DEMOTED   the published closed form misses the gate, its repaired or
//             derived replacement meets it, and the engine is the oracle of
//             record for that formula (TRANSCRIPTION.md)
//   FAIL      a check missed its tolerance
//
// Exit status is nonzero when any criterion reports FAIL.

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oamzi/diagnostics.hpp"
#include "oamzi/measurement.hpp"
#include "oamzi/reference.hpp"
#include "oamzi/sweep/run.hpp"

using namespace oamzi;
using std::numbers::pi;

namespace {

constexpr double kR = 1.096;

enum class Status { Pass, Demoted, Fail };

struct Verdict {
  Status status = Status::Pass;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) status = Status::Fail;
    note(std::string(ok ? "ok " : "MISS ") + what);
  }
  void demote(const std::string& what) {
    if (status == Status::Pass) status = Status::Demoted;
    note("demoted " + what);
  }
  void note(const std::string& s) {
    if (detail.tellp() > 0) detail << "; ";
    detail << s;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

NumericOptions precise() {
  NumericOptions o;
  o.cutoff_cap = 512;
  o.leak_tol = 1e-13;
  return o;
}

InterferometerConfig at(double theta, int L = 1, double Ta = 1.0, double Tb = 1.0) {
  InterferometerConfig cfg;
  cfg.theta = theta;
  cfg.L = L;
  cfg.T_a = Ta;
  cfg.T_b = Tb;
  return cfg;
}

Fringe fringe_of(const StateSpec& spec, double Ta = 1.0, double Tb = 1.0) {
  return fringe(prepare(spec, precise()).state, Ta, Tb);
}

StateSpec at_N(const char* name, double N) {
  auto s = StateSpec::named(name);
  s.r = invert_mean_photon(s, N);
  return s;
}

std::vector<double> period_grid(int L, int count = 200) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(-pi / (2 * L) + (pi / L) * i / count);
  return g;
}

double max_dev(const Fringe& f, int L, const std::function<double(double)>& closed, double Ta = 1, double Tb = 1) {
  double worst = 0.0;
  for (double th : period_grid(L)) worst = std::max(worst, std::abs(f.value(at(th, L, Ta, Tb)) - closed(th)));
  return worst;
}

// Lowest Δθ over a theta grid that is fine near the fringe center.
double min_delta(const Fringe& f, int L, double Ta = 1, double Tb = 1) {
  double best = INFINITY;
  for (int s : {-1, 1})
    for (double e = -6; e <= std::log10(0.3); e += 0.01) {
      try {
        const auto res = sensitivity(f, at(s * std::pow(10.0, e) / L, L, Ta, Tb));
        // Below this the numerator 1 - P^2 is at the rounding floor of P.
        if (1 - res.parity * res.parity < 1e-9) continue;
        best = std::min(best, res.delta_theta);
      } catch (const Error&) {
      }
    }
  return best;
}

std::pair<int, int> diagnostics_argmax(const StateSpec& spec) {
  const auto jd = joint_distribution(prepare(spec, precise()).state);
  return {jd.argmax_a, jd.argmax_b};
}

const char* kAll[] = {"TMSV", "PA11", "PS11", "PAS11", "PSA11", "PA22", "PS22", "PAS22", "PSA22"};

// ---------------------------------------------------------------------------

bool convention_matches(OrderConvention conv, double* worst_out) {
  const double z = std::tanh(kR);
  double worst = 0.0;
  for (auto [name, closed] : {std::pair{"PSA11", &reference::parity_psa11}, {"PAS11", &reference::parity_pas11}}) {
    auto spec = StateSpec::named(name, kR);
    spec.convention = conv;
    if (conv == OrderConvention::MixedMode) spec.J = spec.K = 0;
    const auto f = fringe_of(spec);
    for (int L : {1, 3, 5}) worst = std::max(worst, max_dev(f, L, [&](double th) { return closed(z, th, L); }));
  }
  *worst_out = worst;
  return worst < 1e-6;
}

void criterion1(Verdict& v) {
  const double z = std::tanh(kR);
  double worst = 0.0;
  convention_matches(OrderConvention::NameDriven, &worst);
  v.check(worst < 1e-6, "PSA11/PAS11 repaired forms max|dP| " + fmt(worst));

  double printed = 0.0;
  for (auto [name, closed] :
       {std::pair{"PSA11", &reference::parity_psa11_printed}, {"PAS11", &reference::parity_pas11_printed}}) {
    const auto f = fringe_of(StateSpec::named(name, kR));
    for (int L : {1, 3, 5}) printed = std::max(printed, max_dev(f, L, [&](double th) { return closed(z, th, L); }));
  }
  if (printed >= 1e-6) v.demote("printed PSA11/PAS11 parity max|dP| " + fmt(printed));

  double ps_printed = 0.0, ps_derived = 0.0;
  for (auto [Ta, Tb] : {std::pair{1.0, 1.0}, {0.5, 0.5}, {0.1, 0.9}}) {
    const auto f = fringe_of(StateSpec::named("PS11", kR), Ta, Tb);
    for (int L : {1, 3, 5}) {
      ps_printed = std::max(ps_printed, max_dev(f, L, [&](double th) {
                              return reference::parity_ps11_lossy_printed(z, th, L, Ta, Tb);
                            }, Ta, Tb));
      ps_derived = std::max(ps_derived, max_dev(f, L, [&](double th) {
                              return reference::parity_ps11_lossy_derived(z, th, L, Ta, Tb);
                            }, Ta, Tb));
    }
  }
  v.check(ps_derived < 1e-6, "PS11 lossy derived form max|dP| " + fmt(ps_derived));
  if (ps_printed >= 1e-6) v.demote("printed lossy PS11 parity max|dP| " + fmt(ps_printed));
  else v.note("printed lossy PS11 parity max|dP| " + fmt(ps_printed));
}

void criterion2(Verdict& v) {
  const double z = std::tanh(kR);
  double rep = 0.0, printed = 0.0;
  int points = 0;
  for (auto [name, fixed, lit] : {std::tuple{"PSA11", &reference::sens_psa11, &reference::sens_psa11_printed},
                                  {"PAS11", &reference::sens_pas11, &reference::sens_pas11_printed}}) {
    const auto f = fringe_of(StateSpec::named(name, kR));
    for (int L : {1, 3, 5})
      for (double th : period_grid(L)) {
        if (std::abs(std::sin(L * (pi + 2 * th))) <= 1e-3) continue;
        const double fd = sensitivity(f, at(th, L)).delta_theta;
        rep = std::max(rep, std::abs(fixed(z, th, L) / fd - 1));
        printed = std::max(printed, std::abs(lit(z, th, L) / fd - 1));
        ++points;
      }
  }
  v.check(rep < 1e-4, "repaired PSA11/PAS11 sensitivity max rel " + fmt(rep) + " over " + std::to_string(points) + " points");
  if (printed >= 1e-4) v.demote("printed PSA11/PAS11 sensitivity max rel " + fmt(printed));
}

void criterion3(Verdict& v) {
  double nd = 0.0, mm = 0.0;
  const bool a = convention_matches(OrderConvention::NameDriven, &nd);
  const bool b = convention_matches(OrderConvention::MixedMode, &mm);
  v.check(a != b, std::string("exactly one convention matches: name_driven ") + (a ? "yes" : "no") + " (" + fmt(nd) +
                      "), mixed_mode " + (b ? "yes" : "no") + " (" + fmt(mm) + ")");
  v.note(std::string("pinned ") + (a ? "name_driven" : b ? "mixed_mode" : "none"));

  std::string record;
  bool reproduced = false;
  for (int order : {1, 2}) {
    const std::string o = std::to_string(order) + std::to_string(order);
    const auto pas = diagnostics_argmax(StateSpec::named("PAS" + o, kR));
    const auto psa = diagnostics_argmax(StateSpec::named("PSA" + o, kR));
    record += " PAS" + o + "->|" + std::to_string(pas.first) + "," + std::to_string(pas.second) + ">";
    record += " PSA" + o + "->|" + std::to_string(psa.first) + "," + std::to_string(psa.second) + ">";
    if (pas == std::pair{8, 8} && psa == std::pair{9, 9}) {
      reproduced = true;
      record += " (order " + o + " reproduces |8,8>/|9,9>)";
    }
  }
  v.check(reproduced, "joint-distribution peaks:" + record);
}

void criterion4(Verdict& v) {
  double worst = 0.0;
  for (const char* name : {"PSA11", "PAS22", "TMSV"}) {
    const auto in = prepare(StateSpec::named(name, 0.6), precise()).state;
    for (int L : {2, 3, 7})
      for (double th : {-0.21, 0.013, 0.4}) {
        // parity at gear L and theta equals parity at L = 1 with the geared argument
        const double geared = L * (th + pi / 2) - pi / 2;
        const double a = parity_expectation(propagate_pure(in, at(th, L)));
        const double b = parity_expectation(propagate_pure(in, at(geared, 1)));
        worst = std::max(worst, std::abs(a - b));
      }
  }
  v.check(worst < 1e-12, "gearing identity max|dP| " + fmt(worst));

  double fw = 0.0;
  for (double r : {0.2, 0.4, 0.8}) {
    const auto f = fringe_of(StateSpec::named("PSA11", r));
    const double w1 = fwhm_refined(f, at(0, 1), locate_peak(f, at(0, 1)));
    for (int L = 2; L <= 10; ++L) {
      const double wl = fwhm_refined(f, at(0, L), locate_peak(f, at(0, L)));
      fw = std::max(fw, std::abs(wl * L / w1 - 1));
    }
  }
  v.check(fw < 1e-6, "PSA11 FWHM(L) L/FWHM(1) max rel dev " + fmt(fw) + " (L = 2..10)");
}

void criterion5(Verdict& v) {
  double worst_ratio = 0.0, lowest_ratio = INFINITY;
  for (const char* name : {"PAS11", "PSA11", "PAS22", "PSA22"})
    for (double r : {0.3, 0.7, kR}) {
      const auto p = prepare(StateSpec::named(name, r), precise());
      const double bound = qfi(p.state).qcrb;
      const double best = min_delta(fringe(p.state, 1, 1), 1);
      worst_ratio = std::max(worst_ratio, best / bound);
      lowest_ratio = std::min(lowest_ratio, best / bound);
    }
  v.check(lowest_ratio >= 1 - 1e-6, "min-theta dtheta / QCRB >= 1 (lowest " + fmt(lowest_ratio) + ")");
  v.check(worst_ratio <= 1.05, "within 5% of QCRB (highest ratio " + fmt(worst_ratio) + ")");
}

void criterion6(Verdict& v) {
  std::vector<double> width, delta;
  for (const char* name : kAll) {
    const auto f = fringe_of(StateSpec::named(name, kR));
    width.push_back(fwhm_refined(f, at(0, 1), locate_peak(f, at(0, 1))));
    delta.push_back(sensitivity(f, at(1e-3)).delta_theta);
  }
  auto rank = [&](const std::vector<double>& x, const std::string& what) {
    bool tmsv_worst = true, psa_best = true, higher_better = true;
    for (int i = 1; i < 9; ++i) tmsv_worst = tmsv_worst && x[0] > x[i];
    for (int i = 1; i <= 3; ++i) psa_best = psa_best && x[4] < x[i];
    for (int i = 1; i <= 4; ++i) higher_better = higher_better && x[i + 4] < x[i];
    std::string vals;
    for (int i = 0; i < 9; ++i) vals += std::string(i ? " " : "") + kAll[i] + "=" + fmt(x[i]);
    v.check(tmsv_worst, what + " TMSV worst");
    v.check(psa_best, what + " PSA11 best of order 1");
    v.check(higher_better, what + " X22 better than X11 [" + vals + "]");
  };
  rank(width, "FWHM");
  rank(delta, "dtheta(1e-3)");
}

void criterion7(Verdict& v) {
  const std::vector<std::pair<double, double>> splits = {{0.5, 0.5}, {0.4, 0.6}, {0.3, 0.7}, {0.2, 0.8}, {0.1, 0.9}};
  bool mono = true;
  std::string bad;
  for (const char* name : kAll) {
    double prev = 0.0;
    for (auto [Ta, Tb] : splits) {
      const double m = min_delta(fringe_of(StateSpec::named(name, kR), Ta, Tb), 1, Ta, Tb);
      if (m < prev) {
        mono = false;
        bad += std::string(" ") + name;
      }
      prev = m;
    }
  }
  v.check(mono, "min-theta dtheta rises from (0.5,0.5) to (0.1,0.9) for all nine states" + (bad.empty() ? "" : " except" + bad));

  bool order = true;
  std::string detail;
  for (double N = 3; N <= 8; N += 1) {
    const double t = sensitivity(at_N("TMSV", N), at(1e-4, 1, 0.5, 0.5), precise()).delta_theta;
    const double p = sensitivity(at_N("PSA11", N), at(1e-4, 1, 0.5, 0.5), precise()).delta_theta;
    order = order && t >= p;
    detail += " N=" + fmt(N) + ":" + fmt(t) + "/" + fmt(p);
  }
  v.check(order, "T=0.5 dtheta(TMSV) >= dtheta(PSA11) at N = 3..8 [" + detail.substr(1) + "]");
}

// Width of the contiguous theta interval around 0 with dtheta above twice its minimum.
double gap_width(const Fringe& f, int L) {
  std::vector<double> th, d;
  for (int i = 0; i < 2000; ++i) {
    th.push_back(-0.1 + 0.2 * (i + 0.5) / 2000);
    d.push_back(sensitivity(f, at(th.back(), L, 0.5, 0.5)).delta_theta);
  }
  double best = INFINITY;
  for (double x : d) best = std::min(best, x);
  const std::size_t mid = 1000;
  std::size_t lo = mid, hi = mid - 1;
  while (lo > 0 && d[lo - 1] > 2 * best) --lo;
  while (hi + 1 < d.size() && d[hi + 1] > 2 * best) ++hi;
  return hi >= lo ? th[hi] - th[lo] : 0.0;
}

void criterion8(Verdict& v) {
  const auto f = fringe_of(StateSpec::named("PSA11", kR), 0.5, 0.5);
  const double g1 = gap_width(f, 1), g3 = gap_width(f, 3), g13 = gap_width(f, 13);
  v.check(g1 > g3 && g3 > g13, "PSA11 T=0.5 gap width L=1,3,13: " + fmt(g1) + ", " + fmt(g3) + ", " + fmt(g13));

  std::string missing, found;
  for (const char* name : kAll) {
    double beat_at = 0.0;
    for (double N = 12; N >= 1; N -= 1) {
      try {
        const double d = sensitivity(at_N(name, N), at(0.007, 21, 0.5, 0.5), precise()).delta_theta;
        if (d < 1.0 / N) {
          beat_at = N;
          break;
        }
      } catch (const Error&) {
      }
    }
    if (beat_at == 0.0) missing += std::string(" ") + name;
    else found += std::string(" ") + name + "@N=" + fmt(beat_at);
  }
  v.check(missing.empty(), "L=21 theta=0.007 T=0.5 dtheta < 1/N for some N <= 12:" + found +
                               (missing.empty() ? "" : "; never for" + missing));
}

void criterion9(Verdict& v) {
  double ent = 0.0;
  for (double r : {0.3, 0.7, kR}) {
    const double n = std::sinh(r) * std::sinh(r);
    ent = std::max(ent, std::abs(entropy(prepare(StateSpec::named("TMSV", r), precise()).state) -
                                 ((n + 1) * std::log(n + 1) - n * std::log(n))));
  }
  v.check(ent < 1e-9, "TMSV entropy vs thermal form " + fmt(ent));

  std::string violations;
  for (double N : {2.0, 4.0, 6.0}) {
    const double et = entropy(prepare(at_N("TMSV", N), precise()).state);
    for (int i = 1; i < 9; ++i) {
      try {
        const double ex = entropy(prepare(at_N(kAll[i], N), precise()).state);
        if (!(et < ex)) violations += std::string(" ") + kAll[i] + "@N=" + fmt(N) + "(" + fmt(ex) + "<=" + fmt(et) + ")";
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::TargetUnreachable) throw;
        violations += std::string(" ") + kAll[i] + "@N=" + fmt(N) + "(unreachable)";
      }
    }
  }
  v.check(violations.empty(), "E(TMSV) < E(X) at N = 2, 4, 6" + (violations.empty() ? "" : ", violated by" + violations));

  std::string at_r;
  const double et_r = entropy(prepare(StateSpec::named("TMSV", kR), precise()).state);
  for (int i = 1; i < 9; ++i) {
    const double ex = entropy(prepare(StateSpec::named(kAll[i], kR), precise()).state);
    if (!(et_r < ex)) at_r += std::string(" ") + kAll[i];
  }
  v.note("info: at matched r = 1.096 E(TMSV) = " + fmt(et_r) +
         (at_r.empty() ? " is the lowest of the nine" : " is not below" + at_r));

  double tmsv_min = 0.0, link = 0.0;
  std::string nonneg;
  for (const char* name : {"TMSV", "PA11", "PS11", "PAS11", "PSA11", "PA22", "PS22", "PAS22", "PSA22"}) {
    const auto rho = reduced_density(prepare(at_N(name, 5.0), precise()).state, Mode::A);
    const double hw = 3 + std::sqrt(5.0);
    const int pts = int(std::ceil(2 * hw / wigner_max_spacing(2.5))) + 1;
    const double m = wigner(rho, WignerGridSpec::square(hw, pts)).min_value;
    if (std::string(name) == "TMSV") tmsv_min = m;
    else if (!(m < 0)) nonneg += std::string(" ") + name;
    double parity = 0.0;
    for (int n = 0; n < rho.cutoff; ++n) parity += (n % 2 ? -1.0 : 1.0) * rho.matrix(n, n).real();
    link = std::max(link, std::abs(wigner_at(rho, 0.0) - 2 / pi * parity));
  }
  v.check(nonneg.empty(), "reduced Wigner negative for every non-Gaussian input at N=5" + (nonneg.empty() ? "" : "; not for" + nonneg));
  v.check(tmsv_min >= -1e-9, "reduced TMSV Wigner min " + fmt(tmsv_min));
  v.check(link < 1e-9, "W(0) parity link " + fmt(link));
}

void criterion10(Verdict& v) {
  double norm = 0.0;
  for (const char* name : kAll) norm = std::max(norm, std::abs(prepare(StateSpec::named(name, 0.8), precise()).state.norm() - 1));
  v.check(norm < 1e-12, "state normalization " + fmt(norm));

  const auto in = build_state(StateSpec::named("PSA11", 0.4), 5, 1.0).state;
  const auto rho = propagate(in, at(0.17, 2, 0.6, 0.3));
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix);
  v.check(std::abs(rho.trace() - 1) < 1e-12, "trace after lossy pipeline " + fmt(std::abs(rho.trace() - 1)));
  v.check(es.eigenvalues().minCoeff() > -1e-12, "positivity, lowest eigenvalue " + fmt(es.eigenvalues().minCoeff()));

  const int c = 10;
  TwoModeState s(c);
  for (int a = 0; a < c - 1; ++a)
    for (int b = 0; b < c - 1; ++b) s(a, b) = Complex(std::sin(a + 2.0 * b), std::cos(3.0 * a - b));
  double comm = 0.0;
  for (Mode m : {Mode::A, Mode::B}) {
    const auto x = apply_annihilation(apply_creation(s, m, 1.0), m);
    const auto y = apply_creation(apply_annihilation(s, m), m, 1.0);
    comm = std::max(comm, (x.amplitudes() - y.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff());
  }
  v.check(comm < 1e-12, "[a, a+] = 1 below the boundary " + fmt(comm));

  double complete = 0.0;
  for (double T : {0.0, 0.3, 0.77}) {
    Matrix sum = Matrix::Zero(c, c);
    for (const auto& K : loss_kraus_operators(T, c)) sum += K.adjoint() * K;
    complete = std::max(complete, (sum - Matrix::Identity(c, c)).cwiseAbs().maxCoeff());
  }
  v.check(complete < 1e-12, "sum K+K = I " + fmt(complete));

  // Kraus channel against an explicit vacuum environment coupled by a beam splitter.
  double env = 0.0;
  {
    const double T = 0.42, phi = std::acos(std::sqrt(T));
    Matrix a = Matrix::Zero(c * c, c * c), e = Matrix::Zero(c * c, c * c);
    for (int n = 0; n < c; ++n)
      for (int k = 0; k < c; ++k) {
        if (n > 0) a(joint_index(n - 1, k, c), joint_index(n, k, c)) = std::sqrt(double(n));
        if (k > 0) e(joint_index(n, k - 1, c), joint_index(n, k, c)) = std::sqrt(double(k));
      }
    const Matrix U = Matrix(phi * (a.adjoint() * e - a * e.adjoint())).exp();
    TwoModeState sys(c);
    for (int n = 0; n < c; ++n) sys(n, 0) = Complex(1.0 / (n + 1), 0.3 * n);
    sys = normalize(sys).state;
    const Vector out = U * sys.amplitudes();
    const auto lossy = loss(DensityOperator::pure(sys), T, Mode::A);
    for (int n = 0; n < c; ++n)
      for (int m = 0; m < c; ++m) {
        Complex red{};
        for (int k = 0; k < c; ++k) red += out[joint_index(n, k, c)] * std::conj(out[joint_index(m, k, c)]);
        env = std::max(env, std::abs(lossy.matrix(joint_index(n, 0, c), joint_index(m, 0, c)) - red));
      }
  }
  v.check(env < 1e-10, "Kraus vs explicit environment at cutoff 10: " + fmt(env));

  const auto spec = sweep::parse_config(
      R"({"experiment": "sensitivity", "states": [{"name": "PSA22", "r": 0.9}, {"name": "PS11", "r": 0.9}],
          "theta": {"start": -0.2, "stop": 0.2, "count": 21}, "L": [1, 3], "T_pairs": [[1, 1], [0.2, 0.8]]})");
  sweep::RunOptions one, many;
  one.jobs = 1;
  many.jobs = 8;
  const auto x = sweep::to_csv(sweep::run_sweep(spec, one));
  const auto y = sweep::to_csv(sweep::run_sweep(spec, many));
  const auto z = sweep::to_csv(sweep::run_sweep(spec, many));
  v.check(x == y && y == z, "byte-identical reruns across 1 and 8 threads");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, void (*)(Verdict&)>> criteria = {
      {"engine equivalence", criterion1},   {"sensitivity consistency", criterion2},
      {"operator convention", criterion3},  {"OAM gearing", criterion4},
      {"QCRB saturation", criterion5},      {"lossless figure trends", criterion6},
      {"loss trends", criterion7},          {"OAM loss mitigation", criterion8},
      {"diagnostics", criterion9},          {"invariants", criterion10},
  };
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* word = v.status == Status::Pass ? "PASS" : v.status == Status::Demoted ? "DEMOTED" : "FAIL";
    if (v.status == Status::Fail) ++failures;
    std::printf("criterion %zu %-8s %s (%.1fs): %s\n", i + 1, word, criteria[i].first, secs, v.detail.str().c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("acceptance: %d of %zu criteria failed (%.1fs)\n", failures, criteria.size(), total);
  return failures == 0 ? 0 : 1;
}

#pragma once

// Input-state recipes: two-mode squeezed vacuum and the photon-added /
// photon-subtracted families built from it with ladder operators.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "oamzi/errors.hpp"
#include "oamzi/fock.hpp"

namespace oamzi {

enum class StateKind { TMSV, PA, PS, PAS, PSA };

/// How PAS/PSA orders map onto ladder operators.
///   NameDriven: PAS = a^J b^K a†^G b†^H S|0,0>,  PSA = a†^G b†^H a^J b^K S|0,0>
///   MixedMode:  PAS = a†^G b^H S|0,0>,           PSA = a^G b†^H S|0,0>
enum class OrderConvention { NameDriven, MixedMode };

inline constexpr std::string_view to_string(StateKind k) {
  switch (k) {
    case StateKind::TMSV: return "TMSV";
    case StateKind::PA: return "PA";
    case StateKind::PS: return "PS";
    case StateKind::PAS: return "PAS";
    case StateKind::PSA: return "PSA";
  }
  return "?";
}

struct StateSpec {
  StateKind kind = StateKind::TMSV;
  int G = 0, H = 0, J = 0, K = 0;
  double r = 0.0;
  double psi = 0.0;
  OrderConvention convention = OrderConvention::NameDriven;

  /// Parses "TMSV", "PA11", "PS22", "PAS11", "PSA22", ... Every nonzero
  /// order takes the trailing digit pair's value; the two digits must match.
  static StateSpec named(std::string_view name, double r = 0.0) {
    std::string up;
    for (char ch : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    StateSpec s;
    s.r = r;
    if (up == "TMSV") return s;
    std::size_t split = up.find_first_of("0123456789");
    if (split == std::string::npos || up.size() - split != 2 || up[split] != up[split + 1])
      fail(ErrorKind::InvalidArgument, "unrecognized state name '" + std::string(name) + "'");
    const std::string head = up.substr(0, split);
    const int order = up[split] - '0';
    if (order < 1) fail(ErrorKind::InvalidArgument, "state order must be >= 1 in '" + std::string(name) + "'");
    if (head == "PA") {
      s.kind = StateKind::PA;
      s.G = s.H = order;
    } else if (head == "PS") {
      s.kind = StateKind::PS;
      s.J = s.K = order;
    } else if (head == "PAS") {
      s.kind = StateKind::PAS;
      s.G = s.H = s.J = s.K = order;
    } else if (head == "PSA") {
      s.kind = StateKind::PSA;
      s.G = s.H = s.J = s.K = order;
    } else {
      fail(ErrorKind::InvalidArgument, "unrecognized state name '" + std::string(name) + "'");
    }
    return s;
  }

  /// Canonical short name ("PSA11") when the orders are uniform, otherwise
  /// an explicit form such as "PAS[G=1,H=2,J=1,K=1]".
  std::string name() const {
    std::string base(to_string(kind));
    if (kind == StateKind::TMSV) return base;
    std::vector<int> nz;
    for (int o : {G, H, J, K})
      if (o != 0) nz.push_back(o);
    const bool uniform = !nz.empty() && std::all_of(nz.begin(), nz.end(), [&](int o) { return o == nz[0]; }) &&
                         nz.size() == (kind == StateKind::PA || kind == StateKind::PS ? 2u : 4u) && nz[0] < 10;
    if (uniform) return base + std::to_string(nz[0]) + std::to_string(nz[0]);
    return base + "[G=" + std::to_string(G) + ",H=" + std::to_string(H) + ",J=" + std::to_string(J) +
           ",K=" + std::to_string(K) + "]";
  }

  void validate() const {
    if (!(r >= 0.0) || !std::isfinite(r)) fail(ErrorKind::InvalidArgument, "squeezing r must be finite and >= 0");
    if (!std::isfinite(psi)) fail(ErrorKind::InvalidArgument, "squeezing angle must be finite");
    if (G < 0 || H < 0 || J < 0 || K < 0) fail(ErrorKind::InvalidArgument, "operator orders must be >= 0");
    switch (kind) {
      case StateKind::TMSV:
        if (G || H || J || K) fail(ErrorKind::InvalidArgument, "TMSV takes no operator orders");
        break;
      case StateKind::PA:
        if (J || K) fail(ErrorKind::InvalidArgument, "PA requires J = K = 0");
        break;
      case StateKind::PS:
        if (G || H) fail(ErrorKind::InvalidArgument, "PS requires G = H = 0");
        break;
      case StateKind::PAS:
      case StateKind::PSA:
        if (convention == OrderConvention::NameDriven && (G < 1 || H < 1 || J < 1 || K < 1))
          fail(ErrorKind::InvalidArgument, std::string(to_string(kind)) + " requires G, H, J, K >= 1");
        if (convention == OrderConvention::MixedMode && (G < 1 || H < 1))
          fail(ErrorKind::InvalidArgument, std::string(to_string(kind)) + " requires G, H >= 1");
        break;
    }
  }
};

/// One ladder step of a recipe: `power` applications of a or a† on `mode`.
struct LadderStep {
  Mode mode;
  bool create;
  int power;
};

/// Ladder steps in application order (first element acts first on S|0,0>).
inline std::vector<LadderStep> recipe(const StateSpec& s) {
  std::vector<LadderStep> steps;
  auto push = [&](Mode m, bool create, int power) {
    if (power > 0) steps.push_back({m, create, power});
  };
  switch (s.kind) {
    case StateKind::TMSV: break;
    case StateKind::PA:
      push(Mode::B, true, s.H);
      push(Mode::A, true, s.G);
      break;
    case StateKind::PS:
      push(Mode::B, false, s.K);
      push(Mode::A, false, s.J);
      break;
    case StateKind::PAS:
      if (s.convention == OrderConvention::NameDriven) {
        push(Mode::B, true, s.H);
        push(Mode::A, true, s.G);
        push(Mode::B, false, s.K);
        push(Mode::A, false, s.J);
      } else {
        push(Mode::B, false, s.H);
        push(Mode::A, true, s.G);
      }
      break;
    case StateKind::PSA:
      if (s.convention == OrderConvention::NameDriven) {
        push(Mode::B, false, s.K);
        push(Mode::A, false, s.J);
        push(Mode::B, true, s.H);
        push(Mode::A, true, s.G);
      } else {
        push(Mode::B, true, s.H);
        push(Mode::A, false, s.G);
      }
      break;
  }
  return steps;
}

/// Net photon-number shift (n_a - n, n_b - n) of the recipe's diagonal support.
struct SupportOffset {
  int da = 0;
  int db = 0;
};

inline SupportOffset support_offset(const StateSpec& s) {
  SupportOffset off;
  for (const auto& st : recipe(s)) {
    const int d = st.create ? st.power : -st.power;
    (st.mode == Mode::A ? off.da : off.db) += d;
  }
  return off;
}

/// The recipe's state is a single diagonal line sum_n f_n |n, n + d>. This is
/// the unnormalized profile f indexed by n_a, computed without any grid.
struct DiagonalProfile {
  int offset = 0;                  // n_b - n_a along the support line
  std::vector<double> magnitude;   // |f_{n_a}|, n_a = 0, 1, ...
  double tail_bound = 0.0;         // bound on the squared weight beyond the stored terms
  double total_weight = 0.0;       // sum of squares including the tail bound

  /// Fraction of weight with n_a >= cutoff or n_b >= cutoff.
  double leakage(int cutoff) const {
    double outside = tail_bound;
    for (std::size_t na = 0; na < magnitude.size(); ++na) {
      const long nb = static_cast<long>(na) + offset;
      if (static_cast<long>(na) >= cutoff || nb >= cutoff) outside += magnitude[na] * magnitude[na];
    }
    return total_weight > 0.0 ? std::min(1.0, outside / total_weight) : 0.0;
  }
};

inline DiagonalProfile diagonal_profile(const StateSpec& s) {
  s.validate();
  const double z = std::tanh(s.r);
  // Enough TMSV terms that z^(2n) times any polynomial factor is negligible.
  int len = 64;
  if (z > 0.0) {
    const double per = -2.0 * std::log(z);
    len = std::max(64, static_cast<int>(std::ceil(120.0 / per)) + 64);
  }
  const auto steps = recipe(s);
  int pad = 0;
  for (const auto& st : steps) pad += st.power;
  len += pad;

  // g[na] on the line n_b = n_a + d.
  std::vector<double> g(static_cast<std::size_t>(len), 0.0);
  double zn = 1.0;
  for (int n = 0; n < len; ++n) {
    g[n] = zn;
    zn *= z;
    if (zn < 1e-300) break;
  }
  int d = 0;
  for (const auto& st : steps) {
    for (int p = 0; p < st.power; ++p) {
      std::vector<double> h(g.size(), 0.0);
      for (int na = 0; na < len; ++na) {
        if (g[na] == 0.0) continue;
        const int nb = na + d;
        if (st.mode == Mode::A) {
          if (st.create) {
            if (na + 1 < len) h[na + 1] = std::sqrt(double(na + 1)) * g[na];
          } else if (na > 0) {
            h[na - 1] = std::sqrt(double(na)) * g[na];
          }
        } else {
          h[na] = st.create ? std::sqrt(double(nb + 1)) * g[na] : std::sqrt(double(std::max(nb, 0))) * g[na];
        }
      }
      g.swap(h);
      if (st.mode == Mode::A)
        d += st.create ? -1 : 1;
      else
        d += st.create ? 1 : -1;
    }
  }
  DiagonalProfile prof;
  prof.offset = d;
  // Trim the stored range where the terms become negligible; bound the rest
  // by a geometric series in the last observed ratio.
  std::size_t last = g.size();
  while (last > 0 && g[last - 1] == 0.0) --last;
  double sum = 0.0;
  for (std::size_t i = 0; i < last; ++i) sum += g[i] * g[i];
  prof.magnitude.assign(g.begin(), g.begin() + static_cast<long>(last));
  if (last >= 2 && g[last - 2] > 0.0) {
    const double q = std::pow(g[last - 1] / g[last - 2], 2);
    if (q < 1.0) prof.tail_bound = g[last - 1] * g[last - 1] * q / (1.0 - q);
  }
  prof.total_weight = sum + prof.tail_bound;
  return prof;
}

/// Two-mode squeezed vacuum, c_n = (1/cosh r)(-e^{i psi} tanh r)^n on |n,n>.
/// Truncated amplitudes are exact; the missing weight z^(2 cutoff) is the leakage.
inline TwoModeState tmsv(double r, double psi, int cutoff, double leak_tol = kDefaultLeakTol) {
  if (!(r >= 0.0)) fail(ErrorKind::InvalidArgument, "squeezing r must be >= 0");
  const double z = std::tanh(r);
  const double leak = std::pow(z, 2.0 * cutoff);
  if (leak > leak_tol)
    fail(ErrorKind::LeakageExceeded,
         "TMSV at r=" + std::to_string(r) + " leaks " + std::to_string(leak) + " past cutoff " + std::to_string(cutoff));
  TwoModeState s(cutoff, leak);
  const Complex ratio = -std::polar(z, psi);
  Complex c = 1.0 / std::cosh(r);
  for (int n = 0; n < cutoff; ++n) {
    s(n, n) = c;
    c *= ratio;
    if (std::abs(c) < 1e-300) break;
  }
  return s;
}

struct BuiltState {
  TwoModeState state;
  double norm_before;
};

/// Applies the recipe to S|0,0> and normalizes. The ladder operators run on a
/// padded grid so the amplitudes kept at the requested cutoff are exact; the
/// reported leakage is the recipe's true weight outside the final grid.
inline BuiltState build_state(const StateSpec& spec, int cutoff, double leak_tol = kDefaultLeakTol) {
  spec.validate();
  const auto steps = recipe(spec);
  int pad = 0;
  for (const auto& st : steps) pad += st.power;
  const int work = cutoff + pad;

  const double z = std::tanh(spec.r);
  TwoModeState s(work);
  {
    const Complex ratio = -std::polar(z, spec.psi);
    Complex c = 1.0 / std::cosh(spec.r);
    for (int n = 0; n < work; ++n) {
      s(n, n) = c;
      c *= ratio;
      if (std::abs(c) < 1e-300) break;
    }
  }
  for (const auto& st : steps)
    for (int p = 0; p < st.power; ++p)
      s = st.create ? apply_creation(s, st.mode, 1.0) : apply_annihilation(s, st.mode);

  const double leak = diagonal_profile(spec).leakage(cutoff);
  if (leak > leak_tol)
    fail(ErrorKind::LeakageExceeded, spec.name() + " at r=" + std::to_string(spec.r) + " leaks " +
                                         std::to_string(leak) + " past cutoff " + std::to_string(cutoff));
  TwoModeState cropped = s.resized(cutoff);
  auto [unit, nrm] = normalize(cropped);
  unit.set_leakage(leak);
  return {std::move(unit), nrm};
}

struct CutoffOptions {
  double leak_tol = kDefaultLeakTol;
  int cap = 64;
  int minimum = 4;
};

/// Smallest cutoff whose input-state leakage is below `leak_tol`, found by
/// doubling from the minimum and then bisecting.
inline int choose_cutoff(const StateSpec& spec, const CutoffOptions& opt = {}) {
  if (!(opt.leak_tol > 0.0 && opt.leak_tol < 1.0)) fail(ErrorKind::InvalidArgument, "leak_tol must lie in (0, 1)");
  const auto prof = diagonal_profile(spec);
  const auto off = support_offset(spec);
  const int floor_c = std::max(opt.minimum, std::max(off.da, off.db) + 2);
  auto ok = [&](int c) { return prof.leakage(c) < opt.leak_tol; };

  int hi = floor_c;
  if (!ok(hi)) {
    int lo = hi;
    while (!ok(hi)) {
      if (hi >= opt.cap)
        fail(ErrorKind::CutoffCapExceeded, spec.name() + " at r=" + std::to_string(spec.r) +
                                               " needs a cutoff above the cap " + std::to_string(opt.cap));
      lo = hi;
      hi = std::min(2 * hi, opt.cap);
    }
    while (hi - lo > 1) {
      const int mid = lo + (hi - lo) / 2;
      (ok(mid) ? hi : lo) = mid;
    }
  }
  return hi;
}

}  // namespace oamzi

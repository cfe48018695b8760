#pragma once

// Interferometer pipeline: 50:50 beam splitters, geared opposite phase
// shifts, and pure-loss channels on each arm.
//
// Two representations are provided. The dense path (TwoModeState and
// DensityOperator in, same out) is exact on its grid and meant for small
// cutoffs. The fringe path reduces the whole lossy interferometer to a
// Fourier series of the output parity in the total phase; see `fringe`.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "oamzi/errors.hpp"
#include "oamzi/fock.hpp"

namespace oamzi {

enum class BiasMode { Geared, External };
enum class Splitter { BS1, BS2 };

struct InterferometerConfig {
  double theta = 0.0;
  int L = 1;
  double T_a = 1.0;
  double T_b = 1.0;
  double bias = std::numbers::pi / 2;
  BiasMode bias_mode = BiasMode::Geared;

  /// Relative phase Phi between the arms: arm c picks up exp(-i Phi n_c / 2),
  /// arm d exp(+i Phi n_d / 2).
  double total_phase() const { return bias_mode == BiasMode::Geared ? L * (theta + bias) : L * theta + bias; }
  /// dPhi/dtheta.
  double phase_gear() const { return static_cast<double>(L); }
  bool lossless() const { return T_a == 1.0 && T_b == 1.0; }

  void validate() const {
    if (L < 1) fail(ErrorKind::InvalidArgument, "L must be >= 1");
    for (double t : {T_a, T_b})
      if (!(t >= 0.0 && t <= 1.0))
        fail(ErrorKind::InvalidTransmittance, "transmittance " + std::to_string(t) + " outside [0, 1]");
    if (!std::isfinite(theta) || !std::isfinite(bias)) fail(ErrorKind::InvalidArgument, "phase must be finite");
  }
};

inline void check_transmittance(double T) {
  if (!(T >= 0.0 && T <= 1.0))
    fail(ErrorKind::InvalidTransmittance, "transmittance " + std::to_string(T) + " outside [0, 1]");
}

/// Photon-number blocks of a 50:50 splitter. Block N acts on the N+1 states
/// |n, N-n>, n = 0..N (indexed by n), and is generated from block N-1.
///
/// With a† -> (a† + s b†)/√2 and b† -> (b† + s a†)/√2 (s = -i for BS1,
/// +i for BS2), peeling one photon off either input mode gives two exact
/// recurrences; their n- and (N-n)-weighted sum
///   U_N(j,n) = [√(nj) U(j-1,n-1) + s√(n(N-j)) U(j,n-1)
///             + √((N-n)(N-j)) U(j,n) + s√((N-n)j) U(j-1,n)] / (√2 N)
/// stays unitary to rounding for large N, where either one alone does not.
class SplitterBlocks {
 public:
  explicit SplitterBlocks(Splitter which = Splitter::BS1)
      : s_(which == Splitter::BS1 ? Complex(0, -1) : Complex(0, 1)), block_(Matrix::Identity(1, 1)) {}

  int total() const noexcept { return N_; }
  const Matrix& block() const noexcept { return block_; }

  void advance() {
    const int N = N_ + 1;
    Matrix next(N + 1, N + 1);
    const double scale = 1.0 / (std::sqrt(2.0) * N);
    std::vector<double> root(N + 1);
    for (int k = 0; k <= N; ++k) root[k] = std::sqrt(double(k));
    for (int n = 0; n <= N; ++n)
      for (int j = 0; j <= N; ++j) {
        Complex acc{};
        if (n > 0) {
          if (j > 0) acc += root[n] * root[j] * block_(j - 1, n - 1);
          if (j < N) acc += s_ * (root[n] * root[N - j]) * block_(j, n - 1);
        }
        if (n < N) {
          if (j < N) acc += root[N - n] * root[N - j] * block_(j, n);
          if (j > 0) acc += s_ * (root[N - n] * root[j]) * block_(j - 1, n);
        }
        next(j, n) = scale * acc;
      }
    block_.swap(next);
    N_ = N;
  }

  /// Blocks 0..max_total, materialized.
  static std::vector<Matrix> all(int max_total, Splitter which = Splitter::BS1) {
    std::vector<Matrix> out;
    SplitterBlocks gen(which);
    out.push_back(gen.block());
    for (int N = 1; N <= max_total; ++N) {
      gen.advance();
      out.push_back(gen.block());
    }
    return out;
  }

 private:
  Complex s_;
  Matrix block_;
  int N_ = 0;
};

namespace detail {

/// Grid large enough to hold every photon-number block the input touches.
inline int splitter_grid(int cutoff, int max_total) { return std::max(cutoff, max_total + 1); }

inline Matrix dense_splitter(int cutoff, Splitter which) {
  const int dim = cutoff * cutoff;
  Matrix U = Matrix::Zero(dim, dim);
  const auto blocks = SplitterBlocks::all(2 * cutoff - 2, which);
  for (int N = 0; N <= 2 * cutoff - 2; ++N) {
    const int lo = std::max(0, N - cutoff + 1), hi = std::min(N, cutoff - 1);
    for (int i = lo; i <= hi; ++i)
      for (int j = lo; j <= hi; ++j) U(joint_index(i, N - i, cutoff), joint_index(j, N - j, cutoff)) = blocks[N](i, j);
  }
  return U;
}

/// Embeds a density operator into a larger grid.
inline DensityOperator grown(const DensityOperator& rho, int cutoff) {
  if (cutoff == rho.cutoff) return rho;
  DensityOperator out{cutoff, Matrix::Zero(cutoff * cutoff, cutoff * cutoff), rho.trace_deficit};
  const int c = rho.cutoff;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b)
      for (int x = 0; x < c; ++x)
        for (int y = 0; y < c; ++y)
          out.matrix(joint_index(a, b, cutoff), joint_index(x, y, cutoff)) =
              rho.matrix(joint_index(a, b, c), joint_index(x, y, c));
  return out;
}

inline int max_total_photons(const DensityOperator& rho) {
  const int c = rho.cutoff;
  int best = -1;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b)
      if (rho.matrix(joint_index(a, b, c), joint_index(a, b, c)) != Complex{}) best = std::max(best, a + b);
  return best;
}

}  // namespace detail

/// Applies BS1 = exp[-i(π/4)(a†b + ab†)] or BS2 = BS1†. The result lives on a
/// grid of size max(cutoff, Nmax + 1), Nmax being the largest occupied total
/// photon number, so no amplitude is ever truncated.
inline TwoModeState beam_splitter(const TwoModeState& s, Splitter which) {
  const int nmax = std::max(s.max_total_photons(), 0);
  const int c = s.cutoff();
  const int g = detail::splitter_grid(c, nmax);
  TwoModeState out(g, s.leakage());
  SplitterBlocks gen(which);
  for (int N = 0; N <= nmax; ++N) {
    if (N > 0) gen.advance();
    Vector u = Vector::Zero(N + 1);
    for (int n = std::max(0, N - c + 1); n <= std::min(N, c - 1); ++n) u[n] = s(n, N - n);
    const Vector w = gen.block() * u;
    for (int n = 0; n <= N; ++n) out(n, N - n) = w[n];
  }
  return out;
}

inline DensityOperator beam_splitter(const DensityOperator& rho, Splitter which) {
  const int nmax = std::max(detail::max_total_photons(rho), 0);
  const int g = detail::splitter_grid(rho.cutoff, nmax);
  DensityOperator big = detail::grown(rho, g);
  const Matrix U = detail::dense_splitter(g, which);
  big.matrix = U * big.matrix * U.adjoint();
  return big;
}

/// exp(-i L theta_eff n_c / 2) exp(+i L theta_eff n_d / 2).
inline TwoModeState oam_phase(const TwoModeState& s, double theta_eff, int L) {
  const int c = s.cutoff();
  TwoModeState out = s;
  for (int n = 0; n < c; ++n)
    for (int m = 0; m < c; ++m) out(n, m) *= std::polar(1.0, -L * theta_eff * (n - m) / 2.0);
  return out;
}

inline DensityOperator oam_phase(const DensityOperator& rho, double theta_eff, int L) {
  const int c = rho.cutoff;
  Vector ph(c * c);
  for (int n = 0; n < c; ++n)
    for (int m = 0; m < c; ++m) ph[joint_index(n, m, c)] = std::polar(1.0, -L * theta_eff * (n - m) / 2.0);
  DensityOperator out = rho;
  out.matrix = ph.asDiagonal() * rho.matrix * ph.conjugate().asDiagonal();
  return out;
}

/// Real Kraus amplitudes k(n, j) = sqrt(C(n, j) T^(n-j) (1-T)^j) of the pure-loss
/// channel for n <= nmax.
class LossTable {
 public:
  LossTable(double T, int nmax) : T_(T), nmax_(nmax), v_((nmax + 1) * (nmax + 1), 0.0) {
    check_transmittance(T);
    const double lt = std::log(T), l1 = std::log1p(-T);
    for (int n = 0; n <= nmax; ++n)
      for (int j = 0; j <= n; ++j) {
        double e = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
        if (n - j > 0) e += (n - j) * lt;
        if (j > 0) e += j * l1;
        v_[n * (nmax + 1) + j] = std::exp(0.5 * e);
      }
  }
  double operator()(int n, int j) const { return v_[n * (nmax_ + 1) + j]; }
  /// Largest number of lost photons with a nonzero amplitude.
  int max_lost() const { return T_ == 1.0 ? 0 : nmax_; }

 private:
  double T_;
  int nmax_;
  std::vector<double> v_;
};

/// Single-mode Kraus operators K_j = sqrt((1-T)^j / j!) T^((n-j)/2) a^j,
/// j = 0..cutoff-1, as cutoff x cutoff matrices.
inline std::vector<Matrix> loss_kraus_operators(double T, int cutoff) {
  LossTable k(T, cutoff - 1);
  std::vector<Matrix> ops;
  for (int j = 0; j < cutoff; ++j) {
    Matrix K = Matrix::Zero(cutoff, cutoff);
    for (int n = j; n < cutoff; ++n) K(n - j, n) = k(n, j);
    ops.push_back(std::move(K));
  }
  return ops;
}

/// Pure-loss channel with transmittance T on one arm.
inline DensityOperator loss(const DensityOperator& rho, double T, Mode mode) {
  check_transmittance(T);
  if (T == 1.0) return rho;
  const int c = rho.cutoff;
  LossTable k(T, c - 1);
  DensityOperator out{c, Matrix::Zero(c * c, c * c), rho.trace_deficit};
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b)
      for (int x = 0; x < c; ++x)
        for (int y = 0; y < c; ++y) {
          const Complex v = rho.matrix(joint_index(a, b, c), joint_index(x, y, c));
          if (v == Complex{}) continue;
          const int n1 = mode == Mode::A ? a : b;
          const int n2 = mode == Mode::A ? x : y;
          for (int j = 0; j <= std::min(n1, n2); ++j) {
            const double w = k(n1, j) * k(n2, j);
            if (w == 0.0) continue;
            const int i1 = mode == Mode::A ? joint_index(a - j, b, c) : joint_index(a, b - j, c);
            const int i2 = mode == Mode::A ? joint_index(x - j, y, c) : joint_index(x, y - j, c);
            out.matrix(i1, i2) += w * v;
          }
        }
  return out;
}

/// Lossless pipeline BS1 -> phase -> BS2 on a pure state.
inline TwoModeState propagate_pure(const TwoModeState& input, const InterferometerConfig& cfg) {
  cfg.validate();
  TwoModeState s = beam_splitter(input, Splitter::BS1);
  s = oam_phase(s, cfg.total_phase(), 1);
  return beam_splitter(s, Splitter::BS2);
}

/// Full pipeline BS1 -> phase -> loss(T_a, arm c) -> loss(T_b, arm d) -> BS2 as
/// a dense density operator. Dimension grows as (2 cutoff - 1)^4, so this is
/// for small inputs; larger runs go through `fringe`.
inline DensityOperator propagate(const TwoModeState& input, const InterferometerConfig& cfg) {
  cfg.validate();
  if (cfg.lossless()) return DensityOperator::pure(propagate_pure(input, cfg));
  TwoModeState s = beam_splitter(input, Splitter::BS1);
  s = oam_phase(s, cfg.total_phase(), 1);
  DensityOperator rho = DensityOperator::pure(s);
  rho = loss(rho, cfg.T_a, Mode::A);
  rho = loss(rho, cfg.T_b, Mode::B);
  return beam_splitter(rho, Splitter::BS2);
}

/// Output parity <(-1)^{n_b}> as an exact trigonometric series in the total
/// phase Phi: P(Phi) = R_0 + 2 sum_{q>0} Re[R_q e^{-iq(Phi + π/2)}].
///
/// BS1 Π_b BS1† is the signed swap |n,m> -> i^{m-n}|m,n>, so only the
/// anti-diagonal of each photon-number block of the post-loss state enters,
/// and loss commutes with the phase. R_q collects those anti-diagonal
/// entries with n_c - n_d = q.
struct Fringe {
  std::vector<Complex> R;   // R[q], q = 0..qmax
  double trace = 1.0;       // trace of the propagated state on the grid
  double leakage = 0.0;     // input leakage carried through
  int max_total = 0;        // largest total photon number propagated

  double value(double phase) const {
    double acc = 0.0;
    for (std::size_t q = R.size(); q-- > 1;)
      acc += (R[q] * std::polar(1.0, -double(q) * (phase + std::numbers::pi / 2))).real();
    return R.empty() ? 0.0 : R[0].real() + 2.0 * acc;
  }

  /// dP/dPhi.
  double derivative(double phase) const {
    double acc = 0.0;
    for (std::size_t q = R.size(); q-- > 1;)
      acc += (Complex(0, -double(q)) * R[q] * std::polar(1.0, -double(q) * (phase + std::numbers::pi / 2))).real();
    return 2.0 * acc;
  }

  /// Parity at a configuration's phase (loss is baked into the series).
  double value(const InterferometerConfig& cfg) const { return value(cfg.total_phase()); }
};

/// Builds the fringe series of `input` for arm transmittances (T_a, T_b).
/// Cost is O(Nmax^4 / 24) with Nmax the input's largest total photon number.
inline Fringe fringe(const TwoModeState& input, double T_a, double T_b) {
  check_transmittance(T_a);
  check_transmittance(T_b);
  const int c = input.cutoff();
  const int nmax = std::max(input.max_total_photons(), 0);

  // Post-BS1 amplitudes w_S(n) on |n, S-n>.
  std::vector<Vector> w(nmax + 1);
  SplitterBlocks gen(Splitter::BS1);
  double trace = 0.0;
  for (int S = 0; S <= nmax; ++S) {
    if (S > 0) gen.advance();
    Vector u = Vector::Zero(S + 1);
    bool any = false;
    for (int n = std::max(0, S - c + 1); n <= std::min(S, c - 1); ++n) {
      u[n] = input(n, S - n);
      any = any || u[n] != Complex{};
    }
    w[S] = any ? Vector(gen.block() * u) : Vector::Zero(S + 1);
    trace += w[S].squaredNorm();
  }

  const LossTable ka(T_a, nmax), kb(T_b, nmax);
  Fringe f;
  f.R.assign(nmax + 1, Complex{});
  f.trace = trace;
  f.leakage = input.leakage();
  f.max_total = nmax;

  for (int S = 0; S <= nmax; ++S) {
    const Vector& ws = w[S];
    if (ws.squaredNorm() < 1e-300) continue;
    const int tmax = std::min(S, ka.max_lost() + kb.max_lost());
    for (int t = 0; t <= tmax; ++t) {
      const int M = S - t;
      const int kmin = std::max(0, t - kb.max_lost()), kmax = std::min(t, ka.max_lost());
      for (int k = kmin; k <= kmax; ++k) {
        const int l = t - k;
        // Entry (p, M-p) of block M, p >= M - p, fed by block S through k
        // photons lost on arm c and l on arm d.
        for (int p = (M + 1) / 2; p <= M; ++p) {
          const double amp =
              ka(p + k, k) * ka(M - p + k, k) * kb(M + l - p, l) * kb(p + l, l);
          if (amp == 0.0) continue;
          f.R[2 * p - M] += amp * ws[p + k] * std::conj(ws[M - p + k]);
        }
      }
    }
  }
  f.R[0] = Complex(f.R[0].real(), 0.0);
  return f;
}

}  // namespace oamzi

#pragma once

// Truncated two-mode Fock space: states, density operators, ladder operators
// and partial traces.
//
// Joint basis ordering is fixed: |n_a, n_b> lives at linear index
// n_a * cutoff + n_b, with 0 <= n_a, n_b < cutoff.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "oamzi/errors.hpp"

namespace oamzi {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kDefaultLeakTol = 1e-10;
inline constexpr double kZeroNormTol = 1e-14;

enum class Mode { A, B };

constexpr Mode other(Mode m) { return m == Mode::A ? Mode::B : Mode::A; }
constexpr char to_char(Mode m) { return m == Mode::A ? 'A' : 'B'; }

constexpr int joint_index(int na, int nb, int cutoff) { return na * cutoff + nb; }

/// Pure two-mode state on an N x N photon-number grid.
///
/// `leakage` is the estimated probability weight that the ideal
/// (untruncated) state carries outside the grid.
class TwoModeState {
 public:
  explicit TwoModeState(int cutoff, double leakage = 0.0)
      : cutoff_(cutoff), amp_(Vector::Zero(static_cast<Eigen::Index>(cutoff) * cutoff)), leakage_(leakage) {
    if (cutoff < 1) fail(ErrorKind::InvalidArgument, "cutoff must be positive");
  }

  static TwoModeState basis(int cutoff, int na, int nb) {
    TwoModeState s(cutoff);
    s(na, nb) = 1.0;
    return s;
  }

  int cutoff() const noexcept { return cutoff_; }
  double leakage() const noexcept { return leakage_; }
  void set_leakage(double leak) noexcept { leakage_ = leak; }

  Complex& operator()(int na, int nb) { return amp_[joint_index(na, nb, cutoff_)]; }
  const Complex& operator()(int na, int nb) const { return amp_[joint_index(na, nb, cutoff_)]; }

  const Vector& amplitudes() const noexcept { return amp_; }
  Vector& amplitudes() noexcept { return amp_; }

  double norm() const { return amp_.norm(); }

  /// Largest n_a + n_b carrying a nonzero amplitude, or -1 for the zero vector.
  int max_total_photons() const {
    int best = -1;
    for (int na = 0; na < cutoff_; ++na)
      for (int nb = 0; nb < cutoff_; ++nb)
        if ((*this)(na, nb) != Complex{} && na + nb > best) best = na + nb;
    return best;
  }

  /// Copy onto a grid of a different size. Growing is exact; shrinking drops
  /// amplitudes outside the new grid and adds their weight to the leakage.
  TwoModeState resized(int new_cutoff) const {
    TwoModeState out(new_cutoff, leakage_);
    const int keep = std::min(cutoff_, new_cutoff);
    double dropped = 0.0;
    for (int na = 0; na < cutoff_; ++na)
      for (int nb = 0; nb < cutoff_; ++nb) {
        if (na < keep && nb < keep)
          out(na, nb) = (*this)(na, nb);
        else
          dropped += std::norm((*this)(na, nb));
      }
    const double total = amp_.squaredNorm();
    if (dropped > 0.0 && total > 0.0) out.leakage_ = 1.0 - (1.0 - leakage_) * (1.0 - dropped / total);
    return out;
  }

 private:
  int cutoff_;
  Vector amp_;
  double leakage_;
};

/// Two-mode density operator on the joint basis (dimension cutoff^2).
struct DensityOperator {
  int cutoff = 0;
  Matrix matrix;
  double trace_deficit = 0.0;

  static DensityOperator pure(const TwoModeState& s) {
    return {s.cutoff(), s.amplitudes() * s.amplitudes().adjoint(), s.leakage()};
  }

  double trace() const { return matrix.trace().real(); }
  double hermiticity_error() const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(); }
  double purity() const { return (matrix * matrix).trace().real(); }
};

/// Single-mode density matrix (cutoff x cutoff).
struct ReducedDensity {
  int cutoff = 0;
  Matrix matrix;

  double trace() const { return matrix.trace().real(); }
};

namespace detail {

inline double spill_fraction(double spilled, double kept) {
  const double total = spilled + kept;
  return total > 0.0 ? spilled / total : 0.0;
}

}  // namespace detail

/// a|psi> (mode A) or b|psi> (mode B), unnormalized. Vacuum maps to zero.
inline TwoModeState apply_annihilation(const TwoModeState& s, Mode mode) {
  const int c = s.cutoff();
  TwoModeState out(c, s.leakage());
  for (int na = 0; na < c; ++na)
    for (int nb = 0; nb < c; ++nb) {
      const Complex v = s(na, nb);
      if (v == Complex{}) continue;
      if (mode == Mode::A) {
        if (na > 0) out(na - 1, nb) += std::sqrt(double(na)) * v;
      } else {
        if (nb > 0) out(na, nb - 1) += std::sqrt(double(nb)) * v;
      }
    }
  return out;
}

/// a^dag|psi> or b^dag|psi>, unnormalized. Amplitude pushed past the grid
/// edge is accounted as leakage; more than `leak_tol` of the result's weight
/// spilling raises LeakageExceeded.
inline TwoModeState apply_creation(const TwoModeState& s, Mode mode, double leak_tol = kDefaultLeakTol) {
  const int c = s.cutoff();
  TwoModeState out(c, s.leakage());
  double spilled = 0.0;
  for (int na = 0; na < c; ++na)
    for (int nb = 0; nb < c; ++nb) {
      const Complex v = s(na, nb);
      if (v == Complex{}) continue;
      const int n = mode == Mode::A ? na : nb;
      const Complex w = std::sqrt(double(n + 1)) * v;
      if (n + 1 >= c) {
        spilled += std::norm(w);
      } else if (mode == Mode::A) {
        out(na + 1, nb) += w;
      } else {
        out(na, nb + 1) += w;
      }
    }
  const double frac = detail::spill_fraction(spilled, out.amplitudes().squaredNorm());
  if (frac > leak_tol)
    fail(ErrorKind::LeakageExceeded,
         "creation on mode " + std::string(1, to_char(mode)) + " spilled weight " + std::to_string(frac) +
             " past cutoff " + std::to_string(c));
  if (frac > 0.0) out.set_leakage(1.0 - (1.0 - s.leakage()) * (1.0 - frac));
  return out;
}

struct Normalized {
  TwoModeState state;
  double norm;
};

/// Unit-norm copy plus the 2-norm it had before.
inline Normalized normalize(const TwoModeState& s) {
  const double n = s.norm();
  if (!(n >= kZeroNormTol)) fail(ErrorKind::ZeroNorm, "state norm " + std::to_string(n) + " below 1e-14");
  TwoModeState out = s;
  out.amplitudes() /= n;
  return {std::move(out), n};
}

namespace detail {

inline Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> as_grid(
    const TwoModeState& s) {
  return {s.amplitudes().data(), s.cutoff(), s.cutoff()};
}

}  // namespace detail

/// Partial trace of |psi><psi| over the discarded mode.
inline ReducedDensity reduced_density(const TwoModeState& s, Mode keep) {
  const auto grid = detail::as_grid(s);  // grid(n_a, n_b)
  Matrix m = keep == Mode::A ? Matrix(grid * grid.adjoint()) : Matrix(grid.transpose() * grid.conjugate());
  return {s.cutoff(), std::move(m)};
}

/// Partial trace of a joint density operator over the discarded mode.
inline ReducedDensity reduced_density(const DensityOperator& rho, Mode keep) {
  const int c = rho.cutoff;
  Matrix out = Matrix::Zero(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) {
      Complex acc{};
      for (int k = 0; k < c; ++k) {
        acc += keep == Mode::A ? rho.matrix(joint_index(i, k, c), joint_index(j, k, c))
                               : rho.matrix(joint_index(k, i, c), joint_index(k, j, c));
      }
      out(i, j) = acc;
    }
  return {c, std::move(out)};
}

}  // namespace oamzi

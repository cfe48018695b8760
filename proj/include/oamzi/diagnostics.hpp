#pragma once

// State characterization: entanglement entropy, joint photon-number
// distribution and single-mode Wigner functions.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "oamzi/errors.hpp"
#include "oamzi/fock.hpp"

namespace oamzi {

namespace detail {

inline double entropy_of(const ReducedDensity& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix, Eigen::EigenvaluesOnly);
  double e = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()[i];
    if (lam > 1e-14) e -= lam * std::log(lam);
  }
  return e;
}

}  // namespace detail

/// Von Neumann entropy -Tr[rho_A ln rho_A] of the reduced state. Both
/// reductions are diagonalized; they must agree to 1e-9 for a pure input.
inline double entropy(const TwoModeState& s) {
  const double ea = detail::entropy_of(reduced_density(s, Mode::A));
  const double eb = detail::entropy_of(reduced_density(s, Mode::B));
  if (std::abs(ea - eb) > 1e-9)
    fail(ErrorKind::InvalidArgument, "reduced entropies differ (" + std::to_string(ea) + " vs " + std::to_string(eb) +
                                         "); input is not a normalized pure state");
  return ea;
}

struct JointDistribution {
  int cutoff = 0;
  Eigen::MatrixXd probabilities;  // P(n_a, n_b)
  int argmax_a = 0;
  int argmax_b = 0;

  double total() const { return probabilities.sum(); }
};

inline JointDistribution joint_distribution(const TwoModeState& s) {
  const int c = s.cutoff();
  JointDistribution out{c, Eigen::MatrixXd(c, c)};
  double best = -1.0;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) {
      const double p = std::norm(s(a, b));
      out.probabilities(a, b) = p;
      if (p > best) {
        best = p;
        out.argmax_a = a;
        out.argmax_b = b;
      }
    }
  return out;
}

/// Phase-space window and resolution for a Wigner evaluation.
struct WignerGridSpec {
  double re_min = -4.0, re_max = 4.0;
  double im_min = -4.0, im_max = 4.0;
  int re_points = 81;
  int im_points = 81;

  double re_step() const { return re_points > 1 ? (re_max - re_min) / (re_points - 1) : 0.0; }
  double im_step() const { return im_points > 1 ? (im_max - im_min) / (im_points - 1) : 0.0; }

  /// Square window |Re|, |Im| <= half_width.
  static WignerGridSpec square(double half_width, int points) {
    return {-half_width, half_width, -half_width, half_width, points, points};
  }
};

struct WignerGrid {
  std::vector<double> re_alpha;
  std::vector<double> im_alpha;
  Eigen::MatrixXd values;  // values(i, j) at re_alpha[i] + i im_alpha[j]
  double min_value = 0.0;

  /// Riemann-sum estimate of the integral of W over the window.
  double integral() const {
    const double dr = re_alpha.size() > 1 ? re_alpha[1] - re_alpha[0] : 0.0;
    const double di = im_alpha.size() > 1 ? im_alpha[1] - im_alpha[0] : 0.0;
    return values.sum() * dr * di;
  }
};

/// Matrix elements <m|D(beta)|n> for m, n < cutoff.
///
/// Along each diagonal m = k + s the elements f_k = <k+s|D|k> are scaled
/// associated Laguerre functions obeying
///   sqrt((k+1)(k+1+s)) f_{k+1} = (2k + 1 + s - |beta|^2) f_k - sqrt(k(k+s)) f_{k-1},
/// started from f_0 = e^{-|beta|^2/2} beta^s / sqrt(s!). Elements above the
/// diagonal use <m|D(beta)|n> = conj(<n|D(-beta)|m>).
inline Matrix displacement_elements(Complex beta, int cutoff) {
  Matrix d(cutoff, cutoff);
  const double x = std::norm(beta);
  auto diagonal = [&](Complex b, int s, auto&& store) {
    Complex f0 = std::exp(-0.5 * x);
    for (int i = 1; i <= s; ++i) f0 *= b / std::sqrt(double(i));
    Complex prev{}, cur = f0;
    for (int k = 0; k + s < cutoff; ++k) {
      store(k, cur);
      const Complex next = ((2.0 * k + 1 + s - x) * cur - std::sqrt(double(k) * (k + s)) * prev) /
                           std::sqrt(double(k + 1) * (k + 1 + s));
      prev = cur;
      cur = next;
    }
  };
  for (int s = 0; s < cutoff; ++s) {
    diagonal(beta, s, [&](int k, Complex v) { d(k + s, k) = v; });
    if (s > 0) diagonal(-beta, s, [&](int k, Complex v) { d(k, k + s) = std::conj(v); });
  }
  return d;
}

/// Largest grid spacing accepted for a state of mean photon number nbar.
/// Fock-state fringes of W have period about π / (2 sqrt(2 nbar + 1)); a
/// spacing of half a unit of vacuum width scaled by sqrt(nbar + 1) keeps
/// several samples per fringe.
inline double wigner_max_spacing(double nbar) { return 0.5 / std::sqrt(nbar + 1.0); }

/// W(alpha) = (2/π) sum_{n,m} rho_{nm} (-1)^n <m|D(2 alpha)|n>.
inline double wigner_at(const ReducedDensity& rho, Complex alpha) {
  const int c = rho.cutoff;
  const Matrix d = displacement_elements(2.0 * alpha, c);
  Complex acc{};
  for (int n = 0; n < c; ++n) {
    const double sign = n % 2 ? -1.0 : 1.0;
    for (int m = 0; m < c; ++m) acc += rho.matrix(n, m) * sign * d(m, n);
  }
  return 2.0 / std::numbers::pi * acc.real();
}

inline WignerGrid wigner(const ReducedDensity& rho, const WignerGridSpec& spec) {
  if (spec.re_points < 2 || spec.im_points < 2) fail(ErrorKind::GridTooCoarse, "Wigner grid needs at least 2x2 points");
  double nbar = 0.0;
  for (int n = 0; n < rho.cutoff; ++n) nbar += n * rho.matrix(n, n).real();
  const double hmax = wigner_max_spacing(nbar);
  const double h = std::max(spec.re_step(), spec.im_step());
  if (h > hmax)
    fail(ErrorKind::GridTooCoarse, "grid spacing " + std::to_string(h) + " exceeds " + std::to_string(hmax) +
                                       " for mean photon number " + std::to_string(nbar));
  WignerGrid out;
  for (int i = 0; i < spec.re_points; ++i) out.re_alpha.push_back(spec.re_min + spec.re_step() * i);
  for (int j = 0; j < spec.im_points; ++j) out.im_alpha.push_back(spec.im_min + spec.im_step() * j);
  out.values.resize(spec.re_points, spec.im_points);
  for (int i = 0; i < spec.re_points; ++i)
    for (int j = 0; j < spec.im_points; ++j)
      out.values(i, j) = wigner_at(rho, Complex(out.re_alpha[i], out.im_alpha[j]));
  out.min_value = out.values.minCoeff();
  return out;
}

/// Orientation of the reduced state's phase-space distribution,
/// 0.5 arg(<a^2> - <a>^2), in radians. Zero when the state is rotationally
/// symmetric.
inline double wigner_orientation(const ReducedDensity& rho) {
  Complex a{}, a2{};
  for (int n = 1; n < rho.cutoff; ++n) {
    a += std::sqrt(double(n)) * rho.matrix(n, n - 1);
    if (n >= 2) a2 += std::sqrt(double(n) * (n - 1)) * rho.matrix(n, n - 2);
  }
  const Complex v = a2 - a * a;
  return std::abs(v) < 1e-14 ? 0.0 : 0.5 * std::arg(v);
}

}  // namespace oamzi

#pragma once

// Closed-form parity signals and sensitivities in z = tanh r.
//
// Three families live here:
//   *_printed   the published expressions, transcribed token for token
//               (only unambiguous typesetting slips are read through; see
//               TRANSCRIPTION.md for every reading).
//   *_repaired  the published expressions after the structural repairs that
//               make them agree with the Fock engine.
//   *_derived   independent analytic results used as oracles where the
//               published expression could not be repaired.
//
// All forms use the geared operating point: the phase enters through
// X = L(π + 2θ).

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "oamzi/errors.hpp"

namespace oamzi::reference {

namespace detail {

inline double geared_angle(double theta, int L) { return L * (std::numbers::pi + 2.0 * theta); }

inline void require_nondegenerate(double z, const char* what) {
  if (!(z >= 1e-6)) fail(ErrorKind::DegenerateState, std::string(what) + " is undefined for z < 1e-6");
  if (!(z < 1.0)) fail(ErrorKind::InvalidArgument, std::string(what) + " needs z < 1");
}

inline void require_transmittance(double T) {
  if (!(T >= 0.0 && T <= 1.0))
    fail(ErrorKind::InvalidTransmittance, "transmittance " + std::to_string(T) + " outside [0, 1]");
}

/// Harmonic coefficients c_0..c_4 of the PSA11 / PAS11 numerators
/// sum_k c_k cos kX, with w = z^2 and Horner grouping in w.
struct Harmonics {
  double c[5];

  double value(double X) const {
    return c[0] + c[1] * std::cos(X) + c[2] * std::cos(2 * X) + c[3] * std::cos(3 * X) + c[4] * std::cos(4 * X);
  }
  double slope(double X) const {
    return -(c[1] * std::sin(X) + 2 * c[2] * std::sin(2 * X) + 3 * c[3] * std::sin(3 * X) + 4 * c[4] * std::sin(4 * X));
  }
};

inline Harmonics psa11_harmonics(double z) {
  const double w = z * z, w2 = w * w;
  return {{w2 * (-4.0 + w2 * (315.0 + w2 * (-252.0 + 8.0 * w2))),
           -4.0 * w * (2.0 + w2 * (-63.0 + w2 * (39.0 + 14.0 * w2))),
           4.0 * w2 * (15.0 + w2 * (-41.0 + 9.0 * w2)),
           4.0 * w2 * w * (-9.0 + w2),
           w2 * w2}};
}

inline Harmonics pas11_harmonics(double z) {
  const double w = z * z, w2 = w * w;
  return {{8.0 + w2 * (-252.0 + w2 * (315.0 - 4.0 * w2)),
           -4.0 * w * (14.0 + w2 * (39.0 + w2 * (-63.0 + 2.0 * w2))),
           4.0 * w2 * (9.0 + w2 * (-41.0 + 15.0 * w2)),
           4.0 * w2 * w * (1.0 - 9.0 * w2),
           w2 * w2}};
}

inline double D(double z, double X) { return 1.0 + z * z * z * z + 2.0 * z * z * std::cos(X); }

/// 1 + 11w + 11w^2 + w^3, the polynomial in sum n^4 w^n = w (...) / (1 - w)^5.
inline double quartic_moment_poly(double w) { return 1.0 + w * (11.0 + w * (11.0 + w)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Lossless TMSV.

/// P = (1 - z^2) / sqrt(1 + z^4 + 2 z^2 cos X).
inline double parity_tmsv(double z, double theta, int L) {
  const double X = detail::geared_angle(theta, L);
  return (1.0 - z * z) / std::sqrt(detail::D(z, X));
}

// ---------------------------------------------------------------------------
// PSA11 and PAS11, lossless.

/// PSA11 parity exactly as published: the printed numerator over
/// 8 (1 + z^4 + 2z^2 cos 2Lθ)^(1/2) (1 + z^4 + 2z^2 cos X).
inline double parity_psa11_printed(double z, double theta, int L) {
  detail::require_nondegenerate(z, "PSA11 parity");
  const double X = detail::geared_angle(theta, L);
  const double z2 = z * z, z4 = z2 * z2, z8 = z4 * z4, z12 = z8 * z4;
  const double inner = -4.0 + 315.0 * z4 - 252.0 * z8 + 8.0 * z12 + 4.0 * (15.0 - 41.0 * z4 + 9.0 * z8) * std::cos(2 * X) +
                       4.0 * z2 * (-9.0 + z4) * std::cos(3 * X) + z4 * std::cos(4 * X);
  const double num = (1.0 - z2) * (-4.0 * z2 * (2.0 - 63.0 * z4 + 39.0 * z8 + 14.0 * z12) * std::cos(X) + z4 * inner);
  const double den = 8.0 * std::sqrt(1.0 + z4 + 2.0 * z2 * std::cos(2.0 * L * theta)) * (1.0 + z4 + 2.0 * z2 * std::cos(X));
  return num / den;
}

/// PAS11 parity exactly as published (the missing operator in "39z^4 63z^8"
/// read as minus, as in the sensitivity expression that follows it).
inline double parity_pas11_printed(double z, double theta, int L) {
  detail::require_nondegenerate(z, "PAS11 parity");
  const double X = detail::geared_angle(theta, L);
  const double z2 = z * z, z4 = z2 * z2, z6 = z4 * z2, z8 = z4 * z4, z10 = z8 * z2, z12 = z8 * z4;
  const double poly = 8.0 - 252.0 * z4 + 315.0 * z8 - 4.0 * z12 - 4.0 * z2 * (14.0 + 39.0 * z4 - 63.0 * z8 + 2.0 * z12) * std::cos(X) +
                      4.0 * z4 * (9.0 - 41.0 * z4 + 15.0 * z8) * std::cos(2 * X) + 4.0 * z6 * std::cos(3 * X) -
                      36.0 * z10 * std::cos(3 * X) + z8 * std::cos(4 * X);
  const double den = 8.0 * std::sqrt(1.0 + z4 + 2.0 * z2 * std::cos(2.0 * L * theta)) * (1.0 + z4 + 2.0 * z2 * std::cos(X));
  return (1.0 - z2) * poly / den;
}

/// PSA11 parity, repaired:
///   (1 - w)^5 N(X) / (8 w (1 + 11w + 11w^2 + w^3) D^(9/2)),  w = z^2.
inline double parity_psa11(double z, double theta, int L) {
  detail::require_nondegenerate(z, "PSA11 parity");
  const double X = detail::geared_angle(theta, L), w = z * z;
  const double pre = std::pow(1.0 - w, 5) / (8.0 * w * detail::quartic_moment_poly(w));
  return pre * detail::psa11_harmonics(z).value(X) / std::pow(detail::D(z, X), 4.5);
}

/// PAS11 parity, repaired:
///   (1 - w)^5 N(X) / (8 (1 + 11w + 11w^2 + w^3) D^(9/2)).
inline double parity_pas11(double z, double theta, int L) {
  detail::require_nondegenerate(z, "PAS11 parity");
  const double X = detail::geared_angle(theta, L), w = z * z;
  const double pre = std::pow(1.0 - w, 5) / (8.0 * detail::quartic_moment_poly(w));
  return pre * detail::pas11_harmonics(z).value(X) / std::pow(detail::D(z, X), 4.5);
}

namespace detail {

inline double check_sin(double X) {
  const double s = std::sin(X);
  if (std::abs(s) < 1e-12) fail(ErrorKind::DerivativeVanished, "sin L(pi + 2 theta) vanishes");
  return s;
}

/// Common skeleton of the printed sensitivities:
///   sqrt(1 - num2 / [64 E D]^8) / (2 | L z^2 (z^2 - 1) S(X) sin X / (E^(1/2) D^5) |)
inline double printed_sensitivity(double z, double theta, int L, double num2, double S) {
  const double X = geared_angle(theta, L);
  const double s = check_sin(X);
  const double z2 = z * z, z4 = z2 * z2;
  const double E = 1.0 + z4 + 2.0 * z2 * std::cos(2.0 * L * theta);
  const double Dx = 1.0 + z4 + 2.0 * z2 * std::cos(X);
  const double top = std::sqrt(std::max(0.0, 1.0 - num2 / std::pow(64.0 * E * Dx, 8)));
  const double slope = L * z2 * (-1.0 + z2) * S * s / (std::sqrt(E) * std::pow(Dx, 5));
  return top / (2.0 * std::abs(slope));
}

/// sqrt(1 - P^2) / |dP/dθ| for P = pre * N(X) / D^(9/2).
inline double repaired_sensitivity(double z, double theta, int L, double pre, const Harmonics& h) {
  const double X = geared_angle(theta, L);
  check_sin(X);
  const double Dx = D(z, X);
  const double P = pre * h.value(X) / std::pow(Dx, 4.5);
  const double dD = -2.0 * z * z * std::sin(X);
  const double dPdX = pre * (h.slope(X) * Dx - 4.5 * h.value(X) * dD) / std::pow(Dx, 5.5);
  return std::sqrt(std::max(0.0, 1.0 - P * P)) / std::abs(2.0 * L * dPdX);
}

}  // namespace detail

/// PSA11 sensitivity exactly as published.
inline double sens_psa11_printed(double z, double theta, int L) {
  detail::require_nondegenerate(z, "PSA11 sensitivity");
  const double X = detail::geared_angle(theta, L);
  const double z2 = z * z, z4 = z2 * z2, z6 = z4 * z2, z8 = z4 * z4, z12 = z8 * z4, z16 = z8 * z8;
  const double bracket = -4.0 * (2.0 - 63.0 * z4 + 39.0 * z8 + 14.0 * z12) * std::cos(X) +
                         z2 * (-4.0 + 315.0 * z4 - 252.0 * z8 + 8.0 * z12 + 4.0 * (15.0 - 41.0 * z4 + 9.0 * z8) * std::cos(2 * X) +
                               4.0 * z2 * (-9.0 + z4) * std::cos(3 * X) + z4 * std::cos(4 * X));
  const double num2 = z4 * std::pow(-1.0 + z2, 2) * bracket * bracket;
  const double S = 1.0 - 51.0 * z4 + 396.0 * z8 - 245.0 * z12 + 15.0 * z16 -
                   6.0 * z2 * (6.0 - 49.0 * z4 + 10.0 * z8 + 10.0 * z12) * std::cos(X) +
                   3.0 * z4 * (19.0 - 20.0 * z4 + 5.0 * z8) * std::cos(2 * X) - 10.0 * z6 * std::cos(3 * X);
  return detail::printed_sensitivity(z, theta, L, num2, S);
}

/// PAS11 sensitivity exactly as published (the unclosed bracket in its first
/// term read as squared, matching the PSA11 expression).
inline double sens_pas11_printed(double z, double theta, int L) {
  detail::require_nondegenerate(z, "PAS11 sensitivity");
  const double X = detail::geared_angle(theta, L);
  const double z2 = z * z, z4 = z2 * z2, z6 = z4 * z2, z8 = z4 * z4, z10 = z8 * z2, z12 = z8 * z4, z16 = z8 * z8;
  const double bracket = 8.0 - 252.0 * z4 + 315.0 * z8 - 4.0 * z12 - 4.0 * z2 * (14.0 + 39.0 * z4 - 63.0 * z8 + 2.0 * z12) * std::cos(X) +
                         4.0 * z4 * (9.0 - 41.0 * z4 + 15.0 * z8) * std::cos(2 * X) + 4.0 * z6 * std::cos(3 * X) -
                         36.0 * z10 * std::cos(3 * X) + z8 * std::cos(4 * X);
  const double num2 = std::pow(-1.0 + z2, 2) * bracket * bracket;
  const double S = 15.0 - 245.0 * z4 + 396.0 * z8 - 51.0 * z12 + z16 -
                   6.0 * z2 * (10.0 + 10.0 * z4 - 49.0 * z8 + 6.0 * z12) * std::cos(X) +
                   3.0 * z4 * (5.0 - 20.0 * z4 + 19.0 * z8) * std::cos(2 * X) - 10.0 * z10 * std::cos(3 * X);
  return detail::printed_sensitivity(z, theta, L, num2, S);
}

/// PSA11 sensitivity from the repaired parity, differentiated analytically.
inline double sens_psa11(double z, double theta, int L) {
  detail::require_nondegenerate(z, "PSA11 sensitivity");
  const double w = z * z;
  const double pre = std::pow(1.0 - w, 5) / (8.0 * w * detail::quartic_moment_poly(w));
  return detail::repaired_sensitivity(z, theta, L, pre, detail::psa11_harmonics(z));
}

/// PAS11 sensitivity from the repaired parity, differentiated analytically.
inline double sens_pas11(double z, double theta, int L) {
  detail::require_nondegenerate(z, "PAS11 sensitivity");
  const double w = z * z;
  const double pre = std::pow(1.0 - w, 5) / (8.0 * detail::quartic_moment_poly(w));
  return detail::repaired_sensitivity(z, theta, L, pre, detail::pas11_harmonics(z));
}

// ---------------------------------------------------------------------------
// Lossy forms.

/// PS11 parity with arm transmittances, exactly as published. Besides the
/// two typesetting slips "z6{6}" (read z^6) and "cos L(π2θ)" (read
/// cos L(π+2θ)), every token is taken literally, including the doubled
/// "z^6 z^6" factor.
inline double parity_ps11_lossy_printed(double z, double theta, int L, double Ta, double Tb) {
  detail::require_nondegenerate(z, "PS11 parity");
  detail::require_transmittance(Ta);
  detail::require_transmittance(Tb);
  const double X = detail::geared_angle(theta, L);
  const double z2 = z * z, z4 = z2 * z2, z6 = z4 * z2;
  const double sa = std::sqrt(Ta), sb = std::sqrt(Tb), sab = std::sqrt(Ta * Tb);
  const double a15 = Ta * sa, a25 = Ta * Ta * sa, a35 = Ta * Ta * Ta * sa;
  const double b15 = Tb * sb, b25 = Tb * Tb * sb, b35 = Tb * Tb * Tb * sb;
  const double Ta2 = Ta * Ta, Ta3 = Ta2 * Ta, Ta4 = Ta2 * Ta2, Tb2 = Tb * Tb, Tb3 = Tb2 * Tb, Tb4 = Tb2 * Tb2;

  const double quad = 2.0 - 2.0 * Ta + Ta2 - 2.0 * Tb + Tb2;
  const double root4 = std::pow(sa + sb, 4);

  double body = -128.0 + 32.0 * z2 - 32.0 * Ta2 * z2 + 16.0 * Ta2 * z2 - 32.0 * Tb2 + 16.0 * Tb2 * z2 - 12.0 * z4 +
                16.0 * Ta * z4 + 8.0 * Ta3 * z4 - 2.0 * Ta4 * z4 - 16.0 * sab * z4 + 64.0 * a15 * sb * z4 + 16.0 * Tb * z4 +
                56.0 * Ta * Tb * z4 + 8.0 * Ta2 * Tb * z4 + 64.0 * sa * b15 * z4 - 16.0 * a15 * b15 * z4 + 8.0 * Ta * Tb2 * z4 -
                8.0 * Ta2 * Tb2 * z4 + 8.0 * Tb3 * z4 - 2.0 * Tb4 * z4 - 2.0 * Ta2 * z6 + 2.0 * Ta3 * z6 - Ta4 * z6 -
                8.0 * a15 * sb * z6 + 8.0 * a25 * sb * z6 - 4.0 * a35 * sb * z6 - 12.0 * Ta * Tb * z6 + 14.0 * Ta2 * Tb * z6 -
                6.0 * Ta3 * Tb * z6 - 8.0 * sa * b15 * z6 + 16.0 * a15 * b15 * z6 - 4.0 * a25 * b15 * z6 * z6 -
                2.0 * Tb2 * z6 + 14.0 * Ta * Tb2 * z6 - 2.0 * Ta2 * Tb2 * z6 + 8.0 * sa * b25 * z6 - 4.0 * a15 * b25 * z6 +
                2.0 * Tb3 * z6 - 6.0 * Ta * Tb3 * z6 - 4.0 * sa * b35 * z6 - Tb4 * z6;
  body += 2.0 * std::pow(z + sa * Tb * z, 2) * (-16.0 + 4.0 * quad * z2 + root4 * z4) * std::cos(X);
  body -= 4.0 * std::pow(z + sab * z, 4) * std::cos(2 * X);
  const double num = 8.0 * z2 * (-1.0 + z2) * body;

  const double base = 16.0 - 4.0 * quad * z2 + root4 * z4;
  const double cross = 8.0 * std::pow(z + sab * z, 2);
  const double den = std::sqrt(base + cross * std::cos(2.0 * L * theta)) * std::pow(base + cross * std::cos(X), 2);
  return num / den;
}

/// Quadratic Q(w) whose inverse square root generates the lossy parity of
/// the number-diagonal states |n,n>:
///   Q(w) = (1 + w (Ta + Tb - 1))^2 - w (Ta^2 + Tb^2) + 2 Ta Tb w cos X.
struct DiagonalKernel {
  double q0, q1, q2;

  static DiagonalKernel make(double X, double Ta, double Tb) {
    const double s = Ta + Tb - 1.0;
    return {1.0, 2.0 * s - (Ta * Ta + Tb * Tb) + 2.0 * Ta * Tb * std::cos(X), s * s};
  }
  double operator()(double w) const { return q0 + w * (q1 + w * q2); }
  double d1(double w) const { return q1 + 2.0 * q2 * w; }
  double d2() const { return 2.0 * q2; }
};

/// TMSV parity through lossy arms: (1 - z^2) Q(z^2)^(-1/2).
inline double parity_tmsv_lossy_derived(double z, double theta, int L, double Ta, double Tb) {
  detail::require_transmittance(Ta);
  detail::require_transmittance(Tb);
  const auto Q = DiagonalKernel::make(detail::geared_angle(theta, L), Ta, Tb);
  const double w = z * z;
  return (1.0 - w) / std::sqrt(Q(w));
}

/// PS11 parity through lossy arms. The state is sum (m+1) z^(m+1) |m,m>, so
/// the parity is (w d/dw)^2 [w Q^(-1/2)] over sum (m+1)^2 w^(m+1):
///   P = (y + 3w y' + w^2 y'') (1 - w)^3 / (1 + w),  y = Q^(-1/2).
inline double parity_ps11_lossy_derived(double z, double theta, int L, double Ta, double Tb) {
  detail::require_nondegenerate(z, "PS11 parity");
  detail::require_transmittance(Ta);
  detail::require_transmittance(Tb);
  const auto Q = DiagonalKernel::make(detail::geared_angle(theta, L), Ta, Tb);
  const double w = z * z;
  const double q = Q(w), q1 = Q.d1(w);
  const double y = 1.0 / std::sqrt(q);
  const double y1 = -0.5 * q1 * y / q;
  const double y2 = 0.75 * q1 * q1 * y / (q * q) - 0.5 * Q.d2() * y / q;
  return (y + 3.0 * w * y1 + w * w * y2) * std::pow(1.0 - w, 3) / (1.0 + w);
}

/// Parity of any state sum_n g_n |n,n> through the lossy interferometer:
/// sum |g_n|^2 F_n / sum |g_n|^2 with F_n the Taylor coefficients of
/// Q(w)^(-1/2), generated by (n+1) F_{n+1} = -(n + 1/2) q1 F_n - n q2 F_{n-1}.
/// Lossless, F_n is the Legendre polynomial P_n(-cos X).
inline double parity_diagonal_series(std::span<const double> weights, double theta, int L, double Ta, double Tb) {
  detail::require_transmittance(Ta);
  detail::require_transmittance(Tb);
  const auto Q = DiagonalKernel::make(detail::geared_angle(theta, L), Ta, Tb);
  double fm1 = 0.0, f = 1.0, num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    num += weights[n] * f;
    den += weights[n];
    const double next = -((n + 0.5) * Q.q1 * f + double(n) * Q.q2 * fm1) / double(n + 1);
    fm1 = f;
    f = next;
  }
  if (!(den > 0.0)) fail(ErrorKind::ZeroNorm, "diagonal weights vanish");
  return num / den;
}

}  // namespace oamzi::reference

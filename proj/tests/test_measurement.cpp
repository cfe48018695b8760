#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oamzi/measurement.hpp"
#include "oamzi/reference.hpp"

using namespace oamzi;
using std::numbers::pi;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::IoError;
}

InterferometerConfig at(double theta, int L = 1, double Ta = 1.0, double Tb = 1.0) {
  InterferometerConfig cfg;
  cfg.theta = theta;
  cfg.L = L;
  cfg.T_a = Ta;
  cfg.T_b = Tb;
  return cfg;
}

NumericOptions wide() {
  NumericOptions o;
  o.cutoff_cap = 256;
  return o;
}

// J2 = (a†b - ab†)/(2i) as a dense matrix on a c x c two-mode grid.
Matrix dense_j2(int c) {
  Matrix m = Matrix::Zero(c * c, c * c);
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) {
      const int from = joint_index(a, b, c);
      if (b > 0 && a + 1 < c) m(joint_index(a + 1, b - 1, c), from) += std::sqrt(double(a + 1) * b) / Complex(0, 2);
      if (a > 0 && b + 1 < c) m(joint_index(a - 1, b + 1, c), from) -= std::sqrt(double(a) * (b + 1)) / Complex(0, 2);
    }
  return m;
}

}  // namespace

TEST(Parity, Clamp) {
  EXPECT_EQ(clamp_parity(1.0000001).value, 1.0);
  EXPECT_TRUE(clamp_parity(1.0000001).clamped);
  EXPECT_EQ(clamp_parity(-2.0).value, -1.0);
  EXPECT_FALSE(clamp_parity(0.3).clamped);
}

TEST(Parity, BasisStateExamples) {
  EXPECT_EQ(parity_expectation(TwoModeState::basis(3, 0, 0)), 1.0);
  EXPECT_EQ(parity_expectation(TwoModeState::basis(3, 2, 1)), -1.0);
  // |1,0> through the interferometer: the photon exits in b with probability
  // sin^2(Phi/2), so P = cos(Phi).
  const auto f = fringe(TwoModeState::basis(2, 1, 0), 1.0, 1.0);
  for (double ph : {0.0, 0.4, 1.7, 3.0}) EXPECT_NEAR(std::abs(f.value(ph)), std::abs(std::cos(ph)), 1e-14);
}

TEST(Parity, VacuumSensitivityIsZeroOverZero) {
  const auto f = fringe(TwoModeState::basis(2, 0, 0), 1.0, 1.0);
  EXPECT_EQ(kind_of([&] { sensitivity(f, at(0.1)); }), ErrorKind::DerivativeVanished);
}

TEST(Parity, TmsvMatchesClosedForm) {
  for (double r : {0.3, 1.096}) {
    const auto p = prepare(StateSpec::named("TMSV", r), wide());
    const auto f = fringe(p.state, 1.0, 1.0);
    for (int L : {1, 2, 5})
      for (double th : {-0.3, 0.0, 0.01, 0.2})
        EXPECT_NEAR(f.value(at(th, L)), reference::parity_tmsv(std::tanh(r), th, L), 1e-10);
  }
}

TEST(Sensitivity, MatchesRepairedClosedForms) {
  for (double r : {0.5, 1.096})
    for (int L : {1, 3})
      for (double th : {-0.2, 0.05, 0.13}) {
        const double z = std::tanh(r);
        const auto psa = sensitivity(StateSpec::named("PSA11", r), at(th, L), wide());
        const auto pas = sensitivity(StateSpec::named("PAS11", r), at(th, L), wide());
        EXPECT_NEAR(psa.parity, reference::parity_psa11(z, th, L), 1e-10);
        EXPECT_NEAR(pas.parity, reference::parity_pas11(z, th, L), 1e-10);
        EXPECT_NEAR(psa.delta_theta / reference::sens_psa11(z, th, L), 1.0, 1e-6) << r << " " << L << " " << th;
        EXPECT_NEAR(pas.delta_theta / reference::sens_pas11(z, th, L), 1.0, 1e-6) << r << " " << L << " " << th;
      }
}

TEST(Sensitivity, DifferenceQuotientAgreesWithSeriesDerivative) {
  const auto res = sensitivity(StateSpec::named("PSA22", 0.8), at(0.07, 2, 0.6, 0.8), wide());
  EXPECT_NEAR(res.d_parity_d_theta, res.analytic_derivative, 1e-7 * std::max(1.0, std::abs(res.analytic_derivative)));
  EXPECT_NEAR(res.fisher_classical, res.d_parity_d_theta * res.d_parity_d_theta / (1 - res.parity * res.parity), 1e-9);
  EXPECT_NEAR(res.delta_theta, 1.0 / std::sqrt(res.fisher_classical), 1e-12 * res.delta_theta);
}

TEST(Sensitivity, LiteralVarianceOption) {
  NumericOptions o = wide();
  o.paper_literal_sensitivity = true;
  const auto lit = sensitivity(StateSpec::named("PAS11", 0.6), at(0.1), o);
  EXPECT_NEAR(lit.delta_theta, std::sqrt(1 - lit.parity) / std::abs(lit.d_parity_d_theta), 1e-12);
}

TEST(Sensitivity, SymmetricInTheta) {
  for (auto [Ta, Tb] : {std::pair{1.0, 1.0}, {0.5, 0.5}}) {
    const auto p = prepare(StateSpec::named("PSA11", 1.096), wide());
    const auto f = fringe(p.state, Ta, Tb);
    for (double th : {0.01, 0.1, 0.25}) {
      const double a = sensitivity(f, at(th, 1, Ta, Tb)).delta_theta;
      const double b = sensitivity(f, at(-th, 1, Ta, Tb)).delta_theta;
      EXPECT_NEAR(a / b, 1.0, 1e-7);
    }
  }
}

TEST(Sensitivity, NeverBeatsQuantumBound) {
  for (const char* name : {"TMSV", "PAS11", "PSA11", "PS22"}) {
    const auto p = prepare(StateSpec::named(name, 0.7), wide());
    const auto f = fringe(p.state, 1.0, 1.0);
    const double bound = qfi(p.state).qcrb;
    for (double th = -0.3; th <= 0.3; th += 0.0137) {
      const auto res = sensitivity(f, at(th));
      EXPECT_GE(res.delta_theta, bound * (1 - 1e-6)) << name << " theta=" << th;
    }
  }
}

TEST(Sensitivity, ImprovesWithPhotonNumber) {
  for (const char* name : {"TMSV", "PSA11"}) {
    double prev = INFINITY;
    for (double N = 2.5; N <= 12; N += 1.0) {
      auto spec = StateSpec::named(name);
      spec.r = invert_mean_photon(spec, N);
      const double dt = sensitivity(spec, at(1e-4), wide()).delta_theta;
      EXPECT_LT(dt, prev) << name << " N=" << N;
      prev = dt;
    }
  }
}

TEST(Sensitivity, LossDegradesSensitivity) {
  for (const char* name : {"TMSV", "PA11", "PSA11", "PAS22"}) {
    auto spec = StateSpec::named(name);
    spec.r = invert_mean_photon(spec, 6.0);
    const double ideal = sensitivity(spec, at(1e-4), wide()).delta_theta;
    const double lossy = sensitivity(spec, at(1e-4, 1, 0.5, 0.5), wide()).delta_theta;
    EXPECT_GT(lossy, ideal) << name;
  }
}

TEST(Fwhm, CosineHasWidthPi) {
  std::vector<std::pair<double, double>> curve;
  for (int i = 0; i <= 4000; ++i) {
    const double x = -pi + 2 * pi * i / 4000;
    curve.emplace_back(x, std::cos(x));
  }
  EXPECT_NEAR(fwhm(curve), pi, 1e-6);
}

TEST(Fwhm, FlatOrEdgePeakRejected) {
  std::vector<std::pair<double, double>> flat = {{0, 1}, {1, 1}, {2, 1}};
  EXPECT_EQ(kind_of([&] { fwhm(flat); }), ErrorKind::NoPeak);
  std::vector<std::pair<double, double>> edge = {{0, 3}, {1, 2}, {2, 1}, {3, 0}};
  EXPECT_EQ(kind_of([&] { fwhm(edge); }), ErrorKind::NoPeak);
}

TEST(Fwhm, ScalesInverselyWithL) {
  const auto p = prepare(StateSpec::named("PSA11", 0.4), wide());
  const auto f = fringe(p.state, 1.0, 1.0);
  const double w1 = fwhm_refined(f, at(0.0, 1), locate_peak(f, at(0.0, 1)));
  for (int L : {2, 3, 7}) {
    const double c = locate_peak(f, at(0.0, L));
    EXPECT_NEAR(fwhm_refined(f, at(0.0, L), c) * L, w1, 1e-10) << L;
  }
}

TEST(Fwhm, SharperForPhotonSubtractedAdded) {
  const auto psa = prepare(StateSpec::named("PSA11", 1.096), wide());
  const auto tm = prepare(StateSpec::named("TMSV", 1.096), wide());
  const auto fp = fringe(psa.state, 1.0, 1.0), ft = fringe(tm.state, 1.0, 1.0);
  EXPECT_LT(fwhm_refined(fp, at(0.0)), fwhm_refined(ft, at(0.0)));
}

TEST(Fwhm, PeakLocation) {
  const auto p = prepare(StateSpec::named("TMSV", 0.6), wide());
  const auto f = fringe(p.state, 1.0, 1.0);
  EXPECT_NEAR(locate_peak(f, at(0.0, 1)), 0.0, 1e-9);
  EXPECT_NEAR(locate_peak(f, at(0.0, 3)), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(locate_peak(f, at(0.0, 2))), pi / 4, 1e-9);
}

TEST(MeanPhoton, Examples) {
  EXPECT_NEAR(mean_photon(StateSpec::named("PA11", 0.0)), 2.0, 1e-15);
  EXPECT_NEAR(mean_photon(StateSpec::named("PA22", 0.0)), 4.0, 1e-15);
  EXPECT_NEAR(mean_photon(StateSpec::named("TMSV", 0.5)), 2 * std::sinh(0.5) * std::sinh(0.5), 1e-13);
}

TEST(MeanPhoton, Inversion) {
  const double target = 2 * std::sinh(1.0) * std::sinh(1.0);
  EXPECT_NEAR(invert_mean_photon(StateSpec::named("TMSV"), target), 1.0, 1e-7);
  for (const char* name : {"PA11", "PS11", "PAS22", "PSA11"}) {
    const double r = invert_mean_photon(StateSpec::named(name), 7.5);
    EXPECT_NEAR(mean_photon(StateSpec::named(name, r)), 7.5, 1e-7) << name;
  }
  EXPECT_EQ(kind_of([] { invert_mean_photon(StateSpec::named("PA11"), 1.9); }), ErrorKind::TargetUnreachable);
  EXPECT_EQ(kind_of([] { invert_mean_photon(StateSpec::named("TMSV"), 1e6); }), ErrorKind::TargetUnreachable);
}

TEST(Qfi, Examples) {
  EXPECT_EQ(kind_of([] { qfi(TwoModeState::basis(2, 0, 0)); }), ErrorKind::ZeroInformation);
  EXPECT_NEAR(qfi(TwoModeState::basis(2, 1, 0)).f_q, 1.0, 1e-14);
  EXPECT_NEAR(qfi(TwoModeState::basis(2, 1, 0), 3).f_q, 9.0, 1e-13);
}

TEST(Qfi, MatchesDenseGenerator) {
  const auto s = build_state(StateSpec::named("PSA11", 0.5), 14, 1.0).state;
  const Matrix J = dense_j2(15);
  const Vector v = s.resized(15).amplitudes();
  const Vector jv = J * v;
  const double mean = v.dot(jv).real();
  const double var = jv.squaredNorm() - mean * mean;
  EXPECT_NEAR(qfi(s).f_q, 4 * var, 1e-12);
}

TEST(Qfi, TmsvReachesHeisenbergScaling) {
  for (double r : {0.4, 0.9}) {
    NumericOptions o = wide();
    o.leak_tol = 1e-15;
    const auto p = prepare(StateSpec::named("TMSV", r), o);
    const double N = 2 * std::sinh(r) * std::sinh(r);
    EXPECT_NEAR(qfi(p.state).f_q, N * (N + 2), 1e-10 * N * (N + 2));
  }
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gib/encoder.hpp"
#include "gib/ib_solver.hpp"
#include "gib/oracle.hpp"
#include "test_support.hpp"

using gib::ErrorKind;
using gib::Measure;
using Eigen::VectorXd;

namespace {

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const gib::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a gib::Error";
  return ErrorKind::ConfigError;
}

std::vector<double> q_values() {
  std::vector<double> qs;
  for (int k = 0; k <= 8; ++k) qs.push_back(0.25 * k);
  return qs;
}

std::vector<double> lambda_values() {
  std::vector<double> ls;
  for (int k = 1; k <= 19; ++k) ls.push_back(0.05 * k);
  return ls;
}

std::vector<double> beta_factors() { return {1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0}; }

}  // namespace

TEST(GFunction, ValueAtZero) {
  for (double q : q_values())
    for (double l : lambda_values()) EXPECT_EQ(gib::g_q(0.0, l, q), 1.0 - l);
}

TEST(GFunction, ShannonOrder) { EXPECT_NEAR(gib::g_q(2.0, 0.5, 1.0), 0.25, 1e-16); }

TEST(GFunction, OrderTwoEqualsOrderOne) {
  EXPECT_NEAR(gib::g_q(2.0, 0.5, 2.0), 0.25, 1e-16);
  for (double u : gib_test::log_grid(1e-6, 1e6, 200))
    for (double l : lambda_values()) EXPECT_NEAR(gib::g_q(u, l, 2.0), gib::g_q(u, l, 1.0), 1e-12);
}

TEST(GFunction, MatchesSlopeRatioOfInformations) {
  for (double q : q_values())
    for (double l : lambda_values())
      for (double u : {0.0, 0.01, 0.5, 3.0, 100.0, 1e4}) {
        const double ref = gib_test::reference_g(u, l, q);
        // Both sides cancel toward zero at large u, hence the absolute floor.
        EXPECT_NEAR(gib::g_q(u, l, q), ref, 1e-11 * ref + 1e-15) << "q " << q << " l " << l << " u " << u;
      }
}

TEST(GFunction, RejectsInvalidArguments) {
  EXPECT_EQ(kind_of([] { gib::g_q(-1.0, 0.5, 1.0); }), ErrorKind::OutOfRange);
  EXPECT_EQ(kind_of([] { gib::g_q(1.0, 0.0, 1.0); }), ErrorKind::OutOfRange);
  EXPECT_EQ(kind_of([] { gib::g_q(1.0, 1.0, 1.0); }), ErrorKind::OutOfRange);
  EXPECT_EQ(kind_of([] { gib::g_q(1.0, 0.5, 2.5); }), ErrorKind::OutOfRange);
}

TEST(CriticalBeta, Examples) {
  EXPECT_DOUBLE_EQ(gib::critical_beta(0.5), 2.0);
  EXPECT_DOUBLE_EQ(gib::critical_beta(0.8), 5.0);
  EXPECT_NEAR(gib::critical_beta(0.1), 10.0 / 9.0, 1e-15);
  EXPECT_EQ(kind_of([] { gib::critical_beta(1.0); }), ErrorKind::OutOfRange);
  EXPECT_EQ(kind_of([] { gib::critical_beta(0.0); }), ErrorKind::OutOfRange);
}

TEST(Cubic, FactorsAtOrdersOneAndTwo) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uu(-3.0, 3.0);
  for (double l : lambda_values())
    for (double f : beta_factors()) {
      const double beta = f * gib::critical_beta(l);
      const auto k1 = gib::cubic_coefficients(l, 1.0, beta);
      const auto k2 = gib::cubic_coefficients(l, 2.0, beta);
      const double d = 1.0 - beta * (1.0 - l);
      EXPECT_DOUBLE_EQ(k1.a, l);
      EXPECT_EQ(k2.a, 0.0);
      for (int t = 0; t < 5; ++t) {
        const double u = uu(rng);
        EXPECT_NEAR(k1(u), (u + 1.0) * (u + 1.0) * (l * u + d), 1e-9 * (1.0 + std::abs(k1(u))));
        EXPECT_NEAR(k2(u), (l * u + 1.0) * (l * u + d), 1e-9 * (1.0 + std::abs(k2(u))));
      }
      // The linear factor carries the Shannon root.
      EXPECT_NEAR(-d / l, (beta * (1.0 - l) - 1.0) / l, 1e-12 * beta);
    }
}

TEST(Cubic, RootsOfKnownPolynomials) {
  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  // (u-1)(u-2)(u-3)
  auto r = sorted(gib::real_cubic_roots({1.0, -6.0, 11.0, -6.0}));
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0], 1.0, 1e-12);
  EXPECT_NEAR(r[1], 2.0, 1e-12);
  EXPECT_NEAR(r[2], 3.0, 1e-12);
  // u² + 1 times (u - 4): one real root.
  r = sorted(gib::real_cubic_roots({1.0, -4.0, 1.0, -4.0}));
  ASSERT_GE(r.size(), 1u);
  EXPECT_NEAR(r.back(), 4.0, 1e-12);
  // Degenerate leading coefficient: 2u² - 8.
  r = sorted(gib::real_cubic_roots({0.0, 2.0, 0.0, -8.0}));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], -2.0, 1e-12);
  EXPECT_NEAR(r[1], 2.0, 1e-12);
  // Linear: 3u - 6.
  r = gib::real_cubic_roots({0.0, 0.0, 3.0, -6.0});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0], 2.0, 1e-15);
}

TEST(SolveModeRenyi, Examples) {
  EXPECT_NEAR(gib::solve_mode_renyi(0.5, 1.0, 4.0), 2.0, 1e-12);
  EXPECT_EQ(gib::solve_mode_renyi(0.5, 1.0, 2.0), 0.0);
  EXPECT_NEAR(gib::solve_mode_renyi(0.5, 2.0, 4.0), 2.0, 1e-12);
  EXPECT_NEAR(gib::solve_mode_renyi(0.5, 2.0, 4.0), gib_test::reference_root(0.5, 2.0, 4.0), 1e-12);
}

TEST(SolveModeRenyi, RejectsInvalidArguments) {
  EXPECT_EQ(kind_of([] { gib::solve_mode_renyi(0.5, 2.5, 4.0); }), ErrorKind::OutOfRange);
  EXPECT_EQ(kind_of([] { gib::solve_mode_renyi(1.2, 1.0, 4.0); }), ErrorKind::OutOfRange);
  EXPECT_EQ(kind_of([] { gib::solve_mode_renyi(0.5, 1.0, -1.0); }), ErrorKind::OutOfRange);
}

TEST(SolveModeJeffreys, Examples) {
  EXPECT_EQ(gib::solve_mode_jeffreys(0.5, 2.0), 0.0);
  EXPECT_NEAR(gib::solve_mode_jeffreys(0.5, 4.0), 0.828427124746190, 1e-14);
  EXPECT_EQ(gib::solve_mode_jeffreys(0.8, 5.0), 0.0);
  EXPECT_EQ(kind_of([] { gib::solve_mode_jeffreys(1.2, 5.0); }), ErrorKind::OutOfRange);
}

TEST(SolveSpectrum, Examples) {
  const gib::Spectrum fig1 = gib::spectrum_from_eigenvalues(gib_test::kSixModes);
  for (const Measure& m : {Measure::shannon(), Measure::jeffreys(), Measure::renyi(0.5)}) {
    const gib::MixingSolution s = gib::solve_spectrum(fig1, m, 1.0);
    EXPECT_TRUE(s.u_values.isZero(0.0));
    EXPECT_EQ(s.active_count(), 0);
  }
  const gib::MixingSolution s = gib::solve_spectrum(fig1, Measure::shannon(), 2.5);
  const std::vector<bool> expected{true, true, true, true, false, false};
  EXPECT_EQ(s.active, expected);

  const gib::MixingSolution j = gib::solve_spectrum(gib::spectrum_from_eigenvalues({0.5}), Measure::jeffreys(), 4.0);
  EXPECT_NEAR(j.u_values[0], 0.828427124746190, 1e-14);
  EXPECT_TRUE(j.active[0]);
}

TEST(SolveSpectrum, UnitEigenvalueStaysInactive) {
  const gib::MixingSolution s =
      gib::solve_spectrum(gib::spectrum_from_eigenvalues({0.5, 1.0}), Measure::renyi(0.5), 1e6);
  EXPECT_GT(s.u_values[0], 0.0);
  EXPECT_EQ(s.u_values[1], 0.0);
}

// Properties on the (q, λ, β) grid.

TEST(SolverProperties, GStrictlyDecreasingAndVanishing) {
  const auto us = gib_test::log_grid(1e-6, 1e6, 400);
  for (double q : q_values())
    for (double l : lambda_values()) {
      double prev = gib::g_q(0.0, l, q);
      for (double u : us) {
        const double g = gib::g_q(u, l, q);
        EXPECT_LT(g, prev) << "q " << q << " l " << l << " u " << u;
        prev = g;
      }
      EXPECT_LT(gib::g_q(1e12, l, q), 1e-9);
    }
}

TEST(SolverProperties, ResidualCubicBisectionAndReference) {
  int cubic_misses = 0;
  for (double q : q_values())
    for (double l : lambda_values())
      for (double f : beta_factors()) {
        const double beta = f * gib::critical_beta(l);
        const double u = gib::solve_mode_renyi(l, q, beta);
        ASSERT_GT(u, 0.0);
        EXPECT_LT(std::abs(gib::g_q(u, l, q) * beta - 1.0), 1e-9);
        const double bis = gib::renyi_root_bisection(l, q, beta);
        if (auto c = gib::renyi_root_cubic(l, q, beta)) {
          EXPECT_NEAR(*c, bis, 1e-8 * std::max(1.0, bis)) << "q " << q << " l " << l << " f " << f;
        } else {
          ++cubic_misses;
        }
        const double ref = gib_test::reference_root(l, q, beta);
        EXPECT_NEAR(u, ref, 1e-8 * std::max(1.0, ref)) << "q " << q << " l " << l << " f " << f;
      }
  EXPECT_EQ(cubic_misses, 0);
}

TEST(SolverProperties, ShannonRecoveryAndOrderTwoCoincidence) {
  for (double l : lambda_values())
    for (double f : beta_factors()) {
      const double beta = f * gib::critical_beta(l);
      const double closed = (beta * (1.0 - l) - 1.0) / l;
      EXPECT_NEAR(gib::solve_mode_renyi(l, 1.0, beta), closed, 1e-10);
      EXPECT_NEAR(gib::solve_mode_renyi(l, 2.0, beta), gib::solve_mode_renyi(l, 1.0, beta), 1e-10);
      EXPECT_NEAR(gib::solve_mode_shannon(l, beta), closed, 1e-10);
    }
}

TEST(SolverProperties, MonotoneActivation) {
  const auto betas = gib_test::log_grid(1.0, 1e3, 300);
  for (const Measure& m : {Measure::shannon(), Measure::jeffreys(), Measure::renyi(0.0), Measure::renyi(0.5),
                           Measure::renyi(1.5), Measure::renyi(2.0)})
    for (double l : lambda_values()) {
      double prev = 0.0;
      for (double b : betas) {
        const double u = gib::solve_mode(l, m, b);
        EXPECT_GE(u, prev) << m.label() << " l " << l << " b " << b;
        EXPECT_EQ(u > 0.0, b > gib::critical_beta(l)) << m.label() << " l " << l << " b " << b;
        prev = u;
      }
    }
}

TEST(SolverProperties, FirstOrderOptimality) {
  const gib::Spectrum s = gib::spectrum_from_eigenvalues({0.1, 0.3, 0.5, 0.7, 0.9});
  for (const Measure& m : {Measure::shannon(), Measure::jeffreys(), Measure::renyi(0.0), Measure::renyi(0.5),
                           Measure::renyi(1.5), Measure::renyi(2.0)})
    for (double b : {1.2, 2.0, 5.0, 20.0, 200.0}) {
      const gib::MixingSolution sol = gib::solve_spectrum(s, m, b);
      EXPECT_LT(gib::stationarity_check(s, m, b, sol), 1e-6) << m.label() << " beta " << b;
    }
}

TEST(SolverProperties, FiniteDifferenceSlopesMatchG) {
  for (double q : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0})
    for (double l : {0.1, 0.5, 0.9})
      for (double u : {0.1, 1.0, 10.0, 100.0}) {
        const Measure m = Measure::renyi(q);
        const double h = 1e-5 * (1.0 + u);
        const gib::InfoPair p = gib::mode_information(l, u + h, m);
        const gib::InfoPair n = gib::mode_information(l, u - h, m);
        const double ratio = (p.omega_ty - n.omega_ty) / (p.omega_tx - n.omega_tx);
        const double g = gib::g_q(u, l, q);
        EXPECT_NEAR(ratio, g, 1e-5 * g) << "q " << q << " l " << l << " u " << u;
      }
}

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gib/encoder.hpp"
#include "gib/errors.hpp"
#include "gib/gaussian_model.hpp"
#include "gib/measure.hpp"
#include "gib/tolerances.hpp"

namespace gib {

namespace detail {

inline void check_mode_lambda(double lambda) {
  require(std::isfinite(lambda) && lambda > 0.0 && lambda < 1.0, ErrorKind::OutOfRange,
          "eigenvalue must lie in (0, 1), got " + show(lambda));
}

inline void check_solver_q(double q) {
  require(std::isfinite(q) && q >= 0.0 && q <= 2.0, ErrorKind::OutOfRange,
          "Renyi order must lie in [0, 2], got " + show(q));
}

inline void check_beta(double beta) {
  require(std::isfinite(beta) && beta > 0.0, ErrorKind::OutOfRange,
          "tradeoff parameter beta must be finite and positive");
}

}  // namespace detail

/**
 * Right-hand side of the per-mode stationarity condition 1/β = g_q(u, λ):
 *
 *   g_q = (1−λ)/(1+uλ) · [1 + q̄(1+q̄)(1−λ)u / (1+(1−q̄²(1−λ))u)]
 *                       / [1 + q̄(1+q̄)u / (1+(1−q̄²)u)]
 *
 * Strictly decreasing in u ≥ 0 from 1−λ towards 0 for q in [0, 2].
 */
inline double g_q(double u, double lambda, double q) {
  require(std::isfinite(u) && u >= 0.0, ErrorKind::OutOfRange, "g_q requires u >= 0");
  detail::check_mode_lambda(lambda);
  detail::check_solver_q(q);
  const double qbar = 1.0 - q;
  const double mix = qbar * (1.0 + qbar);
  const double num = 1.0 + mix * (1.0 - lambda) * u / (1.0 + (1.0 - qbar * qbar * (1.0 - lambda)) * u);
  const double den = 1.0 + mix * u / (1.0 + (1.0 - qbar * qbar) * u);
  return (1.0 - lambda) / (1.0 + u * lambda) * num / den;
}

/// β at which the mode with eigenvalue λ becomes active: 1/(1−λ), for every measure.
inline double critical_beta(double lambda) {
  detail::check_mode_lambda(lambda);
  return 1.0 / (1.0 - lambda);
}

/// Coefficients of a u³ + b u² + c u + d = 0, equivalent to g_q(u, λ) = 1/β.
struct CubicCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double operator()(double u) const { return ((a * u + b) * u + c) * u + d; }
};

inline CubicCoefficients cubic_coefficients(double lambda, double q, double beta) {
  const double qb = 1.0 - q;
  const double qb2 = qb * qb;
  CubicCoefficients k;
  k.d = 1.0 - beta * (1.0 - lambda);
  k.a = lambda * (1.0 + qb) * (1.0 - (1.0 - lambda) * qb2);
  k.b = lambda * (2.0 + 2.0 * qb + lambda * qb2) + k.d * (1.0 + qb) * (1.0 - lambda * qb - (1.0 - lambda) * qb2);
  k.c = lambda * (1.0 + qb + qb2) + k.d * (2.0 + (1.0 - lambda) * qb - qb2);
  return k;
}

/// Real roots of a u³ + b u² + c u + d, Newton-polished; degrades to lower degree when a or b vanish.
inline std::vector<double> real_cubic_roots(const CubicCoefficients& k) {
  std::vector<double> roots;
  const double scale = std::max({std::abs(k.a), std::abs(k.b), std::abs(k.c), std::abs(k.d)});
  if (scale == 0.0) return roots;
  const double a = k.a / scale, b = k.b / scale, c = k.c / scale, d = k.d / scale;
  constexpr double tiny = 1e-14;

  if (std::abs(a) <= tiny) {
    if (std::abs(b) <= tiny) {
      if (std::abs(c) > tiny) roots.push_back(-d / c);
    } else {
      const double disc = c * c - 4.0 * b * d;
      if (disc >= 0.0) {
        // Cancellation-free pairing of the two quadratic roots.
        const double t = -0.5 * (c + std::copysign(std::sqrt(disc), c));
        if (t != 0.0) roots.push_back(t / b);
        if (t != 0.0) roots.push_back(d / t);
        else roots.push_back(0.0);
      }
    }
  } else {
    const double p = b / a, r = c / a, s = d / a;
    const double shift = p / 3.0;
    const double dp = r - p * p / 3.0;
    const double dq = 2.0 * p * p * p / 27.0 - p * r / 3.0 + s;
    const double disc = dq * dq / 4.0 + dp * dp * dp / 27.0;
    if (disc > 0.0) {
      const double sq = std::sqrt(disc);
      roots.push_back(std::cbrt(-dq / 2.0 + sq) + std::cbrt(-dq / 2.0 - sq) - shift);
    } else if (dp == 0.0) {
      roots.push_back(-shift);
    } else {
      const double m = 2.0 * std::sqrt(-dp / 3.0);
      const double arg = std::clamp(3.0 * dq / (dp * m), -1.0, 1.0);
      const double theta = std::acos(arg) / 3.0;
      for (int kk = 0; kk < 3; ++kk) {
        roots.push_back(m * std::cos(theta - 2.0 * M_PI * kk / 3.0) - shift);
      }
    }
  }

  const CubicCoefficients unit{a, b, c, d};
  for (double& x : roots) {
    for (int it = 0; it < 8; ++it) {
      const double f = unit(x);
      const double df = (3.0 * unit.a * x + 2.0 * unit.b) * x + unit.c;
      if (df == 0.0) break;
      const double step = f / df;
      const double next = x - step;
      if (!std::isfinite(next)) break;
      if (std::abs(unit(next)) > std::abs(f)) break;
      x = next;
      if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

inline double stationarity_residual(double u, double lambda, double q, double beta) {
  return std::abs(beta * g_q(u, lambda, q) - 1.0);
}

/// Positive root of the cubic satisfying the stationarity condition; empty unless exactly one survives.
inline std::optional<double> renyi_root_cubic(double lambda, double q, double beta) {
  detail::check_mode_lambda(lambda);
  detail::check_solver_q(q);
  detail::check_beta(beta);
  std::optional<double> found;
  int survivors = 0;
  for (double u : real_cubic_roots(cubic_coefficients(lambda, q, beta))) {
    if (!(u > 0.0) || !std::isfinite(u)) continue;
    if (stationarity_residual(u, lambda, q, beta) >= tol::root) continue;
    ++survivors;
    found = u;
  }
  if (survivors != 1) return std::nullopt;
  return found;
}

/// Bisection on the monotone g_q; requires β > 1/(1−λ).
inline double renyi_root_bisection(double lambda, double q, double beta) {
  detail::check_mode_lambda(lambda);
  detail::check_solver_q(q);
  detail::check_beta(beta);
  const double target = 1.0 / beta;
  require(g_q(0.0, lambda, q) > target, ErrorKind::OutOfRange, "mode is inactive at this beta");
  double lo = 0.0;
  double hi = 1.0;
  while (g_q(hi, lambda, q) >= target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi) || hi > 1e300) fail(ErrorKind::RootNotFound, "failed to bracket the root");
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-14 * (1.0 + mid) || mid <= lo || mid >= hi) break;
    if (g_q(mid, lambda, q) > target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/**
 * Optimal reduced weight of one mode under Rényi order q.
 *
 * Returns 0 up to the critical β. Above it, the unique positive solution of
 * g_q(u, λ) = 1/β is taken from the cubic's real roots, with a bisection
 * fallback when no single root passes the positivity and residual filters.
 */
inline double solve_mode_renyi(double lambda, double q, double beta) {
  detail::check_mode_lambda(lambda);
  detail::check_solver_q(q);
  detail::check_beta(beta);
  // The second test catches β within rounding of the threshold.
  if (beta <= critical_beta(lambda) || beta * (1.0 - lambda) <= 1.0 || 1.0 - lambda <= 1.0 / beta) {
    return 0.0;
  }
  if (auto u = renyi_root_cubic(lambda, q, beta)) return *u;
  const double u = renyi_root_bisection(lambda, q, beta);
  if (!(u > 0.0) || stationarity_residual(u, lambda, q, beta) >= tol::root) {
    fail(ErrorKind::RootNotFound, "no root of the stationarity condition found");
  }
  return u;
}

/// (β(1−λ) − 1)/λ, clipped at 0.
inline double solve_mode_shannon(double lambda, double beta) {
  detail::check_mode_lambda(lambda);
  detail::check_beta(beta);
  return std::max(0.0, (beta * (1.0 - lambda) - 1.0) / lambda);
}

/// (√(β(1−λ)) − 1)/λ, clipped at 0.
inline double solve_mode_jeffreys(double lambda, double beta) {
  detail::check_mode_lambda(lambda);
  detail::check_beta(beta);
  return std::max(0.0, (std::sqrt(beta * (1.0 - lambda)) - 1.0) / lambda);
}

inline double solve_mode(double lambda, const Measure& m, double beta) {
  if (m.is_jeffreys()) return solve_mode_jeffreys(lambda, beta);
  if (m.is_shannon()) return solve_mode_shannon(lambda, beta);
  return solve_mode_renyi(lambda, m.q(), beta);
}

/// Optimal mixing weights for every mode. Modes with λ = 1 carry no relevant information and stay at 0.
inline MixingSolution solve_spectrum(const Spectrum& spec, const Measure& m, double beta) {
  detail::check_beta(beta);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(spec.size());
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    const double lambda = spec.lambdas[i];
    if (lambda >= 1.0) continue;
    u[i] = solve_mode(lambda, m, beta);
  }
  return MixingSolution::make(std::move(u), beta, m);
}

}  // namespace gib

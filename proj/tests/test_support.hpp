#pragma once

// Shared fixtures and independent reference computations for the test suites.
// The references here are written from the information formulas directly and
// do not call into the solver.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "gib/gaussian_model.hpp"

namespace gib_test {

inline const std::vector<double> kSixModes = {0.1, 0.2, 0.3, 0.5, 0.7, 0.8};

/// Joint covariance B Bᵀ + 0.5 I with standard normal B, split into blocks.
inline gib::JointGaussian random_model(std::mt19937_64& rng, int nx, int ny) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const int n = nx + ny;
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) b(i, k) = n01(rng);
  Eigen::MatrixXd s = b * b.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
  s = 0.5 * (s + s.transpose());
  Eigen::VectorXd mx(nx), my(ny);
  for (int i = 0; i < nx; ++i) mx[i] = n01(rng);
  for (int i = 0; i < ny; ++i) my[i] = n01(rng);
  return gib::JointGaussian(mx, my, s.topLeftCorner(nx, nx), s.bottomRightCorner(ny, ny),
                            s.topRightCorner(nx, ny));
}

inline Eigen::MatrixXd random_invertible(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) m(i, k) = (i == k ? 2.0 : 0.0) + 0.5 * n01(rng);
  return m;
}

/// Random spectrum with eigenvalues in [lo, hi].
inline std::vector<double> random_lambdas(std::mt19937_64& rng, int n, double lo = 0.05, double hi = 0.95) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& x : out) x = u(rng);
  return out;
}

// Per-mode derivatives of the informations with respect to the weight u,
// differentiated by hand from the per-mode sums.
struct ModeSlopes {
  double d_tx;
  double d_ty;
};

inline ModeSlopes shannon_slopes(double lambda, double u) {
  return {0.5 / (1.0 + u), 0.5 * (1.0 / (1.0 + u) - lambda / (1.0 + lambda * u))};
}

inline ModeSlopes renyi_slopes(double lambda, double u, double q) {
  const double qb = 1.0 - q;
  const double cx = 1.0 - qb * qb;
  const double cy = 1.0 - qb * qb * (1.0 - lambda);
  const double dx = -(q / (1.0 + u) - cx / (1.0 + cx * u)) / (2.0 * qb);
  const double dy = -(qb * lambda / (1.0 + lambda * u) + q / (1.0 + u) - cy / (1.0 + cy * u)) / (2.0 * qb);
  return {dx, dy};
}

// Slopes of 2J − I, the q → 0 limit of I_q / q.
inline ModeSlopes small_q_slopes(double lambda, double u) {
  const ModeSlopes s = shannon_slopes(lambda, u);
  const double dj_ty = (1.0 - lambda) / ((1.0 + lambda * u) * (1.0 + lambda * u));
  return {1.0 - s.d_tx, dj_ty - s.d_ty};
}

/// 1/β at which u is stationary: the ratio of the two information slopes.
inline double reference_g(double u, double lambda, double q) {
  ModeSlopes s{};
  if (q == 0.0) s = small_q_slopes(lambda, u);
  else if (std::abs(q - 1.0) < 1e-12) s = shannon_slopes(lambda, u);
  else s = renyi_slopes(lambda, u, q);
  return s.d_ty / s.d_tx;
}

/// Stationary weight by bisection on reference_g, 0 below the activation point.
inline double reference_root(double lambda, double q, double beta) {
  const double target = 1.0 / beta;
  if (reference_g(0.0, lambda, q) <= target) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (reference_g(hi, lambda, q) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 300 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (reference_g(mid, lambda, q) > target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return out;
}

}  // namespace gib_test

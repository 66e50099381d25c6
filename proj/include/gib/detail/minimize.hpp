#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace gib::detail {

struct MinimizeOptions {
  double grad_tol = 1e-7;
  // Iteration continues past grad_tol down to this level while steps still descend.
  double polish_tol = 0.0;
  int max_iterations = 500;
  // Relative finite-difference steps for gradient and Hessian.
  double grad_step = 1e-3;
  double hess_step = 1e-3;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  double grad_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Fourth-order central differences. The objective must be defined slightly
// outside the box, since stencils are not truncated at the bounds.
template <typename Fn>
Eigen::VectorXd fd_gradient(const Fn& f, const Eigen::VectorXd& x, double rel_step) {
  const auto n = x.size();
  Eigen::VectorXd g(n);
  Eigen::VectorXd p = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = rel_step * (1.0 + std::abs(x[i]));
    p[i] = x[i] + 2.0 * h; const double f2p = f(p);
    p[i] = x[i] + h;       const double f1p = f(p);
    p[i] = x[i] - h;       const double f1m = f(p);
    p[i] = x[i] - 2.0 * h; const double f2m = f(p);
    p[i] = x[i];
    g[i] = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
  }
  return g;
}

template <typename Fn>
Eigen::MatrixXd fd_hessian(const Fn& f, const Eigen::VectorXd& x, double fx, double rel_step) {
  const auto n = x.size();
  Eigen::MatrixXd h(n, n);
  Eigen::VectorXd p = x;
  Eigen::VectorXd step(n);
  for (Eigen::Index i = 0; i < n; ++i) step[i] = rel_step * (1.0 + std::abs(x[i]));
  for (Eigen::Index i = 0; i < n; ++i) {
    p[i] = x[i] + step[i]; const double fp = f(p);
    p[i] = x[i] - step[i]; const double fm = f(p);
    p[i] = x[i];
    h(i, i) = (fp - 2.0 * fx + fm) / (step[i] * step[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      p[i] = x[i] + step[i]; p[j] = x[j] + step[j]; const double fpp = f(p);
      p[j] = x[j] - step[j];                         const double fpm = f(p);
      p[i] = x[i] - step[i];                         const double fmm = f(p);
      p[j] = x[j] + step[j];                         const double fmp = f(p);
      p[i] = x[i]; p[j] = x[j];
      h(i, j) = h(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * step[i] * step[j]);
    }
  }
  return h;
}

/**
 * Box-constrained minimization by projected, Levenberg-damped Newton steps
 * with finite-difference derivatives.
 *
 * Variables sitting on a bound with the gradient pushing outward are frozen
 * for the step; convergence is declared when the projected gradient norm
 * drops below `grad_tol`. Iteration stops at `polish_tol` (when larger than
 * zero) or when no damped step lowers the objective.
 */
template <typename Fn>
MinimizeResult minimize_box(const Fn& f, Eigen::VectorXd x, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper, const MinimizeOptions& opt) {
  const auto n = x.size();
  x = x.cwiseMax(lower).cwiseMin(upper);
  MinimizeResult res;
  double fx = f(x);
  double damping = 0.0;

  auto projected_at = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& g, std::vector<bool>& free) {
    Eigen::VectorXd pg = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool pinned = (at[i] <= lower[i] && g[i] > 0.0) || (at[i] >= upper[i] && g[i] < 0.0);
      free[static_cast<std::size_t>(i)] = !pinned;
      if (pinned) pg[i] = 0.0;
    }
    return pg;
  };
  auto projected = [&](const Eigen::VectorXd& g, std::vector<bool>& free) { return projected_at(x, g, free); };

  const double stop_tol = opt.polish_tol > 0.0 ? opt.polish_tol : opt.grad_tol;
  std::vector<bool> free(static_cast<std::size_t>(n), true);
  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    const Eigen::VectorXd g = fd_gradient(f, x, opt.grad_step);
    const Eigen::VectorXd pg = projected(g, free);
    res.grad_norm = pg.norm();
    if (res.grad_norm < stop_tol) break;

    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (free[static_cast<std::size_t>(i)]) idx.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    const Eigen::MatrixXd full_h = fd_hessian(f, x, fx, opt.hess_step);
    Eigen::MatrixXd h(m, m);
    Eigen::VectorXd gf(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      gf[a] = g[idx[static_cast<std::size_t>(a)]];
      for (Eigen::Index b = 0; b < m; ++b) h(a, b) = full_h(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()));
    const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    const double floor = std::max(0.0, -es.eigenvalues().minCoeff()) + 1e-10 * top;
    double mu = std::max(damping, floor);

    bool accepted = false;
    while (mu < 1e20 * top) {
      const Eigen::VectorXd shifted = (es.eigenvalues().array() + mu).matrix();
      const Eigen::VectorXd d = -es.eigenvectors() * ((es.eigenvectors().transpose() * gf).cwiseQuotient(shifted));
      Eigen::VectorXd trial = x;
      for (Eigen::Index a = 0; a < m; ++a) trial[idx[static_cast<std::size_t>(a)]] += d[a];
      trial = trial.cwiseMax(lower).cwiseMin(upper);
      const double ft = f(trial);
      // Near the optimum the decrease drops below rounding in f; a step is
      // then judged by whether it shrinks the projected gradient.
      bool better = std::isfinite(ft) && ft < fx;
      if (!better && std::isfinite(ft) && ft - fx <= 1e-12 * (1.0 + std::abs(fx))) {
        std::vector<bool> trial_free(static_cast<std::size_t>(n), true);
        better = projected_at(trial, fd_gradient(f, trial, opt.grad_step), trial_free).norm() < res.grad_norm;
      }
      if (better) {
        x = trial;
        fx = ft;
        damping = mu > floor ? mu / 10.0 : 0.0;
        accepted = true;
        break;
      }
      mu = std::max(10.0 * mu, 1e-8 * top);
    }
    if (!accepted) {
      // No descent direction left at this noise level; report the final gradient.
      res.grad_norm = projected(fd_gradient(f, x, opt.grad_step), free).norm();
      break;
    }
  }
  if (res.iterations >= opt.max_iterations) {
    res.grad_norm = projected(fd_gradient(f, x, opt.grad_step), free).norm();
  }
  res.x = x;
  res.value = fx;
  res.converged = res.grad_norm < opt.grad_tol;
  return res;
}

}  // namespace gib::detail

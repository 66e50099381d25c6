#pragma once

// Numerical verification of the closed-form solutions: direct minimization of
// the bottleneck loss over mixing weights or over dense encoder matrices, and
// finite-difference stationarity checks.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gib/detail/minimize.hpp"
#include "gib/detail/random.hpp"
#include "gib/encoder.hpp"
#include "gib/errors.hpp"
#include "gib/gaussian_model.hpp"
#include "gib/ib_solver.hpp"
#include "gib/measure.hpp"

namespace gib {

struct OracleOptions {
  std::size_t restarts = 8;
  double grad_tol = 1e-7;
  double u_cap = 1e6;
  int max_iterations = 500;
  /// Largest u drawn for random diagonal starts.
  double init_u_max = 1e3;
  /// Replaces the first random start: mixing weights (diagonal) or a row-major n_t × n_x matrix (full).
  std::optional<Eigen::VectorXd> initial;
  /// Added to every analytic weight before comparison; exercises the checker itself.
  double perturbation = 0.0;
};

struct OracleReport {
  Eigen::VectorXd u_analytic;
  Eigen::VectorXd u_numeric;
  double loss_analytic = 0.0;
  double loss_numeric = 0.0;
  double max_abs_diff = 0.0;
  double stationarity_residual = 0.0;
  std::size_t converged_restarts = 0;
};

namespace detail {

// Ω(T;X) − βΩ(T;Y) with the Rényi loss divided by q. At q = 0 both Rényi
// terms vanish identically; the q → 0 limit of I_q/q is 2J − I, which keeps
// the same minimizer as the neighbouring orders.
template <typename InfoOf>
double scalarized(const Measure& m, double beta, const InfoOf& info_of) {
  if (m.is_renyi() && !m.is_shannon()) {
    if (m.q() == 0.0) {
      const InfoPair j = info_of(Measure::jeffreys());
      const InfoPair s = info_of(Measure::shannon());
      return (2.0 * j.omega_tx - s.omega_tx) - beta * (2.0 * j.omega_ty - s.omega_ty);
    }
    const InfoPair r = info_of(m);
    return (r.omega_tx - beta * r.omega_ty) / m.q();
  }
  const InfoPair r = info_of(m);
  return r.omega_tx - beta * r.omega_ty;
}

inline Eigen::VectorXd full_matrix_weights(const Eigen::MatrixXd& a, const Spectrum& spec) {
  const Eigen::MatrixXd w = a * spec.v_rows.fullPivLu().inverse();
  const Eigen::MatrixXd wtw = w.transpose() * w;
  return spec.r_values.cwiseProduct(wtw.diagonal());
}

}  // namespace detail

/// Loss of per-mode weights u (each u > −1) as minimized by the oracle.
inline double oracle_loss(const Spectrum& spec, const Measure& m, double beta, const Eigen::VectorXd& u) {
  require(u.size() == spec.size(), ErrorKind::DimensionMismatch, "weights and spectrum differ in size");
  return detail::scalarized(m, beta, [&](const Measure& mm) {
    InfoPair total;
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
      const InfoPair p = mode_information(spec.lambdas[i], u[i], mm);
      total.omega_tx += p.omega_tx;
      total.omega_ty += p.omega_ty;
    }
    return total;
  });
}

/// Loss of a dense encoder, from the matrix-form informations.
inline double oracle_loss(const JointGaussian& j, const Measure& m, double beta, const LinearEncoder& enc) {
  return detail::scalarized(m, beta, [&](const Measure& mm) { return encoder_info(enc, j, mm); });
}

/**
 * Largest violation of first-order optimality at a solution: |∂L/∂uᵢ| for
 * active modes (central differences, h = 1e-6(1 + uᵢ)) and the negative part
 * of the one-sided derivative for modes held at u = 0.
 */
inline double stationarity_check(const Spectrum& spec, const Measure& m, double beta, const MixingSolution& s) {
  require(s.u_values.size() == spec.size(), ErrorKind::DimensionMismatch, "solution and spectrum differ in size");
  Eigen::VectorXd u = s.u_values;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    const double base = u[i];
    const double h = 1e-6 * (1.0 + base);
    if (base > 0.0) {
      u[i] = base + h; const double fp = oracle_loss(spec, m, beta, u);
      u[i] = base - h; const double fm = oracle_loss(spec, m, beta, u);
      worst = std::max(worst, std::abs(fp - fm) / (2.0 * h));
    } else {
      const double f0 = oracle_loss(spec, m, beta, u);
      u[i] = base + h; const double fp = oracle_loss(spec, m, beta, u);
      worst = std::max(worst, std::max(0.0, -(fp - f0) / h));
    }
    u[i] = base;
  }
  return worst;
}

/**
 * Minimizes the loss over u ∈ [0, u_cap]^modes from random starts and compares
 * the best point with solve_spectrum. The search runs in s = ln(1 + u), which
 * keeps curvature O(1) at large u. Throws ConvergenceFailure when no start
 * reaches the gradient tolerance.
 */
inline OracleReport minimize_loss_diagonal(const Spectrum& spec, const Measure& m, double beta,
                                           std::uint64_t seed, const OracleOptions& opt = {}) {
  require(opt.restarts >= 1, ErrorKind::OutOfRange, "oracle needs at least one restart");
  const auto n = spec.size();
  OracleReport rep;
  const MixingSolution analytic = solve_spectrum(spec, m, beta);
  Eigen::VectorXd u_ref = analytic.u_values;
  if (opt.perturbation != 0.0) u_ref.array() += opt.perturbation;
  const MixingSolution checked = MixingSolution::make(u_ref, beta, m);
  rep.u_analytic = u_ref;
  rep.loss_analytic = oracle_loss(spec, m, beta, u_ref);
  rep.stationarity_residual = stationarity_check(spec, m, beta, checked);

  auto objective = [&](const Eigen::VectorXd& s) {
    return oracle_loss(spec, m, beta, s.unaryExpr([](double v) { return std::expm1(v); }).eval());
  };
  const Eigen::VectorXd lower = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd upper = Eigen::VectorXd::Constant(n, std::log1p(opt.u_cap));

  detail::SeededRandom rng(seed);
  std::vector<Eigen::VectorXd> starts;
  for (std::size_t k = 0; k < opt.restarts; ++k) {
    Eigen::VectorXd s0(n);
    for (Eigen::Index i = 0; i < n; ++i) s0[i] = rng.uniform(0.0, std::log1p(opt.init_u_max));
    starts.push_back(s0);
  }
  if (opt.initial) {
    require(opt.initial->size() == n, ErrorKind::DimensionMismatch, "initial point has the wrong size");
    starts.front() = opt.initial->cwiseMax(0.0).unaryExpr([](double v) { return std::log1p(v); });
  }

  detail::MinimizeOptions mo;
  mo.grad_tol = opt.grad_tol;
  mo.polish_tol = 1e-4 * opt.grad_tol;
  mo.max_iterations = opt.max_iterations;
  std::optional<detail::MinimizeResult> best;
  for (const auto& s0 : starts) {
    auto r = detail::minimize_box(objective, s0, lower, upper, mo);
    if (!r.converged) continue;
    ++rep.converged_restarts;
    if (!best || r.value < best->value) best = std::move(r);
  }
  if (!best) fail(ErrorKind::ConvergenceFailure, "no oracle restart reached the gradient tolerance");

  rep.u_numeric = best->x.unaryExpr([](double v) { return std::expm1(v); });
  rep.loss_numeric = best->value;
  rep.max_abs_diff = (rep.u_numeric - rep.u_analytic).cwiseAbs().maxCoeff();
  return rep;
}

/**
 * Minimizes the loss over dense n_t × n_x encoder matrices and compares it
 * with the diagonal-ansatz encoder built from solve_spectrum.
 *
 * u_numeric holds rᵢ(WᵀW)ᵢᵢ for the best matrix, with W = A V⁻¹; these
 * weights are invariant under rotations of T.
 */
inline OracleReport minimize_loss_full_matrix(const JointGaussian& j, const Measure& m, double beta,
                                              Eigen::Index nt, std::uint64_t seed, const OracleOptions& opt = {}) {
  require(opt.restarts >= 1, ErrorKind::OutOfRange, "oracle needs at least one restart");
  require(j.nx() <= 4, ErrorKind::OutOfRange, "full-matrix oracle is limited to n_x <= 4");
  require(nt >= 1 && nt <= j.nx(), ErrorKind::OutOfRange, "n_t must lie in [1, n_x]");
  const Spectrum spec = spectrum(j);
  const auto nx = j.nx();

  OracleReport rep;
  const MixingSolution analytic = solve_spectrum(spec, m, beta);
  rep.u_analytic = analytic.u_values;
  rep.loss_analytic = oracle_loss(j, m, beta, encoder_from_solution(analytic, spec));
  rep.stationarity_residual = stationarity_check(spec, m, beta, analytic);

  auto as_matrix = [nt, nx](const Eigen::VectorXd& p) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(p.data(), nt, nx)
        .eval();
  };
  // Points where an information diverges or overflows count as +inf so the
  // minimizer rejects them as steps.
  auto objective = [&](const Eigen::VectorXd& p) {
    if (!p.allFinite()) return std::numeric_limits<double>::infinity();
    try {
      return oracle_loss(j, m, beta, LinearEncoder(as_matrix(p)));
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const auto dim = nt * nx;
  const Eigen::VectorXd lower = Eigen::VectorXd::Constant(dim, -std::numeric_limits<double>::infinity());
  const Eigen::VectorXd upper = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::infinity());

  detail::SeededRandom rng(seed);
  std::vector<Eigen::VectorXd> starts;
  for (std::size_t k = 0; k < opt.restarts; ++k) {
    Eigen::VectorXd p(dim);
    for (Eigen::Index i = 0; i < dim; ++i) p[i] = rng.normal();
    starts.push_back(p);
  }
  if (opt.initial) {
    require(opt.initial->size() == dim, ErrorKind::DimensionMismatch, "initial matrix has the wrong size");
    starts.front() = *opt.initial;
  }

  detail::MinimizeOptions mo;
  mo.grad_tol = opt.grad_tol;
  mo.max_iterations = opt.max_iterations;
  mo.polish_tol = 1e-4 * opt.grad_tol;
  mo.grad_step = 1e-4;
  mo.hess_step = 1e-4;
  std::optional<detail::MinimizeResult> best;
  for (const auto& p0 : starts) {
    auto r = detail::minimize_box(objective, p0, lower, upper, mo);
    if (!r.converged) continue;
    ++rep.converged_restarts;
    if (!best || r.value < best->value) best = std::move(r);
  }
  if (!best) fail(ErrorKind::ConvergenceFailure, "no full-matrix restart reached the gradient tolerance");

  rep.u_numeric = detail::full_matrix_weights(as_matrix(best->x), spec);
  rep.loss_numeric = best->value;
  rep.max_abs_diff = (rep.u_numeric - rep.u_analytic).cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace gib

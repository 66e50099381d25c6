#pragma once

// Closed-form correlation measures between jointly Gaussian X and Y.
//
// All values are in nats. Each measure is available in two independent forms:
// a sum over the eigenvalues of the normalized regression matrix
// Σ_{X|Y}Σ_X⁻¹, and a form built directly from the block covariances
// (determinant form for Rényi, trace form and symmetrized KL for Jeffreys).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gib/detail/linalg.hpp"
#include "gib/errors.hpp"
#include "gib/gaussian_model.hpp"
#include "gib/measure.hpp"
#include "gib/tolerances.hpp"

namespace gib {

namespace detail {

inline void check_lambda(double lambda) {
  require(std::isfinite(lambda) && lambda <= 1.0 + tol::eig, ErrorKind::OutOfRange,
          "regression eigenvalue " + show(lambda) + " outside (0, 1]");
  require(lambda > tol::zero_lambda, ErrorKind::DegenerateMode,
          "regression eigenvalue is zero (deterministic mode)");
}

}  // namespace detail

/// Eigenvalues of a (generally non-symmetric) normalized regression matrix, ascending.
inline std::vector<double> regression_eigenvalues(const Eigen::MatrixXd& regression) {
  require(regression.rows() == regression.cols() && regression.rows() > 0,
          ErrorKind::DimensionMismatch, "regression matrix must be square and non-empty");
  Eigen::EigenSolver<Eigen::MatrixXd> es(regression, false);
  if (es.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "eigensolver failed on the regression matrix");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(regression.rows()));
  for (Eigen::Index i = 0; i < regression.rows(); ++i) {
    const auto ev = es.eigenvalues()[i];
    if (std::abs(ev.imag()) > tol::eig) {
      fail(ErrorKind::NumericalFailure, "regression matrix has complex eigenvalues");
    }
    out.push_back(detail::clamp_eigenvalue(ev.real()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// I(X;Y) = −½ Σ ln λᵢ.
inline double shannon_info(std::span<const double> lambdas) {
  double sum = 0.0;
  for (double l : lambdas) {
    detail::check_lambda(l);
    sum += std::log(std::min(l, 1.0));
  }
  return -0.5 * sum;
}

inline double shannon_info(const Spectrum& s) { return shannon_info(s.lambda_span()); }

inline double shannon_info(const Eigen::MatrixXd& regression) {
  return shannon_info(regression_eigenvalues(regression));
}

/// Log-determinant route: ½ (ln|Σ_X| − ln|Σ_{X|Y}|).
inline double shannon_info(const JointGaussian& j) {
  const double lx = detail::logdet_spd(j.sigma_x(), ErrorKind::NonPositiveDefinite, "sigma_x");
  const double lc = detail::logdet_spd(conditional_covariance(j), ErrorKind::DegenerateMode,
                                       "conditional covariance");
  return 0.5 * (lx - lc);
}

/**
 * Rényi q-information from the regression eigenvalues,
 *   I_q = −1/(2q̄) Σ [ q̄ ln λᵢ − ln(1 − q̄²(1 − λᵢ)) ],  q̄ = 1 − q.
 *
 * q = 0 returns the limiting value 0 and |q − 1| < tol::q_one uses the
 * Shannon formula. Orders above 2 are accepted here but diverge once some
 * 1 − q̄²(1 − λᵢ) is non-positive.
 */
inline double renyi_info_regression(std::span<const double> lambdas, double q) {
  require(std::isfinite(q) && q >= 0.0, ErrorKind::OutOfRange, "Renyi order must be nonnegative");
  for (double l : lambdas) detail::check_lambda(l);
  if (q == 0.0) return 0.0;
  if (std::abs(q - 1.0) < tol::q_one) return shannon_info(lambdas);
  const double qbar = 1.0 - q;
  double sum = 0.0;
  for (double l : lambdas) {
    const double lam = std::min(l, 1.0);
    const double blended = -qbar * qbar * (1.0 - lam);
    if (!(1.0 + blended > 0.0)) {
      fail(ErrorKind::DivergentInformation, "Renyi information diverges for q = " + show(q));
    }
    sum += qbar * std::log(lam) - std::log1p(blended);
  }
  return -sum / (2.0 * qbar);
}

inline double renyi_info_regression(const Spectrum& s, double q) {
  return renyi_info_regression(s.lambda_span(), q);
}

inline double renyi_info_regression(const Eigen::MatrixXd& regression, double q) {
  return renyi_info_regression(regression_eigenvalues(regression), q);
}

inline double renyi_info_regression(const JointGaussian& j, double q) {
  return renyi_info_regression(spectrum(j), q);
}

/**
 * Rényi q-information from the full block covariance Σ and its decoupled
 * counterpart Σ̄:
 *   I_q = 1/(q−1) [ −½ ln|qΣ⁻¹ + (1−q)Σ̄⁻¹| − (q/2) ln|Σ| − ((1−q)/2) ln|Σ̄| ].
 */
inline double renyi_info_determinant(const JointGaussian& j, double q) {
  require(std::isfinite(q) && q >= 0.0, ErrorKind::OutOfRange, "Renyi order must be nonnegative");
  if (q == 0.0) return 0.0;
  const Eigen::MatrixXd joint = j.joint_covariance();
  const Eigen::MatrixXd decoupled = j.decoupled_covariance();
  const double ld_joint = detail::logdet_spd(joint, ErrorKind::NonPositiveDefinite, "joint covariance");
  const double ld_decoupled =
      detail::logdet_spd(decoupled, ErrorKind::NonPositiveDefinite, "decoupled covariance");
  if (std::abs(q - 1.0) < tol::q_one) return 0.5 * (ld_decoupled - ld_joint);

  const Eigen::MatrixXd precision =
      detail::symmetrize(q * detail::spd_inverse(joint, ErrorKind::NonPositiveDefinite, "joint covariance") +
                         (1.0 - q) * detail::spd_inverse(decoupled, ErrorKind::NonPositiveDefinite,
                                                         "decoupled covariance"));
  const double ld_blend =
      detail::logdet_spd(precision, ErrorKind::DivergentInformation, "blended precision matrix");
  return (-0.5 * ld_blend - 0.5 * q * ld_joint - 0.5 * (1.0 - q) * ld_decoupled) / (q - 1.0);
}

/// J(X;Y) = ½ Σ (1/λᵢ − 1).
inline double jeffreys_info(std::span<const double> lambdas) {
  double sum = 0.0;
  for (double l : lambdas) {
    detail::check_lambda(l);
    const double lam = std::min(l, 1.0);
    sum += (1.0 - lam) / lam;
  }
  return 0.5 * sum;
}

inline double jeffreys_info(const Spectrum& s) { return jeffreys_info(s.lambda_span()); }

inline double jeffreys_info(const Eigen::MatrixXd& regression) {
  return jeffreys_info(regression_eigenvalues(regression));
}

/// Trace form ½ tr(Σ_X Σ_{X|Y}⁻¹ − I).
inline double jeffreys_info(const JointGaussian& j) {
  const Eigen::MatrixXd cond = conditional_covariance(j);
  Eigen::LLT<Eigen::MatrixXd> llt(cond);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::DegenerateMode, "conditional covariance is singular");
  }
  const Eigen::MatrixXd ratio = llt.solve(j.sigma_x());
  return 0.5 * (ratio.trace() - static_cast<double>(j.nx()));
}

/// KL(N(μ₀, Σ₀) ‖ N(μ₁, Σ₁)).
inline double gaussian_kl(const Eigen::VectorXd& mu0, const Eigen::MatrixXd& sigma0,
                          const Eigen::VectorXd& mu1, const Eigen::MatrixXd& sigma1) {
  require(sigma0.rows() == sigma1.rows() && mu0.size() == sigma0.rows() && mu1.size() == sigma1.rows(),
          ErrorKind::DimensionMismatch, "KL arguments must share a dimension");
  Eigen::LLT<Eigen::MatrixXd> llt1(sigma1);
  if (llt1.info() != Eigen::Success) fail(ErrorKind::NonPositiveDefinite, "sigma1 is not positive-definite");
  const Eigen::VectorXd diff = mu1 - mu0;
  const double trace_term = llt1.solve(sigma0).trace() - static_cast<double>(sigma0.rows());
  const double mahalanobis = diff.dot(llt1.solve(diff));
  const double ld1 = detail::logdet_spd(sigma1, ErrorKind::NonPositiveDefinite, "sigma1");
  const double ld0 = detail::logdet_spd(sigma0, ErrorKind::NonPositiveDefinite, "sigma0");
  return 0.5 * (trace_term + mahalanobis + ld1 - ld0);
}

/// ½ [KL(P_XY ‖ P_X⊗P_Y) + KL(P_X⊗P_Y ‖ P_XY)], both directions evaluated directly.
inline double jeffreys_info_symmetrized_kl(const JointGaussian& j) {
  const Eigen::VectorXd mu = j.joint_mean();
  const Eigen::MatrixXd joint = j.joint_covariance();
  const Eigen::MatrixXd decoupled = j.decoupled_covariance();
  return 0.5 * (gaussian_kl(mu, joint, mu, decoupled) + gaussian_kl(mu, decoupled, mu, joint));
}

/// Information of (X, Y) under any measure, from the regression eigenvalues.
inline double information(std::span<const double> lambdas, const Measure& m) {
  if (m.is_jeffreys()) return jeffreys_info(lambdas);
  if (m.is_shannon()) return shannon_info(lambdas);
  return renyi_info_regression(lambdas, m.q());
}

inline double information(const Spectrum& s, const Measure& m) {
  return information(s.lambda_span(), m);
}

}  // namespace gib

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gib/detail/linalg.hpp"
#include "gib/errors.hpp"
#include "gib/tolerances.hpp"

namespace gib {

/**
 * Jointly Gaussian pair (X, Y) described by its block mean and covariance.
 *
 * Construction validates that the marginal covariances and the full block
 * covariance are symmetric positive-definite; instances are immutable.
 */
class JointGaussian {
 public:
  JointGaussian(const Eigen::MatrixXd& sigma_x, const Eigen::MatrixXd& sigma_y, const Eigen::MatrixXd& sigma_xy)
      : JointGaussian(Eigen::VectorXd::Zero(sigma_x.rows()), Eigen::VectorXd::Zero(sigma_y.rows()), sigma_x,
                      sigma_y, sigma_xy) {}

  JointGaussian(Eigen::VectorXd mean_x, Eigen::VectorXd mean_y, Eigen::MatrixXd sigma_x,
                Eigen::MatrixXd sigma_y, Eigen::MatrixXd sigma_xy)
      : mean_x_(std::move(mean_x)),
        mean_y_(std::move(mean_y)),
        sigma_x_(std::move(sigma_x)),
        sigma_y_(std::move(sigma_y)),
        sigma_xy_(std::move(sigma_xy)) {
    validate();
  }

  Eigen::Index nx() const { return sigma_x_.rows(); }
  Eigen::Index ny() const { return sigma_y_.rows(); }

  const Eigen::VectorXd& mean_x() const { return mean_x_; }
  const Eigen::VectorXd& mean_y() const { return mean_y_; }
  const Eigen::MatrixXd& sigma_x() const { return sigma_x_; }
  const Eigen::MatrixXd& sigma_y() const { return sigma_y_; }
  const Eigen::MatrixXd& sigma_xy() const { return sigma_xy_; }

  /// Full block covariance [[Σx, Σxy], [Σyx, Σy]].
  Eigen::MatrixXd joint_covariance() const {
    return detail::block_covariance(sigma_x_, sigma_y_, sigma_xy_);
  }

  /// Covariance of the product of marginals (cross blocks zeroed).
  Eigen::MatrixXd decoupled_covariance() const {
    return detail::block_covariance(sigma_x_, sigma_y_, Eigen::MatrixXd::Zero(nx(), ny()));
  }

  Eigen::VectorXd joint_mean() const {
    Eigen::VectorXd mu(nx() + ny());
    mu << mean_x_, mean_y_;
    return mu;
  }

 private:
  void validate() {
    require(sigma_x_.rows() >= 1 && sigma_y_.rows() >= 1, ErrorKind::DimensionMismatch,
            "covariance blocks must be non-empty");
    require(sigma_x_.rows() == sigma_x_.cols() && sigma_y_.rows() == sigma_y_.cols(),
            ErrorKind::DimensionMismatch, "marginal covariances must be square");
    require(sigma_xy_.rows() == sigma_x_.rows() && sigma_xy_.cols() == sigma_y_.rows(),
            ErrorKind::DimensionMismatch, "cross covariance must be n_x by n_y");
    require(mean_x_.size() == sigma_x_.rows() && mean_y_.size() == sigma_y_.rows(),
            ErrorKind::DimensionMismatch, "mean dimensions do not match covariances");
    require(sigma_x_.allFinite() && sigma_y_.allFinite() && sigma_xy_.allFinite() &&
                mean_x_.allFinite() && mean_y_.allFinite(),
            ErrorKind::OutOfRange, "model entries must be finite");
    require(detail::is_symmetric(sigma_x_) && detail::is_symmetric(sigma_y_),
            ErrorKind::NonPositiveDefinite, "marginal covariances must be symmetric");
    sigma_x_ = detail::symmetrize(sigma_x_);
    sigma_y_ = detail::symmetrize(sigma_y_);
    require(detail::is_positive_definite(sigma_x_), ErrorKind::NonPositiveDefinite,
            "sigma_x is not positive-definite");
    require(detail::is_positive_definite(sigma_y_), ErrorKind::NonPositiveDefinite,
            "sigma_y is not positive-definite");
    require(detail::is_positive_definite(joint_covariance()), ErrorKind::NonPositiveDefinite,
            "joint covariance is not positive-definite");
  }

  Eigen::VectorXd mean_x_;
  Eigen::VectorXd mean_y_;
  Eigen::MatrixXd sigma_x_;
  Eigen::MatrixXd sigma_y_;
  Eigen::MatrixXd sigma_xy_;
};

/// Eigen-decomposition of the normalized regression matrix Σ_{X|Y} Σ_X⁻¹.
struct Spectrum {
  Eigen::VectorXd lambdas;   // ascending, each in [0, 1]
  Eigen::MatrixXd v_rows;    // row i is a unit-norm left eigenvector for lambdas[i]
  Eigen::VectorXd r_values;  // diag(V Σ_X Vᵀ)

  Eigen::Index size() const { return lambdas.size(); }
  double min_lambda() const { return lambdas.minCoeff(); }
  std::span<const double> lambda_span() const { return {lambdas.data(), static_cast<std::size_t>(lambdas.size())}; }
};

/// Σ_{X|Y} = Σ_X − Σ_XY Σ_Y⁻¹ Σ_YX.
inline Eigen::MatrixXd conditional_covariance(const JointGaussian& j) {
  Eigen::LLT<Eigen::MatrixXd> llt(j.sigma_y());
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::NonPositiveDefinite, "sigma_y failed Cholesky factorization");
  }
  const Eigen::MatrixXd solved = llt.solve(j.sigma_xy().transpose());
  Eigen::MatrixXd cond = detail::symmetrize(j.sigma_x() - j.sigma_xy() * solved);
  require(detail::is_positive_semidefinite(cond), ErrorKind::NonPositiveDefinite,
          "conditional covariance is not positive-semidefinite");
  return cond;
}

namespace detail {

inline double clamp_eigenvalue(double lambda) {
  if (lambda < -tol::eig || lambda > 1.0 + tol::eig) {
    fail(ErrorKind::NumericalFailure,
         "regression eigenvalue " + show(lambda) + " lies outside [0, 1]");
  }
  return std::clamp(lambda, 0.0, 1.0);
}

// Stable ascending order of a vector's entries.
inline std::vector<Eigen::Index> ascending_order(const Eigen::VectorXd& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
  return order;
}

}  // namespace detail

/**
 * Spectrum of Σ_{X|Y} Σ_X⁻¹ via the symmetric problem Σ_X^{-1/2} Σ_{X|Y} Σ_X^{-1/2}.
 *
 * Left eigenvectors are recovered as V = Uᵀ Σ_X^{-1/2} and scaled to unit row
 * norm. Throws DegenerateMode when an eigenvalue is numerically zero.
 */
inline Spectrum spectrum(const JointGaussian& j) {
  const Eigen::MatrixXd cond = conditional_covariance(j);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sx(j.sigma_x());
  if (sx.info() != Eigen::Success) fail(ErrorKind::NumericalFailure, "eigensolver failed on sigma_x");
  const Eigen::MatrixXd inv_sqrt = sx.operatorInverseSqrt();

  const Eigen::MatrixXd whitened = detail::symmetrize(inv_sqrt * cond * inv_sqrt);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(whitened);
  if (es.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "eigensolver did not converge on the regression matrix");
  }

  const auto n = j.nx();
  const auto order = detail::ascending_order(es.eigenvalues());
  Spectrum out;
  out.lambdas.resize(n);
  out.v_rows.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    const double lambda = detail::clamp_eigenvalue(es.eigenvalues()[src]);
    if (lambda < tol::zero_lambda) {
      fail(ErrorKind::DegenerateMode, "regression eigenvalue is zero (deterministic X-Y mode)");
    }
    out.lambdas[k] = lambda;
    Eigen::RowVectorXd row = es.eigenvectors().col(src).transpose() * inv_sqrt;
    out.v_rows.row(k) = row / row.norm();
  }
  out.r_values = (out.v_rows * j.sigma_x() * out.v_rows.transpose()).diagonal();
  return out;
}

/// Spectrum supplied directly as eigenvalues; V is a permutation sorting them ascending.
inline Spectrum spectrum_from_eigenvalues(std::span<const double> lambdas,
                                          std::span<const double> r_values = {}) {
  require(!lambdas.empty(), ErrorKind::OutOfRange, "spectrum must have at least one eigenvalue");
  require(r_values.empty() || r_values.size() == lambdas.size(), ErrorKind::DimensionMismatch,
          "r_values must match the number of eigenvalues");
  const auto n = static_cast<Eigen::Index>(lambdas.size());
  Eigen::VectorXd lam(n);
  Eigen::VectorXd r = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = lambdas[static_cast<std::size_t>(i)];
    require(std::isfinite(l) && l > 0.0 && l <= 1.0, ErrorKind::OutOfRange,
            "eigenvalue " + show(l) + " outside (0, 1]");
    lam[i] = l;
    if (!r_values.empty()) {
      const double ri = r_values[static_cast<std::size_t>(i)];
      require(std::isfinite(ri) && ri > 0.0, ErrorKind::OutOfRange, "r values must be positive");
      r[i] = ri;
    }
  }
  const auto order = detail::ascending_order(lam);
  Spectrum out;
  out.lambdas.resize(n);
  out.r_values.resize(n);
  out.v_rows = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.lambdas[k] = lam[src];
    out.r_values[k] = r[src];
    out.v_rows(k, src) = 1.0;
  }
  return out;
}

inline Spectrum spectrum_from_eigenvalues(std::initializer_list<double> lambdas) {
  return spectrum_from_eigenvalues(std::span<const double>(lambdas.begin(), lambdas.size()));
}

/**
 * A joint model realizing a spectrum: Σ_Y = I, Σ_X = V⁻¹ R V⁻ᵀ and
 * Σ_XY = V⁻¹ (R(I − Λ))^{1/2}, so that V Σ_{X|Y} Vᵀ = Λ R.
 */
inline JointGaussian realize(const Spectrum& s) {
  const auto n = s.size();
  const Eigen::MatrixXd v_inv = s.v_rows.fullPivLu().inverse();
  const Eigen::VectorXd cross =
      (s.r_values.array() * (1.0 - s.lambdas.array())).max(0.0).sqrt().matrix();
  const Eigen::MatrixXd sx = detail::symmetrize(v_inv * s.r_values.asDiagonal() * v_inv.transpose());
  const Eigen::MatrixXd sxy = v_inv * cross.asDiagonal();
  return JointGaussian(sx, Eigen::MatrixXd::Identity(n, n), sxy);
}

/// Applies the invertible map X -> M X to the source variable.
inline JointGaussian transform_source(const JointGaussian& j, const Eigen::MatrixXd& m) {
  require(m.rows() == j.nx() && m.cols() == j.nx(), ErrorKind::DimensionMismatch,
          "transform must be n_x by n_x");
  return JointGaussian(m * j.mean_x(), j.mean_y(), detail::symmetrize(m * j.sigma_x() * m.transpose()),
                       j.sigma_y(), m * j.sigma_xy());
}

}  // namespace gib

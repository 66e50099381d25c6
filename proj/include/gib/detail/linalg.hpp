#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "gib/errors.hpp"
#include "gib/tolerances.hpp"

namespace gib::detail {

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

inline bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

inline bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

// Smallest eigenvalue must exceed tol::pd times the largest one.
inline bool is_positive_definite(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  const auto& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  return top > 0.0 && ev.minCoeff() > tol::pd * top;
}

inline bool is_positive_semidefinite(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  const auto& ev = es.eigenvalues();
  const double top = std::max(std::abs(ev.maxCoeff()), 1.0);
  return ev.minCoeff() >= -tol::pd * top;
}

/// Log-determinant of a symmetric positive-definite matrix from its Cholesky factor.
/// Throws `kind` when the factorization fails.
inline double logdet_spd(const Eigen::MatrixXd& m, ErrorKind kind, const char* what) {
  if (m.size() == 0) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    fail(kind, std::string(what) + " is not positive-definite");
  }
  const Eigen::MatrixXd& l = llt.matrixLLT();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double d = l(i, i);
    if (!(d > 0.0)) fail(kind, std::string(what) + " is not positive-definite");
    sum += std::log(d);
  }
  return 2.0 * sum;
}

inline Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, ErrorKind kind, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    fail(kind, std::string(what) + " is not positive-definite");
  }
  return symmetrize(llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols())));
}

inline Eigen::MatrixXd block_covariance(const Eigen::MatrixXd& sx, const Eigen::MatrixXd& sy,
                                        const Eigen::MatrixXd& sxy) {
  const auto nx = sx.rows();
  const auto ny = sy.rows();
  Eigen::MatrixXd full(nx + ny, nx + ny);
  full.topLeftCorner(nx, nx) = sx;
  full.topRightCorner(nx, ny) = sxy;
  full.bottomLeftCorner(ny, nx) = sxy.transpose();
  full.bottomRightCorner(ny, ny) = sy;
  return full;
}

}  // namespace gib::detail

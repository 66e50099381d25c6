#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gib/detail/linalg.hpp"
#include "gib/errors.hpp"
#include "gib/gaussian_model.hpp"
#include "gib/measure.hpp"

namespace gib {

/**
 * Gaussian channel T | X ~ N(A X, I).
 *
 * An encoder with zero rows is the empty encoder: T carries no information
 * and every information it induces is 0.
 */
class LinearEncoder {
 public:
  explicit LinearEncoder(Eigen::MatrixXd a) : a_(std::move(a)) {
    require(a_.cols() >= 1, ErrorKind::DimensionMismatch, "encoder needs at least one input column");
    require(a_.allFinite(), ErrorKind::OutOfRange, "encoder entries must be finite");
  }

  static LinearEncoder empty(Eigen::Index nx) { return LinearEncoder(Eigen::MatrixXd(0, nx)); }

  const Eigen::MatrixXd& matrix() const { return a_; }
  Eigen::Index nt() const { return a_.rows(); }
  Eigen::Index nx() const { return a_.cols(); }
  bool is_empty() const { return a_.rows() == 0; }

 private:
  Eigen::MatrixXd a_;
};

/// Encoder T = A X + ξ with ξ ~ N(0, noise_cov), mapped to the identity-noise form L⁻¹A.
inline LinearEncoder whiten(const Eigen::MatrixXd& a, const Eigen::MatrixXd& noise_cov) {
  require(noise_cov.rows() == a.rows() && noise_cov.cols() == a.rows(), ErrorKind::DimensionMismatch,
          "noise covariance must be n_t by n_t");
  Eigen::LLT<Eigen::MatrixXd> llt(noise_cov);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::NonPositiveDefinite, "noise covariance is not positive-definite");
  }
  return LinearEncoder(llt.matrixL().solve(a));
}

/// Per-mode reduced weights uᵢ = rᵢwᵢ² for a given measure and tradeoff β.
struct MixingSolution {
  Eigen::VectorXd u_values;
  double beta = 0.0;
  Measure measure = Measure::shannon();
  std::vector<bool> active;

  static MixingSolution make(Eigen::VectorXd u, double beta, Measure m) {
    MixingSolution s{std::move(u), beta, m, {}};
    s.active.resize(static_cast<std::size_t>(s.u_values.size()));
    for (Eigen::Index i = 0; i < s.u_values.size(); ++i) {
      require(std::isfinite(s.u_values[i]) && s.u_values[i] >= 0.0, ErrorKind::OutOfRange,
              "mixing weights must be finite and nonnegative");
      s.active[static_cast<std::size_t>(i)] = s.u_values[i] > 0.0;
    }
    return s;
  }

  Eigen::Index active_count() const {
    return static_cast<Eigen::Index>(std::count(active.begin(), active.end(), true));
  }
};

/// A pair (Ω(T;X), Ω(T;Y)).
struct InfoPair {
  double omega_tx = 0.0;
  double omega_ty = 0.0;
};

namespace detail {

inline void check_encoder_dims(const LinearEncoder& enc, const JointGaussian& j) {
  require(enc.nx() == j.nx(), ErrorKind::DimensionMismatch, "encoder input dimension differs from n_x");
}

inline double logdet_identity_plus(const Eigen::MatrixXd& m, ErrorKind kind, const char* what) {
  return logdet_spd(symmetrize(Eigen::MatrixXd::Identity(m.rows(), m.cols()) + m), kind, what);
}

}  // namespace detail

/// Ω(T;X) from Σ_T = I + AΣ_XAᵀ.
inline double encoder_info_source(const LinearEncoder& enc, const JointGaussian& j, const Measure& m) {
  detail::check_encoder_dims(enc, j);
  if (enc.is_empty()) return 0.0;
  const Eigen::MatrixXd& a = enc.matrix();
  const Eigen::MatrixXd signal = detail::symmetrize(a * j.sigma_x() * a.transpose());
  if (m.is_jeffreys()) return 0.5 * signal.trace();
  const double ld_t = detail::logdet_identity_plus(signal, ErrorKind::NonPositiveDefinite, "I + A Sx A^T");
  if (m.is_shannon()) return 0.5 * ld_t;
  const double q = m.q();
  if (q == 0.0) return 0.0;
  const double qbar = 1.0 - q;
  const double ld_blend = detail::logdet_identity_plus((1.0 - qbar * qbar) * signal,
                                                       ErrorKind::DivergentInformation,
                                                       "Renyi blended source covariance");
  return -(q * ld_t - ld_blend) / (2.0 * qbar);
}

/// Ω(T;Y) from Σ_T = I + AΣ_XAᵀ and Σ_{T|Y} = I + AΣ_{X|Y}Aᵀ.
inline double encoder_info_target(const LinearEncoder& enc, const JointGaussian& j, const Measure& m) {
  detail::check_encoder_dims(enc, j);
  if (enc.is_empty()) return 0.0;
  const Eigen::MatrixXd& a = enc.matrix();
  const Eigen::MatrixXd signal = detail::symmetrize(a * j.sigma_x() * a.transpose());
  const Eigen::MatrixXd residual = detail::symmetrize(a * conditional_covariance(j) * a.transpose());
  const auto nt = a.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(nt, nt);

  if (m.is_jeffreys()) {
    Eigen::LLT<Eigen::MatrixXd> llt(eye + residual);
    if (llt.info() != Eigen::Success) fail(ErrorKind::NonPositiveDefinite, "I + A Sx|y A^T");
    return 0.5 * (llt.solve(eye + signal).trace() - static_cast<double>(nt));
  }
  const double ld_t = detail::logdet_identity_plus(signal, ErrorKind::NonPositiveDefinite, "I + A Sx A^T");
  const double ld_ty =
      detail::logdet_identity_plus(residual, ErrorKind::NonPositiveDefinite, "I + A Sx|y A^T");
  if (m.is_shannon()) return 0.5 * (ld_t - ld_ty);
  const double q = m.q();
  if (q == 0.0) return 0.0;
  const double qbar = 1.0 - q;
  // A[I − q̄²(I − Σ_{X|Y}Σ_X⁻¹)]Σ_XAᵀ = AΣ_XAᵀ − q̄²(AΣ_XAᵀ − AΣ_{X|Y}Aᵀ)
  const Eigen::MatrixXd blended = signal - qbar * qbar * (signal - residual);
  const double ld_blend = detail::logdet_identity_plus(blended, ErrorKind::DivergentInformation,
                                                       "Renyi blended target covariance");
  return -(qbar * ld_ty + q * ld_t - ld_blend) / (2.0 * qbar);
}

inline InfoPair encoder_info(const LinearEncoder& enc, const JointGaussian& j, const Measure& m) {
  return {encoder_info_source(enc, j, m), encoder_info_target(enc, j, m)};
}

/// A = W V over the active modes, with wᵢ = √(uᵢ/rᵢ); inactive modes are dropped.
inline LinearEncoder encoder_from_solution(const MixingSolution& s, const Spectrum& spec) {
  require(s.u_values.size() == spec.size(), ErrorKind::DimensionMismatch,
          "solution and spectrum mode counts differ");
  const Eigen::Index nt = s.active_count();
  if (nt == 0) return LinearEncoder::empty(spec.v_rows.cols());
  Eigen::MatrixXd a(nt, spec.v_rows.cols());
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    if (!s.active[static_cast<std::size_t>(i)]) continue;
    a.row(row++) = std::sqrt(s.u_values[i] / spec.r_values[i]) * spec.v_rows.row(i);
  }
  return LinearEncoder(std::move(a));
}

/**
 * Contribution of one eigenmode with weight u to (Ω(T;X), Ω(T;Y)).
 *
 * The expressions are analytic for u > −1 (and q ≤ 2), which the numerical
 * oracle relies on when it differentiates across u = 0.
 */
inline InfoPair mode_information(double lambda, double u, const Measure& m) {
  require(u > -1.0, ErrorKind::OutOfRange, "mode weight must exceed -1");
  if (m.is_jeffreys()) {
    require(lambda > tol::zero_lambda, ErrorKind::DegenerateMode, "zero regression eigenvalue");
    return {0.5 * u, 0.5 * u * (1.0 - lambda) / (1.0 + lambda * u)};
  }
  const double lx = std::log1p(u);
  const double ly = std::log1p(lambda * u);
  if (m.is_shannon()) return {0.5 * lx, 0.5 * (lx - ly)};
  const double q = m.q();
  if (q == 0.0) return {0.0, 0.0};
  const double qbar = 1.0 - q;
  const double sx = (1.0 - qbar * qbar) * u;
  const double sy = (1.0 - qbar * qbar * (1.0 - lambda)) * u;
  if (!(sx > -1.0 && sy > -1.0)) {
    fail(ErrorKind::DivergentInformation, "Renyi encoder information diverges");
  }
  return {-(q * lx - std::log1p(sx)) / (2.0 * qbar),
          -(qbar * ly + q * lx - std::log1p(sy)) / (2.0 * qbar)};
}

/// Informations of the encoder a solution describes, as sums over its active modes.
inline InfoPair solution_info(const MixingSolution& s, const Spectrum& spec, const Measure& m) {
  require(s.u_values.size() == spec.size(), ErrorKind::DimensionMismatch,
          "solution and spectrum mode counts differ");
  InfoPair total;
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    if (!s.active[static_cast<std::size_t>(i)]) continue;
    const InfoPair part = mode_information(spec.lambdas[i], s.u_values[i], m);
    total.omega_tx += part.omega_tx;
    total.omega_ty += part.omega_ty;
  }
  return total;
}

inline InfoPair solution_info(const MixingSolution& s, const Spectrum& spec) {
  return solution_info(s, spec, s.measure);
}

}  // namespace gib

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "gib/detail/parallel.hpp"
#include "gib/encoder.hpp"
#include "gib/errors.hpp"
#include "gib/gaussian_model.hpp"
#include "gib/ib_solver.hpp"
#include "gib/measure.hpp"

namespace gib {

/// Largest β the Shannon frontier inversion will search.
inline constexpr double beta_max_cap = 1e8;

/// u below this counts as an inactive mode when scanning a β grid.
inline constexpr double activation_threshold = 1e-12;

struct InfoPoint {
  double beta = 0.0;
  double omega_tx = 0.0;
  double omega_ty = 0.0;
  Measure measure = Measure::shannon();
  Eigen::Index active_modes = 0;
};

struct ShannonProjection {
  double beta = 0.0;
  double i_tx = 0.0;
  double i_ty = 0.0;
  double i_ty_max = 0.0;
  double gap = 0.0;
};

struct BoundCurves {
  std::vector<double> omega_tx;
  std::vector<double> dpi;
  std::vector<double> sdpi;
  double sdpi_slope = 0.0;
};

struct Transition {
  Eigen::Index mode = 0;
  double lambda = 0.0;
  double beta = 0.0;
};

inline std::vector<double> lin_space(double start, double stop, std::size_t count) {
  require(count >= 2, ErrorKind::OutOfRange, "a grid needs at least two points");
  std::vector<double> out(count);
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
  out.back() = stop;
  return out;
}

inline std::vector<double> log_space(double start, double stop, std::size_t count) {
  require(start > 0.0 && stop > 0.0, ErrorKind::OutOfRange, "log grids need positive endpoints");
  std::vector<double> out = lin_space(std::log(start), std::log(stop), count);
  for (double& v : out) v = std::exp(v);
  out.front() = start;
  out.back() = stop;
  return out;
}

namespace detail {

inline void check_sorted_betas(std::span<const double> betas) {
  for (std::size_t i = 0; i < betas.size(); ++i) {
    check_beta(betas[i]);
    require(i == 0 || betas[i - 1] <= betas[i], ErrorKind::OutOfRange, "beta grid must be ascending");
  }
}

inline InfoPair shannon_info_of(const Spectrum& spec, const Eigen::VectorXd& u) {
  InfoPair total;
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    if (!(u[i] > 0.0)) continue;
    const InfoPair part = mode_information(spec.lambdas[i], u[i], Measure::shannon());
    total.omega_tx += part.omega_tx;
    total.omega_ty += part.omega_ty;
  }
  return total;
}

inline InfoPair shannon_optimum(const Spectrum& spec, double beta) {
  return shannon_info_of(spec, solve_spectrum(spec, Measure::shannon(), beta).u_values);
}

}  // namespace detail

inline InfoPoint frontier_point(const Spectrum& spec, const Measure& m, double beta) {
  const MixingSolution s = solve_spectrum(spec, m, beta);
  const InfoPair info = solution_info(s, spec, m);
  return {beta, info.omega_tx, info.omega_ty, m, s.active_count()};
}

/// Optimal (Ω(T;X), Ω(T;Y)) at each β of an ascending grid; points are evaluated independently.
inline std::vector<InfoPoint> sweep(const Spectrum& spec, const Measure& m, std::span<const double> betas,
                                    std::size_t threads = 1) {
  detail::check_sorted_betas(betas);
  std::vector<InfoPoint> out(betas.size());
  detail::parallel_for(betas.size(), threads, [&](std::size_t i) { out[i] = frontier_point(spec, m, betas[i]); });
  return out;
}

/// Reference lines Ω(T;Y) = Ω(T;X) and Ω(T;Y) = (1 − λ_min) Ω(T;X).
inline BoundCurves dpi_bounds(const Spectrum& spec, std::span<const double> omega_tx_grid) {
  BoundCurves out;
  out.sdpi_slope = 1.0 - spec.min_lambda();
  for (double x : omega_tx_grid) {
    require(x >= 0.0, ErrorKind::OutOfRange, "information grid must be nonnegative");
    out.omega_tx.push_back(x);
    out.dpi.push_back(x);
    out.sdpi.push_back(out.sdpi_slope * x);
  }
  return out;
}

/**
 * Shannon-optimal I(T;Y) among encoders extracting exactly `i_tx_target` nats
 * of I(T;X). Inverts the Shannon frontier by bisection on β, which is valid
 * because the optimal I(T;X) is continuous and nondecreasing in β.
 */
inline double shannon_frontier_at(const Spectrum& spec, double i_tx_target) {
  require(std::isfinite(i_tx_target) && i_tx_target >= 0.0, ErrorKind::OutOfRange,
          "target information must be nonnegative");
  if (i_tx_target == 0.0) return 0.0;

  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    if (spec.lambdas[i] < 1.0) lo = std::min(lo, critical_beta(spec.lambdas[i]));
  }
  if (!std::isfinite(lo) || detail::shannon_optimum(spec, beta_max_cap).omega_tx < i_tx_target) {
    fail(ErrorKind::Unreachable, "target I(T;X) exceeds the frontier reachable below the beta cap");
  }
  double hi = beta_max_cap;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::shannon_optimum(spec, mid).omega_tx < i_tx_target) lo = mid;
    else hi = mid;
  }
  const InfoPair at_lo = detail::shannon_optimum(spec, lo);
  const InfoPair at_hi = detail::shannon_optimum(spec, hi);
  const InfoPair& best =
      std::abs(at_lo.omega_tx - i_tx_target) <= std::abs(at_hi.omega_tx - i_tx_target) ? at_lo : at_hi;
  if (std::abs(best.omega_tx - i_tx_target) >= 1e-9) {
    fail(ErrorKind::NumericalFailure, "frontier inversion did not reach the target I(T;X)");
  }
  return best.omega_ty;
}

/// Evaluates the optimal encoder for `m` with Shannon information and compares it with the Shannon frontier.
inline ShannonProjection shannon_project(const Spectrum& spec, const Measure& m, double beta) {
  const MixingSolution s = solve_spectrum(spec, m, beta);
  const InfoPair info = detail::shannon_info_of(spec, s.u_values);
  ShannonProjection p{beta, info.omega_tx, info.omega_ty, info.omega_ty, 0.0};
  if (m.is_shannon() || s.active_count() == 0) return p;
  p.i_ty_max = shannon_frontier_at(spec, info.omega_tx);
  p.gap = p.i_ty_max - p.i_ty;
  return p;
}

inline std::vector<ShannonProjection> cross_evaluate(const Spectrum& spec, const Measure& m,
                                                     std::span<const double> betas, std::size_t threads = 1) {
  detail::check_sorted_betas(betas);
  std::vector<ShannonProjection> out(betas.size());
  detail::parallel_for(betas.size(), threads, [&](std::size_t i) { out[i] = shannon_project(spec, m, betas[i]); });
  return out;
}

/**
 * Activation points of each mode along a β grid.
 *
 * A mode activates at the first grid β where its weight exceeds
 * activation_threshold; the location is refined by bisection between the
 * neighbouring grid points to `rel_tol` relative width. Modes already active
 * at the first grid point, or never active, produce no event.
 */
inline std::vector<Transition> detect_transitions(const Spectrum& spec, const Measure& m,
                                                  std::span<const double> betas, double rel_tol = 1e-6) {
  detail::check_sorted_betas(betas);
  std::vector<Transition> out;
  if (betas.empty()) return out;
  auto active_at = [&](Eigen::Index i, double beta) {
    return spec.lambdas[i] < 1.0 && solve_mode(spec.lambdas[i], m, beta) > activation_threshold;
  };
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    if (active_at(i, betas.front())) continue;
    for (std::size_t k = 1; k < betas.size(); ++k) {
      if (!active_at(i, betas[k])) continue;
      double lo = betas[k - 1];
      double hi = betas[k];
      while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (active_at(i, mid)) hi = mid;
        else lo = mid;
      }
      out.push_back({i, spec.lambdas[i], 0.5 * (lo + hi)});
      break;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Transition& a, const Transition& b) { return a.beta < b.beta; });
  return out;
}

}  // namespace gib

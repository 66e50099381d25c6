#pragma once

namespace gib::tol {

// Eigenvalues within this distance of [0, 1] are clamped onto the interval.
inline constexpr double eig = 1e-10;
// Modes with a smaller regression eigenvalue are deterministic and rejected.
inline constexpr double zero_lambda = 1e-12;
// Positive-definiteness threshold, relative to the largest eigenvalue.
inline constexpr double pd = 1e-10;
// |q - 1| below this is evaluated with the exact Shannon formulas.
inline constexpr double q_one = 1e-6;
// Accepted relative residual |beta * g_q(u) - 1| for a root of the stationarity equation.
inline constexpr double root = 1e-9;

}  // namespace gib::tol

#pragma once

#include "tamedsde/brownian.hpp"
#include "tamedsde/common.hpp"
#include "tamedsde/sde_model.hpp"
#include "tamedsde/transform.hpp"

namespace tamedsde {

/// Magnitude beyond which a scheme value counts as divergent.
inline constexpr Scalar kDivergenceBound = 1e300;

/// Tamed Euler values on the coarse grid {i / n} together with the
/// time-continuous scheme sampled at every reference time {j / n_ref}.
///
/// fine_values at multiples of n_ref / n are copies of grid_values. When the
/// overflow guard trips, divergent is set and the remaining entries are NaN.
struct SchemePath {
  long n = 0;
  long n_ref = 0;
  Vector grid_values;
  Vector fine_values;
  bool divergent = false;
};

struct OccupationStat {
  Scalar xi = 0.0;
  Scalar measure = 0.0;
  long n = 0;
  long n_ref = 0;
};

/// 1 + n^{-1/2} |x|^ell
Scalar taming_factor(long n, Scalar x, Scalar ell_mu);

/// mu(x) / (1 + n^{-1/2} |x|^ell_mu)
Scalar tamed_drift(const SdeProblem& problem, long n, Scalar x);
/// sigma(x) / (1 + n^{-1/2} |x|^ell_mu); the same ell_mu as the drift.
Scalar tamed_diffusion(const SdeProblem& problem, long n, Scalar x);

/// Time-continuous tamed Euler scheme with n steps driven by path.
SchemePath tamed_euler_path(const SdeProblem& problem, long n, const BrownianPath& path);

/// Piecewise linear interpolation of grid_values at every reference time.
Vector linear_interp_path(const SchemePath& sp);

/// Tamed Euler scheme for Z = G(X) started at G(x0), in Z coordinates.
SchemePath transformed_scheme_path(const TransformedProblem& tp, long n, const BrownianPath& path);

/// Maps a Z-coordinate path back through G^{-1} pointwise.
SchemePath pullback(const TransformedProblem& tp, const SchemePath& z_path);

/// Fraction of reference times t_j, j = 1..n_ref, at which the
/// time-continuous scheme and its last grid value lie on opposite sides of
/// xi (product <= 0, ties included).
OccupationStat sign_change_occupation(const SchemePath& sp, Scalar xi);

}  // namespace tamedsde

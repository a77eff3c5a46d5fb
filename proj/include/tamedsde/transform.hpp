#pragma once

#include "tamedsde/common.hpp"
#include "tamedsde/sde_model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tamedsde {

/// Quartic bump (1 - x^2)^4 on [-1, 1], zero outside, and its first two
/// derivatives. All three vanish at +-1.
Scalar bump_phi(Scalar x);
Scalar bump_phi_d1(Scalar x);
Scalar bump_phi_d2(Scalar x);

/// alpha_i = (mu(xi_i-) - mu(xi_i+)) / (2 sigma(xi_i)^2). Throws
/// DegeneracyError when sigma vanishes at a breakpoint.
std::vector<Scalar> compute_alpha(const SdeProblem& problem);

/// Largest admissible bump radius (exclusive): min of 1/(8|alpha_i|) and the
/// half gaps between consecutive breakpoints, with 1/0 = +inf.
Scalar compute_rho(const std::vector<Scalar>& z, const std::vector<Scalar>& alpha);

/// Data cached per breakpoint so that G'' at the breakpoint itself can be
/// evaluated without the original problem.
struct BreakpointCache {
  Scalar mu_left = 0.0;
  Scalar mu_right = 0.0;
  Scalar mu_at = 0.0;
  Scalar sigma_at = 1.0;
};

/// G(x) = x + sum_i alpha_i (x - xi_i) |x - xi_i| phi((x - xi_i) / nu).
///
/// Strictly increasing bijection, identity outside [xi_1 - nu, xi_k + nu],
/// fixing every xi_i with G'(xi_i) = 1 and G''(xi_i -+) = -+2 alpha_i.
class TransformG {
 public:
  /// Raw family member without drift data; G''(xi_i) then defaults to the
  /// right-sided limit 2 alpha_i.
  TransformG(std::vector<Scalar> xi, std::vector<Scalar> alpha, Scalar nu);
  TransformG(std::vector<Scalar> xi, std::vector<Scalar> alpha, Scalar nu,
             std::vector<BreakpointCache> cache);

  const std::vector<Scalar>& xi() const { return xi_; }
  const std::vector<Scalar>& alpha() const { return alpha_; }
  Scalar nu() const { return nu_; }
  Scalar rho() const { return rho_; }
  /// (inf G', sup G') estimated on a dense sample of every bump.
  std::pair<Scalar, Scalar> deriv_bounds() const { return deriv_bounds_; }
  const std::vector<BreakpointCache>& cache() const { return cache_; }

  bool is_identity() const { return xi_.empty(); }
  /// Closed interval outside of which G is the identity; empty when k = 0.
  Scalar band_lo() const { return xi_.empty() ? 0.0 : xi_.front() - nu_; }
  Scalar band_hi() const { return xi_.empty() ? 0.0 : xi_.back() + nu_; }

  /// Index of the bump whose closed support contains x, or -1.
  long bump_index(Scalar x) const;

 private:
  void validate_and_bound();

  std::vector<Scalar> xi_;
  std::vector<Scalar> alpha_;
  Scalar nu_;
  Scalar rho_;
  std::pair<Scalar, Scalar> deriv_bounds_{1.0, 1.0};
  std::vector<BreakpointCache> cache_;
};

/// G for a problem: alpha from the one-sided limits, nu = nu_fraction * rho
/// (nu = 1 when rho is infinite).
TransformG build_transform(const SdeProblem& problem, Scalar nu_fraction = 0.5);

Scalar g_eval(const TransformG& g, Scalar x);
Scalar g_prime(const TransformG& g, Scalar x);
/// Piecewise second derivative; at x == xi_i returns
/// 2 alpha_i + 2 (mu(xi_i+) - mu(xi_i)) / sigma(xi_i)^2.
Scalar g_second(const TransformG& g, Scalar x);

/// G^{-1}(y) with |G(x) - y| <= tol * max(1, |y|). Identity outside the band.
Scalar g_inverse(const TransformG& g, Scalar y, Scalar tol = 1e-12);

/// (G^{-1})''(y) = -G''(x) / G'(x)^3 with x = G^{-1}(y).
Scalar g_inverse_second(const TransformG& g, Scalar y, Scalar tol = 1e-12);

/// The SDE for Z = G(X): continuous coefficients, same growth exponents.
struct TransformedProblem {
  SdeProblem base;
  TransformG g;
  Scalar z0;
  GrowthParams tilde_growth;
};

TransformedProblem make_transformed_problem(const SdeProblem& problem, Scalar nu_fraction = 0.5);

/// (mu~(y), sigma~(y)) = ((G' mu + G'' sigma^2 / 2)(x), (G' sigma)(x)), x = G^{-1}(y).
std::pair<Scalar, Scalar> transformed_coefficients(const TransformedProblem& tp, Scalar y);

struct InvariantCheck {
  std::string name;
  Scalar max_deviation;
  Scalar tolerance;
  bool passed;
};

/// Fixed points, identity off the band, G'(xi) = 1, inverse round trip,
/// analytic vs finite-difference derivatives and one-sided G'' limits.
std::vector<InvariantCheck> check_transform_invariants(const TransformG& g);

/// Continuity of mu~ across every breakpoint at offset h.
InvariantCheck check_transformed_continuity(const TransformedProblem& tp, Scalar h = 1e-6,
                                            Scalar tolerance = 1e-3);

}  // namespace tamedsde

#pragma once

#include "tamedsde/common.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tamedsde {

using ScalarFunction = std::function<Scalar(Scalar)>;

/// Growth exponents and moment orders of an SDE problem.
///
/// The drift exponent must be strictly positive; the degenerate case
/// ell_mu = 0 (piecewise Lipschitz drift) is not covered by the rate
/// theory implemented here and is rejected.
class GrowthParams {
 public:
  GrowthParams(Scalar ell_mu, Scalar ell_sigma, Scalar p0, Scalar p1);

  Scalar ell_mu() const { return ell_mu_; }
  Scalar ell_sigma() const { return ell_sigma_; }
  Scalar p0() const { return p0_; }
  Scalar p1() const { return p1_; }
  /// ell_mu + max(ell_mu, 2 ell_sigma + 2) + 1
  Scalar kappa() const { return kappa_; }

 private:
  Scalar ell_mu_;
  Scalar ell_sigma_;
  Scalar p0_;
  Scalar p1_;
  Scalar kappa_;
};

/// A drift discontinuity with its one-sided limits and the value the drift
/// evaluator takes exactly there.
struct Breakpoint {
  Scalar xi;
  Scalar mu_left;
  Scalar mu_right;
  Scalar mu_at;
};

/// dX = mu(X) dt + sigma(X) dW on [0, 1], X_0 = x0.
///
/// Immutable after construction. Breakpoints must be strictly increasing with
/// finite one-sided limits. Non-degeneracy of sigma at the breakpoints is not
/// enforced here so that the assumption checker can report it; building a
/// transformation fails instead.
class SdeProblem {
 public:
  SdeProblem(Scalar x0, ScalarFunction drift, ScalarFunction diffusion,
             std::vector<Breakpoint> breakpoints, GrowthParams growth,
             std::string label = {});

  Scalar x0() const { return x0_; }
  const ScalarFunction& drift() const { return drift_; }
  const ScalarFunction& diffusion() const { return diffusion_; }
  const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
  const GrowthParams& growth() const { return growth_; }
  const std::string& label() const { return label_; }

  /// Same coefficients, different initial value.
  SdeProblem with_x0(Scalar x0) const;

 private:
  Scalar x0_;
  ScalarFunction drift_;
  ScalarFunction diffusion_;
  std::vector<Breakpoint> breakpoints_;
  GrowthParams growth_;
  std::string label_;
};

/// mu(x); exactly at a breakpoint returns the stored mu_at.
Scalar eval_drift(const SdeProblem& problem, Scalar x);
Scalar eval_diffusion(const SdeProblem& problem, Scalar x);

/// (mu(xi_i-), mu(xi_i+)) for the zero-based breakpoint index i.
std::pair<Scalar, Scalar> one_sided_limits(const SdeProblem& problem, std::size_t i);

struct Violation {
  std::vector<Scalar> points;
  Scalar lhs;
  Scalar bound;
};

/// Per-condition threshold constants. A sampled inequality instance is
/// recorded as a violation when it fails with the threshold constant.
struct AssumptionThresholds {
  std::optional<Scalar> a1;
  std::optional<Scalar> a2i;
  std::optional<Scalar> a2ii;
  std::optional<Scalar> a3;
};

struct SampleSpec {
  Scalar lo = -10.0;
  Scalar hi = 10.0;
  std::size_t points = 10000;
  AssumptionThresholds thresholds;
};

struct AssumptionReport {
  std::vector<Violation> a1_violations;
  std::vector<Violation> a2i_violations;
  std::vector<Violation> a2ii_violations;
  std::vector<Violation> a3_violations;
  std::vector<Violation> a4_violations;
  // Keys: "A1", "A2(i)", "A2(ii)", "A3".
  std::map<std::string, Scalar> fitted_constants;

  bool ok() const {
    return a1_violations.empty() && a2i_violations.empty() && a2ii_violations.empty() &&
           a3_violations.empty() && a4_violations.empty();
  }
};

/// Sampled surrogate for the growth, monotonicity and Lipschitz conditions.
///
/// For each condition the smallest constant making every sampled instance hold
/// is reported (clamped at zero). Pairs (x, y) are consecutive grid points and
/// dyadic strides of the grid; for the piecewise conditions both points must
/// lie in the same open piece between breakpoints. Non-degeneracy of sigma is
/// checked exactly at every breakpoint.
AssumptionReport check_assumptions(const SdeProblem& problem, const SampleSpec& grid);

}  // namespace tamedsde

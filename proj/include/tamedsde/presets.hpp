#pragma once

#include "tamedsde/analysis.hpp"
#include "tamedsde/sde_model.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tamedsde {

/// A named problem from the catalog together with the constants used by the
/// property suites.
///
/// drift_bound c_mu and diffusion_bound c_sigma satisfy
///   |mu(x)|    <= c_mu    (1 + |x|^(ell_mu + 1)),
///   |sigma(x)| <= c_sigma (1 + |x|^(ell_sigma + 1))
/// for all x. thresholds are the documented upper bounds for the constants
/// fitted by check_assumptions on [-10, 10].
struct Preset {
  std::string name;
  std::string description;
  SdeProblem problem;
  Scalar drift_bound;
  Scalar diffusion_bound;
  AssumptionThresholds thresholds;
  ExactSolution exact;  // empty unless a closed form exists
  std::vector<std::pair<std::string, Scalar>> parameters;
};

const std::vector<std::string>& preset_names();

/// Throws InputError listing the catalog for unknown names.
Preset make_preset(std::string_view name);

/// Constants C for which the tamed coefficients satisfy, for all n and x,
///   |mu_n(x)|           <= C_mu_min      min(sqrt(n) (1 + |x|), |mu(x)|)
///   sigma_n(x)^2        <= C_sigma_min   min(sqrt(n) (1 + x^2), sigma(x)^2)
///   |mu_n(x) - mu(x)|   <= C_mu_conv     n^{-1/2} (1 + |x|^(2 ell_mu + 1))
///   |sigma_n - sigma|   <= C_sigma_conv  n^{-1/2} (1 + |x|^(ell_mu + ell_sigma + 1))
///   |sigma_n^2 - sigma^2| <= C_sigma2_conv n^{-1/2} (1 + |x|^(ell_mu + 2 ell_sigma + 2))
/// derived from the preset's polynomial bounds.
struct TamingConstants {
  Scalar mu_min;
  Scalar sigma_min;
  Scalar mu_conv;
  Scalar sigma_conv;
  Scalar sigma2_conv;
};

TamingConstants taming_constants(const Preset& preset);

}  // namespace tamedsde

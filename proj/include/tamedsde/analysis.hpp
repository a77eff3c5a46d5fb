#pragma once

#include "tamedsde/brownian.hpp"
#include "tamedsde/common.hpp"
#include "tamedsde/schemes.hpp"
#include "tamedsde/sde_model.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace tamedsde {

enum class NormMode {
  sup_continuous,  // max over reference times of |X - time-continuous scheme|
  pathwise_Lq,     // L_q([0,1]) norm of X - piecewise linear interpolation
};

/// E[||X - approximation||^p]^{1/p}; q = +inf selects the sup norm.
struct ErrorSpec {
  Scalar p = 2.0;
  Scalar q = std::numeric_limits<Scalar>::infinity();
  NormMode mode = NormMode::sup_continuous;

  void validate() const;
};

enum class Reference { fine_grid, exact_oracle, transformed_pullback };

std::string to_string(NormMode mode);
std::string to_string(Reference ref);
Reference reference_from_string(const std::string& name);

/// Closed-form solution evaluated at the reference times of a path.
using ExactSolution = std::function<Vector(const BrownianPath&)>;

struct Interval {
  Scalar lo;
  Scalar hi;
  bool contains(Scalar x) const { return x > lo && x < hi; }
};

/// Open interval (0, min(p1, p0 / kappa)) of moment orders covered by the
/// rate theorems.
Interval admissible_p(const GrowthParams& growth);

Scalar pathwise_error(const Vector& coarse, const Vector& reference, const ErrorSpec& spec,
                      long n_ref);

/// (mean |v|^p)^{1/p}
Scalar moment_estimate(const Vector& values, Scalar p);

/// x0 exp((a - b^2 / 2) t + b W_t) at every reference time.
Vector exact_gbm(Scalar x0, Scalar a, Scalar b, const BrownianPath& path);

struct RateFit {
  Scalar rate = 0.0;  // minus the slope of log2(error) against log2(n)
  Scalar intercept = 0.0;
  Scalar r_squared = 0.0;
  Scalar rate_se = 0.0;
  std::vector<Scalar> residuals;
};

/// Ordinary least squares of log2(values) on log2(levels).
RateFit fit_log_log(const std::vector<long>& levels, const std::vector<Scalar>& values);

struct LevelError {
  long n = 0;
  Scalar mean = 0.0;  // moment estimate (mean of e^p)^{1/p}
  Scalar se = 0.0;    // delta-method standard error of mean
  long paths = 0;     // paths that entered the average
  long divergent = 0;
};

struct ConvergenceReport {
  std::vector<long> levels;
  std::vector<LevelError> errors;
  RateFit fit;
  std::uint64_t seed = 0;
  ErrorSpec spec;
  Reference reference = Reference::fine_grid;
  long n_ref = 0;
  long paths = 0;
  std::vector<std::string> flags;

  // Sup-norm interpolation studies also carry errors divided by sqrt(ln(n + 1)).
  std::vector<Scalar> log_normalized;
  RateFit log_normalized_fit;
};

struct StudyOptions {
  std::vector<long> levels;
  long n_ref = 8192;
  long paths = 1000;
  ErrorSpec spec;
  std::uint64_t seed = 0;
  Reference reference = Reference::fine_grid;
  Scalar nu_fraction = 0.5;
  unsigned threads = 0;  // 0: machine parallelism
  ExactSolution oracle;  // required for Reference::exact_oracle

  void validate() const;
};

/// Worker count: TAMEDSDE_THREADS if set, else requested, else hardware.
unsigned resolve_threads(unsigned requested);

ConvergenceReport run_convergence_study(const SdeProblem& problem, const StudyOptions& options);

/// E[measure^p]^{1/p} of the sign-change occupation statistic at the
/// breakpoint xi_index, per level. Uses options.spec.p only.
ConvergenceReport occupation_scaling_study(const SdeProblem& problem, std::size_t xi_index,
                                           const StudyOptions& options);

/// Empirical p-th moment of the terminal value for each level.
std::vector<Scalar> terminal_moment_study(const SdeProblem& problem, const std::vector<long>& levels,
                                          long n_ref, long paths, Scalar p, std::uint64_t seed,
                                          unsigned threads = 0);

}  // namespace tamedsde

#include "tamedsde/analysis.hpp"

#include "tamedsde/transform.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <thread>

namespace tamedsde {

void ErrorSpec::validate() const {
  if (!(p > 0.0) || !std::isfinite(p)) throw InputError("ErrorSpec: p must be finite and > 0");
  if (!(q >= 1.0)) throw InputError("ErrorSpec: q must be >= 1 or inf");
}

std::string to_string(NormMode mode) {
  return mode == NormMode::sup_continuous ? "sup_continuous" : "pathwise_Lq";
}

std::string to_string(Reference ref) {
  switch (ref) {
    case Reference::fine_grid:
      return "fine_grid";
    case Reference::exact_oracle:
      return "exact_oracle";
    case Reference::transformed_pullback:
      return "transformed_pullback";
  }
  return "unknown";
}

Reference reference_from_string(const std::string& name) {
  if (name == "fine_grid") return Reference::fine_grid;
  if (name == "exact_oracle") return Reference::exact_oracle;
  if (name == "transformed_pullback") return Reference::transformed_pullback;
  throw InputError("unknown reference '" + name +
                   "' (expected fine_grid, exact_oracle or transformed_pullback)");
}

Interval admissible_p(const GrowthParams& growth) {
  return {0.0, std::min(growth.p1(), growth.p0() / growth.kappa())};
}

Scalar pathwise_error(const Vector& coarse, const Vector& reference, const ErrorSpec& spec,
                      long n_ref) {
  if (coarse.size() != n_ref + 1 || reference.size() != n_ref + 1) {
    throw InputError("pathwise_error: arrays must have length n_ref + 1");
  }
  const auto diff = (coarse - reference).array().abs();
  if (spec.mode == NormMode::sup_continuous || std::isinf(spec.q)) return diff.maxCoeff();
  const Scalar sum = diff.tail(n_ref).pow(spec.q).sum();
  return std::pow(sum / static_cast<Scalar>(n_ref), 1.0 / spec.q);
}

Scalar moment_estimate(const Vector& values, Scalar p) {
  if (values.size() == 0) throw InputError("moment_estimate: empty input");
  if (!(p > 0.0)) throw InputError("moment_estimate: p must be > 0");
  return std::pow(values.array().abs().pow(p).mean(), 1.0 / p);
}

Vector exact_gbm(Scalar x0, Scalar a, Scalar b, const BrownianPath& path) {
  const long n_ref = path.n_ref();
  const Scalar drift = a - 0.5 * b * b;
  Vector out(n_ref + 1);
  for (long j = 0; j <= n_ref; ++j) {
    const Scalar t = static_cast<Scalar>(j) / static_cast<Scalar>(n_ref);
    out[j] = x0 * std::exp(drift * t + b * path.prefix()[j]);
  }
  return out;
}

RateFit fit_log_log(const std::vector<long>& levels, const std::vector<Scalar>& values) {
  if (levels.size() != values.size() || levels.size() < 2) {
    throw InputError("fit_log_log: need at least two (level, value) pairs");
  }
  const auto count = static_cast<Eigen::Index>(levels.size());
  Eigen::MatrixXd design(count, 2);
  Eigen::VectorXd y(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::log2(static_cast<Scalar>(levels[i]));
    y[i] = std::log2(values[i]);
  }
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - design * beta;

  RateFit fit;
  fit.intercept = beta[0];
  fit.rate = -beta[1];
  fit.residuals.assign(resid.data(), resid.data() + count);
  const Scalar ssr = resid.squaredNorm();
  const Scalar sst = (y.array() - y.mean()).square().sum();
  fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
  const Eigen::VectorXd lx = design.col(1);
  const Scalar sxx = (lx.array() - lx.mean()).square().sum();
  fit.rate_se = count > 2 ? std::sqrt(ssr / static_cast<Scalar>(count - 2) / sxx) : 0.0;
  return fit;
}

void StudyOptions::validate() const {
  spec.validate();
  if (levels.empty()) throw InputError("study: levels must be non-empty");
  if (!is_power_of_two(n_ref)) throw InputError("study: n_ref must be a power of two");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1 || n_ref % levels[i] != 0) {
      throw InputError("study: level " + std::to_string(levels[i]) + " does not divide n_ref");
    }
    if (i > 0 && levels[i] <= levels[i - 1]) {
      throw InputError("study: levels must be strictly increasing");
    }
  }
  if (n_ref < 8 * levels.back()) throw InputError("study: n_ref must be >= 8 * max(levels)");
  if (paths < 2) throw InputError("study: need at least two paths");
  if (reference == Reference::exact_oracle && !oracle) {
    throw InputError("study: reference exact_oracle requires a problem with a closed-form solution");
  }
}

unsigned resolve_threads(unsigned requested) {
  if (const char* env = std::getenv("TAMEDSDE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  if (requested > 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

template <typename Body>
void parallel_for(long count, unsigned threads, Body&& body) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max(1L, count))));
  if (threads == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (long i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
}

// Per-path values, one column per level; NaN marks a divergent path.
using PathTable = Eigen::MatrixXd;

std::vector<LevelError> reduce_levels(const PathTable& table, const std::vector<long>& levels,
                                      Scalar p) {
  std::vector<LevelError> out;
  const long paths = table.rows();
  for (std::size_t l = 0; l < levels.size(); ++l) {
    LevelError e;
    e.n = levels[l];
    Scalar sum = 0.0, sum_sq = 0.0;
    for (long m = 0; m < paths; ++m) {
      const Scalar v = table(m, static_cast<Eigen::Index>(l));
      if (!std::isfinite(v)) {
        ++e.divergent;
        continue;
      }
      const Scalar y = std::pow(v, p);
      sum += y;
      sum_sq += y * y;
      ++e.paths;
    }
    if (e.paths > 0) {
      const auto cnt = static_cast<Scalar>(e.paths);
      const Scalar mean = sum / cnt;
      const Scalar var = e.paths > 1 ? std::max(0.0, (sum_sq - cnt * mean * mean) / (cnt - 1.0)) : 0.0;
      e.mean = std::pow(mean, 1.0 / p);
      e.se = mean > 0.0 ? std::pow(mean, 1.0 / p - 1.0) / p * std::sqrt(var / cnt) : 0.0;
    }
    if (static_cast<Scalar>(e.divergent) > 0.01 * static_cast<Scalar>(paths)) {
      throw DivergenceError("level n = " + std::to_string(e.n) + ": " + std::to_string(e.divergent) +
                            " of " + std::to_string(paths) + " paths diverged (> 1%)");
    }
    out.push_back(e);
  }
  return out;
}

void finish_report(ConvergenceReport& report, const SdeProblem& problem) {
  if (!admissible_p(problem.growth()).contains(report.spec.p)) {
    report.flags.emplace_back("p_outside_admissible");
  }
  std::vector<Scalar> means;
  bool positive = true;
  for (const auto& e : report.errors) {
    means.push_back(e.mean);
    positive = positive && e.mean > 0.0;
  }
  if (report.levels.size() < 2) {
    report.flags.emplace_back("single_level");
    report.fit.rate = report.fit.intercept = report.fit.r_squared = report.fit.rate_se =
        std::numeric_limits<Scalar>::quiet_NaN();
  } else if (!positive) {
    report.flags.emplace_back("zero_error_level");
    report.fit.rate = report.fit.intercept = report.fit.r_squared = report.fit.rate_se =
        std::numeric_limits<Scalar>::quiet_NaN();
  } else {
    report.fit = fit_log_log(report.levels, means);
  }
}

}  // namespace

ConvergenceReport run_convergence_study(const SdeProblem& problem, const StudyOptions& options) {
  options.validate();
  const auto& levels = options.levels;
  const long n_ref = options.n_ref;
  const ErrorSpec& spec = options.spec;

  std::optional<TransformedProblem> tp;
  if (options.reference == Reference::transformed_pullback) {
    tp = make_transformed_problem(problem, options.nu_fraction);
  }

  PathTable table(options.paths, static_cast<Eigen::Index>(levels.size()));
  parallel_for(options.paths, resolve_threads(options.threads), [&](long m) {
    const BrownianPath path(options.seed, static_cast<std::uint64_t>(m), n_ref);
    Vector reference;
    bool ref_ok = true;
    switch (options.reference) {
      case Reference::fine_grid: {
        SchemePath sp = tamed_euler_path(problem, n_ref, path);
        ref_ok = !sp.divergent;
        reference = std::move(sp.fine_values);
        break;
      }
      case Reference::exact_oracle:
        reference = options.oracle(path);
        ref_ok = reference.allFinite();
        break;
      case Reference::transformed_pullback: {
        SchemePath sp = pullback(*tp, transformed_scheme_path(*tp, n_ref, path));
        ref_ok = !sp.divergent;
        reference = std::move(sp.fine_values);
        break;
      }
    }
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const auto col = static_cast<Eigen::Index>(l);
      const SchemePath sp = tamed_euler_path(problem, levels[l], path);
      if (!ref_ok || sp.divergent) {
        table(m, col) = std::numeric_limits<Scalar>::quiet_NaN();
        continue;
      }
      const Vector approx =
          spec.mode == NormMode::sup_continuous ? sp.fine_values : linear_interp_path(sp);
      table(m, col) = pathwise_error(approx, reference, spec, n_ref);
    }
  });

  ConvergenceReport report;
  report.levels = levels;
  report.errors = reduce_levels(table, levels, spec.p);
  report.seed = options.seed;
  report.spec = spec;
  report.reference = options.reference;
  report.n_ref = n_ref;
  report.paths = options.paths;
  finish_report(report, problem);

  if (spec.mode == NormMode::pathwise_Lq && std::isinf(spec.q)) {
    for (const auto& e : report.errors) {
      report.log_normalized.push_back(e.mean / std::sqrt(std::log(static_cast<Scalar>(e.n) + 1.0)));
    }
    if (levels.size() >= 2 && std::all_of(report.log_normalized.begin(), report.log_normalized.end(),
                                          [](Scalar v) { return v > 0.0; })) {
      report.log_normalized_fit = fit_log_log(levels, report.log_normalized);
    }
  }
  return report;
}

ConvergenceReport occupation_scaling_study(const SdeProblem& problem, std::size_t xi_index,
                                           const StudyOptions& options) {
  options.validate();
  const auto& bps = problem.breakpoints();
  if (bps.empty()) throw InputError("occupation study: problem has no breakpoints");
  if (xi_index >= bps.size()) throw InputError("occupation study: breakpoint index out of range");
  const Scalar xi = bps[xi_index].xi;
  const auto& levels = options.levels;

  PathTable table(options.paths, static_cast<Eigen::Index>(levels.size()));
  parallel_for(options.paths, resolve_threads(options.threads), [&](long m) {
    const BrownianPath path(options.seed, static_cast<std::uint64_t>(m), options.n_ref);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const SchemePath sp = tamed_euler_path(problem, levels[l], path);
      table(m, static_cast<Eigen::Index>(l)) =
          sp.divergent ? std::numeric_limits<Scalar>::quiet_NaN()
                       : sign_change_occupation(sp, xi).measure;
    }
  });

  ConvergenceReport report;
  report.levels = levels;
  report.errors = reduce_levels(table, levels, options.spec.p);
  report.seed = options.seed;
  report.spec = options.spec;
  report.reference = options.reference;
  report.n_ref = options.n_ref;
  report.paths = options.paths;
  finish_report(report, problem);
  return report;
}

std::vector<Scalar> terminal_moment_study(const SdeProblem& problem, const std::vector<long>& levels,
                                          long n_ref, long paths, Scalar p, std::uint64_t seed,
                                          unsigned threads) {
  if (paths < 1) throw InputError("terminal_moment_study: need at least one path");
  PathTable table(paths, static_cast<Eigen::Index>(levels.size()));
  parallel_for(paths, resolve_threads(threads), [&](long m) {
    const BrownianPath path(seed, static_cast<std::uint64_t>(m), n_ref);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const SchemePath sp = tamed_euler_path(problem, levels[l], path);
      table(m, static_cast<Eigen::Index>(l)) = sp.grid_values[sp.n];
    }
  });
  std::vector<Scalar> out;
  for (Eigen::Index l = 0; l < table.cols(); ++l) {
    out.push_back(moment_estimate(table.col(l), p));
  }
  return out;
}

}  // namespace tamedsde

#include "tamedsde/sde_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tamedsde {

GrowthParams::GrowthParams(Scalar ell_mu, Scalar ell_sigma, Scalar p0, Scalar p1)
    : ell_mu_(ell_mu), ell_sigma_(ell_sigma), p0_(p0), p1_(p1) {
  if (!(ell_mu > 0.0) || !std::isfinite(ell_mu)) {
    throw InputError("GrowthParams: ell_mu must be finite and > 0 (ell_mu = 0 is not supported)");
  }
  if (!(ell_sigma >= 0.0) || ell_sigma > ell_mu / 2.0) {
    throw InputError("GrowthParams: ell_sigma must lie in [0, ell_mu / 2]");
  }
  if (!(p0 >= 2.0) || !(p1 >= 2.0) || !std::isfinite(p0) || !std::isfinite(p1)) {
    throw InputError("GrowthParams: p0 and p1 must be finite and >= 2");
  }
  kappa_ = ell_mu + std::max(ell_mu, 2.0 * ell_sigma + 2.0) + 1.0;
}

SdeProblem::SdeProblem(Scalar x0, ScalarFunction drift, ScalarFunction diffusion,
                       std::vector<Breakpoint> breakpoints, GrowthParams growth,
                       std::string label)
    : x0_(x0),
      drift_(std::move(drift)),
      diffusion_(std::move(diffusion)),
      breakpoints_(std::move(breakpoints)),
      growth_(growth),
      label_(std::move(label)) {
  if (!std::isfinite(x0_)) throw InputError("SdeProblem: x0 must be finite");
  if (!drift_ || !diffusion_) throw InputError("SdeProblem: drift and diffusion are required");
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const auto& b = breakpoints_[i];
    if (!std::isfinite(b.xi) || !std::isfinite(b.mu_left) || !std::isfinite(b.mu_right) ||
        !std::isfinite(b.mu_at)) {
      throw InputError("SdeProblem: breakpoint " + std::to_string(i) + " has non-finite data");
    }
    if (i > 0 && !(breakpoints_[i - 1].xi < b.xi)) {
      throw InputError("SdeProblem: breakpoints must be strictly increasing");
    }
  }
}

SdeProblem SdeProblem::with_x0(Scalar x0) const {
  return SdeProblem(x0, drift_, diffusion_, breakpoints_, growth_, label_);
}

Scalar eval_drift(const SdeProblem& problem, Scalar x) {
  if (!std::isfinite(x)) throw InputError("eval_drift: x must be finite");
  const auto& bps = problem.breakpoints();
  auto it = std::lower_bound(bps.begin(), bps.end(), x,
                             [](const Breakpoint& b, Scalar v) { return b.xi < v; });
  if (it != bps.end() && it->xi == x) return it->mu_at;
  return problem.drift()(x);
}

Scalar eval_diffusion(const SdeProblem& problem, Scalar x) {
  if (!std::isfinite(x)) throw InputError("eval_diffusion: x must be finite");
  return problem.diffusion()(x);
}

std::pair<Scalar, Scalar> one_sided_limits(const SdeProblem& problem, std::size_t i) {
  const auto& bps = problem.breakpoints();
  if (i >= bps.size()) {
    throw std::out_of_range("one_sided_limits: breakpoint index " + std::to_string(i) +
                            " out of range (k = " + std::to_string(bps.size()) + ")");
  }
  return {bps[i].mu_left, bps[i].mu_right};
}

namespace {

// Index of the open piece containing x, or -1 when x is a breakpoint.
long piece_of(const std::vector<Breakpoint>& bps, Scalar x) {
  long piece = 0;
  for (const auto& b : bps) {
    if (x == b.xi) return -1;
    if (x > b.xi) ++piece;
  }
  return piece;
}

struct ConditionFit {
  Scalar sup = 0.0;
  std::vector<Violation>* violations = nullptr;
  std::optional<Scalar> threshold;

  void add(std::vector<Scalar> pts, Scalar lhs, Scalar rhs_factor) {
    if (!std::isfinite(lhs) || !std::isfinite(rhs_factor) || rhs_factor <= 0.0) return;
    sup = std::max(sup, lhs / rhs_factor);
    if (threshold && lhs > *threshold * rhs_factor) {
      violations->push_back({std::move(pts), lhs, *threshold * rhs_factor});
    }
  }
};

}  // namespace

AssumptionReport check_assumptions(const SdeProblem& problem, const SampleSpec& grid) {
  if (grid.points < 2 || !(grid.hi > grid.lo) || !std::isfinite(grid.lo) ||
      !std::isfinite(grid.hi)) {
    throw InputError("check_assumptions: sample grid must be a bounded interval with >= 2 points");
  }
  const auto& g = problem.growth();
  const auto& bps = problem.breakpoints();
  const std::size_t n = grid.points;

  std::vector<Scalar> xs(n), mu(n), sig(n);
  std::vector<long> piece(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = grid.lo + (grid.hi - grid.lo) * static_cast<Scalar>(i) / static_cast<Scalar>(n - 1);
    mu[i] = eval_drift(problem, xs[i]);
    sig[i] = eval_diffusion(problem, xs[i]);
    piece[i] = piece_of(bps, xs[i]);
  }

  AssumptionReport report;
  ConditionFit a1{0.0, &report.a1_violations, grid.thresholds.a1};
  ConditionFit a2i{0.0, &report.a2i_violations, grid.thresholds.a2i};
  ConditionFit a2ii{0.0, &report.a2ii_violations, grid.thresholds.a2ii};
  ConditionFit a3{0.0, &report.a3_violations, grid.thresholds.a3};

  for (std::size_t i = 0; i < n; ++i) {
    const Scalar x = xs[i];
    a1.add({x}, 2.0 * x * mu[i] + (g.p0() - 1.0) * sig[i] * sig[i], 1.0 + x * x);
  }

  for (std::size_t stride = 1; stride < n; stride *= 2) {
    for (std::size_t i = 0; i + stride < n; ++i) {
      const std::size_t j = i + stride;
      const Scalar x = xs[i], y = xs[j];
      const Scalar dx = x - y;
      const Scalar ds = sig[i] - sig[j];
      a3.add({x, y}, std::abs(ds),
             (1.0 + std::pow(std::abs(x), g.ell_sigma()) + std::pow(std::abs(y), g.ell_sigma())) *
                 std::abs(dx));
      if (piece[i] < 0 || piece[i] != piece[j]) continue;
      const Scalar dm = mu[i] - mu[j];
      a2i.add({x, y}, 2.0 * dx * dm + (g.p1() - 1.0) * ds * ds, dx * dx);
      a2ii.add({x, y}, std::abs(dm),
               (1.0 + std::pow(std::abs(x), g.ell_mu()) + std::pow(std::abs(y), g.ell_mu())) *
                   std::abs(dx));
    }
  }

  for (const auto& b : bps) {
    const Scalar s = eval_diffusion(problem, b.xi);
    if (s == 0.0) report.a4_violations.push_back({{b.xi}, s, 0.0});
  }

  report.fitted_constants = {
      {"A1", a1.sup}, {"A2(i)", a2i.sup}, {"A2(ii)", a2ii.sup}, {"A3", a3.sup}};
  return report;
}

}  // namespace tamedsde

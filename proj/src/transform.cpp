#include "tamedsde/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tamedsde {

namespace {
constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();
}

Scalar bump_phi(Scalar x) {
  if (x < -1.0 || x > 1.0) return 0.0;
  const Scalar w = 1.0 - x * x;
  const Scalar w2 = w * w;
  return w2 * w2;
}

Scalar bump_phi_d1(Scalar x) {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  const Scalar w = 1.0 - x * x;
  return -8.0 * x * w * w * w;
}

Scalar bump_phi_d2(Scalar x) {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  const Scalar x2 = x * x;
  const Scalar w = 1.0 - x2;
  return w * w * (56.0 * x2 - 8.0);
}

std::vector<Scalar> compute_alpha(const SdeProblem& problem) {
  std::vector<Scalar> alpha;
  alpha.reserve(problem.breakpoints().size());
  for (const auto& b : problem.breakpoints()) {
    const Scalar s = eval_diffusion(problem, b.xi);
    if (s == 0.0 || !std::isfinite(s)) {
      throw DegeneracyError("compute_alpha: diffusion vanishes at breakpoint xi = " +
                            std::to_string(b.xi));
    }
    alpha.push_back((b.mu_left - b.mu_right) / (2.0 * s * s));
  }
  return alpha;
}

Scalar compute_rho(const std::vector<Scalar>& z, const std::vector<Scalar>& alpha) {
  if (z.size() != alpha.size()) throw InputError("compute_rho: z and alpha lengths differ");
  Scalar rho = kInf;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i > 0) {
      if (!(z[i - 1] < z[i])) throw InputError("compute_rho: z must be strictly increasing");
      rho = std::min(rho, (z[i] - z[i - 1]) / 2.0);
    }
    if (alpha[i] != 0.0) rho = std::min(rho, 1.0 / (8.0 * std::abs(alpha[i])));
  }
  return rho;
}

TransformG::TransformG(std::vector<Scalar> xi, std::vector<Scalar> alpha, Scalar nu)
    : xi_(std::move(xi)), alpha_(std::move(alpha)), nu_(nu) {
  cache_.resize(xi_.size());
  for (std::size_t i = 0; i < alpha_.size() && i < cache_.size(); ++i) {
    // mu_right - mu_at = 0 leaves G''(xi) at the right-sided limit.
    cache_[i] = {alpha_[i], -alpha_[i], -alpha_[i], 1.0};
  }
  validate_and_bound();
}

TransformG::TransformG(std::vector<Scalar> xi, std::vector<Scalar> alpha, Scalar nu,
                       std::vector<BreakpointCache> cache)
    : xi_(std::move(xi)), alpha_(std::move(alpha)), nu_(nu), cache_(std::move(cache)) {
  if (cache_.size() != xi_.size()) throw InputError("TransformG: cache size mismatch");
  validate_and_bound();
}

void TransformG::validate_and_bound() {
  rho_ = compute_rho(xi_, alpha_);
  for (Scalar a : alpha_) {
    if (!std::isfinite(a)) throw InputError("TransformG: alpha must be finite");
  }
  if (!(nu_ > 0.0) || !std::isfinite(nu_)) throw InputError("TransformG: nu must be finite and > 0");
  if (!(nu_ < rho_)) throw InputError("TransformG: nu must be smaller than rho");

  Scalar lo = 1.0, hi = 1.0;
  constexpr int kSamples = 4001;
  for (Scalar z : xi_) {
    for (int j = 0; j < kSamples; ++j) {
      const Scalar x = z - nu_ + 2.0 * nu_ * static_cast<Scalar>(j) / (kSamples - 1);
      const Scalar d = g_prime(*this, x);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  if (!(lo > 0.0) || !std::isfinite(hi)) {
    throw InputError("TransformG: G' is not bounded away from zero");
  }
  deriv_bounds_ = {lo, hi};
}

long TransformG::bump_index(Scalar x) const {
  if (xi_.empty()) return -1;
  auto it = std::lower_bound(xi_.begin(), xi_.end(), x);
  // Supports are disjoint, so only the two neighbouring breakpoints matter.
  if (it != xi_.end() && *it - x <= nu_) return it - xi_.begin();
  if (it != xi_.begin() && x - *(it - 1) <= nu_) return (it - xi_.begin()) - 1;
  return -1;
}

TransformG build_transform(const SdeProblem& problem, Scalar nu_fraction) {
  if (!(nu_fraction > 0.0 && nu_fraction < 1.0)) {
    throw InputError("build_transform: nu_fraction must lie in (0, 1)");
  }
  std::vector<Scalar> alpha = compute_alpha(problem);
  std::vector<Scalar> xi;
  std::vector<BreakpointCache> cache;
  for (const auto& b : problem.breakpoints()) {
    xi.push_back(b.xi);
    cache.push_back({b.mu_left, b.mu_right, b.mu_at, eval_diffusion(problem, b.xi)});
  }
  const Scalar rho = compute_rho(xi, alpha);
  const Scalar nu = std::isinf(rho) ? 1.0 : nu_fraction * rho;
  TransformG g(std::move(xi), std::move(alpha), nu, std::move(cache));
  for (Scalar z : g.xi()) {
    if (g_eval(g, z) != z) throw std::logic_error("build_transform: G does not fix a breakpoint");
  }
  return g;
}

Scalar g_eval(const TransformG& g, Scalar x) {
  const long i = g.bump_index(x);
  if (i < 0) return x;
  const Scalar u = x - g.xi()[i];
  return x + g.alpha()[i] * u * std::abs(u) * bump_phi(u / g.nu());
}

Scalar g_prime(const TransformG& g, Scalar x) {
  const long i = g.bump_index(x);
  if (i < 0) return 1.0;
  const Scalar nu = g.nu();
  const Scalar u = x - g.xi()[i];
  const Scalar s = u / nu;
  const Scalar au = std::abs(u);
  return 1.0 + g.alpha()[i] * (2.0 * au * bump_phi(s) + u * au * bump_phi_d1(s) / nu);
}

Scalar g_second(const TransformG& g, Scalar x) {
  const long i = g.bump_index(x);
  if (i < 0) return 0.0;
  const Scalar a = g.alpha()[i];
  const Scalar u = x - g.xi()[i];
  if (u == 0.0) {
    const auto& c = g.cache()[i];
    return 2.0 * a + 2.0 * (c.mu_right - c.mu_at) / (c.sigma_at * c.sigma_at);
  }
  const Scalar nu = g.nu();
  const Scalar s = u / nu;
  const Scalar au = std::abs(u);
  const Scalar sign = u > 0.0 ? 1.0 : -1.0;
  return a * (2.0 * sign * bump_phi(s) + 4.0 * au * bump_phi_d1(s) / nu +
              u * au * bump_phi_d2(s) / (nu * nu));
}

Scalar g_inverse(const TransformG& g, Scalar y, Scalar tol) {
  if (!(tol > 0.0)) throw InputError("g_inverse: tol must be > 0");
  const long i = g.bump_index(y);
  if (i < 0) return y;
  // Each bump interval is mapped onto itself, so it brackets the preimage.
  Scalar lo = g.xi()[i] - g.nu();
  Scalar hi = g.xi()[i] + g.nu();
  const Scalar target = tol * std::max(1.0, std::abs(y));
  Scalar x = std::clamp(y, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const Scalar f = g_eval(g, x) - y;
    if (std::abs(f) <= target) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    Scalar next = x - f / g_prime(g, x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<Scalar>::epsilon() * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

Scalar g_inverse_second(const TransformG& g, Scalar y, Scalar tol) {
  const Scalar x = g_inverse(g, y, tol);
  const Scalar d = g_prime(g, x);
  return -g_second(g, x) / (d * d * d);
}

TransformedProblem make_transformed_problem(const SdeProblem& problem, Scalar nu_fraction) {
  TransformG g = build_transform(problem, nu_fraction);
  const Scalar z0 = g_eval(g, problem.x0());
  return TransformedProblem{problem, std::move(g), z0, problem.growth()};
}

std::pair<Scalar, Scalar> transformed_coefficients(const TransformedProblem& tp, Scalar y) {
  if (tp.g.bump_index(y) < 0) {
    return {eval_drift(tp.base, y), eval_diffusion(tp.base, y)};
  }
  const Scalar x = g_inverse(tp.g, y);
  const Scalar mu = eval_drift(tp.base, x);
  const Scalar sigma = eval_diffusion(tp.base, x);
  const Scalar d1 = g_prime(tp.g, x);
  const Scalar d2 = g_second(tp.g, x);
  return {d1 * mu + 0.5 * d2 * sigma * sigma, d1 * sigma};
}

std::vector<InvariantCheck> check_transform_invariants(const TransformG& g) {
  std::vector<InvariantCheck> checks;
  auto push = [&checks](std::string name, Scalar dev, Scalar tol) {
    checks.push_back({std::move(name), dev, tol, dev <= tol});
  };
  const auto& xi = g.xi();
  const Scalar nu = g.nu();

  Scalar dev = 0.0;
  for (Scalar z : xi) dev = std::max(dev, std::abs(g_eval(g, z) - z));
  push("fixed_points", dev, 1e-12);

  dev = 0.0;
  if (!xi.empty()) {
    std::vector<Scalar> off{g.band_lo(), g.band_hi(), g.band_lo() - 1.0, g.band_hi() + 1.0,
                            g.band_lo() - 1e3, g.band_hi() + 1e3};
    for (std::size_t i = 1; i < xi.size(); ++i) {
      for (int j = 0; j <= 20; ++j) {
        off.push_back((xi[i - 1] + nu) + (xi[i] - xi[i - 1] - 2.0 * nu) * j / 20.0);
      }
    }
    for (Scalar x : off) dev = std::max(dev, std::abs(g_eval(g, x) - x));
  }
  push("identity_off_band", dev, 0.0);

  dev = 0.0;
  for (Scalar z : xi) dev = std::max(dev, std::abs(g_prime(g, z) - 1.0));
  push("unit_slope_at_breakpoints", dev, 1e-12);

  std::vector<Scalar> samples;
  if (!xi.empty()) {
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<Scalar> unif(xi.front() - 2.0 * nu, xi.back() + 2.0 * nu);
    samples.resize(10000);
    for (auto& x : samples) x = unif(rng);
  }

  dev = 0.0;
  for (Scalar x : samples) dev = std::max(dev, std::abs(g_inverse(g, g_eval(g, x)) - x));
  push("inverse_round_trip", dev, 1e-10);

  dev = 0.0;
  {
    std::vector<Scalar> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (!(g_eval(g, sorted[i - 1]) < g_eval(g, sorted[i]))) dev += 1.0;
    }
  }
  push("strictly_increasing", dev, 0.0);

  // Finite differences away from the kinks xi_i and xi_i +- nu.
  Scalar dev1 = 0.0, dev2 = 0.0;
  const Scalar h = std::min(1e-5, 1e-5 * nu);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    for (int j = 0; j <= 400; ++j) {
      const Scalar x = xi[i] - nu + 2.0 * nu * j / 400.0;
      const Scalar u = std::abs(x - xi[i]);
      if (u < 1e-3 || std::abs(u - nu) < 1e-3) continue;
      const Scalar fd1 = (g_eval(g, x + h) - g_eval(g, x - h)) / (2.0 * h);
      const Scalar an1 = g_prime(g, x);
      dev1 = std::max(dev1, std::abs(fd1 - an1) / std::max(1.0, std::abs(an1)));
      const Scalar fd2 = (g_prime(g, x + h) - g_prime(g, x - h)) / (2.0 * h);
      const Scalar an2 = g_second(g, x);
      dev2 = std::max(dev2, std::abs(fd2 - an2) / std::max(1.0, std::abs(an2)));
    }
  }
  push("first_derivative_fd", dev1, 1e-6);
  push("second_derivative_fd", dev2, 1e-6);

  dev = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const Scalar a = g.alpha()[i];
    dev = std::max(dev, std::abs(g_second(g, xi[i] - 1e-6) + 2.0 * a));
    dev = std::max(dev, std::abs(g_second(g, xi[i] + 1e-6) - 2.0 * a));
  }
  push("one_sided_second_derivative", dev, 1e-4);
  return checks;
}

InvariantCheck check_transformed_continuity(const TransformedProblem& tp, Scalar h,
                                            Scalar tolerance) {
  Scalar dev = 0.0;
  for (const auto& b : tp.base.breakpoints()) {
    const Scalar mid = 0.5 * (b.mu_left + b.mu_right);
    dev = std::max(dev, std::abs(transformed_coefficients(tp, b.xi - h).first - mid));
    dev = std::max(dev, std::abs(transformed_coefficients(tp, b.xi + h).first - mid));
    dev = std::max(dev, std::abs(transformed_coefficients(tp, b.xi).first - mid));
  }
  return {"transformed_drift_continuity", dev, tolerance, dev <= tolerance};
}

}  // namespace tamedsde

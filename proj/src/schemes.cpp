#include "tamedsde/schemes.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace tamedsde {

Scalar taming_factor(long n, Scalar x, Scalar ell_mu) {
  const Scalar ax = std::abs(x);
  const Scalar power = ell_mu == 2.0 ? ax * ax : std::pow(ax, ell_mu);
  return 1.0 + power / std::sqrt(static_cast<Scalar>(n));
}

Scalar tamed_drift(const SdeProblem& problem, long n, Scalar x) {
  if (n < 1) throw InputError("tamed_drift: n must be >= 1");
  return eval_drift(problem, x) / taming_factor(n, x, problem.growth().ell_mu());
}

Scalar tamed_diffusion(const SdeProblem& problem, long n, Scalar x) {
  if (n < 1) throw InputError("tamed_diffusion: n must be >= 1");
  return eval_diffusion(problem, x) / taming_factor(n, x, problem.growth().ell_mu());
}

namespace {

// coeff(x) -> (mu(x), sigma(x)) of the untamed SDE.
template <typename Coefficients>
SchemePath run_tamed_euler(Coefficients&& coeff, Scalar x0, Scalar ell_mu, long n,
                           const BrownianPath& path) {
  const long n_ref = path.n_ref();
  if (n < 1 || n_ref % n != 0) {
    throw InputError("tamed Euler: n = " + std::to_string(n) + " does not divide n_ref = " +
                     std::to_string(n_ref));
  }
  const long m = n_ref / n;
  const Vector dw = coarsen(path, n);
  const Vector& w = path.prefix();
  const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();

  SchemePath sp;
  sp.n = n;
  sp.n_ref = n_ref;
  sp.grid_values = Vector::Constant(n + 1, nan);
  sp.fine_values = Vector::Constant(n_ref + 1, nan);
  sp.grid_values[0] = x0;
  sp.fine_values[0] = x0;

  const Scalar dt = 1.0 / static_cast<Scalar>(n);
  for (long i = 0; i < n; ++i) {
    const Scalar x = sp.grid_values[i];
    const auto [mu, sigma] = coeff(x);
    const Scalar tame = taming_factor(n, x, ell_mu);
    const Scalar mu_n = mu / tame;
    const Scalar sigma_n = sigma / tame;
    const long base = i * m;
    for (long j = base + 1; j < base + m; ++j) {
      const Scalar elapsed = static_cast<Scalar>(j - base) / static_cast<Scalar>(n_ref);
      sp.fine_values[j] = x + mu_n * elapsed + sigma_n * (w[j] - w[base]);
    }
    const Scalar next = x + mu_n * dt + sigma_n * dw[i];
    if (!std::isfinite(next) || std::abs(next) > kDivergenceBound) {
      sp.divergent = true;
      return sp;
    }
    sp.grid_values[i + 1] = next;
    sp.fine_values[base + m] = next;
  }
  return sp;
}

}  // namespace

SchemePath tamed_euler_path(const SdeProblem& problem, long n, const BrownianPath& path) {
  return run_tamed_euler(
      [&problem](Scalar x) {
        return std::pair{eval_drift(problem, x), eval_diffusion(problem, x)};
      },
      problem.x0(), problem.growth().ell_mu(), n, path);
}

Vector linear_interp_path(const SchemePath& sp) {
  const long n = sp.n, n_ref = sp.n_ref;
  const long m = n_ref / n;
  Vector out(n_ref + 1);
  for (long j = 0; j <= n_ref; ++j) {
    const long i = j / m;
    const long r = j - i * m;
    if (r == 0) {
      out[j] = sp.grid_values[i];
    } else {
      const Scalar w = static_cast<Scalar>(r) / static_cast<Scalar>(m);
      out[j] = w * sp.grid_values[i + 1] + (1.0 - w) * sp.grid_values[i];
    }
  }
  return out;
}

SchemePath transformed_scheme_path(const TransformedProblem& tp, long n, const BrownianPath& path) {
  return run_tamed_euler([&tp](Scalar z) { return transformed_coefficients(tp, z); }, tp.z0,
                         tp.tilde_growth.ell_mu(), n, path);
}

SchemePath pullback(const TransformedProblem& tp, const SchemePath& z_path) {
  SchemePath out = z_path;
  for (auto& v : out.grid_values) {
    if (std::isfinite(v)) v = g_inverse(tp.g, v);
  }
  for (auto& v : out.fine_values) {
    if (std::isfinite(v)) v = g_inverse(tp.g, v);
  }
  return out;
}

OccupationStat sign_change_occupation(const SchemePath& sp, Scalar xi) {
  const long n = sp.n, n_ref = sp.n_ref;
  long count = 0;
  for (long j = 1; j <= n_ref; ++j) {
    const long i = (j * n) / n_ref;
    if ((sp.fine_values[j] - xi) * (sp.grid_values[i] - xi) <= 0.0) ++count;
  }
  return {xi, static_cast<Scalar>(count) / static_cast<Scalar>(n_ref), n, n_ref};
}

}  // namespace tamedsde

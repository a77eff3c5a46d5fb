#include "tamedsde/presets.hpp"

#include <algorithm>
#include <cmath>

namespace tamedsde {

namespace {

Scalar sign(Scalar x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

Preset make_gbm() {
  constexpr Scalar a = 0.5, b = 0.3, x0 = 1.0;
  SdeProblem problem(
      x0, [](Scalar x) { return a * x; }, [](Scalar x) { return b * x; }, {},
      GrowthParams(2.0, 1.0, 15.0, 3.0), "gbm");
  return Preset{
      "gbm",
      "geometric Brownian motion mu = a x, sigma = b x; closed-form solution",
      std::move(problem),
      a,
      b,
      {2.5, 1.5, 1.0, 0.5},
      [](const BrownianPath& path) { return exact_gbm(x0, a, b, path); },
      {{"a", a}, {"b", b}, {"x0", x0}, {"ell_mu", 2.0}, {"ell_sigma", 1.0}, {"p0", 15.0}, {"p1", 3.0}}};
}

Preset make_cubic_jump() {
  constexpr Scalar x0 = 0.5;
  SdeProblem problem(
      x0, [](Scalar x) { return -x * x * x - 2.0 * sign(x); }, [](Scalar) { return 1.0; },
      {Breakpoint{0.0, 2.0, -2.0, 0.0}}, GrowthParams(2.0, 0.0, 15.0, 3.0), "cubic_jump");
  return Preset{
      "cubic_jump",
      "mu = -x^3 - 2 sign(x) with mu(0) = 0, sigma = 1, one breakpoint at 0",
      std::move(problem),
      2.0,
      1.0,
      {15.0, 0.5, 2.0, 0.5},
      {},
      {{"x0", x0}, {"xi", 0.0}, {"ell_mu", 2.0}, {"ell_sigma", 0.0}, {"p0", 15.0}, {"p1", 3.0}}};
}

Scalar double_jump_step(Scalar x) {
  if (x <= -1.0) return 2.0;
  if (x <= 1.0) return 0.0;
  return -2.0;
}

Preset make_double_jump() {
  constexpr Scalar x0 = 0.0;
  SdeProblem problem(
      x0, [](Scalar x) { return -x * x * x + double_jump_step(x); }, [](Scalar) { return 1.0; },
      {Breakpoint{-1.0, 3.0, 1.0, 3.0}, Breakpoint{1.0, -1.0, -3.0, -1.0}},
      GrowthParams(2.0, 0.0, 15.0, 3.0), "double_jump");
  return Preset{
      "double_jump",
      "mu = -x^3 + (2 on (-inf,-1], 0 on (-1,1], -2 on (1,inf)), sigma = 1, breakpoints -1 and 1",
      std::move(problem),
      2.0,
      1.0,
      {15.0, 0.5, 2.0, 0.5},
      {},
      {{"x0", x0}, {"xi1", -1.0}, {"xi2", 1.0}, {"ell_mu", 2.0}, {"ell_sigma", 0.0}, {"p0", 15.0},
       {"p1", 3.0}}};
}

Preset make_ginzburg_landau() {
  constexpr Scalar x0 = 1.0, s = 0.5;
  SdeProblem problem(
      x0, [](Scalar x) { return x - x * x * x; }, [](Scalar x) { return s * x; }, {},
      GrowthParams(2.0, 0.0, 15.0, 3.0), "ginzburg_landau");
  return Preset{
      "ginzburg_landau",
      "stochastic Ginzburg-Landau mu = x - x^3, sigma = 0.5 x",
      std::move(problem),
      2.0,
      s,
      {2.5, 3.0, 2.0, 0.5},
      {},
      {{"x0", x0}, {"sigma", s}, {"ell_mu", 2.0}, {"ell_sigma", 0.0}, {"p0", 15.0}, {"p1", 3.0}}};
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"gbm", "cubic_jump", "double_jump", "ginzburg_landau"};
  return names;
}

Preset make_preset(std::string_view name) {
  if (name == "gbm") return make_gbm();
  if (name == "cubic_jump") return make_cubic_jump();
  if (name == "double_jump") return make_double_jump();
  if (name == "ginzburg_landau") return make_ginzburg_landau();
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw InputError("unknown preset '" + std::string(name) + "' (available: " + known + ")");
}

TamingConstants taming_constants(const Preset& preset) {
  const Scalar cm = preset.drift_bound;
  const Scalar cs2 = preset.diffusion_bound * preset.diffusion_bound;
  return {std::max(1.0, cm), std::max(1.0, 4.0 * cs2), 2.0 * cm, 2.0 * preset.diffusion_bound,
          8.0 * cs2};
}

}  // namespace tamedsde

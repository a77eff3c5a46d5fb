#include "tamedsde/presets.hpp"
#include "tamedsde/schemes.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tamedsde;

namespace {

SdeProblem constant_problem(double mu, double sigma, double x0, double ell_mu = 2.0) {
  return SdeProblem(x0, [mu](Scalar) { return mu; }, [sigma](Scalar) { return sigma; }, {},
                    GrowthParams(ell_mu, 0.0, 15.0, 3.0));
}

}  // namespace

TEST_CASE("tamed coefficients") {
  const SdeProblem cubic(0.0, [](Scalar x) { return -x * x * x; }, [](Scalar x) { return x; }, {},
                         GrowthParams(2.0, 0.0, 15.0, 3.0));
  CHECK(tamed_drift(cubic, 4, 2.0) == doctest::Approx(-8.0 / 3.0).epsilon(1e-15));
  CHECK(tamed_diffusion(cubic, 4, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(tamed_drift(cubic, 7, 0.0) == eval_drift(cubic, 0.0));

  const Preset cj = make_preset("cubic_jump");
  CHECK(tamed_drift(cj.problem, 1, 0.0) == 0.0);
  CHECK_THROWS_AS(tamed_drift(cj.problem, 0, 1.0), InputError);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-1e3, 1e3);
  std::uniform_int_distribution<int> un(0, 20);
  for (int i = 0; i < 10000; ++i) {
    const double x = ux(rng);
    const long n = 1L << un(rng);
    CHECK(std::abs(tamed_drift(cj.problem, n, x)) <= std::abs(eval_drift(cj.problem, x)));
    CHECK(std::abs(tamed_diffusion(cj.problem, n, x)) <= std::abs(eval_diffusion(cj.problem, x)));
  }
}

TEST_CASE("zero coefficients give a constant path") {
  const SdeProblem p = constant_problem(0.0, 0.0, 1.25);
  const SchemePath sp = tamed_euler_path(p, 8, sample_path(3, 0, 64));
  CHECK(sp.grid_values.size() == 9);
  CHECK(sp.fine_values.size() == 65);
  CHECK((sp.fine_values.array() == 1.25).all());
  CHECK((sp.grid_values.array() == 1.25).all());
}

TEST_CASE("single step") {
  const Preset gbm = make_preset("gbm");
  const BrownianPath path = sample_path(8, 1, 16);
  const SchemePath sp = tamed_euler_path(gbm.problem, 1, path);
  const double x0 = gbm.problem.x0();
  const double tame = 1.0 + x0 * x0;
  const double expected = x0 + 0.5 * x0 / tame + 0.3 * x0 / tame * path.increments().sum();
  CHECK(sp.grid_values[1] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("two-step hand recursion") {
  const SdeProblem p = constant_problem(1.0, 0.0, 0.0);
  const SchemePath sp = tamed_euler_path(p, 2, sample_path(1, 0, 16));
  // x_1/2 = 0.5 (taming factor 1 at x = 0); x_1 = 0.5 + 0.5 / (1 + 2^{-1/2} 0.25).
  const double half = 0.5;
  const double one = half + 0.5 / (1.0 + 0.25 / std::sqrt(2.0));
  CHECK(sp.grid_values[1] == half);
  CHECK(sp.grid_values[2] == doctest::Approx(one).epsilon(1e-15));
  // Within the first step the drift is frozen: t = 3 / 16 -> 3 / 16.
  CHECK(sp.fine_values[3] == doctest::Approx(3.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("grid and fine values agree on grid times") {
  const Preset cj = make_preset("cubic_jump");
  for (std::uint64_t m = 0; m < 20; ++m) {
    const BrownianPath path = sample_path(99, m, 256);
    for (long n : {1L, 4L, 32L, 256L}) {
      const SchemePath sp = tamed_euler_path(cj.problem, n, path);
      CHECK(sp.fine_values[0] == cj.problem.x0());
      for (long i = 0; i <= n; ++i) CHECK(sp.fine_values[i * (256 / n)] == sp.grid_values[i]);
    }
  }
  CHECK_THROWS_AS(tamed_euler_path(cj.problem, 3, sample_path(1, 0, 256)), InputError);
  CHECK_THROWS_AS(tamed_euler_path(cj.problem, 512, sample_path(1, 0, 256)), InputError);
}

TEST_CASE("time-continuous scheme matches the defining formula") {
  const Preset cj = make_preset("cubic_jump");
  const BrownianPath path = sample_path(4, 4, 64);
  const long n = 8, m = 8;
  const SchemePath sp = tamed_euler_path(cj.problem, n, path);
  for (long j = 0; j <= 64; ++j) {
    const long i = std::min(j / m, n - 1);
    const double t = j / 64.0;
    const double x = sp.grid_values[i];
    const double expected = x + tamed_drift(cj.problem, n, x) * (t - static_cast<double>(i) / n) +
                            tamed_diffusion(cj.problem, n, x) * (value_at(path, j) - value_at(path, i * m));
    CHECK(sp.fine_values[j] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("overflow guard") {
  // Untamed-looking misconfiguration: huge ell_mu denominator is absent when
  // the drift grows like exp, so values explode.
  const SdeProblem bad(1.0, [](Scalar x) { return std::exp(std::abs(x)) * 1e10; },
                       [](Scalar) { return 0.0; }, {}, GrowthParams(0.01, 0.0, 15.0, 3.0));
  const SchemePath sp = tamed_euler_path(bad, 64, sample_path(1, 0, 64));
  CHECK(sp.divergent);
  CHECK(std::isnan(sp.grid_values[64]));
}

TEST_CASE("linear interpolation") {
  SchemePath sp;
  sp.n = 2;
  sp.n_ref = 8;
  sp.grid_values = Vector{{0.0, 4.0, 2.0}};
  sp.fine_values = Vector::Zero(9);
  const Vector lin = linear_interp_path(sp);
  CHECK(lin[0] == 0.0);
  CHECK(lin[4] == 4.0);
  CHECK(lin[8] == 2.0);
  CHECK(lin[2] == 2.0);
  CHECK(lin[6] == 3.0);
  CHECK(lin[1] == 1.0);

  sp.grid_values = Vector::Constant(3, 1.5);
  CHECK((linear_interp_path(sp).array() == 1.5).all());
}

TEST_CASE("transformed scheme") {
  const Preset gbm = make_preset("gbm");
  const TransformedProblem tid = make_transformed_problem(gbm.problem);
  const BrownianPath path = sample_path(12, 0, 128);
  const SchemePath a = tamed_euler_path(gbm.problem, 16, path);
  const SchemePath b = transformed_scheme_path(tid, 16, path);
  CHECK(a.fine_values == b.fine_values);
  CHECK(a.grid_values == b.grid_values);

  const Preset cj = make_preset("cubic_jump");
  const SdeProblem near = cj.problem.with_x0(0.01);
  const TransformedProblem tp = make_transformed_problem(near);
  const SchemePath z = transformed_scheme_path(tp, 16, path);
  CHECK(z.fine_values[0] == g_eval(tp.g, 0.01));
  CHECK(z.fine_values[0] != 0.01);
  const SchemePath x = pullback(tp, z);
  CHECK(x.fine_values[0] == doctest::Approx(0.01).epsilon(1e-12));
  for (long i = 0; i <= 16; ++i) {
    CHECK(g_eval(tp.g, x.grid_values[i]) == doctest::Approx(z.grid_values[i]).epsilon(1e-12));
  }
}

TEST_CASE("sign-change occupation") {
  SchemePath sp;
  sp.n = 1;
  sp.n_ref = 4;
  sp.grid_values = Vector{{0.5, -0.5}};
  sp.fine_values = Vector{{0.5, 0.3, -0.1, -0.2, -0.5}};
  // Brute force: t_j = j / 4, last grid time floor(t_j).
  int fires = 0;
  for (int j = 1; j <= 4; ++j) {
    const int last = static_cast<int>(std::floor(j / 4.0));
    if ((sp.fine_values[j] - 0.0) * (sp.grid_values[last] - 0.0) <= 0.0) ++fires;
  }
  CHECK(fires == 2);
  const OccupationStat stat = sign_change_occupation(sp, 0.0);
  CHECK(stat.measure == fires / 4.0);
  CHECK(stat.n == 1);
  CHECK(stat.n_ref == 4);

  // Entirely above xi.
  CHECK(sign_change_occupation(sp, -1.0).measure == 0.0);

  // Grid value exactly xi on the second step: that step contributes 1 / n.
  SchemePath tie;
  tie.n = 2;
  tie.n_ref = 8;
  tie.grid_values = Vector{{1.0, 0.0, 0.5}};
  tie.fine_values = Vector{{1.0, 0.9, 0.6, 0.3, 0.0, 0.2, 0.1, 0.4, 0.5}};
  CHECK(sign_change_occupation(tie, 0.0).measure == 0.5);
}

TEST_CASE("occupation is zero when no product is non-positive") {
  const Preset cj = make_preset("cubic_jump");
  std::mt19937_64 rng(5);
  for (std::uint64_t m = 0; m < 100; ++m) {
    const SchemePath sp = tamed_euler_path(cj.problem, 16, sample_path(31, m, 256));
    bool any = false;
    for (long j = 1; j <= 256; ++j) {
      const long i = static_cast<long>(std::floor(16.0 * j / 256.0));
      any = any || (sp.fine_values[j] * sp.grid_values[i] <= 0.0);
    }
    const double measure = sign_change_occupation(sp, 0.0).measure;
    if (!any) CHECK(measure == 0.0);
    CHECK(measure >= 0.0);
    CHECK(measure <= 1.0);
  }
}

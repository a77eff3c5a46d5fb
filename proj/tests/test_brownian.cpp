#include "tamedsde/brownian.hpp"

#include <doctest.h>

#include <cmath>

using namespace tamedsde;

TEST_CASE("sample_path is deterministic and stream-separated") {
  const BrownianPath a = sample_path(42, 3, 256);
  const BrownianPath b = sample_path(42, 3, 256);
  const BrownianPath c = sample_path(42, 4, 256);
  const BrownianPath d = sample_path(43, 3, 256);
  CHECK(a.increments() == b.increments());
  CHECK(a.increments() != c.increments());
  CHECK(a.increments() != d.increments());
  CHECK(a.seed() == 42);
  CHECK(a.path_index() == 3);
}

TEST_CASE("sample_path rejects non-dyadic grids") {
  CHECK_THROWS_AS(sample_path(1, 0, 0), InputError);
  CHECK_THROWS_AS(sample_path(1, 0, 1), InputError);
  CHECK_THROWS_AS(sample_path(1, 0, 12), InputError);
  CHECK_NOTHROW(sample_path(1, 0, 2));
}

TEST_CASE("golden increments pin the stream derivation") {
  // Recomputed here from the documented recipe, independent of the class.
  const std::uint64_t seed = 2024, index = 5;
  const long n_ref = 4;
  const std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
  const std::uint64_t key = mix64(seed ^ mix64(index + golden));
  auto unit = [](std::uint64_t w) { return (static_cast<double>(w >> 11) + 0.5) / 9007199254740992.0; };
  const double u1 = unit(mix64(key + 1 * golden));
  const double u2 = unit(mix64(key + 2 * golden));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double expected0 = r * std::cos(2.0 * M_PI * u2) / 2.0;
  const double expected1 = r * std::sin(2.0 * M_PI * u2) / 2.0;
  const BrownianPath p = sample_path(seed, index, n_ref);
  CHECK(p.increments()[0] == doctest::Approx(expected0).epsilon(1e-15));
  CHECK(p.increments()[1] == doctest::Approx(expected1).epsilon(1e-15));
  // SplitMix64 reference output for state 0 after one increment.
  CHECK(mix64(golden) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("pooled increments have variance 1 / n_ref") {
  const long n_ref = 1024;
  const long paths = 977;  // about 10^6 increments
  double sum = 0.0, sum_sq = 0.0;
  long count = 0;
  for (long m = 0; m < paths; ++m) {
    const BrownianPath p = sample_path(11, static_cast<std::uint64_t>(m), n_ref);
    for (double v : p.increments()) {
      sum += v;
      sum_sq += v * v;
      ++count;
    }
  }
  const double var_true = 1.0 / n_ref;
  const double mean = sum / count;
  const double var = sum_sq / count - mean * mean;
  CHECK(std::abs(mean) <= 5.0 * std::sqrt(var_true / count));
  CHECK(std::abs(var - var_true) <= 5.0 * var_true * std::sqrt(2.0 / count));
}

TEST_CASE("coarsen") {
  const BrownianPath p = sample_path(9, 1, 64);
  CHECK(coarsen(p, 64) == p.increments());
  const Vector one = coarsen(p, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(value_at(p, 64)).epsilon(1e-14));
  for (long n = 1; n <= 64; n *= 2) {
    CHECK(coarsen(p, n).sum() == doctest::Approx(p.increments().sum()).epsilon(1e-13));
    // Block j really covers [j / n, (j + 1) / n].
    const Vector c = coarsen(p, n);
    for (long j = 0; j < n; ++j) {
      CHECK(c[j] == doctest::Approx(value_at(p, (j + 1) * 64 / n) - value_at(p, j * 64 / n)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(coarsen(p, 3), InputError);
  CHECK_THROWS_AS(coarsen(p, 128), InputError);
  CHECK_THROWS_AS(coarsen(p, 0), InputError);
}

TEST_CASE("coarsening chains are bit-identical") {
  const BrownianPath p = sample_path(77, 0, 1024);
  for (long m = 1; m <= 1024; m *= 2) {
    const Vector via_m = coarsen(p, m);
    for (long n = 1; n <= m; n *= 2) {
      CHECK(coarsen(via_m, n) == coarsen(p, n));
    }
  }
}

TEST_CASE("value_at") {
  const BrownianPath p = sample_path(5, 2, 32);
  CHECK(value_at(p, 0) == 0.0);
  CHECK(value_at(p, 32) == doctest::Approx(p.increments().sum()).epsilon(1e-14));
  for (long j = 0; j < 32; ++j) {
    CHECK(value_at(p, j + 1) - value_at(p, j) == doctest::Approx(p.increments()[j]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(value_at(p, -1), std::out_of_range);
  CHECK_THROWS_AS(value_at(p, 33), std::out_of_range);
}

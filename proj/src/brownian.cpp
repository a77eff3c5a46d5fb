#include "tamedsde/brownian.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tamedsde {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

Scalar to_open_unit(std::uint64_t w) {
  return (static_cast<Scalar>(w >> 11) + 0.5) * 0x1.0p-53;
}
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

BrownianPath::BrownianPath(std::uint64_t seed, std::uint64_t path_index, long n_ref)
    : seed_(seed), path_index_(path_index), n_ref_(n_ref) {
  if (n_ref < 2 || !is_power_of_two(n_ref)) {
    throw InputError("sample_path: n_ref must be a power of two >= 2, got " + std::to_string(n_ref));
  }
  const std::uint64_t key = mix64(seed ^ mix64(path_index + kGolden));
  const Scalar scale = 1.0 / std::sqrt(static_cast<Scalar>(n_ref));
  increments_.resize(n_ref);
  for (long m = 0; m < n_ref / 2; ++m) {
    const auto c = static_cast<std::uint64_t>(2 * m);
    const Scalar u1 = to_open_unit(mix64(key + (c + 1) * kGolden));
    const Scalar u2 = to_open_unit(mix64(key + (c + 2) * kGolden));
    const Scalar r = std::sqrt(-2.0 * std::log(u1));
    const Scalar theta = 2.0 * std::numbers::pi * u2;
    increments_[2 * m] = scale * r * std::cos(theta);
    increments_[2 * m + 1] = scale * r * std::sin(theta);
  }
  prefix_.resize(n_ref + 1);
  prefix_[0] = 0.0;
  for (long j = 0; j < n_ref; ++j) prefix_[j + 1] = prefix_[j] + increments_[j];
}

BrownianPath sample_path(std::uint64_t seed, std::uint64_t path_index, long n_ref) {
  return BrownianPath(seed, path_index, n_ref);
}

Vector coarsen(const Vector& increments, long n) {
  const auto size = static_cast<long>(increments.size());
  if (n < 1 || !is_power_of_two(size) || size % n != 0) {
    throw InputError("coarsen: n = " + std::to_string(n) + " does not divide " +
                     std::to_string(size));
  }
  Vector out = increments;
  // Pairwise halving: every level's block sums are the same binary tree, so
  // coarsening in stages is bit-identical to coarsening directly.
  for (long len = size; len > n; len /= 2) {
    for (long j = 0; j < len / 2; ++j) out[j] = out[2 * j] + out[2 * j + 1];
  }
  out.conservativeResize(n);
  return out;
}

Vector coarsen(const BrownianPath& path, long n) { return coarsen(path.increments(), n); }

Scalar value_at(const BrownianPath& path, long j) {
  if (j < 0 || j > path.n_ref()) {
    throw std::out_of_range("value_at: index " + std::to_string(j) + " outside [0, n_ref]");
  }
  return path.prefix()[j];
}

}  // namespace tamedsde

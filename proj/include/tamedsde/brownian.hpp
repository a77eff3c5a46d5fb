#pragma once

#include "tamedsde/common.hpp"

#include <cstdint>

namespace tamedsde {

/// Brownian increments on the dyadic grid {i / n_ref} of [0, 1].
///
/// Stream derivation (pinned, golden outputs depend on it):
///   key      = mix64(seed ^ mix64(path_index + 0x9E3779B97F4A7C15))
///   word(c)  = mix64(key + (c + 1) * 0x9E3779B97F4A7C15)
/// where mix64 is the SplitMix64 finalizer. Words 2m and 2m + 1 give two
/// uniforms on (0, 1) from their top 53 bits, turned into increments 2m and
/// 2m + 1 by the Box-Muller transform and scaled by 1 / sqrt(n_ref).
class BrownianPath {
 public:
  BrownianPath(std::uint64_t seed, std::uint64_t path_index, long n_ref);

  long n_ref() const { return n_ref_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t path_index() const { return path_index_; }
  const Vector& increments() const { return increments_; }
  /// W at the reference times; prefix()[0] = 0.
  const Vector& prefix() const { return prefix_; }

 private:
  std::uint64_t seed_;
  std::uint64_t path_index_;
  long n_ref_;
  Vector increments_;
  Vector prefix_;
};

std::uint64_t mix64(std::uint64_t x);

BrownianPath sample_path(std::uint64_t seed, std::uint64_t path_index, long n_ref);

/// Block sums of the fine increments over the n coarse steps. Sums are
/// formed by pairwise halving (a fixed binary tree), so for n | m | n_ref
/// coarsen(coarsen(path, m), n) == coarsen(path, n) bit for bit.
Vector coarsen(const BrownianPath& path, long n);
Vector coarsen(const Vector& increments, long n);

/// W(j / n_ref).
Scalar value_at(const BrownianPath& path, long j);

}  // namespace tamedsde

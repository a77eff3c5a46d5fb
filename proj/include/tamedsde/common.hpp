#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace tamedsde {

using Scalar = double;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Bad arguments: non-finite inputs, wrong sizes, broken preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// sigma vanishes at a drift discontinuity, so no transformation exists.
class DegeneracyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Too many Monte Carlo paths blew past the overflow guard.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace tamedsde

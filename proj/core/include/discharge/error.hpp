/// @file error.hpp
/// @brief Exception types shared by every module.
#pragma once

#include <stdexcept>
#include <string>

namespace discharge {

/// Input or configuration violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (non-convergence, non-finite values, step
/// size bound violated).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace discharge

#pragma once

#include <stdexcept>

namespace thetactl {

/// Invalid input or configuration; the CLI maps this to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time-step restriction violated (RK4 imaginary-axis bound).
class StabilityError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Numerical failure (blow-up, loss of real-valuedness); exit status 1.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace thetactl

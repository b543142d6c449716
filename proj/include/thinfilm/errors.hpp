#pragma once

#include <stdexcept>
#include <string>

namespace thinfilm {

/// Raised when an iterative kernel (root find, quadrature, linear or
/// nonlinear solve) fails to reach its tolerance within budget.
class numerical_error : public std::runtime_error {
public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by case-file loading when a field is missing, malformed, or
/// violates a model invariant. The message names the offending field.
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace thinfilm

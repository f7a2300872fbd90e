#pragma once

#include <stdexcept>
#include <string>

namespace hartogs {

// Input outside the operator/kernel domain (point not in the domain,
// singular denominator, division by zero in exact arithmetic).
class SingularPointError : public std::domain_error {
public:
  explicit SingularPointError(const std::string& what) : std::domain_error(what) {}
};

// Exact integral or pairing does not converge; carries the violated condition.
class DivergenceError : public std::domain_error {
public:
  explicit DivergenceError(const std::string& condition)
      : std::domain_error("divergent integral: " + condition), condition_(condition) {}
  const std::string& condition() const noexcept { return condition_; }

private:
  std::string condition_;
};

// Bad run configuration or malformed request (missing bundle depth, invalid
// grid parameters, unparsable config fields).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A quadrature node produced a non-finite value; carries the node location.
class EvaluationError : public std::runtime_error {
public:
  explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hartogs

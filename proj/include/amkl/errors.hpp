#pragma once

#include <stdexcept>
#include <string>

namespace amkl {

/// Incompatible matrix shapes passed to an operation.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Factorization failed: the matrix is not (numerically) positive definite.
class SingularError : public std::runtime_error {
 public:
  explicit SingularError(const std::string& what) : std::runtime_error(what) {}
};

/// A state violates its constraint set (box constraints of the relaxed form).
class FeasibilityError : public std::runtime_error {
 public:
  explicit FeasibilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterator parameters that cannot produce a convergent sequence.
class StabilityError : public std::invalid_argument {
 public:
  explicit StabilityError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid run configuration; `field` names the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace amkl

#pragma once

#include <stdexcept>
#include <string>

namespace champagne {

/// Argument outside the mathematical domain of an operation (t >= 1, x inside an obstacle, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Index or size too large to represent (shell gap below machine resolution, level limits).
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Parameters that cannot produce a valid configuration (overlapping obstacles, K too small).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed structured input. `pointer` is a JSON pointer to the offending element when known.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what, std::string pointer = {})
      : std::runtime_error(pointer.empty() ? what : pointer + ": " + what), pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace champagne

#pragma once

#include <stdexcept>
#include <string>

namespace qpack {

/// Malformed input: bad indices, length mismatches, out-of-range values.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request exceeds a configured resource bound (qubits, oracle size).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Benchmark configuration that cannot be executed as given.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}
}  // namespace detail

}  // namespace qpack

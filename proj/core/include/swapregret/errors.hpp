#pragma once

#include <stdexcept>
#include <string>

namespace swapregret {

// Shapes disagree (vector lengths, record lengths, malformed files).
struct StructuralError : std::runtime_error {
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

// A scalar parameter is out of its admissible range.
struct ParameterError : std::invalid_argument {
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A reward entry fell outside the declared [lo, lo + width] range.
struct WidthViolation : std::runtime_error {
  explicit WidthViolation(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called outside its legal phase (e.g. past the horizon).
struct LifecycleError : std::runtime_error {
  explicit LifecycleError(const std::string& what) : std::runtime_error(what) {}
};

// A dense/exhaustive operation was requested beyond its size threshold.
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// A derived configuration is unrepresentable (e.g. horizon overflow).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace swapregret

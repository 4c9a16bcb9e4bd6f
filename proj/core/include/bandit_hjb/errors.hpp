#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bhjb {

/// Bad configuration, unparsable spec file, invalid CLI input. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A reward family was asked to do something it does not support.
class UnsupportedFamilyError : public ConfigError {
public:
  explicit UnsupportedFamilyError(const std::string& what) : ConfigError(what) {}
};

/// Limit probe at two horizons disagreed: the chosen scaling factor does not
/// produce finite limit constants for this prior sequence.
class DivergentScalingError : public ConfigError {
public:
  explicit DivergentScalingError(const std::string& what) : ConfigError(what) {}
};

/// A history led to non-positive posterior hyperparameters.
class InvalidHistoryError : public std::runtime_error {
public:
  explicit InvalidHistoryError(const std::string& what) : std::runtime_error(what) {}
};

/// Linear-algebra failure (singular system, non-SPD accumulation).
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Explicit-scheme mesh violates its stability inequality. CLI exit code 2.
class StabilityError : public std::runtime_error {
public:
  StabilityError(const std::string& what, double suggested_dt)
      : std::runtime_error(what), suggested_dt(suggested_dt) {}
  double suggested_dt;
};

/// Requested table/grid exceeds the configured memory cap. CLI exit code 3.
class CapacityError : public std::runtime_error {
public:
  CapacityError(const std::string& what, std::uint64_t required_bytes)
      : std::runtime_error(what), required_bytes(required_bytes) {}
  std::uint64_t required_bytes;
};

/// Index policy consulted before every arm has been pulled once.
class RequiresInitializationError : public std::runtime_error {
public:
  explicit RequiresInitializationError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace bhjb

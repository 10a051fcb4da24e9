#pragma once

#include <stdexcept>
#include <string>

namespace framecast {

// Error taxonomy used across the library. Plain argument violations use
// std::invalid_argument directly; everything below derives from
// std::runtime_error so callers can still catch broadly.

// Non-finite values where finite math was required (loss blow-ups,
// NaN gradients, degenerate normalizations).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A required input artifact is absent (missing frame, missing file).
class MissingDataError : public std::runtime_error {
 public:
  explicit MissingDataError(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent or unusable configuration (bad config file, mismatched
// checkpoint kinds, contradictory pipeline specs).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem and serialization failures (unreadable file, bad magic,
// truncated payload).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace framecast

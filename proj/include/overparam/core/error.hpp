#pragma once

#include <stdexcept>
#include <string>

namespace overparam {

/// A scalar argument is outside its documented domain (negative variance, p < 1, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

/// Input data has the wrong shape or is otherwise unusable.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical construction (root finding, calibration) did not reach its target.
class ConstructionFailure : public std::runtime_error {
 public:
  explicit ConstructionFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed configuration file or command line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const char* msg) {
  if (!ok) throw InvalidParameter(msg);
}

inline void require_input(bool ok, const std::string& msg) {
  if (!ok) throw InvalidInput(msg);
}

}  // namespace overparam

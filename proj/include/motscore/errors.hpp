#pragma once

#include <stdexcept>
#include <string>

namespace motscore {

// Invariant or schema violation. Messages carry the offending path or
// component label where one is known. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// No feasible complete column assignment exists. CLI exit code 2.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Instance exceeds the enumeration/oracle scale caps. CLI exit code 2.
class SizeLimitError : public std::runtime_error {
 public:
  explicit SizeLimitError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation not defined for this posterior family.
class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace motscore

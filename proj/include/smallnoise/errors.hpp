#pragma once

#include <stdexcept>
#include <string>

namespace smallnoise {

/// Invalid arguments, malformed configuration, scheme mismatches.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure at runtime: divergence, non-finite values, failed factorizations.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace smallnoise

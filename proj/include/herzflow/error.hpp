#pragma once

#include <stdexcept>
#include <string>

namespace herzflow {

/// Raised when an input violates a documented precondition.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Two operands live on different lattices or time grids.
class MismatchError : public std::invalid_argument {
 public:
  explicit MismatchError(const std::string& what) : std::invalid_argument(what) {}
};

/// The high-frequency tail of the data never drops below the splitting threshold on this lattice.
class SplitUnreachableError : public std::runtime_error {
 public:
  explicit SplitUnreachableError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

}  // namespace herzflow

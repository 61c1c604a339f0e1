#pragma once

#include <stdexcept>
#include <string>

namespace ganspec {

/// Raised when a dimension constraint fails (kernel larger than image,
/// non-divisible sizes, crop out of range).
class SizeError : public std::invalid_argument {
 public:
  explicit SizeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when tensors have incompatible shapes or channel counts.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// File, codec and format failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ganspec

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geoknn {

// Bad caller input: sizes, ranges, k > n and similar.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition was violated (e.g. volume density at or beyond
// the injectivity radius). Callers are expected to clamp before calling.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed or missing input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The adaptive bandwidth collapsed to zero because at least k sample points
// coincide with the query point.
class DegenerateBandwidth : public std::runtime_error {
 public:
  explicit DegenerateBandwidth(std::size_t duplicates)
      : std::runtime_error("degenerate bandwidth: " + std::to_string(duplicates) +
                           " sample point(s) coincide with the query point"),
        duplicates_(duplicates) {}

  std::size_t duplicates() const noexcept { return duplicates_; }

 private:
  std::size_t duplicates_;
};

}  // namespace geoknn
